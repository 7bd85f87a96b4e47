// Copyright 2026-present the nanorag authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include "nanorag/embed.hpp"
#include "nanorag/errors.hpp"
#include "nanorag/simd/kernels.hpp"

namespace nanorag {

namespace {

void require_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) throw InvalidArgument("embedding has a non-finite component");
    }
}

}  // namespace

EmbeddingVector EmbeddingVector::normalize(std::span<const double> raw) {
    if (raw.empty()) throw InvalidArgument("cannot normalize an empty vector");
    require_finite(raw);
    const double norm = std::sqrt(simd::scalar::dot(raw.data(), raw.data(), raw.size()));
    if (!(norm >= 1e-12)) throw ZeroVector("vector norm below 1e-12");
    std::vector<double> out(raw.begin(), raw.end());
    for (double& x : out) x /= norm;
    return EmbeddingVector(std::move(out));
}

EmbeddingVector EmbeddingVector::from_unit(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("empty embedding");
    require_finite(values);
    const double norm = std::sqrt(simd::scalar::dot(values.data(), values.data(), values.size()));
    if (std::abs(norm - 1.0) >= 1e-9) throw InvalidArgument("embedding is not unit-norm");
    return EmbeddingVector(std::move(values));
}

EmbeddingVector Embedder::embed_text(const std::string& text) {
    auto out = embed_batch(std::span<const std::string>(&text, 1));
    if (out.size() != 1) throw DimensionMismatch("embedder returned wrong number of vectors");
    return std::move(out.front());
}

}  // namespace nanorag
