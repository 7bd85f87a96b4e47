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

#include "nanorag/embed.hpp"
#include "nanorag/errors.hpp"

namespace nanorag {

std::size_t reference_bucket(std::string_view token, std::size_t dim) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : token) {
        if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h % dim);
}

EmbeddingVector reference_embed(std::string_view text, std::size_t dim) {
    if (dim < 2) throw InvalidArgument("reference_embed needs dim >= 2");
    std::vector<double> counts(dim, 0.0);
    const auto spans = reference_tokenizer().tokenize(text);
    if (spans.empty()) throw ZeroVector("text has no tokens to embed");
    for (const auto& s : spans) counts[reference_bucket(text.substr(s.begin, s.end - s.begin), dim)] += 1.0;
    return EmbeddingVector::normalize(counts);
}

ReferenceEmbedder::ReferenceEmbedder(std::size_t dim) : dim_(dim) {
    if (dim < 2) throw InvalidArgument("reference embedder needs dim >= 2");
}

std::vector<EmbeddingVector> ReferenceEmbedder::embed_batch(std::span<const std::string> texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(reference_embed(t, dim_));
    return out;
}

}  // namespace nanorag
