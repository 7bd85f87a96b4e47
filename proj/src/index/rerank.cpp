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

#include <algorithm>
#include <limits>

#include "nanorag/errors.hpp"
#include "nanorag/index.hpp"
#include "nanorag/simd/kernels.hpp"

namespace nanorag {

std::vector<RetrievalHit> rerank(const EmbeddingVector& query, std::span<const RetrievalHit> pool,
                                 const RetrievalConfig& cfg, const VectorLookup& lookup) {
    cfg.validate();

    struct Candidate {
        const RetrievalHit* hit;
        EmbeddingVector vec;
        double relevance;
    };
    std::vector<Candidate> cands;
    cands.reserve(pool.size());
    for (const auto& h : pool) {
        auto v = lookup(h.chunk_id);
        if (!v) continue;
        if (v->dim() != query.dim()) throw DimensionMismatch("rerank: pool vector dim differs from query");
        const double rel = round_score(simd::dot(query.values(), v->values()));
        cands.push_back(Candidate{&h, std::move(*v), rel});
    }

    const std::size_t want = std::min(cfg.k, cands.size());
    const double lambda = cfg.mmr_lambda;
    std::vector<bool> taken(cands.size(), false);
    // Largest similarity from each candidate to anything picked so far.
    std::vector<double> redundancy(cands.size(), -std::numeric_limits<double>::infinity());

    std::vector<RetrievalHit> out;
    out.reserve(want);
    for (std::size_t step = 0; step < want; ++step) {
        std::size_t best = cands.size();
        double best_value = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (taken[i]) continue;
            // The first pick is pure relevance regardless of lambda.
            const double value =
                step == 0 ? cands[i].relevance : lambda * cands[i].relevance - (1.0 - lambda) * redundancy[i];
            if (best == cands.size() || value > best_value) {
                best = i;
                best_value = value;
            }
        }
        taken[best] = true;
        RetrievalHit picked = *cands[best].hit;
        picked.score = cands[best].relevance;
        picked.rank = step + 1;
        out.push_back(std::move(picked));

        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (taken[i]) continue;
            const double sim = round_score(simd::dot(cands[i].vec.values(), cands[best].vec.values()));
            redundancy[i] = std::max(redundancy[i], sim);
        }
    }
    return out;
}

std::vector<RetrievalHit> rerank(const EmbeddingVector& query, std::span<const RetrievalHit> pool,
                                 const RetrievalConfig& cfg, const VectorIndex& index) {
    return rerank(query, pool, cfg, [&index](std::string_view id) { return index.vector(id); });
}

}  // namespace nanorag
