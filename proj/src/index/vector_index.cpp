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
#include <cmath>
#include <mutex>
#include <numeric>

#include "nanorag/errors.hpp"
#include "nanorag/index.hpp"
#include "nanorag/simd/kernels.hpp"

namespace nanorag {

void RetrievalConfig::validate() const {
    if (k == 0) throw InvalidArgument("k must be positive");
    if (rerank_pool == 0) throw InvalidArgument("rerank_pool must be positive");
    if (rerank_pool < k) throw InvalidArgument("rerank_pool must be >= k");
    if (!(mmr_lambda >= 0.0 && mmr_lambda <= 1.0)) throw InvalidArgument("mmr_lambda must be in [0, 1]");
}

double round_score(double raw) {
    const double r = std::nearbyint(raw * 1e9) / 1e9;
    return std::clamp(r, -1.0, 1.0);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("cosine_similarity: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    const double na = std::sqrt(simd::dot(a, a));
    const double nb = std::sqrt(simd::dot(b, b));
    if (!(na >= 1e-12) || !(nb >= 1e-12)) throw ZeroVector("cosine_similarity of a zero vector");
    return std::clamp(simd::dot(a, b) / (na * nb), -1.0, 1.0);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("cosine_similarity: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    }
    return std::clamp(simd::dot(a.values(), b.values()), -1.0, 1.0);
}

VectorIndex::VectorIndex(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw InvalidArgument("index dim must be positive");
}

VectorIndex::VectorIndex(VectorIndex&& other) noexcept {
    std::unique_lock lock(other.mu_);
    dim_ = other.dim_;
    vectors_ = std::move(other.vectors_);
    rows_ = std::move(other.rows_);
    by_chunk_ = std::move(other.by_chunk_);
    doc_refcount_ = std::move(other.doc_refcount_);
    next_seq_ = other.next_seq_;
}

VectorIndex& VectorIndex::operator=(VectorIndex&& other) noexcept {
    if (this == &other) return *this;
    std::scoped_lock lock(mu_, other.mu_);
    dim_ = other.dim_;
    vectors_ = std::move(other.vectors_);
    rows_ = std::move(other.rows_);
    by_chunk_ = std::move(other.by_chunk_);
    doc_refcount_ = std::move(other.doc_refcount_);
    next_seq_ = other.next_seq_;
    return *this;
}

std::size_t VectorIndex::size() const {
    std::shared_lock lock(mu_);
    return rows_.size();
}

std::size_t VectorIndex::document_count() const {
    std::shared_lock lock(mu_);
    return doc_refcount_.size();
}

bool VectorIndex::contains(std::string_view chunk_id) const {
    std::shared_lock lock(mu_);
    return by_chunk_.count(std::string(chunk_id)) != 0;
}

std::uint64_t VectorIndex::insert(std::string chunk_id, std::string doc_id, const EmbeddingVector& vector) {
    std::unique_lock lock(mu_);
    return insert_locked(std::move(chunk_id), std::move(doc_id), vector.values(), std::nullopt);
}

std::uint64_t VectorIndex::insert_raw(std::string chunk_id, std::string doc_id, std::span<const double> raw) {
    const auto unit = EmbeddingVector::normalize(raw);
    return insert(std::move(chunk_id), std::move(doc_id), unit);
}

std::uint64_t VectorIndex::insert_locked(std::string chunk_id, std::string doc_id, std::span<const double> unit,
                                         std::optional<std::uint64_t> seq) {
    if (chunk_id.empty() || doc_id.empty()) throw InvalidArgument("chunk_id and doc_id must be non-empty");
    if (unit.size() != dim_) {
        throw DimensionMismatch("vector has dim " + std::to_string(unit.size()) + ", index expects " +
                                std::to_string(dim_));
    }
    if (by_chunk_.count(chunk_id)) throw DuplicateChunk("chunk already indexed: " + chunk_id);
    const std::uint64_t assigned = seq.value_or(next_seq_);
    next_seq_ = std::max(next_seq_, assigned + 1);

    vectors_.insert(vectors_.end(), unit.begin(), unit.end());
    by_chunk_.emplace(chunk_id, rows_.size());
    ++doc_refcount_[doc_id];
    rows_.push_back(Row{std::move(chunk_id), std::move(doc_id), assigned});
    return assigned;
}

void VectorIndex::rebuild_lookup_locked() {
    by_chunk_.clear();
    by_chunk_.reserve(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) by_chunk_.emplace(rows_[i].chunk_id, i);
}

std::size_t VectorIndex::remove_document(std::string_view doc_id) {
    std::unique_lock lock(mu_);
    const auto it = doc_refcount_.find(std::string(doc_id));
    if (it == doc_refcount_.end()) return 0;
    const std::size_t removed = it->second;
    doc_refcount_.erase(it);

    std::size_t out = 0;
    for (std::size_t in = 0; in < rows_.size(); ++in) {
        if (rows_[in].doc_id == doc_id) continue;
        if (out != in) {
            rows_[out] = std::move(rows_[in]);
            std::copy_n(vectors_.begin() + static_cast<std::ptrdiff_t>(in * dim_), dim_,
                        vectors_.begin() + static_cast<std::ptrdiff_t>(out * dim_));
        }
        ++out;
    }
    rows_.resize(out);
    vectors_.resize(out * dim_);
    rebuild_lookup_locked();
    return removed;
}

std::vector<RetrievalHit> VectorIndex::search_top_k(const EmbeddingVector& query, std::size_t k) const {
    if (query.dim() != dim_) {
        throw DimensionMismatch("query has dim " + std::to_string(query.dim()) + ", index expects " +
                                std::to_string(dim_));
    }
    std::shared_lock lock(mu_);
    const std::size_t n = rows_.size();
    if (n == 0 || k == 0) return {};

    std::vector<double> scores(n);
    simd::dot_rows(query.values(), vectors_, dim_, scores);
    for (double& s : scores) s = round_score(s);

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    const std::size_t take = std::min(k, n);
    // Row order is insert_seq order, so the row index is the tie-break.
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return a < b;
                      });

    std::vector<RetrievalHit> hits;
    hits.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        const auto row = order[i];
        hits.push_back(RetrievalHit{rows_[row].chunk_id, rows_[row].doc_id, scores[row], i + 1});
    }
    return hits;
}

std::optional<EmbeddingVector> VectorIndex::vector(std::string_view chunk_id) const {
    std::shared_lock lock(mu_);
    const auto it = by_chunk_.find(std::string(chunk_id));
    if (it == by_chunk_.end()) return std::nullopt;
    const auto* begin = vectors_.data() + it->second * dim_;
    return EmbeddingVector::from_unit(std::vector<double>(begin, begin + dim_));
}

std::vector<IndexEntry> VectorIndex::entries() const {
    std::shared_lock lock(mu_);
    std::vector<IndexEntry> out;
    out.reserve(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto* begin = vectors_.data() + i * dim_;
        out.push_back(IndexEntry{rows_[i].chunk_id, rows_[i].doc_id,
                                 EmbeddingVector::from_unit(std::vector<double>(begin, begin + dim_)),
                                 rows_[i].insert_seq});
    }
    return out;
}

}  // namespace nanorag
