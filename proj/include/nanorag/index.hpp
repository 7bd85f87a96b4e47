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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nanorag/embed.hpp"

namespace nanorag {

struct IndexEntry {
    std::string chunk_id;
    std::string doc_id;
    EmbeddingVector vector;
    std::uint64_t insert_seq = 0;
};

struct RetrievalHit {
    std::string chunk_id;
    std::string doc_id;
    double score = 0.0;
    std::size_t rank = 0;

    bool operator==(const RetrievalHit&) const = default;
};

struct RetrievalConfig {
    std::size_t k = 3;
    bool rerank_enabled = true;
    std::size_t rerank_pool = 10;
    double mmr_lambda = 0.7;

    void validate() const;
};

/// sum(a*b) / (||a|| * ||b||), clamped to [-1, 1]. Accepts unnormalized
/// input. Throws DimensionMismatch on unequal lengths, ZeroVector when either
/// norm is below 1e-12.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// Rounds to the nearest 1e-9 and clamps to [-1, 1]. Every score the index
/// reports goes through this, so ties do not depend on the kernel's
/// summation order.
double round_score(double raw);

/// Exact in-memory cosine index. Many concurrent readers or one writer.
///
/// Rows are stored contiguously in insertion order, which is also
/// insert_seq order, so a row index doubles as the tie-break key.
class VectorIndex {
public:
    explicit VectorIndex(std::size_t dim);

    VectorIndex(VectorIndex&& other) noexcept;
    VectorIndex& operator=(VectorIndex&& other) noexcept;
    VectorIndex(const VectorIndex&) = delete;
    VectorIndex& operator=(const VectorIndex&) = delete;

    std::size_t dim() const { return dim_; }
    std::size_t size() const;
    std::size_t document_count() const;
    bool contains(std::string_view chunk_id) const;

    /// Returns the assigned insert_seq. Throws DuplicateChunk,
    /// DimensionMismatch or InvalidArgument (empty ids).
    std::uint64_t insert(std::string chunk_id, std::string doc_id, const EmbeddingVector& vector);

    /// Normalizes `raw` first; throws ZeroVector for degenerate input.
    std::uint64_t insert_raw(std::string chunk_id, std::string doc_id, std::span<const double> raw);

    std::size_t remove_document(std::string_view doc_id);

    /// Top `k` entries by cosine, score descending then insert_seq ascending.
    std::vector<RetrievalHit> search_top_k(const EmbeddingVector& query, std::size_t k) const;

    std::optional<EmbeddingVector> vector(std::string_view chunk_id) const;

    /// Consistent copy of all entries in insert_seq order.
    std::vector<IndexEntry> entries() const;

    /// Binary snapshot (see snapshot.cpp for layout).
    std::string serialize() const;
    static VectorIndex deserialize(std::string_view bytes);

    /// Writes atomically via a temporary file. Throws IoError.
    void snapshot(const std::string& path) const;
    /// Throws IoError or CorruptSnapshot.
    static VectorIndex load(const std::string& path);

private:
    struct Row {
        std::string chunk_id;
        std::string doc_id;
        std::uint64_t insert_seq;
    };

    std::uint64_t insert_locked(std::string chunk_id, std::string doc_id, std::span<const double> unit,
                                std::optional<std::uint64_t> seq);
    void rebuild_lookup_locked();

    mutable std::shared_mutex mu_;
    std::size_t dim_;
    std::vector<double> vectors_;
    std::vector<Row> rows_;
    std::unordered_map<std::string, std::size_t> by_chunk_;
    std::unordered_map<std::string, std::size_t> doc_refcount_;
    std::uint64_t next_seq_ = 1;
};

using VectorLookup = std::function<std::optional<EmbeddingVector>(std::string_view chunk_id)>;

/// Greedy maximal-marginal-relevance selection of cfg.k hits from `pool`.
/// Relevance is round_score(query . c); redundancy is the largest cosine
/// between c and anything already picked. Ties go to the earlier pool entry.
/// Pool members whose vectors cannot be found are dropped.
std::vector<RetrievalHit> rerank(const EmbeddingVector& query, std::span<const RetrievalHit> pool,
                                 const RetrievalConfig& cfg, const VectorLookup& lookup);

std::vector<RetrievalHit> rerank(const EmbeddingVector& query, std::span<const RetrievalHit> pool,
                                 const RetrievalConfig& cfg, const VectorIndex& index);

}  // namespace nanorag
