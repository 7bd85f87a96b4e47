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
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nanorag/corpus.hpp"

namespace nanorag {

/// Ingested documents and their chunk texts, keyed by doc_id / chunk_id.
/// Thread-safe; lookups return copies.
class DocumentStore {
public:
    DocumentStore() = default;
    DocumentStore(DocumentStore&& other) noexcept;
    DocumentStore& operator=(DocumentStore&& other) noexcept;

    /// False (and no change) if the doc_id is already present.
    bool add(Document doc, std::vector<Chunk> chunks);
    bool contains(std::string_view doc_id) const;
    std::size_t remove(std::string_view doc_id);

    std::optional<DocumentMeta> meta(std::string_view doc_id) const;
    std::optional<Chunk> chunk(std::string_view chunk_id) const;

    std::size_t document_count() const;
    std::size_t chunk_count() const;

    /// Documents with their chunks, in insertion order.
    std::vector<std::pair<Document, std::vector<Chunk>>> snapshot() const;

    /// One JSON line per document: the corpus fields plus a "chunks" array.
    void save(const std::string& path) const;
    static DocumentStore load(const std::string& path);

private:
    struct Entry {
        Document doc;
        std::vector<Chunk> chunks;
    };

    mutable std::shared_mutex mu_;
    std::vector<std::string> order_;
    std::unordered_map<std::string, Entry> docs_;
    std::unordered_map<std::string, std::pair<std::string, std::size_t>> chunk_loc_;
};

}  // namespace nanorag
