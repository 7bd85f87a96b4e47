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

#include <filesystem>
#include <fstream>
#include <mutex>

#include "json.hpp"
#include "nanorag/errors.hpp"
#include "nanorag/store.hpp"

namespace nanorag {

using json = nlohmann::json;

DocumentStore::DocumentStore(DocumentStore&& other) noexcept {
    std::unique_lock lock(other.mu_);
    order_ = std::move(other.order_);
    docs_ = std::move(other.docs_);
    chunk_loc_ = std::move(other.chunk_loc_);
}

DocumentStore& DocumentStore::operator=(DocumentStore&& other) noexcept {
    if (this == &other) return *this;
    std::scoped_lock lock(mu_, other.mu_);
    order_ = std::move(other.order_);
    docs_ = std::move(other.docs_);
    chunk_loc_ = std::move(other.chunk_loc_);
    return *this;
}

bool DocumentStore::add(Document doc, std::vector<Chunk> chunks) {
    std::unique_lock lock(mu_);
    if (docs_.count(doc.doc_id)) return false;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (chunk_loc_.count(chunks[i].chunk_id)) {
            throw DuplicateChunk("chunk already stored: " + chunks[i].chunk_id);
        }
    }
    const std::string id = doc.doc_id;
    for (std::size_t i = 0; i < chunks.size(); ++i) chunk_loc_.emplace(chunks[i].chunk_id, std::make_pair(id, i));
    order_.push_back(id);
    docs_.emplace(id, Entry{std::move(doc), std::move(chunks)});
    return true;
}

bool DocumentStore::contains(std::string_view doc_id) const {
    std::shared_lock lock(mu_);
    return docs_.count(std::string(doc_id)) != 0;
}

std::size_t DocumentStore::remove(std::string_view doc_id) {
    std::unique_lock lock(mu_);
    const auto it = docs_.find(std::string(doc_id));
    if (it == docs_.end()) return 0;
    const std::size_t n = it->second.chunks.size();
    for (const auto& c : it->second.chunks) chunk_loc_.erase(c.chunk_id);
    docs_.erase(it);
    std::erase(order_, std::string(doc_id));
    return n;
}

std::optional<DocumentMeta> DocumentStore::meta(std::string_view doc_id) const {
    std::shared_lock lock(mu_);
    const auto it = docs_.find(std::string(doc_id));
    if (it == docs_.end()) return std::nullopt;
    return it->second.doc.meta;
}

std::optional<Chunk> DocumentStore::chunk(std::string_view chunk_id) const {
    std::shared_lock lock(mu_);
    const auto it = chunk_loc_.find(std::string(chunk_id));
    if (it == chunk_loc_.end()) return std::nullopt;
    return docs_.at(it->second.first).chunks.at(it->second.second);
}

std::size_t DocumentStore::document_count() const {
    std::shared_lock lock(mu_);
    return docs_.size();
}

std::size_t DocumentStore::chunk_count() const {
    std::shared_lock lock(mu_);
    return chunk_loc_.size();
}

std::vector<std::pair<Document, std::vector<Chunk>>> DocumentStore::snapshot() const {
    std::shared_lock lock(mu_);
    std::vector<std::pair<Document, std::vector<Chunk>>> out;
    out.reserve(order_.size());
    for (const auto& id : order_) {
        const auto& e = docs_.at(id);
        out.emplace_back(e.doc, e.chunks);
    }
    return out;
}

void DocumentStore::save(const std::string& path) const {
    const auto docs = snapshot();
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp);
        for (const auto& [doc, chunks] : docs) {
            auto line = nlohmann::ordered_json::parse(render_corpus_line(doc.meta, doc.text));
            auto arr = nlohmann::ordered_json::array();
            for (const auto& c : chunks) {
                arr.push_back({{"chunk_id", c.chunk_id},
                               {"seq", c.seq},
                               {"token_start", c.token_start},
                               {"token_end", c.token_end},
                               {"text", c.text}});
            }
            line["token_count"] = doc.token_count;
            line["chunks"] = std::move(arr);
            out << line.dump() << '\n';
        }
        out.flush();
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move document store into place at " + path + ": " + ec.message());
}

DocumentStore DocumentStore::load(const std::string& path) {
    DocumentStore store;
    for (const auto& line : read_lines(path)) {
        const auto rec = parse_corpus_line(line);
        Document doc;
        doc.meta = rec.meta;
        doc.meta.doi = canonical_doi(doc.meta.doi);
        doc.doc_id = doc.meta.doi;
        doc.text = rec.text;
        std::vector<Chunk> chunks;
        try {
            const auto j = json::parse(line);
            doc.token_count = j.at("token_count").get<std::size_t>();
            for (const auto& c : j.at("chunks")) {
                Chunk chunk;
                chunk.chunk_id = c.at("chunk_id").get<std::string>();
                chunk.doc_id = doc.doc_id;
                chunk.seq = c.at("seq").get<std::size_t>();
                chunk.token_start = c.at("token_start").get<std::size_t>();
                chunk.token_end = c.at("token_end").get<std::size_t>();
                chunk.text = c.at("text").get<std::string>();
                chunks.push_back(std::move(chunk));
            }
        } catch (const json::exception& e) {
            throw CorruptSnapshot("document store line is malformed: " + std::string(e.what()));
        }
        if (!store.add(std::move(doc), std::move(chunks))) {
            throw CorruptSnapshot("document store repeats doc " + rec.meta.doi);
        }
    }
    return store;
}

}  // namespace nanorag
