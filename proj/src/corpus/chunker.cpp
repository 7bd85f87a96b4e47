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

#include "nanorag/corpus.hpp"
#include "nanorag/errors.hpp"

namespace nanorag {

void ChunkingConfig::validate() const {
    if (chunk_tokens == 0) throw InvalidArgument("chunk_tokens must be positive");
    if (doc_token_limit == 0) throw InvalidArgument("doc_token_limit must be positive");
    if (overlap_tokens >= chunk_tokens) throw InvalidArgument("overlap_tokens must be < chunk_tokens");
    if (chunk_tokens > doc_token_limit) throw InvalidArgument("chunk_tokens must be <= doc_token_limit");
}

std::string make_chunk_id(std::string_view doc_id, std::size_t seq) {
    std::string id(doc_id);
    id += '#';
    id += std::to_string(seq);
    return id;
}

std::vector<std::pair<std::size_t, std::size_t>> chunk_windows(std::size_t n, const ChunkingConfig& cfg) {
    cfg.validate();
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (n == 0) return out;
    const std::size_t stride = cfg.stride();
    for (std::size_t start = 0;; start += stride) {
        const std::size_t end = std::min(start + cfg.chunk_tokens, n);
        out.emplace_back(start, end);
        if (end == n) break;
    }
    return out;
}

std::vector<Chunk> chunk_document(const Document& doc, const ChunkingConfig& cfg, const Tokenizer& tokenizer) {
    cfg.validate();
    const std::string text = normalize_text(doc.text);
    const auto tokens = tokenizer.tokenize(text);
    if (tokens.empty()) throw EmptyDocument("document " + doc.doc_id + " has no tokens");

    std::vector<Chunk> chunks;
    const auto windows = chunk_windows(tokens.size(), cfg);
    chunks.reserve(windows.size());
    for (std::size_t seq = 0; seq < windows.size(); ++seq) {
        const auto [start, end] = windows[seq];
        Chunk c;
        c.chunk_id = make_chunk_id(doc.doc_id, seq);
        c.doc_id = doc.doc_id;
        c.seq = seq;
        c.token_start = start;
        c.token_end = end;
        const std::size_t byte_begin = tokens[start].begin;
        const std::size_t byte_end = tokens[end - 1].end;
        c.text = text.substr(byte_begin, byte_end - byte_begin);
        chunks.push_back(std::move(c));
    }
    return chunks;
}

}  // namespace nanorag
