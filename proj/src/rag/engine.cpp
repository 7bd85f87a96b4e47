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
#include <chrono>

#include "nanorag/errors.hpp"
#include "nanorag/rag.hpp"

namespace nanorag {

std::int64_t now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::vector<HistoryTurn> ChatSession::history() const {
    std::vector<HistoryTurn> out;
    out.reserve(turns.size());
    for (const auto& t : turns) out.push_back({t.question, t.answer.text});
    return out;
}

void ChatSession::append(std::string question, Answer answer, std::int64_t now) {
    std::int64_t ts = std::max(now, created_at_ms);
    if (!turns.empty()) ts = std::max(ts, turns.back().timestamp_ms);
    turns.push_back(SessionTurn{std::move(question), std::move(answer), ts});
}

std::string docs_sidecar_path(const std::string& snapshot_path) { return snapshot_path + ".docs.jsonl"; }

Engine::Engine(std::shared_ptr<Embedder> embedder, std::shared_ptr<ChatClient> chat, ChunkingConfig chunking,
               const Tokenizer& tokenizer)
    : embedder_(std::move(embedder)),
      chat_(std::move(chat)),
      chunking_(chunking),
      tokenizer_(tokenizer),
      index_(embedder_ ? embedder_->dim() : 0) {
    chunking_.validate();
}

IngestOutcome Engine::ingest(const CorpusRecord& record) {
    auto doc = make_document(record.meta, record.text, tokenizer_);
    std::lock_guard lock(write_mu_);
    if (store_.contains(doc.doc_id)) return IngestOutcome::Duplicate;

    auto chunks = chunk_document(doc, chunking_, tokenizer_);
    std::vector<std::string> texts;
    texts.reserve(chunks.size());
    for (const auto& c : chunks) texts.push_back(c.text);
    const auto vectors = embedder_->embed_batch(texts);
    if (vectors.size() != chunks.size()) throw DimensionMismatch("embedder returned wrong number of vectors");

    const std::string doc_id = doc.doc_id;
    std::vector<std::pair<std::string, std::string>> ids;
    for (const auto& c : chunks) ids.emplace_back(c.chunk_id, c.doc_id);
    // Metadata goes in before vectors so a concurrent search never sees a
    // hit it cannot resolve.
    store_.add(std::move(doc), std::move(chunks));
    try {
        for (std::size_t i = 0; i < ids.size(); ++i) index_.insert(ids[i].first, ids[i].second, vectors[i]);
    } catch (...) {
        index_.remove_document(doc_id);
        store_.remove(doc_id);
        throw;
    }
    return IngestOutcome::Ingested;
}

IngestCounts Engine::ingest_lines(std::span<const std::string> lines) {
    IngestCounts counts;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            const auto rec = parse_corpus_line(lines[i]);
            if (ingest(rec) == IngestOutcome::Ingested) {
                ++counts.ingested;
            } else {
                ++counts.skipped_duplicates;
            }
        } catch (const Error& e) {
            ++counts.failed;
            counts.errors.push_back("line " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return counts;
}

std::size_t Engine::remove_document(std::string_view doc_id) {
    std::lock_guard lock(write_mu_);
    const auto n = index_.remove_document(doc_id);
    store_.remove(doc_id);
    return n;
}

std::vector<RetrievalHit> Engine::retrieve(const EmbeddingVector& query, const RetrievalConfig& cfg) const {
    cfg.validate();
    if (!cfg.rerank_enabled) return index_.search_top_k(query, cfg.k);
    const auto pool = index_.search_top_k(query, std::max(cfg.rerank_pool, cfg.k));
    return rerank(query, pool, cfg, index_);
}

Answer Engine::answer_query(const std::string& question, ChatSession& session, const RetrievalConfig& retrieval,
                            const GenerationConfig& generation) {
    if (question.empty()) throw InvalidArgument("question must be non-empty");
    retrieval.validate();
    generation.validate();
    if (!chat_) throw EndpointUnavailable("no chat endpoint configured (set CHAT_URL)");

    const auto query = embedder_->embed_query(question);
    const auto hits = retrieve(query, retrieval);

    std::vector<ContextBlock> blocks;
    blocks.reserve(hits.size());
    for (const auto& h : hits) {
        auto chunk = store_.chunk(h.chunk_id);
        auto meta = store_.meta(h.doc_id);
        if (!chunk || !meta) throw MissingMetadata("no stored text or metadata for chunk " + h.chunk_id);
        blocks.push_back(ContextBlock{h.chunk_id, std::move(chunk->text), std::move(*meta), h.rank});
    }

    const auto prompt = assemble_prompt(question, blocks, session.history(), generation, tokenizer_);

    Answer answer;
    answer.config_used = generation;
    // Only hits whose text reached the model are cited.
    for (const auto& b : prompt.context_blocks) {
        const auto it = std::find_if(hits.begin(), hits.end(), [&](const RetrievalHit& h) {
            return h.chunk_id == b.chunk_id;
        });
        answer.hits.push_back(*it);
    }
    answer.references = format_references(answer.hits, [this](std::string_view id) { return store_.meta(id); });
    answer.text = generate(*chat_, prompt, generation);

    session.append(question, answer, now_ms());
    return answer;
}

void Engine::save(const std::string& path) const {
    std::lock_guard lock(write_mu_);
    store_.save(docs_sidecar_path(path));
    index_.snapshot(path);
}

void Engine::load(const std::string& path) {
    auto index = VectorIndex::load(path);
    if (index.dim() != embedder_->dim()) {
        throw DimensionMismatch("snapshot dim " + std::to_string(index.dim()) + " differs from embedder dim " +
                                std::to_string(embedder_->dim()));
    }
    auto store = DocumentStore::load(docs_sidecar_path(path));
    for (const auto& e : index.entries()) {
        if (!store.chunk(e.chunk_id)) throw CorruptSnapshot("snapshot chunk has no stored text: " + e.chunk_id);
    }
    std::lock_guard lock(write_mu_);
    index_ = std::move(index);
    store_ = std::move(store);
}

}  // namespace nanorag
