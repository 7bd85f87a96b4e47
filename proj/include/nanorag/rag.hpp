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
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nanorag/corpus.hpp"
#include "nanorag/embed.hpp"
#include "nanorag/index.hpp"
#include "nanorag/net/http.hpp"
#include "nanorag/store.hpp"

namespace nanorag {

inline constexpr std::string_view kPromptTemplateVersion = "v1";

/// Default system instruction. Stored in GenerationConfig so deployments can
/// override it; its tokens count against the context budget like any other
/// prompt text.
inline constexpr std::string_view kDefaultSystemPrompt =
    "You are a research assistant for the scientific literature. Answer the question using only the "
    "numbered context passages. If the passages do not contain the answer, say so plainly. Refer to "
    "passages by their bracketed numbers.";

struct GenerationConfig {
    std::size_t max_new_tokens = 700;
    double temperature = 0.3;
    std::string model_name;
    std::size_t context_budget_tokens = 3000;
    std::size_t max_history_turns = 4;
    std::string system_text = std::string(kDefaultSystemPrompt);

    void validate() const;
};

// ---------------------------------------------------------------------------
// Prompt assembly
// ---------------------------------------------------------------------------

struct ContextBlock {
    std::string chunk_id;
    std::string text;
    DocumentMeta source;
    std::size_t rank = 0;
};

struct HistoryTurn {
    std::string question;
    std::string answer;
};

struct ChatMessage {
    std::string role;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct Prompt {
    std::string system_text;
    std::vector<ContextBlock> context_blocks;  // rank order
    std::vector<HistoryTurn> history;          // oldest first
    std::string question;
    std::size_t total_tokens = 0;

    /// system, then history as user/assistant pairs, then one user message
    /// carrying the context blocks and the question.
    std::vector<ChatMessage> messages() const;
};

/// `[<rank>] <title> (<year>). DOI: <doi>` followed by a newline and the
/// chunk text.
std::string render_context_block(const ContextBlock& block);

/// Greedy budgeted assembly. Blocks are tried in rank order, then history
/// turns newest first (at most cfg.max_history_turns); anything that would
/// push the prompt past cfg.context_budget_tokens is skipped whole.
/// Throws BudgetTooSmall if the system text and question alone do not fit,
/// InvalidArgument on an empty question.
Prompt assemble_prompt(const std::string& question, std::span<const ContextBlock> blocks,
                       std::span<const HistoryTurn> history, const GenerationConfig& cfg,
                       const Tokenizer& tokenizer = reference_tokenizer());

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

class ChatClient {
public:
    virtual ~ChatClient() = default;
    /// Returns the model's message text unmodified.
    virtual std::string complete(const std::vector<ChatMessage>& messages, const GenerationConfig& cfg) = 0;
};

struct ChatEndpointConfig {
    std::string url;
    std::string model_name;
    int timeout_ms = 120000;

    /// Reads CHAT_URL and CHAT_MODEL over the given defaults.
    static ChatEndpointConfig from_env(ChatEndpointConfig defaults);
    static ChatEndpointConfig from_env();
};

/// Request body for the chat endpoint, exactly as sent on the wire.
std::string render_chat_request(const std::vector<ChatMessage>& messages, const GenerationConfig& cfg,
                                const std::string& default_model);

/// Parses `{"choices": [{"message": {"content": ...}}]}`. Throws ModelError
/// for error objects or responses without a message.
std::string parse_chat_response(std::string_view body);

class HttpChatClient final : public ChatClient {
public:
    HttpChatClient(ChatEndpointConfig cfg, std::shared_ptr<net::HttpTransport> transport,
                   net::RetryPolicy retry = {});

    std::string complete(const std::vector<ChatMessage>& messages, const GenerationConfig& cfg) override;

private:
    ChatEndpointConfig cfg_;
    std::shared_ptr<net::HttpTransport> transport_;
    net::RetryPolicy retry_;
};

/// Sends one chat-completion request for `prompt`.
std::string generate(ChatClient& client, const Prompt& prompt, const GenerationConfig& cfg);

// ---------------------------------------------------------------------------
// References and answers
// ---------------------------------------------------------------------------

struct ReferenceLine {
    std::size_t ordinal = 0;
    std::string authors;
    int year = 0;
    std::string title;
    std::string doi;

    /// `[<ordinal>] <authors> (<year>). <title>. DOI: <doi>`
    std::string render() const;

    bool operator==(const ReferenceLine&) const = default;
};

using MetaLookup = std::function<std::optional<DocumentMeta>(std::string_view doc_id)>;

/// One line per distinct DOI, first-rank occurrence wins. Throws
/// MissingMetadata when a hit's doc_id does not resolve.
std::vector<ReferenceLine> format_references(std::span<const RetrievalHit> hits, const MetaLookup& lookup);

/// `References:` header followed by one rendered line per reference, joined
/// by single newlines. Empty string for no references.
std::string render_references(std::span<const ReferenceLine> refs);

struct Answer {
    std::string text;
    std::vector<ReferenceLine> references;
    std::vector<RetrievalHit> hits;
    GenerationConfig config_used;
};

/// Answer text, then (when there are references) a blank line and the
/// reference block. Always ends with a newline. The CLI prints exactly this
/// and the service returns it as "rendered".
std::string render_answer(const Answer& answer);

// ---------------------------------------------------------------------------
// Sessions and the engine
// ---------------------------------------------------------------------------

struct SessionTurn {
    std::string question;
    Answer answer;
    std::int64_t timestamp_ms = 0;
};

struct ChatSession {
    std::string session_id;
    std::int64_t created_at_ms = 0;
    std::vector<SessionTurn> turns;

    std::vector<HistoryTurn> history() const;
    /// Appends with a timestamp clamped to be non-decreasing.
    void append(std::string question, Answer answer, std::int64_t now_ms);
};

std::int64_t now_ms();

struct IngestCounts {
    std::size_t ingested = 0;
    std::size_t skipped_duplicates = 0;
    std::size_t failed = 0;
    std::vector<std::string> errors;
};

enum class IngestOutcome { Ingested, Duplicate };

/// Query -> embed -> search -> rerank -> prompt -> generate -> references.
/// Ingestion is serialized internally; queries may run concurrently with
/// each other and with ingestion.
class Engine {
public:
    Engine(std::shared_ptr<Embedder> embedder, std::shared_ptr<ChatClient> chat, ChunkingConfig chunking = {},
           const Tokenizer& tokenizer = reference_tokenizer());

    /// Throws on invalid metadata, empty text or embedding failure.
    IngestOutcome ingest(const CorpusRecord& record);
    /// Per-line failures are counted, never thrown.
    IngestCounts ingest_lines(std::span<const std::string> lines);
    std::size_t remove_document(std::string_view doc_id);

    std::vector<RetrievalHit> retrieve(const EmbeddingVector& query, const RetrievalConfig& cfg) const;

    Answer answer_query(const std::string& question, ChatSession& session, const RetrievalConfig& retrieval,
                        const GenerationConfig& generation);

    /// Writes the index snapshot at `path` and the document store at
    /// `path + ".docs.jsonl"`.
    void save(const std::string& path) const;
    /// Replaces current contents with a saved state. Throws IoError,
    /// CorruptSnapshot or DimensionMismatch (snapshot dim != embedder dim).
    void load(const std::string& path);

    const VectorIndex& index() const { return index_; }
    const DocumentStore& documents() const { return store_; }
    std::size_t dim() const { return index_.dim(); }
    const Tokenizer& tokenizer() const { return tokenizer_; }

private:
    std::shared_ptr<Embedder> embedder_;
    std::shared_ptr<ChatClient> chat_;
    ChunkingConfig chunking_;
    const Tokenizer& tokenizer_;
    VectorIndex index_;
    DocumentStore store_;
    mutable std::mutex write_mu_;
};

std::string docs_sidecar_path(const std::string& snapshot_path);

}  // namespace nanorag
