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

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "json.hpp"
#include "nanorag/config.hpp"
#include "nanorag/rag.hpp"

namespace nanorag {

/// Everything needed to stand up an engine, shared by `serve` and the CLI.
struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    RetrievalConfig retrieval;
    GenerationConfig generation;
    ChunkingConfig chunking;
    std::string corpus_path;
    std::string snapshot_path;
    std::string session_store_path;
    /// Empty endpoint_url selects the built-in reference embedder.
    EmbedderConfig embed;
    ChatEndpointConfig chat;

    void validate() const;

    /// Defaults, then `cfg` keys, then EMBED_* / CHAT_* environment variables.
    static ServiceConfig from_config(const KeyValueConfig& cfg);
};

/// Builds an engine for `cfg`. With no chat URL the engine can ingest and
/// search but answer_query throws EndpointUnavailable.
std::shared_ptr<Engine> make_engine(const ServiceConfig& cfg,
                                    std::shared_ptr<net::HttpTransport> transport = net::make_default_transport());

/// Loads cfg.snapshot_path when it exists, otherwise ingests cfg.corpus_path
/// (if set) and writes the snapshot. Returns the ingest counts (all zero
/// after a snapshot load).
IngestCounts bootstrap(Engine& engine, const ServiceConfig& cfg);

// ---------------------------------------------------------------------------
// Wire JSON
// ---------------------------------------------------------------------------

nlohmann::json to_json(const RetrievalHit& hit);
nlohmann::json to_json(const ReferenceLine& ref);
nlohmann::json to_json(const GenerationConfig& cfg);
/// Includes "rendered": render_answer(answer).
nlohmann::json to_json(const Answer& answer);
nlohmann::json to_json(const ChatSession& session);

Answer answer_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Sessions
// ---------------------------------------------------------------------------

/// Sessions kept in memory and, when a directory is given, mirrored to one
/// append-only JSONL file per session (`<dir>/<session_id>.jsonl`).
class SessionStore {
public:
    /// Empty `dir` keeps sessions in memory only. Existing files are loaded.
    explicit SessionStore(std::string dir = {});

    ChatSession create();
    std::optional<ChatSession> get(const std::string& id) const;
    bool exists(const std::string& id) const;
    /// Persists before updating memory. Throws IoError.
    void append(const std::string& id, const SessionTurn& turn);
    std::size_t size() const;

private:
    std::string file_for(const std::string& id) const;
    void write_line(const std::string& id, const nlohmann::json& line) const;

    std::string dir_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, ChatSession> sessions_;
};

// ---------------------------------------------------------------------------
// Service
// ---------------------------------------------------------------------------

struct HttpReply {
    int status = 200;
    std::string body;
};

/// Error body: `{"error": {"code": ..., "message": ...}}`.
std::string error_body(const std::string& code, const std::string& message);

/// Request handlers, independent of the HTTP server so they can be driven
/// directly. All bodies are JSON except the /documents request (JSONL).
class Service {
public:
    Service(ServiceConfig cfg, std::shared_ptr<Engine> engine);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    HttpReply handle_documents(const std::string& body);
    HttpReply handle_query(const std::string& body);
    HttpReply handle_create_session();
    HttpReply handle_session_message(const std::string& id, const std::string& body);
    HttpReply handle_get_session(const std::string& id);
    HttpReply handle_health();

    /// Binds and serves in a background thread. Returns the bound port
    /// (cfg.port, or an ephemeral one when cfg.port == 0).
    int start();
    /// Blocks serving on cfg.host:cfg.port until stop().
    void run();
    void stop();

    const ServiceConfig& config() const { return cfg_; }
    Engine& engine() { return *engine_; }

private:
    struct Server;

    int bind();
    std::mutex& session_lock(const std::string& id);

    ServiceConfig cfg_;
    std::shared_ptr<Engine> engine_;
    SessionStore sessions_;
    std::mutex locks_mu_;
    std::unordered_map<std::string, std::unique_ptr<std::mutex>> session_locks_;
    std::unique_ptr<Server> server_;
};

}  // namespace nanorag
