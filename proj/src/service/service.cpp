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

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "httplib.h"
#include "nanorag/errors.hpp"
#include "nanorag/service.hpp"

namespace nanorag {

using json = nlohmann::json;

void ServiceConfig::validate() const {
    if (port < 0 || port > 65535) throw InvalidArgument("port out of range");
    if (host.empty()) throw InvalidArgument("host must be non-empty");
    retrieval.validate();
    generation.validate();
    chunking.validate();
    if (!embed.endpoint_url.empty()) embed.validate();
}

ServiceConfig ServiceConfig::from_config(const KeyValueConfig& cfg) {
    ServiceConfig s;
    s.host = cfg.get_or("host", s.host);
    s.port = static_cast<int>(cfg.get_int("port", s.port));
    s.corpus_path = cfg.get_or("corpus_path", s.corpus_path);
    s.snapshot_path = cfg.get_or("snapshot_path", s.snapshot_path);
    s.session_store_path = cfg.get_or("session_store_path", s.session_store_path);

    auto& r = s.retrieval;
    r.k = static_cast<std::size_t>(cfg.get_int("k", static_cast<std::int64_t>(r.k)));
    r.rerank_enabled = cfg.get_bool("rerank", r.rerank_enabled);
    r.rerank_pool = static_cast<std::size_t>(cfg.get_int("rerank_pool", static_cast<std::int64_t>(r.rerank_pool)));
    r.mmr_lambda = cfg.get_double("mmr_lambda", r.mmr_lambda);

    auto& g = s.generation;
    g.max_new_tokens = static_cast<std::size_t>(cfg.get_int("max_tokens", static_cast<std::int64_t>(g.max_new_tokens)));
    g.temperature = cfg.get_double("temperature", g.temperature);
    g.context_budget_tokens =
        static_cast<std::size_t>(cfg.get_int("context_budget", static_cast<std::int64_t>(g.context_budget_tokens)));
    g.max_history_turns =
        static_cast<std::size_t>(cfg.get_int("history_turns", static_cast<std::int64_t>(g.max_history_turns)));
    g.system_text = cfg.get_or("system_prompt", g.system_text);

    auto& c = s.chunking;
    c.chunk_tokens = static_cast<std::size_t>(cfg.get_int("chunk_tokens", static_cast<std::int64_t>(c.chunk_tokens)));
    c.overlap_tokens =
        static_cast<std::size_t>(cfg.get_int("overlap_tokens", static_cast<std::int64_t>(c.overlap_tokens)));
    c.doc_token_limit =
        static_cast<std::size_t>(cfg.get_int("doc_token_limit", static_cast<std::int64_t>(c.doc_token_limit)));

    EmbedderConfig e;
    e.endpoint_url = cfg.get_or("embed_url", e.endpoint_url);
    e.model_name = cfg.get_or("embed_model", e.model_name);
    e.dim = static_cast<std::size_t>(cfg.get_int("embed_dim", static_cast<std::int64_t>(e.dim)));
    e.timeout_ms = static_cast<int>(cfg.get_int("embed_timeout_ms", e.timeout_ms));
    e.max_batch = static_cast<std::size_t>(cfg.get_int("embed_max_batch", static_cast<std::int64_t>(e.max_batch)));
    s.embed = EmbedderConfig::from_env(e);

    ChatEndpointConfig ch;
    ch.url = cfg.get_or("chat_url", ch.url);
    ch.model_name = cfg.get_or("chat_model", ch.model_name);
    ch.timeout_ms = static_cast<int>(cfg.get_int("chat_timeout_ms", ch.timeout_ms));
    s.chat = ChatEndpointConfig::from_env(ch);
    g.model_name = s.chat.model_name;

    s.validate();
    return s;
}

std::shared_ptr<Engine> make_engine(const ServiceConfig& cfg, std::shared_ptr<net::HttpTransport> transport) {
    std::shared_ptr<Embedder> embedder;
    if (cfg.embed.endpoint_url.empty()) {
        embedder = std::make_shared<ReferenceEmbedder>(cfg.embed.dim);
    } else {
        embedder = std::make_shared<HttpEmbedder>(cfg.embed, transport);
    }
    std::shared_ptr<ChatClient> chat;
    if (!cfg.chat.url.empty()) chat = std::make_shared<HttpChatClient>(cfg.chat, transport);
    return std::make_shared<Engine>(std::move(embedder), std::move(chat), cfg.chunking);
}

IngestCounts bootstrap(Engine& engine, const ServiceConfig& cfg) {
    if (!cfg.snapshot_path.empty() && std::filesystem::exists(cfg.snapshot_path)) {
        engine.load(cfg.snapshot_path);
        return {};
    }
    IngestCounts counts;
    if (!cfg.corpus_path.empty()) counts = engine.ingest_lines(read_lines(cfg.corpus_path));
    if (!cfg.snapshot_path.empty() && counts.ingested > 0) engine.save(cfg.snapshot_path);
    return counts;
}

std::string error_body(const std::string& code, const std::string& message) {
    return json{{"error", {{"code", code}, {"message", message}}}}.dump();
}

namespace {

HttpReply ok(const json& j) { return {200, j.dump()}; }
HttpReply fail(int status, const std::string& code, const std::string& message) {
    return {status, error_body(code, message)};
}

// Maps library errors onto HTTP statuses. Upstream model failures are 502.
HttpReply reply_for(const std::exception& e) {
    if (dynamic_cast<const EndpointUnavailable*>(&e)) return fail(502, "endpoint_unavailable", e.what());
    if (dynamic_cast<const ModelError*>(&e)) return fail(502, "model_error", e.what());
    if (dynamic_cast<const InvalidArgument*>(&e)) return fail(400, "invalid_argument", e.what());
    if (dynamic_cast<const BudgetTooSmall*>(&e)) return fail(400, "budget_too_small", e.what());
    if (dynamic_cast<const DimensionMismatch*>(&e)) return fail(502, "dimension_mismatch", e.what());
    if (dynamic_cast<const json::exception*>(&e)) return fail(400, "bad_json", e.what());
    return fail(500, "internal", e.what());
}

struct QueryRequest {
    std::string question;
    RetrievalConfig retrieval;
    GenerationConfig generation;
};

template <typename T>
T positive_field(const json& j, const char* key, T fallback) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    if (!it->is_number_integer() || it->get<std::int64_t>() <= 0) {
        throw InvalidArgument(std::string(key) + " must be a positive integer");
    }
    return static_cast<T>(it->get<std::int64_t>());
}

QueryRequest parse_query(const std::string& body, const ServiceConfig& cfg) {
    const auto j = json::parse(body);
    if (!j.is_object()) throw InvalidArgument("request body must be a JSON object");
    QueryRequest q{j.value("question", std::string{}), cfg.retrieval, cfg.generation};
    if (normalize_text(q.question).empty()) throw InvalidArgument("question must be non-empty");
    q.retrieval.k = positive_field(j, "k", q.retrieval.k);
    q.generation.max_new_tokens = positive_field(j, "max_tokens", q.generation.max_new_tokens);
    if (auto it = j.find("temperature"); it != j.end() && !it->is_null()) {
        if (!it->is_number()) throw InvalidArgument("temperature must be a number");
        q.generation.temperature = it->get<double>();
    }
    q.retrieval.validate();
    q.generation.validate();
    return q;
}

}  // namespace

struct Service::Server {
    httplib::Server http;
    std::thread thread;
};

Service::Service(ServiceConfig cfg, std::shared_ptr<Engine> engine)
    : cfg_(std::move(cfg)), engine_(std::move(engine)), sessions_(cfg_.session_store_path) {
    if (!engine_) throw InvalidArgument("service needs an engine");
}

Service::~Service() { stop(); }

std::mutex& Service::session_lock(const std::string& id) {
    std::lock_guard lock(locks_mu_);
    auto& slot = session_locks_[id];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
}

HttpReply Service::handle_documents(const std::string& body) {
    if (normalize_text(body).empty()) return fail(400, "invalid_argument", "empty request body");
    std::vector<std::string> lines;
    std::istringstream in(body);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!normalize_text(line).empty()) lines.push_back(std::move(line));
    }
    const auto counts = engine_->ingest_lines(lines);
    if (counts.ingested > 0 && !cfg_.snapshot_path.empty()) {
        try {
            engine_->save(cfg_.snapshot_path);
        } catch (const Error& e) {
            return fail(500, "snapshot_failed", e.what());
        }
    }
    return ok({{"ingested", counts.ingested},
               {"skipped_duplicates", counts.skipped_duplicates},
               {"failed", counts.failed},
               {"errors", counts.errors}});
}

HttpReply Service::handle_query(const std::string& body) {
    try {
        const auto q = parse_query(body, cfg_);
        ChatSession ephemeral;
        ephemeral.created_at_ms = now_ms();
        return ok(to_json(engine_->answer_query(q.question, ephemeral, q.retrieval, q.generation)));
    } catch (const std::exception& e) {
        return reply_for(e);
    }
}

HttpReply Service::handle_create_session() {
    try {
        return ok(to_json(sessions_.create()));
    } catch (const std::exception& e) {
        return reply_for(e);
    }
}

HttpReply Service::handle_session_message(const std::string& id, const std::string& body) {
    if (!sessions_.exists(id)) return fail(404, "not_found", "unknown session " + id);
    std::unique_lock lock(session_lock(id), std::try_to_lock);
    if (!lock.owns_lock()) return fail(409, "session_busy", "a message for this session is already in flight");
    try {
        const auto q = parse_query(body, cfg_);
        auto session = *sessions_.get(id);
        auto answer = engine_->answer_query(q.question, session, q.retrieval, q.generation);
        sessions_.append(id, session.turns.back());
        return ok(to_json(answer));
    } catch (const std::exception& e) {
        return reply_for(e);
    }
}

HttpReply Service::handle_get_session(const std::string& id) {
    const auto s = sessions_.get(id);
    if (!s) return fail(404, "not_found", "unknown session " + id);
    return ok(to_json(*s));
}

HttpReply Service::handle_health() {
    return ok({{"status", "ok"},
               {"chunks", engine_->index().size()},
               {"docs", engine_->documents().document_count()},
               {"dim", engine_->dim()}});
}

int Service::bind() {
    if (server_ && server_->http.is_running()) throw InvalidArgument("service already started");
    if (server_ && server_->thread.joinable()) server_->thread.join();
    server_ = std::make_unique<Server>();
    auto& http = server_->http;

    const auto send = [](httplib::Response& res, const HttpReply& r) {
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
    http.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    http.Post("/documents", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, handle_documents(req.body));
    });
    http.Post("/query", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, handle_query(req.body));
    });
    http.Post("/sessions", [this, send](const httplib::Request&, httplib::Response& res) {
        send(res, handle_create_session());
    });
    http.Post(R"(/sessions/([A-Za-z0-9_-]+)/messages)",
              [this, send](const httplib::Request& req, httplib::Response& res) {
                  send(res, handle_session_message(req.matches[1], req.body));
              });
    http.Get(R"(/sessions/([A-Za-z0-9_-]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, handle_get_session(req.matches[1]));
    });
    http.Get("/health", [this, send](const httplib::Request&, httplib::Response& res) {
        send(res, handle_health());
    });
    http.set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            send(res, fail(500, "internal", e.what()));
        } catch (...) {
            send(res, fail(500, "internal", "unknown error"));
        }
    });

    int port = cfg_.port;
    if (port == 0) {
        port = http.bind_to_any_port(cfg_.host);
    } else if (!http.bind_to_port(cfg_.host, port)) {
        port = -1;
    }
    if (port < 0) {
        server_.reset();
        throw IoError("cannot bind " + cfg_.host + ":" + std::to_string(cfg_.port));
    }
    return port;
}

int Service::start() {
    const int port = bind();
    server_->thread = std::thread([this] { server_->http.listen_after_bind(); });
    server_->http.wait_until_ready();
    return port;
}

void Service::run() {
    bind();
    server_->http.listen_after_bind();
}

// Safe to call from another thread while run() is blocked.
void Service::stop() {
    if (!server_) return;
    server_->http.stop();
    if (server_->thread.joinable()) server_->thread.join();
}

}  // namespace nanorag
