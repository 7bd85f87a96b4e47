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
#include <random>

#include "nanorag/errors.hpp"
#include "nanorag/service.hpp"

namespace nanorag {

using json = nlohmann::json;

namespace fs = std::filesystem;

json to_json(const RetrievalHit& hit) {
    return {{"chunk_id", hit.chunk_id}, {"doc_id", hit.doc_id}, {"score", hit.score}, {"rank", hit.rank}};
}

json to_json(const ReferenceLine& ref) {
    return {{"ordinal", ref.ordinal}, {"authors", ref.authors}, {"year", ref.year},
            {"title", ref.title},     {"doi", ref.doi},         {"line", ref.render()}};
}

json to_json(const GenerationConfig& cfg) {
    return {{"max_new_tokens", cfg.max_new_tokens},
            {"temperature", cfg.temperature},
            {"model_name", cfg.model_name},
            {"context_budget_tokens", cfg.context_budget_tokens}};
}

json to_json(const Answer& answer) {
    json refs = json::array();
    for (const auto& r : answer.references) refs.push_back(to_json(r));
    json hits = json::array();
    for (const auto& h : answer.hits) hits.push_back(to_json(h));
    return {{"text", answer.text},
            {"references", std::move(refs)},
            {"hits", std::move(hits)},
            {"config_used", to_json(answer.config_used)},
            {"rendered", render_answer(answer)}};
}

json to_json(const ChatSession& session) {
    json turns = json::array();
    for (const auto& t : session.turns) {
        turns.push_back({{"question", t.question}, {"answer", to_json(t.answer)}, {"timestamp_ms", t.timestamp_ms}});
    }
    return {{"session_id", session.session_id}, {"created_at_ms", session.created_at_ms}, {"turns", std::move(turns)}};
}

Answer answer_from_json(const json& j) {
    Answer a;
    a.text = j.at("text").get<std::string>();
    for (const auto& r : j.at("references")) {
        a.references.push_back(ReferenceLine{r.at("ordinal").get<std::size_t>(), r.at("authors").get<std::string>(),
                                             r.at("year").get<int>(), r.at("title").get<std::string>(),
                                             r.at("doi").get<std::string>()});
    }
    for (const auto& h : j.at("hits")) {
        a.hits.push_back(RetrievalHit{h.at("chunk_id").get<std::string>(), h.at("doc_id").get<std::string>(),
                                      h.at("score").get<double>(), h.at("rank").get<std::size_t>()});
    }
    if (auto it = j.find("config_used"); it != j.end()) {
        a.config_used.max_new_tokens = it->value("max_new_tokens", a.config_used.max_new_tokens);
        a.config_used.temperature = it->value("temperature", a.config_used.temperature);
        a.config_used.model_name = it->value("model_name", a.config_used.model_name);
        a.config_used.context_budget_tokens = it->value("context_budget_tokens", a.config_used.context_budget_tokens);
    }
    return a;
}

namespace {

std::string random_session_id() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    static constexpr char kHex[] = "0123456789abcdef";
    std::string id;
    for (int part = 0; part < 2; ++part) {
        auto v = rng();
        for (int i = 0; i < 16; ++i, v >>= 4) id.push_back(kHex[v & 0xf]);
    }
    return id;
}

bool safe_id(const std::string& id) {
    if (id.empty() || id.size() > 128) return false;
    for (char c : id) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') return false;
    }
    return true;
}

}  // namespace

SessionStore::SessionStore(std::string dir) : dir_(std::move(dir)) {
    if (dir_.empty()) return;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create session store " + dir_ + ": " + ec.message());

    for (const auto& entry : fs::directory_iterator(dir_)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".jsonl") continue;
        ChatSession s;
        try {
            for (const auto& line : read_lines(entry.path().string())) {
                const auto j = json::parse(line);
                const auto type = j.at("type").get<std::string>();
                if (type == "session") {
                    s.session_id = j.at("session_id").get<std::string>();
                    s.created_at_ms = j.at("created_at_ms").get<std::int64_t>();
                } else if (type == "turn") {
                    s.turns.push_back(SessionTurn{j.at("question").get<std::string>(), answer_from_json(j.at("answer")),
                                                  j.at("timestamp_ms").get<std::int64_t>()});
                }
            }
        } catch (const json::exception&) {
            // A torn final line from a crash mid-append loses only that turn.
            if (s.session_id.empty()) continue;
        }
        if (!s.session_id.empty()) sessions_.emplace(s.session_id, std::move(s));
    }
}

std::string SessionStore::file_for(const std::string& id) const { return (fs::path(dir_) / (id + ".jsonl")).string(); }

void SessionStore::write_line(const std::string& id, const json& line) const {
    if (dir_.empty()) return;
    std::ofstream out(file_for(id), std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot open session file for " + id);
    out << line.dump() << '\n';
    out.flush();
    if (!out) throw IoError("session write failed for " + id);
}

ChatSession SessionStore::create() {
    ChatSession s;
    s.created_at_ms = now_ms();
    std::lock_guard lock(mu_);
    do {
        s.session_id = random_session_id();
    } while (sessions_.count(s.session_id));
    write_line(s.session_id, {{"type", "session"}, {"session_id", s.session_id}, {"created_at_ms", s.created_at_ms}});
    sessions_.emplace(s.session_id, s);
    return s;
}

std::optional<ChatSession> SessionStore::get(const std::string& id) const {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) return std::nullopt;
    return it->second;
}

bool SessionStore::exists(const std::string& id) const {
    std::lock_guard lock(mu_);
    return sessions_.count(id) != 0;
}

void SessionStore::append(const std::string& id, const SessionTurn& turn) {
    if (!safe_id(id)) throw InvalidArgument("bad session id");
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw InvalidArgument("unknown session " + id);
    write_line(id, {{"type", "turn"},
                    {"question", turn.question},
                    {"timestamp_ms", turn.timestamp_ms},
                    {"answer", to_json(turn.answer)}});
    it->second.turns.push_back(turn);
}

std::size_t SessionStore::size() const {
    std::lock_guard lock(mu_);
    return sessions_.size();
}

}  // namespace nanorag
