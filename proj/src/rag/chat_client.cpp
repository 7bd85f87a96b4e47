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

#include "json.hpp"
#include "nanorag/errors.hpp"
#include "nanorag/rag.hpp"

namespace nanorag {

using json = nlohmann::json;

ChatEndpointConfig ChatEndpointConfig::from_env() { return from_env(ChatEndpointConfig{}); }

ChatEndpointConfig ChatEndpointConfig::from_env(ChatEndpointConfig defaults) {
    if (const char* v = std::getenv("CHAT_URL")) defaults.url = v;
    if (const char* v = std::getenv("CHAT_MODEL")) defaults.model_name = v;
    return defaults;
}

std::string render_chat_request(const std::vector<ChatMessage>& messages, const GenerationConfig& cfg,
                                const std::string& default_model) {
    nlohmann::ordered_json body;
    body["model"] = cfg.model_name.empty() ? default_model : cfg.model_name;
    body["temperature"] = cfg.temperature;
    body["max_tokens"] = cfg.max_new_tokens;
    auto msgs = nlohmann::ordered_json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    body["messages"] = std::move(msgs);
    return body.dump();
}

std::string parse_chat_response(std::string_view body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ModelError(std::string("chat endpoint sent invalid JSON: ") + e.what());
    }
    if (j.is_object() && j.contains("error") && !j["error"].is_null()) {
        throw ModelError("chat endpoint error: " + j["error"].dump());
    }
    try {
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw ModelError(std::string("chat response has no message content: ") + e.what());
    }
}

HttpChatClient::HttpChatClient(ChatEndpointConfig cfg, std::shared_ptr<net::HttpTransport> transport,
                               net::RetryPolicy retry)
    : cfg_(std::move(cfg)), transport_(std::move(transport)), retry_(std::move(retry)) {
    if (cfg_.url.empty()) throw InvalidArgument("chat endpoint URL is not set (CHAT_URL)");
    if (!transport_) throw InvalidArgument("HttpChatClient needs a transport");
}

std::string HttpChatClient::complete(const std::vector<ChatMessage>& messages, const GenerationConfig& cfg) {
    const auto body = render_chat_request(messages, cfg, cfg_.model_name);
    const auto resp = net::post_json_with_retry(*transport_, cfg_.url, body, {},
                                                std::chrono::milliseconds(cfg_.timeout_ms), retry_);
    if (resp.status != 200) {
        // 4xx: surface the endpoint's error object if it sent one.
        try {
            parse_chat_response(resp.body);
        } catch (const ModelError& e) {
            throw ModelError("chat endpoint returned HTTP " + std::to_string(resp.status) + ": " + e.what());
        }
        throw ModelError("chat endpoint returned HTTP " + std::to_string(resp.status));
    }
    return parse_chat_response(resp.body);
}

std::string generate(ChatClient& client, const Prompt& prompt, const GenerationConfig& cfg) {
    cfg.validate();
    return client.complete(prompt.messages(), cfg);
}

}  // namespace nanorag
