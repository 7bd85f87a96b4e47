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
#include <cstdlib>

#include "json.hpp"
#include "nanorag/embed.hpp"
#include "nanorag/errors.hpp"

namespace nanorag {

using json = nlohmann::json;

void EmbedderConfig::validate() const {
    if (endpoint_url.empty()) throw InvalidArgument("embedding endpoint URL is not set");
    if (dim == 0) throw InvalidArgument("embedding dim must be positive");
    if (timeout_ms <= 0) throw InvalidArgument("embedding timeout must be positive");
    if (max_batch == 0) throw InvalidArgument("max_batch must be >= 1");
    if (max_in_flight < 1 || max_in_flight > 1024) throw InvalidArgument("max_in_flight must be in [1, 1024]");
}

EmbedderConfig EmbedderConfig::from_env() { return from_env(EmbedderConfig{}); }

EmbedderConfig EmbedderConfig::from_env(EmbedderConfig defaults) {
    if (const char* v = std::getenv("EMBED_URL")) defaults.endpoint_url = v;
    if (const char* v = std::getenv("EMBED_MODEL")) defaults.model_name = v;
    if (const char* v = std::getenv("EMBED_DIM")) {
        try {
            const long parsed = std::stol(v);
            if (parsed <= 0) throw InvalidArgument("EMBED_DIM must be positive");
            defaults.dim = static_cast<std::size_t>(parsed);
        } catch (const std::logic_error&) {
            throw InvalidArgument(std::string("EMBED_DIM is not an integer: ") + v);
        }
    }
    return defaults;
}

HttpEmbedder::HttpEmbedder(EmbedderConfig cfg, std::shared_ptr<net::HttpTransport> transport,
                           net::RetryPolicy retry)
    : cfg_(std::move(cfg)),
      transport_(std::move(transport)),
      retry_(std::move(retry)),
      in_flight_(cfg_.max_in_flight) {
    cfg_.validate();
    if (!transport_) throw InvalidArgument("HttpEmbedder needs a transport");
}

std::vector<EmbeddingVector> HttpEmbedder::embed_batch(std::span<const std::string> texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (std::size_t off = 0; off < texts.size(); off += cfg_.max_batch) {
        const auto n = std::min(cfg_.max_batch, texts.size() - off);
        auto part = embed_one_request(texts.subspan(off, n));
        std::move(part.begin(), part.end(), std::back_inserter(out));
    }
    return out;
}

std::vector<EmbeddingVector> HttpEmbedder::embed_one_request(std::span<const std::string> texts) {
    json body;
    body["model"] = cfg_.model_name;
    body["input"] = json::array();
    for (const auto& t : texts) {
        if (t.empty()) throw InvalidArgument("cannot embed empty text");
        body["input"].push_back(t);
    }

    net::HttpResponse resp;
    {
        in_flight_.acquire();
        struct Release {
            std::counting_semaphore<1024>& s;
            ~Release() { s.release(); }
        } release{in_flight_};
        resp = net::post_json_with_retry(*transport_, cfg_.endpoint_url, body.dump(), {},
                                         std::chrono::milliseconds(cfg_.timeout_ms), retry_);
    }
    if (resp.status != 200) {
        throw EndpointUnavailable("embedding endpoint returned HTTP " + std::to_string(resp.status));
    }

    json parsed;
    try {
        parsed = json::parse(resp.body);
    } catch (const json::parse_error& e) {
        throw EndpointUnavailable(std::string("embedding endpoint sent invalid JSON: ") + e.what());
    }
    if (parsed.contains("error")) throw ModelError("embedding endpoint error: " + parsed["error"].dump());

    std::vector<std::vector<double>> raw(texts.size());
    std::vector<bool> seen(texts.size(), false);
    try {
        for (const auto& item : parsed.at("data")) {
            const auto idx = item.at("index").get<std::size_t>();
            if (idx >= texts.size() || seen[idx]) {
                throw DimensionMismatch("embedding response has bad or repeated index " + std::to_string(idx));
            }
            seen[idx] = true;
            raw[idx] = item.at("embedding").get<std::vector<double>>();
        }
    } catch (const json::exception& e) {
        throw EndpointUnavailable(std::string("embedding response is malformed: ") + e.what());
    }

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (!seen[i]) throw DimensionMismatch("embedding response missing index " + std::to_string(i));
        if (raw[i].size() != cfg_.dim) {
            throw DimensionMismatch("endpoint returned " + std::to_string(raw[i].size()) +
                                    " values, expected " + std::to_string(cfg_.dim));
        }
        out.push_back(EmbeddingVector::normalize(raw[i]));
    }
    return out;
}

}  // namespace nanorag
