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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "nanorag/net/http.hpp"

namespace nanorag::testutil {

inline std::string fixture(const std::string& name) { return std::string(NANORAG_FIXTURE_DIR) + "/" + name; }

struct RecordedRequest {
    std::string method;
    std::string url;
    std::string body;
    net::Headers headers;
};

// Transport double: every request is recorded and answered by `handler`.
class ScriptedTransport : public net::HttpTransport {
public:
    using Handler = std::function<net::HttpResponse(const RecordedRequest&)>;

    explicit ScriptedTransport(Handler h) : handler_(std::move(h)) {}

    net::HttpResponse post(const std::string& url, const std::string& body, const std::string&,
                           const net::Headers& headers, std::chrono::milliseconds) override {
        return record({"POST", url, body, headers});
    }

    net::HttpResponse get(const std::string& url, const net::Headers& headers, std::chrono::milliseconds) override {
        return record({"GET", url, "", headers});
    }

    std::vector<RecordedRequest> requests() const {
        std::lock_guard lock(mu_);
        return requests_;
    }

private:
    net::HttpResponse record(RecordedRequest r) {
        {
            std::lock_guard lock(mu_);
            requests_.push_back(r);
        }
        return handler_(r);
    }

    Handler handler_;
    mutable std::mutex mu_;
    std::vector<RecordedRequest> requests_;
};

inline net::HttpResponse chat_reply(const std::string& content) {
    nlohmann::json j = {{"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}}}};
    return {200, j.dump(), ""};
}

// Echo model: the answer is the last message it was sent.
inline std::string echo_content(const std::string& request_body) {
    const auto j = nlohmann::json::parse(request_body);
    return "echo: " + j.at("messages").back().at("content").get<std::string>();
}

inline std::shared_ptr<ScriptedTransport> echo_chat_transport() {
    return std::make_shared<ScriptedTransport>(
        [](const RecordedRequest& r) { return chat_reply(echo_content(r.body)); });
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> v(dim);
    for (auto& x : v) x = n(rng);
    return v;
}

// ---------------------------------------------------------------------------
// Oracles. Written against raw vectors with long double accumulation and no
// library code, so they check the index rather than restate it.
// ---------------------------------------------------------------------------

inline long double oracle_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    long double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += static_cast<long double>(a[i]) * b[i];
        aa += static_cast<long double>(a[i]) * a[i];
        bb += static_cast<long double>(b[i]) * b[i];
    }
    return ab / (std::sqrt(aa) * std::sqrt(bb));
}

inline double oracle_round(long double s) {
    double r = static_cast<double>(std::nearbyint(s * 1e9L) / 1e9L);
    return std::clamp(r, -1.0, 1.0);
}

struct OracleHit {
    std::size_t row;
    double score;
};

// Full scan, score descending, row (insertion order) ascending.
inline std::vector<OracleHit> brute_force_top_k(const std::vector<std::vector<double>>& rows,
                                                const std::vector<double>& query, std::size_t k) {
    std::vector<OracleHit> all;
    for (std::size_t i = 0; i < rows.size(); ++i) all.push_back({i, oracle_round(oracle_cosine(rows[i], query))});
    std::stable_sort(all.begin(), all.end(), [](const OracleHit& a, const OracleHit& b) { return a.score > b.score; });
    all.resize(std::min(k, all.size()));
    return all;
}

// Enumerates every ordered selection of k pool positions and returns the one
// whose per-step MMR objective vector is lexicographically largest, earliest
// positions winning exact ties. Only viable for tiny pools.
inline std::vector<std::size_t> brute_force_mmr(const std::vector<std::vector<double>>& pool,
                                                const std::vector<double>& query, std::size_t k, double lambda) {
    const std::size_t n = pool.size();
    k = std::min(k, n);
    std::vector<double> rel(n);
    for (std::size_t i = 0; i < n; ++i) rel[i] = oracle_round(oracle_cosine(pool[i], query));
    std::vector<std::vector<double>> sim(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) sim[i][j] = oracle_round(oracle_cosine(pool[i], pool[j]));
    }

    auto objective = [&](const std::vector<std::size_t>& seq) {
        std::vector<long double> vals;
        for (std::size_t s = 0; s < seq.size(); ++s) {
            if (s == 0) {
                vals.push_back(rel[seq[0]]);
                continue;
            }
            double red = -2.0;
            for (std::size_t t = 0; t < s; ++t) red = std::max(red, sim[seq[s]][seq[t]]);
            vals.push_back(static_cast<long double>(lambda) * rel[seq[s]] -
                           static_cast<long double>(1.0 - lambda) * red);
        }
        return vals;
    };

    std::vector<std::size_t> best;
    std::vector<long double> best_vals;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    // next_permutation over all n! orders visits every k-prefix; the first
    // visit of a prefix comes in lexicographic position order.
    do {
        std::vector<std::size_t> seq(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
        const auto vals = objective(seq);
        bool better = best.empty();
        for (std::size_t s = 0; !better && s < k; ++s) {
            if (vals[s] > best_vals[s] + 1e-12L) {
                better = true;
            } else if (vals[s] < best_vals[s] - 1e-12L) {
                break;
            }
        }
        if (better) {
            best = seq;
            best_vals = vals;
        }
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
}

// Bag-of-words cosine over lowercased alphanumeric words, no hashing.
inline double word_overlap_cosine(const std::string& a, const std::string& b) {
    auto bag = [](const std::string& s) {
        std::map<std::string, double> m;
        std::string w;
        for (char c : s + " ") {
            const auto u = static_cast<unsigned char>(c);
            if (std::isalnum(u) || u >= 0x80) {
                w.push_back(static_cast<char>(std::tolower(u)));
            } else if (!w.empty()) {
                m[w] += 1;
                w.clear();
            }
        }
        return m;
    };
    const auto ma = bag(a), mb = bag(b);
    double ab = 0, aa = 0, bb = 0;
    for (const auto& [w, c] : ma) {
        aa += c * c;
        if (auto it = mb.find(w); it != mb.end()) ab += c * it->second;
    }
    for (const auto& [w, c] : mb) bb += c * c;
    return ab / std::sqrt(aa * bb);
}

}  // namespace nanorag::testutil
