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

#include <cmath>

#include "gtest/gtest.h"
#include "json.hpp"
#include "nanorag/embed.hpp"
#include "nanorag/errors.hpp"
#include "nanorag/index.hpp"
#include "test_support.hpp"

using namespace nanorag;
using nlohmann::json;
using testutil::RecordedRequest;
using testutil::ScriptedTransport;

namespace {

double norm(const EmbeddingVector& v) {
    double s = 0;
    for (double x : v.values()) s += x * x;
    return std::sqrt(s);
}

net::RetryPolicy no_sleep() {
    net::RetryPolicy p;
    p.sleep = [](std::chrono::milliseconds) {};
    return p;
}

EmbedderConfig endpoint(std::size_t dim, std::size_t max_batch = 32) {
    EmbedderConfig c;
    c.endpoint_url = "http://embed.test/v1/embeddings";
    c.model_name = "m";
    c.dim = dim;
    c.max_batch = max_batch;
    return c;
}

// Answers each input i with a vector whose first component is i + 1, listing
// the data items in reverse order.
net::HttpResponse indexed_reply(const RecordedRequest& r, std::size_t dim) {
    const auto body = json::parse(r.body);
    json data = json::array();
    const auto n = body.at("input").size();
    for (std::size_t i = n; i-- > 0;) {
        std::vector<double> v(dim, 0.5);
        v[0] = static_cast<double>(i + 1);
        data.push_back({{"index", i}, {"embedding", v}});
    }
    return {200, json{{"data", data}}.dump(), ""};
}

}  // namespace

TEST(EmbeddingVector, NormalizeEnforcesUnitNorm) {
    const auto v = EmbeddingVector::normalize(std::vector<double>{3, 4});
    EXPECT_NEAR(norm(v), 1.0, 1e-15);
    EXPECT_THROW(EmbeddingVector::normalize(std::vector<double>{0, 0}), ZeroVector);
    EXPECT_THROW(EmbeddingVector::normalize(std::vector<double>{1e-13, 0}), ZeroVector);
    EXPECT_THROW(EmbeddingVector::normalize(std::vector<double>{}), InvalidArgument);
    EXPECT_THROW(EmbeddingVector::normalize(std::vector<double>{NAN, 1}), InvalidArgument);
    EXPECT_THROW(EmbeddingVector::from_unit({1, 1}), InvalidArgument);
    EXPECT_NO_THROW(EmbeddingVector::from_unit({0.6, 0.8}));
}

TEST(ReferenceEmbedder, DeterministicUnitVectors) {
    ReferenceEmbedder e(64);
    const auto a = e.embed_text("Perovskite solar cells degrade under humidity.");
    const auto b = e.embed_text("Perovskite solar cells degrade under humidity.");
    EXPECT_EQ(a, b);
    EXPECT_NEAR(norm(a), 1.0, 1e-12);
    EXPECT_EQ(a.dim(), 64u);
    EXPECT_EQ(e.embed_text("PEROVSKITE"), e.embed_text("perovskite"));
    EXPECT_THROW(e.embed_text("   "), ZeroVector);
    EXPECT_THROW(ReferenceEmbedder(1), InvalidArgument);
}

TEST(ReferenceEmbedder, BucketIsFnv1aOfLowercasedBytes) {
    // FNV-1a 64 of "a" is 0xaf63dc4c8601ec8c.
    EXPECT_EQ(reference_bucket("a", 1000), 0xaf63dc4c8601ec8cull % 1000);
    EXPECT_EQ(reference_bucket("A", 1000), reference_bucket("a", 1000));
}

TEST(ReferenceEmbedder, SharedWordsRaiseSimilarity) {
    ReferenceEmbedder e(768);
    const auto q = e.embed_query("graphene thermal conductivity");
    const auto near = e.embed_document("thermal conductivity of graphene membranes");
    const auto far = e.embed_document("sleep deprivation impairs memory");
    EXPECT_GT(cosine_similarity(q, near), cosine_similarity(q, far));
}

TEST(HttpEmbedder, RestoresInputOrderAndBatches) {
    auto t = std::make_shared<ScriptedTransport>([](const RecordedRequest& r) { return indexed_reply(r, 4); });
    HttpEmbedder e(endpoint(4, 2), t, no_sleep());
    const std::vector<std::string> texts{"a", "b", "c", "d", "e"};
    const auto out = e.embed_batch(texts);
    ASSERT_EQ(out.size(), 5u);
    EXPECT_EQ(t->requests().size(), 3u);
    // Within each request, index i got first component i + 1.
    const std::vector<double> expect_first{1, 2, 1, 2, 1};
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::vector<double> raw(4, 0.5);
        raw[0] = expect_first[i];
        EXPECT_EQ(out[i], EmbeddingVector::normalize(raw)) << i;
    }
    const auto first = json::parse(t->requests()[0].body);
    EXPECT_EQ(first.at("model"), "m");
    EXPECT_EQ(first.at("input"), json::array({"a", "b"}));
}

TEST(HttpEmbedder, WrongWidthIsDimensionMismatch) {
    auto t = std::make_shared<ScriptedTransport>([](const RecordedRequest& r) { return indexed_reply(r, 3); });
    HttpEmbedder e(endpoint(4), t, no_sleep());
    EXPECT_THROW(e.embed_text("x"), DimensionMismatch);
}

TEST(HttpEmbedder, RetriesServerErrorsThenSucceeds) {
    int calls = 0;
    std::vector<std::chrono::milliseconds> slept;
    auto t = std::make_shared<ScriptedTransport>([&](const RecordedRequest& r) -> net::HttpResponse {
        if (++calls < 3) return {503, "busy", ""};
        return indexed_reply(r, 2);
    });
    net::RetryPolicy p;
    p.sleep = [&](std::chrono::milliseconds d) { slept.push_back(d); };
    HttpEmbedder e(endpoint(2), t, p);
    EXPECT_NO_THROW(e.embed_text("x"));
    EXPECT_EQ(calls, 3);
    EXPECT_EQ(slept, (std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(200),
                                                              std::chrono::milliseconds(400)}));
}

TEST(HttpEmbedder, GivesUpAfterThreeAttempts) {
    int calls = 0;
    auto t = std::make_shared<ScriptedTransport>([&](const RecordedRequest&) -> net::HttpResponse {
        ++calls;
        return {0, "", "connection refused"};
    });
    HttpEmbedder e(endpoint(2), t, no_sleep());
    EXPECT_THROW(e.embed_text("x"), EndpointUnavailable);
    EXPECT_EQ(calls, 3);
}

TEST(HttpEmbedder, ClientErrorsAreNotRetried) {
    int calls = 0;
    auto t = std::make_shared<ScriptedTransport>([&](const RecordedRequest&) -> net::HttpResponse {
        ++calls;
        return {400, "{}", ""};
    });
    HttpEmbedder e(endpoint(2), t, no_sleep());
    EXPECT_THROW(e.embed_text("x"), EndpointUnavailable);
    EXPECT_EQ(calls, 1);
}

TEST(HttpEmbedder, ErrorObjectIsModelError) {
    auto t = std::make_shared<ScriptedTransport>(
        [](const RecordedRequest&) { return net::HttpResponse{200, R"({"error":{"message":"bad"}})", ""}; });
    HttpEmbedder e(endpoint(2), t, no_sleep());
    EXPECT_THROW(e.embed_text("x"), ModelError);
}

TEST(EmbedderConfig, RequiresEndpoint) {
    EmbedderConfig c;
    EXPECT_THROW(c.validate(), InvalidArgument);
    auto t = std::make_shared<ScriptedTransport>([](const RecordedRequest&) { return net::HttpResponse{}; });
    EXPECT_THROW(HttpEmbedder(c, t), InvalidArgument);
}
