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

#include <random>

#include "gtest/gtest.h"
#include "json.hpp"
#include "nanorag/errors.hpp"
#include "nanorag/rag.hpp"
#include "test_support.hpp"

using namespace nanorag;
using nlohmann::json;
using testutil::RecordedRequest;
using testutil::ScriptedTransport;

namespace {

ContextBlock block(std::size_t rank, const std::string& text) {
    DocumentMeta m{"10.1000/d" + std::to_string(rank), "Title " + std::to_string(rank), {"A"}, 2020,
                   SourceKind::Other, std::nullopt};
    return {m.doi + "#0", text, m, rank};
}

std::string words(std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += "w" + std::to_string(i) + " ";
    return s;
}

net::RetryPolicy no_sleep() {
    net::RetryPolicy p;
    p.sleep = [](std::chrono::milliseconds) {};
    return p;
}

std::shared_ptr<HttpChatClient> echo_client(std::shared_ptr<ScriptedTransport> t) {
    return std::make_shared<HttpChatClient>(ChatEndpointConfig{"http://chat.test/v1/chat/completions", "mock", 1000},
                                            t, no_sleep());
}

}  // namespace

TEST(GenerationConfig, Defaults) {
    GenerationConfig g;
    EXPECT_EQ(g.max_new_tokens, 700u);
    EXPECT_DOUBLE_EQ(g.temperature, 0.3);
    EXPECT_EQ(RetrievalConfig{}.k, 3u);
    g.temperature = 2.5;
    EXPECT_THROW(g.validate(), InvalidArgument);
}

TEST(Prompt, MessageLayout) {
    GenerationConfig cfg;
    cfg.system_text = "SYS";
    std::vector<ContextBlock> blocks{block(1, "alpha text"), block(2, "beta text")};
    std::vector<HistoryTurn> history{{"q0", "a0"}};
    const auto p = assemble_prompt("why?", blocks, history, cfg);
    const auto msgs = p.messages();
    ASSERT_EQ(msgs.size(), 4u);
    EXPECT_EQ(msgs[0], (ChatMessage{"system", "SYS"}));
    EXPECT_EQ(msgs[1], (ChatMessage{"user", "q0"}));
    EXPECT_EQ(msgs[2], (ChatMessage{"assistant", "a0"}));
    EXPECT_EQ(msgs[3].content,
              "Context:\n\n[1] Title 1 (2020). DOI: 10.1000/d1\nalpha text\n\n"
              "[2] Title 2 (2020). DOI: 10.1000/d2\nbeta text\n\nQuestion: why?");
    std::size_t total = 0;
    for (const auto& m : msgs) total += count_tokens(m.content);
    EXPECT_EQ(p.total_tokens, total);
}

TEST(Prompt, NoBlocksIsJustTheQuestion) {
    const auto p = assemble_prompt("q", {}, {}, GenerationConfig{});
    EXPECT_EQ(p.messages().back().content, "Question: q");
}

TEST(Prompt, BudgetAdmitsTwoOfThreeBlocks) {
    GenerationConfig cfg;
    cfg.system_text = "S";
    std::vector<ContextBlock> blocks{block(1, words(100)), block(2, words(100)), block(3, words(100))};
    const auto one = assemble_prompt("q", std::span(blocks).first(1), {}, GenerationConfig{cfg});
    const auto two = assemble_prompt("q", std::span(blocks).first(2), {}, GenerationConfig{cfg});
    cfg.context_budget_tokens = two.total_tokens + (two.total_tokens - one.total_tokens) / 2;
    const auto p = assemble_prompt("q", blocks, {}, cfg);
    ASSERT_EQ(p.context_blocks.size(), 2u);
    EXPECT_EQ(p.context_blocks[0].rank, 1u);
    EXPECT_EQ(p.context_blocks[1].rank, 2u);
    EXPECT_LE(p.total_tokens, cfg.context_budget_tokens);
}

TEST(Prompt, OversizedBlockIsSkippedNotTruncated) {
    GenerationConfig cfg;
    cfg.system_text = "S";
    cfg.context_budget_tokens = 150;
    std::vector<ContextBlock> blocks{block(1, words(500)), block(2, words(20))};
    const auto p = assemble_prompt("q", blocks, {}, cfg);
    ASSERT_EQ(p.context_blocks.size(), 1u);
    EXPECT_EQ(p.context_blocks[0].rank, 2u);
}

TEST(Prompt, BudgetTooSmallForQuestion) {
    GenerationConfig cfg;
    cfg.context_budget_tokens = 5;
    EXPECT_THROW(assemble_prompt("a long question that does not fit", {}, {}, cfg), BudgetTooSmall);
    EXPECT_THROW(assemble_prompt("", {}, {}, GenerationConfig{}), InvalidArgument);
}

TEST(Prompt, HistoryNewestFirstCappedAtFourTurns) {
    std::vector<HistoryTurn> history;
    for (int i = 0; i < 7; ++i) history.push_back({"q" + std::to_string(i), "a" + std::to_string(i)});
    const auto p = assemble_prompt("now", {}, history, GenerationConfig{});
    ASSERT_EQ(p.history.size(), 4u);
    EXPECT_EQ(p.history.front().question, "q3");
    EXPECT_EQ(p.history.back().question, "q6");
}

TEST(Prompt, BudgetNeverExceededUnderFuzzing) {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<std::size_t> len(1, 120), nblocks(0, 6), nhist(0, 6), budget(40, 900);
    for (int trial = 0; trial < 300; ++trial) {
        GenerationConfig cfg;
        cfg.system_text = "Answer from context.";
        cfg.context_budget_tokens = budget(rng);
        std::vector<ContextBlock> blocks;
        for (std::size_t i = 0, n = nblocks(rng); i < n; ++i) blocks.push_back(block(i + 1, words(len(rng))));
        std::vector<HistoryTurn> history;
        for (std::size_t i = 0, n = nhist(rng); i < n; ++i) history.push_back({words(len(rng) / 4 + 1), words(len(rng))});
        try {
            const auto p = assemble_prompt("what is it?", blocks, history, cfg);
            std::size_t total = 0;
            for (const auto& m : p.messages()) total += count_tokens(m.content);
            EXPECT_EQ(total, p.total_tokens);
            EXPECT_LE(total, cfg.context_budget_tokens);
        } catch (const BudgetTooSmall&) {
        }
    }
}

TEST(ChatRequest, CarriesExactParameters) {
    GenerationConfig cfg;
    cfg.temperature = 1.5;
    cfg.max_new_tokens = 42;
    const auto body = render_chat_request({{"system", "s"}, {"user", "u"}}, cfg, "model-x");
    EXPECT_EQ(body,
              R"({"model":"model-x","temperature":1.5,"max_tokens":42,"messages":[{"role":"system","content":"s"},)"
              R"({"role":"user","content":"u"}]})");
}

TEST(ChatResponse, ParsesContentAndErrors) {
    EXPECT_EQ(parse_chat_response(testutil::chat_reply("hi").body), "hi");
    EXPECT_THROW(parse_chat_response(R"({"error":{"message":"overloaded"}})"), ModelError);
    EXPECT_THROW(parse_chat_response(R"({"choices":[]})"), ModelError);
    EXPECT_THROW(parse_chat_response("not json"), ModelError);
}

TEST(HttpChatClient, RetriesThenFails) {
    int calls = 0;
    auto t = std::make_shared<ScriptedTransport>([&](const RecordedRequest&) -> net::HttpResponse {
        ++calls;
        return {502, "", ""};
    });
    EXPECT_THROW(echo_client(t)->complete({{"user", "x"}}, GenerationConfig{}), EndpointUnavailable);
    EXPECT_EQ(calls, 3);
}

TEST(References, DedupKeepsFirstRankOrder) {
    std::map<std::string, DocumentMeta> metas{
        {"10.1/a", {"10.1/a", "Alpha", {"Ann Lee", "Bo Ma"}, 2019, SourceKind::Other, {}}},
        {"10.1/b", {"10.1/b", "Beta", {"Cy Oh"}, 2021, SourceKind::Other, {}}},
    };
    auto lookup = [&](std::string_view id) -> std::optional<DocumentMeta> {
        auto it = metas.find(std::string(id));
        if (it == metas.end()) return std::nullopt;
        return it->second;
    };
    std::vector<RetrievalHit> hits{{"10.1/b#0", "10.1/b", 0.9, 1}, {"10.1/a#0", "10.1/a", 0.8, 2},
                                   {"10.1/b#1", "10.1/b", 0.7, 3}};
    const auto refs = format_references(hits, lookup);
    ASSERT_EQ(refs.size(), 2u);
    EXPECT_EQ(render_references(refs),
              "References:\n[1] Cy Oh (2021). Beta. DOI: 10.1/b\n[2] Ann Lee, Bo Ma (2019). Alpha. DOI: 10.1/a");

    std::vector<RetrievalHit> orphan{{"x#0", "x", 0.5, 1}};
    EXPECT_THROW(format_references(orphan, lookup), MissingMetadata);

    Answer a;
    a.text = "Body.";
    EXPECT_EQ(render_answer(a), "Body.\n");
    a.references = refs;
    EXPECT_EQ(render_answer(a), "Body.\n\n" + render_references(refs) + "\n");
}

TEST(Engine, AnswersWithReferencesAndHistory) {
    auto t = testutil::echo_chat_transport();
    Engine engine(std::make_shared<ReferenceEmbedder>(256), echo_client(t));
    for (const auto& line : read_lines(testutil::fixture("corpus10.jsonl"))) engine.ingest(parse_corpus_line(line));
    EXPECT_EQ(engine.documents().document_count(), 10u);

    ChatSession session;
    const auto first = engine.answer_query("How does humidity degrade perovskite solar cells?", session,
                                           RetrievalConfig{}, GenerationConfig{});
    ASSERT_FALSE(first.references.empty());
    EXPECT_EQ(first.references[0].doi, "10.1000/perovskite.2019.001");
    EXPECT_EQ(first.hits.size(), 3u);
    EXPECT_EQ(session.turns.size(), 1u);

    engine.answer_query("And what about encapsulation?", session, RetrievalConfig{}, GenerationConfig{});
    const auto second = json::parse(t->requests().back().body);
    const auto& msgs = second.at("messages");
    ASSERT_EQ(msgs.size(), 4u);
    EXPECT_EQ(msgs[1].at("content"), "How does humidity degrade perovskite solar cells?");
    EXPECT_EQ(msgs[2].at("content"), first.text);
    EXPECT_EQ(session.turns.size(), 2u);
    EXPECT_LE(session.turns[0].timestamp_ms, session.turns[1].timestamp_ms);
}

TEST(Engine, EmptyIndexAnswersWithoutReferences) {
    Engine engine(std::make_shared<ReferenceEmbedder>(64), echo_client(testutil::echo_chat_transport()));
    ChatSession s;
    const auto a = engine.answer_query("anything?", s, RetrievalConfig{}, GenerationConfig{});
    EXPECT_TRUE(a.references.empty());
    EXPECT_EQ(a.text, "echo: Question: anything?");
}

TEST(Engine, DuplicateAndBadLinesAreCounted) {
    Engine engine(std::make_shared<ReferenceEmbedder>(64), nullptr);
    auto lines = read_lines(testutil::fixture("corpus10.jsonl"));
    lines.push_back(lines[0]);
    lines.push_back("{broken");
    lines.push_back(R"({"doi":"10.1/x","title":"t","year":2020,"text":"   "})");
    const auto c = engine.ingest_lines(lines);
    EXPECT_EQ(c.ingested, 10u);
    EXPECT_EQ(c.skipped_duplicates, 1u);
    EXPECT_EQ(c.failed, 2u);
    ChatSession s;
    EXPECT_THROW(engine.answer_query("q", s, RetrievalConfig{}, GenerationConfig{}), EndpointUnavailable);
}

TEST(Engine, SaveLoadRestoresSearch) {
    Engine a(std::make_shared<ReferenceEmbedder>(64), nullptr);
    a.ingest_lines(read_lines(testutil::fixture("corpus10.jsonl")));
    const auto path = ::testing::TempDir() + "/engine_test.snap";
    a.save(path);
    Engine b(std::make_shared<ReferenceEmbedder>(64), nullptr);
    b.load(path);
    EXPECT_EQ(b.index().serialize(), a.index().serialize());
    EXPECT_EQ(b.documents().document_count(), 10u);
    Engine wrong(std::make_shared<ReferenceEmbedder>(32), nullptr);
    EXPECT_THROW(wrong.load(path), DimensionMismatch);
}
