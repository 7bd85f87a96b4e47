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

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "gtest/gtest.h"
#include "nanorag/errors.hpp"
#include "nanorag/index.hpp"
#include "test_support.hpp"

using namespace nanorag;
using testutil::brute_force_top_k;
using testutil::random_vector;

namespace {

std::string id(std::size_t i) { return "c" + std::to_string(i); }

struct Fixture {
    VectorIndex index{16};
    std::vector<std::vector<double>> raw;

    explicit Fixture(std::size_t n, std::uint64_t seed = 1) {
        std::mt19937_64 rng(seed);
        for (std::size_t i = 0; i < n; ++i) {
            // Every fifth row repeats an earlier one to force score ties.
            raw.push_back(i % 5 == 4 ? raw[i / 2] : random_vector(rng, 16));
            index.insert_raw(id(i), "d" + std::to_string(i % 7), raw.back());
        }
    }
};

}  // namespace

TEST(Cosine, BasicValues) {
    EXPECT_DOUBLE_EQ(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
    EXPECT_NEAR(cosine_similarity(std::vector<double>{1, 2}, std::vector<double>{2, 4}), 1.0, 1e-12);
    EXPECT_NEAR(cosine_similarity(std::vector<double>{1, 2}, std::vector<double>{-1, -2}), -1.0, 1e-12);
    EXPECT_THROW(cosine_similarity(std::vector<double>{1, 2}, std::vector<double>{1}), DimensionMismatch);
    EXPECT_THROW(cosine_similarity(std::vector<double>{0, 0}, std::vector<double>{1, 1}), ZeroVector);
}

TEST(RoundScore, RoundsAndClamps) {
    EXPECT_EQ(round_score(0.1234567894), 0.123456789);
    EXPECT_EQ(round_score(1.0000000004), 1.0);
    EXPECT_EQ(round_score(-1.2), -1.0);
}

TEST(VectorIndex, MatchesBruteForceWithTies) {
    Fixture f(300);
    std::mt19937_64 rng(99);
    for (int q = 0; q < 50; ++q) {
        const auto query = random_vector(rng, 16);
        const auto hits = f.index.search_top_k(EmbeddingVector::normalize(query), 25);
        const auto want = brute_force_top_k(f.raw, query, 25);
        ASSERT_EQ(hits.size(), want.size());
        for (std::size_t i = 0; i < hits.size(); ++i) {
            EXPECT_EQ(hits[i].chunk_id, id(want[i].row));
            EXPECT_EQ(hits[i].rank, i + 1);
            EXPECT_NEAR(hits[i].score, want[i].score, 1e-9);
        }
    }
}

TEST(VectorIndex, SmallIndexReturnsEverything) {
    Fixture f(4);
    const auto hits = f.index.search_top_k(EmbeddingVector::normalize(f.raw[0]), 10);
    EXPECT_EQ(hits.size(), 4u);
    EXPECT_EQ(hits[0].chunk_id, "c0");
    EXPECT_EQ(hits[0].score, 1.0);
    EXPECT_TRUE(VectorIndex(16).search_top_k(EmbeddingVector::normalize(f.raw[0]), 3).empty());
    EXPECT_TRUE(f.index.search_top_k(EmbeddingVector::normalize(f.raw[0]), 0).empty());
}

TEST(VectorIndex, RejectsBadInserts) {
    Fixture f(3);
    EXPECT_THROW(f.index.insert_raw("c0", "d", f.raw[0]), DuplicateChunk);
    EXPECT_THROW(f.index.insert_raw("x", "d", std::vector<double>(8, 1.0)), DimensionMismatch);
    EXPECT_THROW(f.index.insert_raw("x", "d", std::vector<double>(16, 0.0)), ZeroVector);
    EXPECT_THROW(f.index.insert_raw("", "d", f.raw[0]), InvalidArgument);
    EXPECT_EQ(f.index.size(), 3u);
}

TEST(VectorIndex, RemoveDocumentKeepsTieOrder) {
    Fixture f(40);
    const auto removed = f.index.remove_document("d3");
    EXPECT_GT(removed, 0u);
    EXPECT_EQ(f.index.size(), 40u - removed);
    EXPECT_EQ(f.index.remove_document("d3"), 0u);

    std::vector<std::vector<double>> kept;
    std::vector<std::size_t> kept_ids;
    for (std::size_t i = 0; i < f.raw.size(); ++i) {
        if (i % 7 == 3) continue;
        kept.push_back(f.raw[i]);
        kept_ids.push_back(i);
    }
    std::mt19937_64 rng(5);
    const auto query = random_vector(rng, 16);
    const auto hits = f.index.search_top_k(EmbeddingVector::normalize(query), 40);
    const auto want = brute_force_top_k(kept, query, 40);
    ASSERT_EQ(hits.size(), want.size());
    for (std::size_t i = 0; i < hits.size(); ++i) EXPECT_EQ(hits[i].chunk_id, id(kept_ids[want[i].row]));

    // Reinserting after removal gets a fresh, later sequence number.
    const auto seq = f.index.insert_raw("c3", "d3", f.raw[3]);
    EXPECT_GT(seq, 40u);
}

TEST(VectorIndex, SnapshotRoundTripIsBitExact) {
    Fixture f(120);
    f.index.remove_document("d1");
    const auto bytes = f.index.serialize();
    const auto loaded = VectorIndex::deserialize(bytes);
    EXPECT_EQ(loaded.serialize(), bytes);
    const auto a = f.index.entries();
    const auto b = loaded.entries();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].chunk_id, b[i].chunk_id);
        EXPECT_EQ(a[i].insert_seq, b[i].insert_seq);
        EXPECT_EQ(0, std::memcmp(a[i].vector.values().data(), b[i].vector.values().data(), 16 * sizeof(double)));
    }
}

TEST(VectorIndex, CorruptSnapshotsAreRejected) {
    Fixture f(20);
    const auto bytes = f.index.serialize();
    for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{12}, bytes.size() / 2, bytes.size() - 1}) {
        EXPECT_THROW(VectorIndex::deserialize(std::string_view(bytes).substr(0, cut)), CorruptSnapshot) << cut;
    }
    auto flipped = bytes;
    flipped[bytes.size() / 2] ^= 0x10;
    EXPECT_THROW(VectorIndex::deserialize(flipped), CorruptSnapshot);
    auto magic = bytes;
    magic[0] = 'X';
    EXPECT_THROW(VectorIndex::deserialize(magic), CorruptSnapshot);
}

TEST(VectorIndex, SnapshotFileRoundTrip) {
    Fixture f(30);
    const auto path = ::testing::TempDir() + "/index_test.snap";
    f.index.snapshot(path);
    EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
    const auto loaded = VectorIndex::load(path);
    EXPECT_EQ(loaded.serialize(), f.index.serialize());
    EXPECT_THROW(VectorIndex::load(path + ".missing"), IoError);

    std::filesystem::resize_file(path, std::filesystem::file_size(path) - 3);
    EXPECT_THROW(VectorIndex::load(path), CorruptSnapshot);
}

TEST(VectorIndex, ConcurrentReadersDuringWrites) {
    VectorIndex index(8);
    std::mt19937_64 rng(1);
    std::vector<std::vector<double>> vecs;
    for (int i = 0; i < 400; ++i) vecs.push_back(random_vector(rng, 8));
    std::atomic<bool> done{false};
    std::atomic<int> bad{0};
    std::thread reader([&] {
        std::mt19937_64 r(2);
        while (!done) {
            const auto hits = index.search_top_k(EmbeddingVector::normalize(random_vector(r, 8)), 5);
            for (std::size_t i = 1; i < hits.size(); ++i) {
                if (hits[i - 1].score < hits[i].score) ++bad;
            }
        }
    });
    for (int i = 0; i < 400; ++i) {
        index.insert_raw(id(i), "d", vecs[i]);
        // Read-your-writes: the row just written is its own nearest match.
        const auto hits = index.search_top_k(EmbeddingVector::normalize(vecs[i]), 1);
        if (hits.empty() || hits[0].chunk_id != id(i)) ++bad;
    }
    done = true;
    reader.join();
    EXPECT_EQ(bad, 0);
}
