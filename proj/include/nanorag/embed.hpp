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
#include <memory>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nanorag/corpus.hpp"
#include "nanorag/net/http.hpp"

namespace nanorag {

/// Fixed-width f64 vector with unit L2 norm. Only constructible through
/// normalization or from values that already satisfy the invariant, so every
/// instance in the system can be compared with a plain dot product.
class EmbeddingVector {
public:
    EmbeddingVector() = default;

    /// v / ||v||. Throws ZeroVector when ||v|| < 1e-12, InvalidArgument on
    /// empty input or non-finite components.
    static EmbeddingVector normalize(std::span<const double> raw);

    /// Adopts already-unit values bit-exactly (snapshot load, wire decode).
    /// Throws InvalidArgument if | ||v|| - 1 | >= 1e-9 or a component is not
    /// finite.
    static EmbeddingVector from_unit(std::vector<double> values);

    std::span<const double> values() const { return values_; }
    std::size_t dim() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    bool operator==(const EmbeddingVector&) const = default;

private:
    explicit EmbeddingVector(std::vector<double> v) : values_(std::move(v)) {}

    std::vector<double> values_;
};

inline EmbeddingVector normalize(std::span<const double> raw) { return EmbeddingVector::normalize(raw); }

/// Text -> unit vector contract shared by the query and document call sites.
class Embedder {
public:
    virtual ~Embedder() = default;

    virtual std::size_t dim() const = 0;
    virtual std::string_view name() const = 0;

    /// One vector per input, in input order.
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) = 0;

    EmbeddingVector embed_text(const std::string& text);

    // Both roles go through the same model today; keeping two call sites lets
    // a deployment split them without touching callers.
    EmbeddingVector embed_query(const std::string& text) { return embed_text(text); }
    EmbeddingVector embed_document(const std::string& text) { return embed_text(text); }
};

// ---------------------------------------------------------------------------
// Reference (hash) embedder
// ---------------------------------------------------------------------------

/// Bucket a reference token lands in. ASCII letters are folded to lower case
/// before hashing (FNV-1a, 64-bit).
std::size_t reference_bucket(std::string_view token, std::size_t dim);

/// Bag-of-tokens hash embedding: count tokens per bucket, then normalize.
/// Throws InvalidArgument if dim < 2, ZeroVector if `text` has no tokens.
EmbeddingVector reference_embed(std::string_view text, std::size_t dim);

class ReferenceEmbedder final : public Embedder {
public:
    explicit ReferenceEmbedder(std::size_t dim = 768);

    std::size_t dim() const override { return dim_; }
    std::string_view name() const override { return "reference"; }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

private:
    std::size_t dim_;
};

// ---------------------------------------------------------------------------
// HTTP embedder
// ---------------------------------------------------------------------------

struct EmbedderConfig {
    std::string endpoint_url;
    std::string model_name;
    std::size_t dim = 768;
    int timeout_ms = 30000;
    std::size_t max_batch = 32;
    std::ptrdiff_t max_in_flight = 4;

    void validate() const;

    /// Reads EMBED_URL, EMBED_MODEL and EMBED_DIM over the given defaults.
    static EmbedderConfig from_env(EmbedderConfig defaults);
    static EmbedderConfig from_env();
};

/// Client for `POST {endpoint_url}` with body
/// `{"model": ..., "input": [...]}`, answering `{"data": [{"index", "embedding"}]}`.
/// Thread-safe; concurrent requests are capped at max_in_flight.
class HttpEmbedder final : public Embedder {
public:
    HttpEmbedder(EmbedderConfig cfg, std::shared_ptr<net::HttpTransport> transport, net::RetryPolicy retry = {});

    std::size_t dim() const override { return cfg_.dim; }
    std::string_view name() const override { return cfg_.model_name; }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

    const EmbedderConfig& config() const { return cfg_; }

private:
    std::vector<EmbeddingVector> embed_one_request(std::span<const std::string> texts);

    EmbedderConfig cfg_;
    std::shared_ptr<net::HttpTransport> transport_;
    net::RetryPolicy retry_;
    std::counting_semaphore<1024> in_flight_;
};

}  // namespace nanorag
