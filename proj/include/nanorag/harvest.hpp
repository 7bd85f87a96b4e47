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
#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nanorag/config.hpp"
#include "nanorag/corpus.hpp"
#include "nanorag/errors.hpp"
#include "nanorag/net/http.hpp"

namespace nanorag::harvest {

struct SearchSpec {
    std::vector<std::string> terms;
    std::optional<int> year_from;
    std::optional<int> year_to;
    bool open_access_only = false;
    std::size_t max_results = 100;

    /// Throws InvalidArgument on empty terms, an inverted year range or a
    /// zero result cap.
    explicit SearchSpec(std::vector<std::string> terms, std::optional<int> year_from = std::nullopt,
                        std::optional<int> year_to = std::nullopt, bool open_access_only = false,
                        std::size_t max_results = 100);
};

/// `"t1" "t2" year:Y1-Y2`; open-access adds ` is:oa`. Deterministic.
std::string build_query(const SearchSpec& spec);

enum class FetchStatus { FullText, AbstractOnly, LinkOnly, Failed };
std::string_view to_string(FetchStatus s);
FetchStatus fetch_status_from_string(std::string_view s);

/// How a listing names the paper when full text is requested.
enum class IdentifierKind { Doi, Pii, Url };
std::string_view to_string(IdentifierKind k);
IdentifierKind identifier_kind_from_string(std::string_view s);

struct SourceRecord {
    DocumentMeta meta;
    std::optional<std::string> text;
    FetchStatus fetch_status = FetchStatus::Failed;
    std::string identifier;
    IdentifierKind identifier_kind = IdentifierKind::Doi;
};

/// One search-result row: enough to request full text and to describe the
/// paper if that request fails.
struct Listing {
    std::string identifier;
    IdentifierKind kind = IdentifierKind::Doi;
    DocumentMeta meta;
};

/// A single request to a source failed (network, HTTP status, bad body).
class SourceRequestFailed : public Error {
public:
    using Error::Error;
};

class SourceAdapter {
public:
    virtual ~SourceAdapter() = default;
    virtual std::string_view name() const = 0;
    virtual SourceKind source() const = 0;
    /// One request. Throws SourceRequestFailed.
    virtual std::vector<Listing> search(const std::string& query, std::size_t max) = 0;
    /// One request. Throws SourceRequestFailed.
    virtual SourceRecord fetch(const Listing& listing) = 0;
};

// ---------------------------------------------------------------------------
// Rate limiting
// ---------------------------------------------------------------------------

class Clock {
public:
    virtual ~Clock() = default;
    virtual std::chrono::milliseconds now() = 0;
    virtual void sleep_until(std::chrono::milliseconds t) = 0;
};

class SteadyClock final : public Clock {
public:
    std::chrono::milliseconds now() override;
    void sleep_until(std::chrono::milliseconds t) override;
};

/// Time only moves when someone sleeps.
class VirtualClock final : public Clock {
public:
    std::chrono::milliseconds now() override { return now_; }
    void sleep_until(std::chrono::milliseconds t) override { now_ = std::max(now_, t); }
    void advance(std::chrono::milliseconds d) { now_ += d; }

private:
    std::chrono::milliseconds now_{0};
};

/// Serializes requests to one source and spaces them at least `delay` apart.
class RateLimiter {
public:
    RateLimiter(Clock& clock, std::chrono::milliseconds delay);

    /// Blocks until the next request may go out, then records its time.
    void acquire();

    /// Time of every granted request, in order.
    std::vector<std::chrono::milliseconds> grants() const;

private:
    Clock& clock_;
    std::chrono::milliseconds delay_;
    mutable std::mutex mu_;
    std::optional<std::chrono::milliseconds> last_;
    std::vector<std::chrono::milliseconds> grants_;
};

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

/// Searches once, then fetches each listing (at most `max`), all through
/// `limiter`. A failed fetch yields a FetchStatus::Failed record; the batch
/// continues. Throws SourceUnavailable only if no request succeeded.
std::vector<SourceRecord> fetch_records(SourceAdapter& source, const std::string& query, std::size_t max,
                                        RateLimiter& limiter);

/// First occurrence per canonical DOI wins; records without a DOI are keyed
/// by (case-folded title, year). Order preserved.
std::vector<SourceRecord> dedupe(std::span<const SourceRecord> records);

/// Writes full-text records with valid metadata as corpus JSONL and returns
/// how many lines were written. Throws IoError.
std::size_t emit_corpus(std::span<const SourceRecord> records, const std::string& path);

struct SourceJob {
    SourceAdapter* adapter;
    RateLimiter* limiter;
};

struct HarvestReport {
    std::size_t fetched = 0;
    std::size_t failed_sources = 0;
    std::size_t after_dedupe = 0;
    std::size_t written = 0;
    std::vector<std::string> errors;
};

/// Runs every source (concurrently; results merged in job order), dedupes
/// and emits. A source that is entirely unavailable is reported, not fatal.
HarvestReport run_harvest(std::span<const SourceJob> jobs, const SearchSpec& spec, const std::string& out_path);

// ---------------------------------------------------------------------------
// Adapters
// ---------------------------------------------------------------------------

/// Replays canned responses from a JSON fixture:
///
///     {"name": "...", "source": "elsevier-api", "search_status": 200,
///      "listing": [{"identifier": "...", "kind": "doi", "meta": {...}}],
///      "responses": {"<identifier>": {"status": 200, "record": {...}}}}
///
/// A record is the corpus JSON object plus an optional "fetch_status".
class FixtureReplayAdapter final : public SourceAdapter {
public:
    static FixtureReplayAdapter from_json(std::string_view fixture_json);
    static FixtureReplayAdapter from_file(const std::string& path);

    std::string_view name() const override { return name_; }
    SourceKind source() const override { return source_; }
    std::vector<Listing> search(const std::string& query, std::size_t max) override;
    SourceRecord fetch(const Listing& listing) override;

    /// Every request seen, as "search:<query>" or "fetch:<identifier>".
    const std::vector<std::string>& request_log() const { return log_; }

private:
    struct Response {
        int status = 200;
        std::optional<SourceRecord> record;
    };

    FixtureReplayAdapter() = default;

    std::string name_;
    SourceKind source_ = SourceKind::Other;
    int search_status_ = 200;
    std::vector<Listing> listing_;
    std::vector<std::pair<std::string, Response>> responses_;
    std::vector<std::string> log_;
};

struct HttpSourceSettings {
    std::string name;
    SourceKind source = SourceKind::Other;
    std::string base_url;
    /// Name of the environment variable holding the API key, if any.
    std::string api_key_env;
    std::string api_key_header = "X-ELS-APIKey";
    std::chrono::milliseconds delay{2000};
    std::size_t max_results = 100;
    int timeout_ms = 30000;
};

/// Reads one HttpSourceSettings per `[section]` of a harvest config.
std::vector<HttpSourceSettings> sources_from_config(const KeyValueConfig& cfg);

/// Plain-HTTP JSON source:
///   GET {base_url}/search?query=<q>&count=<n>  -> {"listing": [...]}
///   GET {base_url}/article/<kind>/<identifier> -> record object
/// Shapes match the fixture format.
class HttpSourceAdapter final : public SourceAdapter {
public:
    HttpSourceAdapter(HttpSourceSettings settings, std::shared_ptr<net::HttpTransport> transport);

    std::string_view name() const override { return settings_.name; }
    SourceKind source() const override { return settings_.source; }
    std::vector<Listing> search(const std::string& query, std::size_t max) override;
    SourceRecord fetch(const Listing& listing) override;

private:
    net::Headers headers() const;

    HttpSourceSettings settings_;
    std::shared_ptr<net::HttpTransport> transport_;
};

/// Percent-encodes everything outside RFC 3986 unreserved characters.
std::string url_encode(std::string_view s);

}  // namespace nanorag::harvest
