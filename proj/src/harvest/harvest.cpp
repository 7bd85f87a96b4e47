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

#include <cctype>
#include <fstream>
#include <future>
#include <thread>
#include <unordered_set>

#include "nanorag/harvest.hpp"

namespace nanorag::harvest {

SearchSpec::SearchSpec(std::vector<std::string> terms_in, std::optional<int> from, std::optional<int> to,
                       bool oa_only, std::size_t max)
    : terms(std::move(terms_in)), year_from(from), year_to(to), open_access_only(oa_only), max_results(max) {
    std::erase_if(terms, [](const std::string& t) { return normalize_text(t).empty(); });
    if (terms.empty()) throw InvalidArgument("search needs at least one term");
    if (year_from && year_to && *year_from > *year_to) throw InvalidArgument("year_from is after year_to");
    if (max_results == 0) throw InvalidArgument("max_results must be positive");
}

std::string build_query(const SearchSpec& spec) {
    std::string q;
    for (const auto& term : spec.terms) {
        std::string clean = normalize_text(term);
        std::erase(clean, '"');
        if (!q.empty()) q += ' ';
        q += '"' + clean + '"';
    }
    if (spec.year_from || spec.year_to) {
        q += " year:";
        if (spec.year_from) q += std::to_string(*spec.year_from);
        q += '-';
        if (spec.year_to) q += std::to_string(*spec.year_to);
    }
    if (spec.open_access_only) q += " is:oa";
    return q;
}

std::string_view to_string(FetchStatus s) {
    switch (s) {
        case FetchStatus::FullText: return "full-text";
        case FetchStatus::AbstractOnly: return "abstract-only";
        case FetchStatus::LinkOnly: return "link-only";
        case FetchStatus::Failed: return "failed";
    }
    return "failed";
}

FetchStatus fetch_status_from_string(std::string_view s) {
    if (s == "full-text") return FetchStatus::FullText;
    if (s == "abstract-only") return FetchStatus::AbstractOnly;
    if (s == "link-only") return FetchStatus::LinkOnly;
    if (s == "failed") return FetchStatus::Failed;
    throw InvalidArgument("unknown fetch_status: " + std::string(s));
}

std::string_view to_string(IdentifierKind k) {
    switch (k) {
        case IdentifierKind::Doi: return "doi";
        case IdentifierKind::Pii: return "pii";
        case IdentifierKind::Url: return "url";
    }
    return "doi";
}

IdentifierKind identifier_kind_from_string(std::string_view s) {
    if (s == "doi") return IdentifierKind::Doi;
    if (s == "pii") return IdentifierKind::Pii;
    if (s == "url") return IdentifierKind::Url;
    throw InvalidArgument("unknown identifier kind: " + std::string(s));
}

// ---------------------------------------------------------------------------

std::chrono::milliseconds SteadyClock::now() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now().time_since_epoch());
}

void SteadyClock::sleep_until(std::chrono::milliseconds t) {
    const auto current = now();
    if (t > current) std::this_thread::sleep_for(t - current);
}

RateLimiter::RateLimiter(Clock& clock, std::chrono::milliseconds delay) : clock_(clock), delay_(delay) {
    if (delay.count() < 0) throw InvalidArgument("rate limit delay must be non-negative");
}

void RateLimiter::acquire() {
    std::lock_guard lock(mu_);
    if (last_) clock_.sleep_until(*last_ + delay_);
    auto t = clock_.now();
    // Guard against clocks that wake a little early.
    while (last_ && t < *last_ + delay_) {
        clock_.sleep_until(*last_ + delay_);
        t = clock_.now();
    }
    last_ = t;
    grants_.push_back(t);
}

std::vector<std::chrono::milliseconds> RateLimiter::grants() const {
    std::lock_guard lock(mu_);
    return grants_;
}

// ---------------------------------------------------------------------------

std::vector<SourceRecord> fetch_records(SourceAdapter& source, const std::string& query, std::size_t max,
                                        RateLimiter& limiter) {
    std::vector<Listing> listing;
    limiter.acquire();
    try {
        listing = source.search(query, max);
    } catch (const SourceRequestFailed& e) {
        throw SourceUnavailable(std::string(source.name()) + ": search failed: " + e.what());
    }
    if (listing.size() > max) listing.resize(max);

    std::vector<SourceRecord> out;
    out.reserve(listing.size());
    for (const auto& item : listing) {
        limiter.acquire();
        try {
            auto rec = source.fetch(item);
            rec.meta.source = source.source();
            rec.identifier = item.identifier;
            rec.identifier_kind = item.kind;
            if (rec.fetch_status == FetchStatus::FullText && (!rec.text || rec.text->empty())) {
                rec.fetch_status = FetchStatus::LinkOnly;
            }
            out.push_back(std::move(rec));
        } catch (const SourceRequestFailed&) {
            SourceRecord failed;
            failed.meta = item.meta;
            failed.meta.source = source.source();
            failed.fetch_status = FetchStatus::Failed;
            failed.identifier = item.identifier;
            failed.identifier_kind = item.kind;
            out.push_back(std::move(failed));
        }
    }
    return out;
}

namespace {

std::string dedupe_key(const SourceRecord& r) {
    const auto doi = canonical_doi(r.meta.doi);
    if (!doi.empty()) return "doi:" + doi;
    std::string title = normalize_text(r.meta.title);
    for (auto& c : title) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return "title:" + title + "|" + std::to_string(r.meta.year);
}

}  // namespace

std::vector<SourceRecord> dedupe(std::span<const SourceRecord> records) {
    std::vector<SourceRecord> out;
    std::unordered_set<std::string> seen;
    for (const auto& r : records) {
        if (seen.insert(dedupe_key(r)).second) out.push_back(r);
    }
    return out;
}

std::size_t emit_corpus(std::span<const SourceRecord> records, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write corpus " + path);
    std::size_t written = 0;
    for (const auto& r : records) {
        if (r.fetch_status != FetchStatus::FullText || !r.text || normalize_text(*r.text).empty()) continue;
        DocumentMeta meta = r.meta;
        meta.doi = canonical_doi(meta.doi);
        try {
            meta.validate();
        } catch (const InvalidArgument&) {
            continue;
        }
        out << render_corpus_line(meta, *r.text) << '\n';
        ++written;
    }
    out.flush();
    if (!out) throw IoError("write failed: " + path);
    return written;
}

HarvestReport run_harvest(std::span<const SourceJob> jobs, const SearchSpec& spec, const std::string& out_path) {
    const std::string query = build_query(spec);
    std::vector<std::future<std::vector<SourceRecord>>> pending;
    pending.reserve(jobs.size());
    for (const auto& job : jobs) {
        pending.push_back(std::async(std::launch::async, [&job, &query, &spec] {
            return fetch_records(*job.adapter, query, spec.max_results, *job.limiter);
        }));
    }

    HarvestReport report;
    std::vector<SourceRecord> all;
    for (std::size_t i = 0; i < pending.size(); ++i) {
        try {
            auto recs = pending[i].get();
            report.fetched += recs.size();
            std::move(recs.begin(), recs.end(), std::back_inserter(all));
        } catch (const SourceUnavailable& e) {
            ++report.failed_sources;
            report.errors.push_back(e.what());
        }
    }
    const auto unique = dedupe(all);
    report.after_dedupe = unique.size();
    report.written = emit_corpus(unique, out_path);
    return report;
}

}  // namespace nanorag::harvest
