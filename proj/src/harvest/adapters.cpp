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
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nanorag/harvest.hpp"

namespace nanorag::harvest {

using json = nlohmann::json;

namespace {

// Lenient: listings may lack a DOI or year, which dedupe and emit handle.
DocumentMeta meta_from_json(const json& j) {
    DocumentMeta m;
    m.doi = j.value("doi", std::string{});
    m.title = j.value("title", std::string{});
    if (auto it = j.find("authors"); it != j.end() && it->is_array()) m.authors = it->get<std::vector<std::string>>();
    m.year = j.value("year", 0);
    if (auto it = j.find("url"); it != j.end() && it->is_string()) m.url = it->get<std::string>();
    if (auto it = j.find("source"); it != j.end() && it->is_string()) {
        m.source = source_kind_from_string(it->get<std::string>());
    }
    return m;
}

Listing listing_from_json(const json& j) {
    Listing l;
    l.identifier = j.at("identifier").get<std::string>();
    l.kind = identifier_kind_from_string(j.value("kind", std::string("doi")));
    if (auto it = j.find("meta"); it != j.end() && it->is_object()) l.meta = meta_from_json(*it);
    if (l.meta.doi.empty() && l.kind == IdentifierKind::Doi) l.meta.doi = l.identifier;
    return l;
}

SourceRecord record_from_json(const json& j) {
    SourceRecord r;
    r.meta = meta_from_json(j);
    if (auto it = j.find("text"); it != j.end() && it->is_string()) r.text = it->get<std::string>();
    const auto default_status = r.text && !r.text->empty() ? "full-text" : "link-only";
    r.fetch_status = fetch_status_from_string(j.value("fetch_status", std::string(default_status)));
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------

FixtureReplayAdapter FixtureReplayAdapter::from_json(std::string_view fixture_json) {
    FixtureReplayAdapter a;
    try {
        const auto j = json::parse(fixture_json);
        a.name_ = j.value("name", std::string("fixture"));
        a.source_ = source_kind_from_string(j.value("source", std::string("other")));
        a.search_status_ = j.value("search_status", 200);
        for (const auto& item : j.value("listing", json::array())) a.listing_.push_back(listing_from_json(item));
        if (auto it = j.find("responses"); it != j.end()) {
            for (const auto& [id, resp] : it->items()) {
                Response r;
                r.status = resp.value("status", 200);
                if (auto rec = resp.find("record"); rec != resp.end() && rec->is_object()) {
                    r.record = record_from_json(*rec);
                }
                a.responses_.emplace_back(id, std::move(r));
            }
        }
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("bad harvest fixture: ") + e.what());
    }
    return a;
}

FixtureReplayAdapter FixtureReplayAdapter::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open fixture " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::vector<Listing> FixtureReplayAdapter::search(const std::string& query, std::size_t max) {
    log_.push_back("search:" + query);
    if (search_status_ != 200) {
        throw SourceRequestFailed(name_ + ": search returned HTTP " + std::to_string(search_status_));
    }
    std::vector<Listing> out(listing_.begin(), listing_.begin() + static_cast<std::ptrdiff_t>(
                                                                    std::min(max, listing_.size())));
    return out;
}

SourceRecord FixtureReplayAdapter::fetch(const Listing& listing) {
    log_.push_back("fetch:" + listing.identifier);
    for (const auto& [id, resp] : responses_) {
        if (id != listing.identifier) continue;
        if (resp.status != 200 || !resp.record) {
            throw SourceRequestFailed(name_ + ": fetch " + id + " returned HTTP " + std::to_string(resp.status));
        }
        return *resp.record;
    }
    throw SourceRequestFailed(name_ + ": no recorded response for " + listing.identifier);
}

// ---------------------------------------------------------------------------

std::string url_encode(std::string_view s) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0xf]);
        }
    }
    return out;
}

std::vector<HttpSourceSettings> sources_from_config(const KeyValueConfig& cfg) {
    std::vector<HttpSourceSettings> out;
    for (const auto& section : cfg.sections()) {
        const auto key = [&](const char* k) { return section + "." + k; };
        HttpSourceSettings s;
        s.name = section;
        s.source = source_kind_from_string(cfg.get_or(key("source"), "other"));
        s.base_url = cfg.get_or(key("base_url"), "");
        if (s.base_url.empty()) throw InvalidArgument("harvest source [" + section + "] has no base_url");
        s.api_key_env = cfg.get_or(key("api_key_env"), "");
        s.api_key_header = cfg.get_or(key("api_key_header"), s.api_key_header);
        s.delay = std::chrono::milliseconds(cfg.get_int(key("delay_ms"), 2000));
        s.max_results = static_cast<std::size_t>(cfg.get_int(key("max_results"), 100));
        s.timeout_ms = static_cast<int>(cfg.get_int(key("timeout_ms"), 30000));
        out.push_back(std::move(s));
    }
    return out;
}

HttpSourceAdapter::HttpSourceAdapter(HttpSourceSettings settings, std::shared_ptr<net::HttpTransport> transport)
    : settings_(std::move(settings)), transport_(std::move(transport)) {
    if (settings_.base_url.empty()) throw InvalidArgument("HTTP source needs a base_url");
    while (!settings_.base_url.empty() && settings_.base_url.back() == '/') settings_.base_url.pop_back();
}

net::Headers HttpSourceAdapter::headers() const {
    net::Headers h{{"Accept", "application/json"}};
    if (!settings_.api_key_env.empty()) {
        if (const char* key = std::getenv(settings_.api_key_env.c_str())) h.emplace(settings_.api_key_header, key);
    }
    return h;
}

std::vector<Listing> HttpSourceAdapter::search(const std::string& query, std::size_t max) {
    const auto url = settings_.base_url + "/search?query=" + url_encode(query) + "&count=" + std::to_string(max);
    const auto resp = transport_->get(url, headers(), std::chrono::milliseconds(settings_.timeout_ms));
    if (resp.status != 200) {
        throw SourceRequestFailed(settings_.name + ": search failed: " +
                                  (resp.status ? "HTTP " + std::to_string(resp.status) : resp.error));
    }
    try {
        const auto doc = json::parse(resp.body);
        std::vector<Listing> out;
        for (const auto& item : doc.at("listing")) out.push_back(listing_from_json(item));
        return out;
    } catch (const std::exception& e) {
        throw SourceRequestFailed(settings_.name + ": bad search response: " + e.what());
    }
}

SourceRecord HttpSourceAdapter::fetch(const Listing& listing) {
    const auto url = settings_.base_url + "/article/" + std::string(to_string(listing.kind)) + "/" +
                     url_encode(listing.identifier);
    const auto resp = transport_->get(url, headers(), std::chrono::milliseconds(settings_.timeout_ms));
    if (resp.status != 200) {
        throw SourceRequestFailed(settings_.name + ": fetch " + listing.identifier + " failed: " +
                                  (resp.status ? "HTTP " + std::to_string(resp.status) : resp.error));
    }
    try {
        auto rec = record_from_json(json::parse(resp.body));
        if (rec.meta.doi.empty()) rec.meta.doi = listing.meta.doi;
        return rec;
    } catch (const std::exception& e) {
        throw SourceRequestFailed(settings_.name + ": bad article response: " + e.what());
    }
}

}  // namespace nanorag::harvest
