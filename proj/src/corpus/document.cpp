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
#include <array>
#include <cctype>

#include "nanorag/corpus.hpp"
#include "nanorag/errors.hpp"

namespace nanorag {

namespace {

struct SourceName {
    SourceKind kind;
    std::string_view name;
};

constexpr std::array<SourceName, 5> kSourceNames{{
    {SourceKind::ElsevierApi, "elsevier-api"},
    {SourceKind::SpringerOa, "springer-oa"},
    {SourceKind::AcsOa, "acs-oa"},
    {SourceKind::LocalFile, "local-file"},
    {SourceKind::Other, "other"},
}};

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    }
    return true;
}

}  // namespace

std::string_view to_string(SourceKind kind) {
    for (const auto& s : kSourceNames) {
        if (s.kind == kind) return s.name;
    }
    return "other";
}

SourceKind source_kind_from_string(std::string_view name) {
    for (const auto& s : kSourceNames) {
        if (s.name == name) return s.kind;
    }
    return SourceKind::Other;
}

std::string canonical_doi(std::string_view raw) {
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.front()))) raw.remove_prefix(1);
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);
    for (std::string_view prefix :
         {"https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "http://dx.doi.org/", "doi.org/", "doi:"}) {
        if (starts_with_ci(raw, prefix)) {
            raw.remove_prefix(prefix.size());
            break;
        }
    }
    while (!raw.empty() && raw.front() == ' ') raw.remove_prefix(1);
    std::string out(raw);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_valid_doi(std::string_view doi) {
    if (doi.size() < 6 || doi.substr(0, 3) != "10.") return false;
    const auto slash = doi.find('/');
    if (slash == std::string_view::npos || slash == 3 || slash + 1 >= doi.size()) return false;
    for (std::size_t i = 3; i < slash; ++i) {
        const char c = doi[i];
        if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.') return false;
    }
    return std::none_of(doi.begin(), doi.end(),
                        [](unsigned char c) { return std::isspace(c) != 0; });
}

void DocumentMeta::validate() const {
    if (doi.empty()) throw InvalidArgument("document has no DOI");
    if (!is_valid_doi(doi)) throw InvalidArgument("malformed DOI: " + doi);
    if (year < 1900 || year > 2100) {
        throw InvalidArgument("year out of range [1900, 2100]: " + std::to_string(year));
    }
}

std::string DocumentMeta::authors_joined() const {
    std::string out;
    for (std::size_t i = 0; i < authors.size(); ++i) {
        if (i) out += ", ";
        out += authors[i];
    }
    return out;
}

Document make_document(DocumentMeta meta, std::string_view raw_text, const Tokenizer& tokenizer) {
    meta.doi = canonical_doi(meta.doi);
    meta.validate();
    Document doc;
    doc.text = normalize_text(raw_text);
    if (doc.text.empty()) throw EmptyDocument("document " + meta.doi + " has no text after normalization");
    doc.token_count = tokenizer.count(doc.text);
    if (doc.token_count == 0) throw EmptyDocument("document " + meta.doi + " has no tokens");
    doc.doc_id = meta.doi;
    doc.meta = std::move(meta);
    return doc;
}

}  // namespace nanorag
