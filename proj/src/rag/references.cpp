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

#include <unordered_set>

#include "nanorag/errors.hpp"
#include "nanorag/rag.hpp"

namespace nanorag {

std::string ReferenceLine::render() const {
    return "[" + std::to_string(ordinal) + "] " + authors + " (" + std::to_string(year) + "). " + title +
           ". DOI: " + doi;
}

std::vector<ReferenceLine> format_references(std::span<const RetrievalHit> hits, const MetaLookup& lookup) {
    std::vector<ReferenceLine> out;
    std::unordered_set<std::string> seen;
    for (const auto& hit : hits) {
        const auto meta = lookup(hit.doc_id);
        if (!meta) throw MissingMetadata("no metadata for document " + hit.doc_id);
        const std::string doi = canonical_doi(meta->doi);
        if (!seen.insert(doi).second) continue;
        out.push_back(ReferenceLine{out.size() + 1, meta->authors_joined(), meta->year, meta->title, doi});
    }
    return out;
}

std::string render_references(std::span<const ReferenceLine> refs) {
    if (refs.empty()) return {};
    std::string out = "References:";
    for (const auto& r : refs) {
        out += '\n';
        out += r.render();
    }
    return out;
}

std::string render_answer(const Answer& answer) {
    std::string out = answer.text;
    if (!answer.references.empty()) {
        out += "\n\n";
        out += render_references(answer.references);
    }
    out += '\n';
    return out;
}

}  // namespace nanorag
