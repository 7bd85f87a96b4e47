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

#include <fstream>

#include "json.hpp"
#include "nanorag/corpus.hpp"
#include "nanorag/errors.hpp"

namespace nanorag {

using json = nlohmann::json;

CorpusRecord parse_corpus_line(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("corpus line is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw InvalidArgument("corpus line is not a JSON object");

    CorpusRecord rec;
    try {
        rec.meta.doi = j.at("doi").get<std::string>();
        rec.meta.title = j.at("title").get<std::string>();
        rec.meta.year = j.at("year").get<int>();
        rec.text = j.at("text").get<std::string>();
        if (auto it = j.find("authors"); it != j.end() && !it->is_null()) {
            rec.meta.authors = it->get<std::vector<std::string>>();
        }
        if (auto it = j.find("source"); it != j.end() && it->is_string()) {
            rec.meta.source = source_kind_from_string(it->get<std::string>());
        }
        if (auto it = j.find("url"); it != j.end() && it->is_string()) {
            rec.meta.url = it->get<std::string>();
        }
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("corpus line has missing or mistyped fields: ") + e.what());
    }
    return rec;
}

std::string render_corpus_line(const DocumentMeta& meta, std::string_view text) {
    // ordered_json keeps the documented field order stable on disk.
    nlohmann::ordered_json j;
    j["doi"] = meta.doi;
    j["title"] = meta.title;
    j["authors"] = meta.authors;
    j["year"] = meta.year;
    j["source"] = std::string(to_string(meta.source));
    j["url"] = meta.url ? json(*meta.url) : json(nullptr);
    j["text"] = std::string(text);
    return j.dump();
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        lines.push_back(std::move(line));
    }
    if (in.bad()) throw IoError("read failed: " + path);
    return lines;
}

}  // namespace nanorag
