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
#include <fstream>
#include <sstream>

#include "nanorag/config.hpp"
#include "nanorag/errors.hpp"

namespace nanorag {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
    KeyValueConfig cfg;
    std::string section;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        line = trim(strip_comment(line));
        if (line.empty()) continue;
        const auto where = " (line " + std::to_string(line_no) + ")";
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) throw InvalidArgument("bad section header" + where);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (std::find(cfg.sections_.begin(), cfg.sections_.end(), section) == cfg.sections_.end()) {
                cfg.sections_.push_back(section);
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw InvalidArgument("expected key = value" + where);
        const auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw InvalidArgument("empty key" + where);
        if (!value.empty() && value.front() == '"') {
            if (value.size() < 2 || value.back() != '"') throw InvalidArgument("unterminated string" + where);
            value = value.substr(1, value.size() - 2);
        }
        const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
        cfg.values_[full] = std::string(value);
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValueConfig::get_or(const std::string& key, std::string fallback) const {
    auto v = get(key);
    return v ? *v : std::move(fallback);
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const auto parsed = std::stoll(*v, &used);
        if (used != v->size()) throw std::invalid_argument(*v);
        return parsed;
    } catch (const std::logic_error&) {
        throw InvalidArgument("config key " + key + " is not an integer: " + *v);
    }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const auto parsed = std::stod(*v, &used);
        if (used != v->size()) throw std::invalid_argument(*v);
        return parsed;
    } catch (const std::logic_error&) {
        throw InvalidArgument("config key " + key + " is not a number: " + *v);
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw InvalidArgument("config key " + key + " is not a boolean: " + *v);
}

}  // namespace nanorag
