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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nanorag {

/// TOML-like key/value file:
///
///     # comment
///     chat_url = "http://localhost:8000/v1/chat/completions"
///     [elsevier]
///     delay_ms = 2000
///
/// Keys under a `[section]` header are stored as `section.key`. Values may be
/// bare or double-quoted. No arrays, tables or multi-line strings.
class KeyValueConfig {
public:
    /// Throws InvalidArgument with the offending line number on bad syntax.
    static KeyValueConfig parse(std::string_view text);
    /// Throws IoError if the file cannot be read.
    static KeyValueConfig load(const std::string& path);

    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, std::string fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Section names in first-appearance order.
    const std::vector<std::string>& sections() const { return sections_; }

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> sections_;
};

}  // namespace nanorag
