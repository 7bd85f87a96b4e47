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

#include "nanorag/corpus.hpp"

namespace nanorag {

namespace {

enum class CharClass { Word, Punct, Separator };

CharClass classify(unsigned char c) {
    if (c >= 0x80) return CharClass::Word;
    if ((c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
        return CharClass::Word;
    }
    if ((c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) || (c >= 0x5b && c <= 0x60) ||
        (c >= 0x7b && c <= 0x7e)) {
        return CharClass::Punct;
    }
    return CharClass::Separator;
}

template <typename Emit>
void scan_tokens(std::string_view text, Emit&& emit) {
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        switch (classify(static_cast<unsigned char>(text[i]))) {
            case CharClass::Separator:
                ++i;
                break;
            case CharClass::Punct:
                emit(i, i + 1);
                ++i;
                break;
            case CharClass::Word: {
                std::size_t j = i + 1;
                while (j < n && classify(static_cast<unsigned char>(text[j])) == CharClass::Word) ++j;
                emit(i, j);
                i = j;
                break;
            }
        }
    }
}

}  // namespace

std::vector<TokenSpan> ReferenceTokenizer::tokenize(std::string_view text) const {
    std::vector<TokenSpan> out;
    scan_tokens(text, [&](std::size_t b, std::size_t e) { out.push_back({b, e}); });
    return out;
}

std::size_t ReferenceTokenizer::count(std::string_view text) const {
    std::size_t n = 0;
    scan_tokens(text, [&](std::size_t, std::size_t) { ++n; });
    return n;
}

const Tokenizer& reference_tokenizer() {
    static const ReferenceTokenizer instance;
    return instance;
}

std::size_t count_tokens(std::string_view text) { return reference_tokenizer().count(text); }

std::string normalize_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (unsigned char c : raw) {
        const bool is_space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
        if (is_space) {
            pending_space = !out.empty();
            continue;
        }
        if (c < 0x20 || c == 0x7f) continue;
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(c));
    }
    return out;
}

}  // namespace nanorag
