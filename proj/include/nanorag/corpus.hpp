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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nanorag {

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

/// Byte range of one token inside the text it was produced from.
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const TokenSpan&) const = default;
};

/// Pluggable token-counting contract. Budgets, chunk sizes and document
/// limits are all measured with whichever tokenizer is configured.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;

    virtual std::vector<TokenSpan> tokenize(std::string_view text) const = 0;

    virtual std::size_t count(std::string_view text) const { return tokenize(text).size(); }

    virtual std::string_view name() const = 0;
};

/// Deterministic splitter: every maximal run of letters/digits is one token,
/// every ASCII punctuation mark is one token, everything else separates.
/// Bytes >= 0x80 are treated as letters so UTF-8 words stay whole.
class ReferenceTokenizer final : public Tokenizer {
public:
    std::vector<TokenSpan> tokenize(std::string_view text) const override;
    std::size_t count(std::string_view text) const override;
    std::string_view name() const override { return "reference"; }
};

/// Process-wide reference tokenizer instance.
const Tokenizer& reference_tokenizer();

/// Token count under the reference tokenizer.
std::size_t count_tokens(std::string_view text);

/// Collapses whitespace runs to one space, drops control characters and
/// trims both ends. Idempotent.
std::string normalize_text(std::string_view raw);

// ---------------------------------------------------------------------------
// Document model
// ---------------------------------------------------------------------------

enum class SourceKind { ElsevierApi, SpringerOa, AcsOa, LocalFile, Other };

std::string_view to_string(SourceKind kind);
/// Unknown names map to SourceKind::Other.
SourceKind source_kind_from_string(std::string_view name);

/// Lowercases and strips resolver prefixes (`https://doi.org/`, `doi:` ...).
std::string canonical_doi(std::string_view raw);

/// True when `doi` (already canonical) looks like `10.<registrant>/<suffix>`.
bool is_valid_doi(std::string_view doi);

struct DocumentMeta {
    std::string doi;
    std::string title;
    std::vector<std::string> authors;
    int year = 0;
    SourceKind source = SourceKind::Other;
    std::optional<std::string> url;

    /// Throws InvalidArgument if the DOI or year invariants do not hold.
    void validate() const;

    /// Authors joined with ", ", the form used in reference lines.
    std::string authors_joined() const;

    bool operator==(const DocumentMeta&) const = default;
};

struct Document {
    std::string doc_id;
    DocumentMeta meta;
    std::string text;
    std::size_t token_count = 0;
};

/// Builds a validated Document: canonicalizes the DOI, normalizes the text
/// and counts tokens. The doc_id is the canonical DOI.
/// Throws EmptyDocument when the text normalizes to nothing, InvalidArgument
/// on bad metadata.
Document make_document(DocumentMeta meta, std::string_view raw_text,
                       const Tokenizer& tokenizer = reference_tokenizer());

// ---------------------------------------------------------------------------
// Chunking
// ---------------------------------------------------------------------------

struct ChunkingConfig {
    std::size_t chunk_tokens = 512;
    std::size_t overlap_tokens = 64;
    std::size_t doc_token_limit = 4096;

    void validate() const;
    std::size_t stride() const { return chunk_tokens - overlap_tokens; }
};

struct Chunk {
    std::string chunk_id;
    std::string doc_id;
    std::size_t seq = 0;
    std::size_t token_start = 0;
    std::size_t token_end = 0;
    std::string text;
};

/// `<doc_id>#<seq>`
std::string make_chunk_id(std::string_view doc_id, std::size_t seq);

/// Token windows [i*stride, min(i*stride + chunk, n)) for a document of `n`
/// tokens. Pure arithmetic; chunk_document builds on it.
std::vector<std::pair<std::size_t, std::size_t>> chunk_windows(std::size_t n,
                                                               const ChunkingConfig& cfg);

std::vector<Chunk> chunk_document(const Document& doc, const ChunkingConfig& cfg,
                                  const Tokenizer& tokenizer = reference_tokenizer());

// ---------------------------------------------------------------------------
// Corpus JSONL
// ---------------------------------------------------------------------------

/// One line of the corpus file before validation.
struct CorpusRecord {
    DocumentMeta meta;
    std::string text;
};

/// Parses one corpus JSONL line. Throws InvalidArgument on malformed JSON or
/// missing fields.
CorpusRecord parse_corpus_line(std::string_view line);

/// Renders one corpus JSONL line (no trailing newline). Field order is fixed.
std::string render_corpus_line(const DocumentMeta& meta, std::string_view text);

/// Reads every non-blank line of a corpus file. Throws IoError if unreadable.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace nanorag
