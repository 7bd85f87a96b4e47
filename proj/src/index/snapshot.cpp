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

// Snapshot layout, all integers little-endian:
//
//   "NRAGIDX1"                      8 bytes magic (format version 1)
//   u32 dim
//   u64 count
//   count x record:
//     u64 insert_seq
//     u16 len, chunk_id bytes (UTF-8)
//     u16 len, doc_id bytes (UTF-8)
//     dim x f64 (IEEE-754 bit pattern)
//   u32 CRC32C of every preceding byte

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include "nanorag/errors.hpp"
#include "nanorag/index.hpp"
#include "nanorag/simd/kernels.hpp"

namespace nanorag {

namespace {

constexpr std::string_view kMagic = "NRAGIDX1";

class Writer {
public:
    template <typename T>
    void put_le(T value) {
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            buf_.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xffu));
        }
    }

    void put_f64(double v) { put_le(std::bit_cast<std::uint64_t>(v)); }

    void put_str16(const std::string& s) {
        if (s.size() > 0xffff) throw IoError("identifier longer than 65535 bytes: " + s.substr(0, 32) + "...");
        put_le(static_cast<std::uint16_t>(s.size()));
        buf_ += s;
    }

    void put_raw(std::string_view s) { buf_ += s; }

    std::string& buffer() { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    template <typename T>
    T get_le() {
        need(sizeof(T));
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        }
        pos_ += sizeof(T);
        return static_cast<T>(v);
    }

    double get_f64() { return std::bit_cast<double>(get_le<std::uint64_t>()); }

    std::string get_str16() {
        const auto len = get_le<std::uint16_t>();
        need(len);
        std::string s(bytes_.substr(pos_, len));
        pos_ += len;
        return s;
    }

    std::string_view get_raw(std::size_t n) {
        need(n);
        auto s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw CorruptSnapshot("snapshot truncated");
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::string_view bytes) {
    return simd::crc32c({reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()});
}

}  // namespace

std::string VectorIndex::serialize() const {
    std::shared_lock lock(mu_);
    Writer w;
    w.put_raw(kMagic);
    w.put_le(static_cast<std::uint32_t>(dim_));
    w.put_le(static_cast<std::uint64_t>(rows_.size()));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        w.put_le(rows_[i].insert_seq);
        w.put_str16(rows_[i].chunk_id);
        w.put_str16(rows_[i].doc_id);
        for (std::size_t d = 0; d < dim_; ++d) w.put_f64(vectors_[i * dim_ + d]);
    }
    const auto crc = crc_of(w.buffer());
    w.put_le(crc);
    return std::move(w.buffer());
}

VectorIndex VectorIndex::deserialize(std::string_view bytes) {
    constexpr std::size_t kMinSize = 8 + 4 + 8 + 4;
    if (bytes.size() < kMinSize) throw CorruptSnapshot("snapshot too short");
    if (bytes.substr(0, kMagic.size()) != kMagic) throw CorruptSnapshot("bad snapshot magic");

    const auto body = bytes.substr(0, bytes.size() - 4);
    Reader tail(bytes.substr(bytes.size() - 4));
    if (tail.get_le<std::uint32_t>() != crc_of(body)) throw CorruptSnapshot("snapshot checksum mismatch");

    Reader r(body);
    r.get_raw(kMagic.size());
    const auto dim = r.get_le<std::uint32_t>();
    const auto count = r.get_le<std::uint64_t>();
    if (dim == 0) throw CorruptSnapshot("snapshot dim is zero");

    VectorIndex index(dim);
    std::unique_lock lock(index.mu_);
    std::uint64_t prev_seq = 0;
    std::vector<double> values(dim);
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto seq = r.get_le<std::uint64_t>();
        auto chunk_id = r.get_str16();
        auto doc_id = r.get_str16();
        for (auto& v : values) v = r.get_f64();
        if (seq <= prev_seq) throw CorruptSnapshot("snapshot insert_seq not increasing");
        prev_seq = seq;
        try {
            const auto unit = EmbeddingVector::from_unit(values);
            index.insert_locked(std::move(chunk_id), std::move(doc_id), unit.values(), seq);
        } catch (const InvalidArgument& e) {
            throw CorruptSnapshot(std::string("bad snapshot record: ") + e.what());
        } catch (const DuplicateChunk& e) {
            throw CorruptSnapshot(std::string("bad snapshot record: ") + e.what());
        }
    }
    if (r.remaining() != 0) throw CorruptSnapshot("trailing bytes in snapshot");
    lock.unlock();
    return index;
}

void VectorIndex::snapshot(const std::string& path) const {
    const std::string bytes = serialize();
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move snapshot into place at " + path + ": " + ec.message());
}

VectorIndex VectorIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open snapshot " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path);
    return deserialize(ss.str());
}

}  // namespace nanorag
