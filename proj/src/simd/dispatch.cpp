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

#include <atomic>
#include <cstdlib>
#include <string>

#include "nanorag/errors.hpp"
#include "nanorag/simd/kernels.hpp"

namespace nanorag::simd {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &scalar::dot, &scalar::dot_rows, &scalar::crc32c_update};

#if defined(__x86_64__) || defined(__i386__)
constexpr KernelTable kAvx2{Isa::Avx2, &avx2::dot, &avx2::dot_rows, &avx2::crc32c_update};
#endif

#if defined(__aarch64__)
constexpr KernelTable kNeon{Isa::Neon, &neon::dot, &neon::dot_rows, &neon::crc32c_update};
#endif

std::atomic<const KernelTable*>& active_table() {
    static std::atomic<const KernelTable*> table{&kernels_for(detect_isa())};
    return table;
}

}  // namespace

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return true;
        case Isa::Avx2:
#if defined(__x86_64__) || defined(__i386__)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma") &&
                   __builtin_cpu_supports("sse4.2");
#else
            return false;
#endif
        case Isa::Neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Isa detect_isa() {
    if (const char* forced = std::getenv("NANORAG_SIMD")) {
        const std::string_view name(forced);
        for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
            if (name == to_string(isa) && isa_supported(isa)) return isa;
        }
    }
    if (isa_supported(Isa::Avx2)) return Isa::Avx2;
    if (isa_supported(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

const KernelTable& kernels_for(Isa isa) {
    if (!isa_supported(isa)) {
        throw InvalidArgument("SIMD kernels not supported on this CPU: " + std::string(to_string(isa)));
    }
    switch (isa) {
#if defined(__x86_64__) || defined(__i386__)
        case Isa::Avx2: return kAvx2;
#endif
#if defined(__aarch64__)
        case Isa::Neon: return kNeon;
#endif
        default: return kScalar;
    }
}

Isa active_isa() { return active_table().load(std::memory_order_acquire)->isa; }

void set_active_isa(Isa isa) { active_table().store(&kernels_for(isa), std::memory_order_release); }

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot: operand lengths differ");
    return active_table().load(std::memory_order_acquire)->dot(a.data(), b.data(), a.size());
}

void dot_rows(std::span<const double> query, std::span<const double> rows, std::size_t dim,
              std::span<double> out) {
    if (query.size() != dim) throw DimensionMismatch("dot_rows: query width differs from row width");
    if (dim == 0 || rows.size() % dim != 0) throw InvalidArgument("dot_rows: rows not a multiple of dim");
    const std::size_t count = rows.size() / dim;
    if (out.size() < count) throw InvalidArgument("dot_rows: output too small");
    active_table().load(std::memory_order_acquire)->dot_rows(query.data(), rows.data(), count, dim, out.data());
}

std::uint32_t crc32c(std::span<const std::uint8_t> data) {
    return active_table().load(std::memory_order_acquire)->crc32c_update(0, data.data(), data.size());
}

}  // namespace nanorag::simd
