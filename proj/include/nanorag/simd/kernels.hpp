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
#include <span>
#include <string_view>

// Data-parallel inner loops used by the index: dot products over f64
// vectors and CRC32C over snapshot bytes. Every kernel has a scalar
// reference implementation; vector variants are picked once at runtime and
// must agree with the reference (see tests/simd_equivalence_test.cpp).

namespace nanorag::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

/// True when the running CPU (and this build) can execute `isa` kernels.
bool isa_supported(Isa isa);

/// Best supported ISA, honoring NANORAG_SIMD=scalar|avx2|neon when set to a
/// supported value.
Isa detect_isa();

Isa active_isa();

/// Forces a kernel family. Throws InvalidArgument if unsupported.
void set_active_isa(Isa isa);

using DotFn = double (*)(const double* a, const double* b, std::size_t n);
using DotRowsFn = void (*)(const double* query, const double* rows, std::size_t count,
                           std::size_t dim, double* out);
using Crc32cFn = std::uint32_t (*)(std::uint32_t crc, const std::uint8_t* data, std::size_t n);

struct KernelTable {
    Isa isa;
    DotFn dot;
    DotRowsFn dot_rows;
    Crc32cFn crc32c_update;
};

/// Kernel table for a specific ISA. Throws InvalidArgument if unsupported.
const KernelTable& kernels_for(Isa isa);

// Dispatched entry points.

double dot(std::span<const double> a, std::span<const double> b);

/// out[i] = dot(query, rows[i*dim .. (i+1)*dim)) for i in [0, count).
void dot_rows(std::span<const double> query, std::span<const double> rows, std::size_t dim,
              std::span<double> out);

/// CRC32C (Castagnoli) of `data`, standard init/final xor.
std::uint32_t crc32c(std::span<const std::uint8_t> data);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void dot_rows(const double* query, const double* rows, std::size_t count, std::size_t dim, double* out);
std::uint32_t crc32c_update(std::uint32_t crc, const std::uint8_t* data, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(__i386__)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void dot_rows(const double* query, const double* rows, std::size_t count, std::size_t dim, double* out);
std::uint32_t crc32c_update(std::uint32_t crc, const std::uint8_t* data, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void dot_rows(const double* query, const double* rows, std::size_t count, std::size_t dim, double* out);
std::uint32_t crc32c_update(std::uint32_t crc, const std::uint8_t* data, std::size_t n);
}  // namespace neon
#endif

}  // namespace nanorag::simd
