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

#include "nanorag/simd/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cstring>

namespace nanorag::simd::avx2 {

namespace {

__attribute__((target("avx2,fma"))) inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    const __m128d swapped = _mm_unpackhi_pd(pair, pair);
    return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

__attribute__((target("avx2,fma"))) inline double dot_impl(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double sum = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

}  // namespace

__attribute__((target("avx2,fma"))) double dot(const double* a, const double* b, std::size_t n) {
    return dot_impl(a, b, n);
}

__attribute__((target("avx2,fma"))) void dot_rows(const double* query, const double* rows, std::size_t count,
                                                  std::size_t dim, double* out) {
    for (std::size_t r = 0; r < count; ++r) out[r] = dot_impl(query, rows + r * dim, dim);
}

__attribute__((target("sse4.2"))) std::uint32_t crc32c_update(std::uint32_t crc, const std::uint8_t* data,
                                                              std::size_t n) {
    crc = ~crc;
#if defined(__x86_64__)
    std::uint64_t c64 = crc;
    while (n >= 8) {
        std::uint64_t word;
        std::memcpy(&word, data, sizeof word);
        c64 = _mm_crc32_u64(c64, word);
        data += 8;
        n -= 8;
    }
    crc = static_cast<std::uint32_t>(c64);
#endif
    while (n > 0) {
        crc = _mm_crc32_u8(crc, *data++);
        --n;
    }
    return ~crc;
}

}  // namespace nanorag::simd::avx2

#endif
