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

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstring>

#if defined(__ARM_FEATURE_CRC32)
#include <arm_acle.h>
#endif

namespace nanorag::simd::neon {

namespace {

inline double dot_impl(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    float64x2_t acc2 = vdupq_n_f64(0.0);
    float64x2_t acc3 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
        acc2 = vfmaq_f64(acc2, vld1q_f64(a + i + 4), vld1q_f64(b + i + 4));
        acc3 = vfmaq_f64(acc3, vld1q_f64(a + i + 6), vld1q_f64(b + i + 6));
    }
    for (; i + 2 <= n; i += 2) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    }
    double sum = vaddvq_f64(vaddq_f64(vaddq_f64(acc0, acc1), vaddq_f64(acc2, acc3)));
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) { return dot_impl(a, b, n); }

void dot_rows(const double* query, const double* rows, std::size_t count, std::size_t dim, double* out) {
    for (std::size_t r = 0; r < count; ++r) out[r] = dot_impl(query, rows + r * dim, dim);
}

std::uint32_t crc32c_update(std::uint32_t crc, const std::uint8_t* data, std::size_t n) {
#if defined(__ARM_FEATURE_CRC32)
    crc = ~crc;
    while (n >= 8) {
        std::uint64_t word;
        std::memcpy(&word, data, sizeof word);
        crc = __crc32cd(crc, word);
        data += 8;
        n -= 8;
    }
    while (n > 0) {
        crc = __crc32cb(crc, *data++);
        --n;
    }
    return ~crc;
#else
    return scalar::crc32c_update(crc, data, n);
#endif
}

}  // namespace nanorag::simd::neon

#endif
