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

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "nanorag/errors.hpp"
#include "nanorag/simd/kernels.hpp"

using namespace nanorag;
using namespace nanorag::simd;

namespace {

std::vector<Isa> supported_isas() {
    std::vector<Isa> out;
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
        if (isa_supported(isa)) out.push_back(isa);
    }
    return out;
}

class IsaGuard {
public:
    IsaGuard() : saved_(active_isa()) {}
    ~IsaGuard() { set_active_isa(saved_); }

private:
    Isa saved_;
};

}  // namespace

TEST(SimdDispatch, ScalarAlwaysAvailable) {
    EXPECT_TRUE(isa_supported(Isa::Scalar));
    EXPECT_TRUE(isa_supported(detect_isa()));
    EXPECT_EQ(kernels_for(Isa::Scalar).isa, Isa::Scalar);
}

TEST(SimdDispatch, ForcingIsaSwitchesKernels) {
    IsaGuard guard;
    for (Isa isa : supported_isas()) {
        set_active_isa(isa);
        EXPECT_EQ(active_isa(), isa);
    }
    for (Isa isa : {Isa::Avx2, Isa::Neon}) {
        if (!isa_supported(isa)) EXPECT_THROW(set_active_isa(isa), InvalidArgument);
    }
}

TEST(SimdEquivalence, DotMatchesScalarAcrossLengths) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto& ref = kernels_for(Isa::Scalar);
    for (Isa isa : supported_isas()) {
        const auto& k = kernels_for(isa);
        for (std::size_t n = 0; n <= 131; ++n) {
            std::vector<double> a(n), b(n);
            double mag = 0;
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = u(rng);
                b[i] = u(rng);
                mag += std::abs(a[i] * b[i]);
            }
            const double want = ref.dot(a.data(), b.data(), n);
            const double got = k.dot(a.data(), b.data(), n);
            // Reassociation error bound for n-term sums.
            EXPECT_NEAR(got, want, 4 * static_cast<double>(n + 1) * 1e-16 * (mag + 1e-300))
                << to_string(isa) << " n=" << n;
        }
    }
}

TEST(SimdEquivalence, DotRowsMatchesPerRowDot) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (Isa isa : supported_isas()) {
        const auto& k = kernels_for(isa);
        for (std::size_t dim : {1u, 3u, 4u, 7u, 8u, 64u, 65u, 768u}) {
            const std::size_t count = 37;
            std::vector<double> q(dim), rows(dim * count), out(count);
            for (auto& x : q) x = g(rng);
            for (auto& x : rows) x = g(rng);
            k.dot_rows(q.data(), rows.data(), count, dim, out.data());
            for (std::size_t r = 0; r < count; ++r) {
                EXPECT_EQ(out[r], k.dot(q.data(), rows.data() + r * dim, dim)) << to_string(isa) << " dim=" << dim;
                EXPECT_NEAR(out[r], kernels_for(Isa::Scalar).dot(q.data(), rows.data() + r * dim, dim),
                            1e-12 * static_cast<double>(dim));
            }
        }
    }
}

TEST(SimdEquivalence, Crc32cKnownVectorAndScalarAgreement) {
    const std::string check = "123456789";
    const auto* p = reinterpret_cast<const std::uint8_t*>(check.data());
    EXPECT_EQ(crc32c({p, check.size()}), 0xE3069283u);

    std::mt19937_64 rng(3);
    std::vector<std::uint8_t> buf(4099);
    for (auto& b : buf) b = static_cast<std::uint8_t>(rng());
    const auto& ref = kernels_for(Isa::Scalar);
    for (Isa isa : supported_isas()) {
        const auto& k = kernels_for(isa);
        EXPECT_EQ(k.crc32c_update(0, p, check.size()), 0xE3069283u) << to_string(isa);
        for (std::size_t n : {0u, 1u, 7u, 8u, 9u, 63u, 4099u}) {
            for (std::size_t off : {0u, 1u, 3u}) {
                if (off + n > buf.size()) continue;
                EXPECT_EQ(k.crc32c_update(0, buf.data() + off, n), ref.crc32c_update(0, buf.data() + off, n))
                    << to_string(isa) << " n=" << n << " off=" << off;
            }
        }
    }
}

TEST(SimdEquivalence, DispatchedEntryPointsUseActiveTable) {
    IsaGuard guard;
    std::vector<double> a{1, 2, 3, 4, 5}, b{5, 4, 3, 2, 1};
    for (Isa isa : supported_isas()) {
        set_active_isa(isa);
        EXPECT_DOUBLE_EQ(dot(a, b), 35.0);
    }
    EXPECT_THROW(dot(std::vector<double>{1.0}, b), DimensionMismatch);
}
