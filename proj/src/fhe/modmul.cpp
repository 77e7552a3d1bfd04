// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/fhe/modmul.hpp"

#include <stdexcept>
#include <string>

namespace apsim {
namespace fhe {

uint128_t karatsuba_mul_64(uint64_t a, uint64_t b) {
    // Three 32x32 partial products instead of four: z1 reuses z0 and z2.
    uint64_t a0 = a & 0xffffffffu, a1 = a >> 32;
    uint64_t b0 = b & 0xffffffffu, b1 = b >> 32;
    uint64_t z0 = a0 * b0;
    uint64_t z2 = a1 * b1;
    // (a0+a1) and (b0+b1) are up to 33 bits, so the middle product needs
    // 66 bits; track it in 128 to keep the composition exact.
    uint128_t mid = static_cast<uint128_t>(a0 + a1) * (b0 + b1);
    uint128_t z1 = mid - z0 - z2;
    return (static_cast<uint128_t>(z2) << 64) + (z1 << 32) + z0;
}

namespace {

// Barrett reduction of a 128-bit product to [0, q). The approximation
// quotient is floor(x * floor(2^128/q) / 2^128), which undershoots the true
// quotient by at most 2; the subtractor stage corrects.
uint64_t barrett_reduce_128(uint128_t x, uint64_t q) {
    uint128_t mu = ~static_cast<uint128_t>(0) / q;  // floor((2^128-1)/q)
    // 128x128 -> top 128 bits of the 256-bit product, via 64-bit limbs.
    uint64_t x0 = static_cast<uint64_t>(x), x1 = static_cast<uint64_t>(x >> 64);
    uint64_t m0 = static_cast<uint64_t>(mu), m1 = static_cast<uint64_t>(mu >> 64);
    uint128_t p00 = static_cast<uint128_t>(x0) * m0;
    uint128_t p01 = static_cast<uint128_t>(x0) * m1;
    uint128_t p10 = static_cast<uint128_t>(x1) * m0;
    uint128_t p11 = static_cast<uint128_t>(x1) * m1;
    uint128_t carry = (p00 >> 64) + static_cast<uint64_t>(p01) +
                      static_cast<uint64_t>(p10);
    uint128_t qhat = p11 + (p01 >> 64) + (p10 >> 64) + (carry >> 64);
    uint128_t r = x - qhat * q;
    while (r >= q) r -= q;  // at most two subtractions
    return static_cast<uint64_t>(r);
}

uint64_t barrett_mul_32(uint64_t x, uint64_t y, uint64_t q) {
    uint64_t prod = x * y;  // both < 2^32
    uint64_t mu = ~static_cast<uint64_t>(0) / q;
    uint64_t qhat = static_cast<uint64_t>(
        (static_cast<uint128_t>(prod) * mu) >> 64);
    uint64_t r = prod - qhat * q;
    while (r >= q) r -= q;
    return r;
}

void check_lane(uint64_t x, uint64_t y, uint64_t q, uint64_t limit,
                const char* lane) {
    if (q < 2 || q > limit)
        throw std::invalid_argument(std::string("mod_mul_configurable: bad modulus on ") + lane);
    if (x >= q || y >= q)
        throw std::domain_error(std::string("mod_mul_configurable: operand out of range on ") + lane);
}

}  // namespace

MulOperand mod_mul_configurable(MultiplierMode mode, const MulOperand& x,
                                const MulOperand& y, const MulModulus& q) {
    MulOperand out;
    if (mode == MultiplierMode::one64) {
        check_lane(x.lane0, y.lane0, q.lane0, ~static_cast<uint64_t>(0), "lane0");
        out.lane0 = barrett_reduce_128(karatsuba_mul_64(x.lane0, y.lane0), q.lane0);
    } else {
        uint64_t lim = (static_cast<uint64_t>(1) << 32) - 1;
        check_lane(x.lane0, y.lane0, q.lane0, lim, "lane0");
        check_lane(x.lane1, y.lane1, q.lane1, lim, "lane1");
        out.lane0 = barrett_mul_32(x.lane0, y.lane0, q.lane0);
        out.lane1 = barrett_mul_32(x.lane1, y.lane1, q.lane1);
    }
    return out;
}

uint64_t pow_mod(uint64_t base, uint64_t exp, uint64_t q) {
    uint64_t r = 1 % q;
    base %= q;
    while (exp) {
        if (exp & 1) r = mul_mod(r, base, q);
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    return r;
}

uint64_t inv_mod(uint64_t a, uint64_t q) {
    if (a == 0) throw std::invalid_argument("inv_mod: zero has no inverse");
    return pow_mod(a, q - 2, q);
}

}  // namespace fhe
}  // namespace apsim
