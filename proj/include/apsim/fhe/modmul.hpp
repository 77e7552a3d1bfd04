// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace apsim {
namespace fhe {

typedef unsigned __int128 uint128_t;

// Bit-width configuration of the shared modular multiplier datapath.
// one64: the three half-width multipliers compose one 64-bit modular multiply.
// two32: the same multipliers run as two independent 32-bit lanes.
enum class MultiplierMode { one64, two32 };

// Operand and modulus carriers for mod_mul_configurable. In one64 mode only
// lane0 is used; in two32 mode lane0/lane1 each hold an independent 32-bit
// residue (stored in the low half of the word).
struct MulOperand {
    uint64_t lane0 = 0;
    uint64_t lane1 = 0;
};

struct MulModulus {
    uint64_t lane0 = 0;
    uint64_t lane1 = 0;
};

// Modular multiply through the modeled datapath: three half-width partial
// products (Karatsuba composition) followed by Barrett reduction and
// conditional subtractions. Throws std::invalid_argument for a modulus of 0
// or 1, std::domain_error when an operand is >= its modulus.
MulOperand mod_mul_configurable(MultiplierMode mode, const MulOperand& x,
                                const MulOperand& y, const MulModulus& q);

// Full 128-bit product assembled from three 32x32 partial products.
uint128_t karatsuba_mul_64(uint64_t a, uint64_t b);

// Scalar helpers used throughout the kernels. Preconditions a, b < q.
inline uint64_t add_mod(uint64_t a, uint64_t b, uint64_t q) {
    uint64_t s = a + b;
    // a, b < q <= 2^63 in all library parameter sets, but handle the wrap
    // for q near 2^64 anyway
    if (s < a || s >= q) s -= q;
    return s;
}

inline uint64_t sub_mod(uint64_t a, uint64_t b, uint64_t q) {
    return a >= b ? a - b : a + (q - b);
}

inline uint64_t neg_mod(uint64_t a, uint64_t q) { return a == 0 ? 0 : q - a; }

inline uint64_t mul_mod(uint64_t a, uint64_t b, uint64_t q) {
    return static_cast<uint64_t>(static_cast<uint128_t>(a) * b % q);
}

uint64_t pow_mod(uint64_t base, uint64_t exp, uint64_t q);

// Inverse modulo a prime q.
uint64_t inv_mod(uint64_t a, uint64_t q);

// Shoup-style precomputed multiplication: w fixed, w_shoup = floor(w<<64 / q).
inline uint64_t shoup_precompute(uint64_t w, uint64_t q) {
    return static_cast<uint64_t>((static_cast<uint128_t>(w) << 64) / q);
}

// Returns x*w mod q given the precomputed quotient; requires q < 2^63.
inline uint64_t mul_mod_shoup(uint64_t x, uint64_t w, uint64_t w_shoup,
                              uint64_t q) {
    uint64_t hi = static_cast<uint64_t>(static_cast<uint128_t>(x) * w_shoup >> 64);
    uint64_t r = x * w - hi * q;
    if (r >= q) r -= q;
    return r;
}

}  // namespace fhe
}  // namespace apsim
