// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "apsim/fhe/params.hpp"

namespace apsim {
namespace fhe {

enum class NttDirection { forward, inverse };

// Precomputed twiddle tables for the negacyclic NTT over one prime limb.
// Tables are built once per (n, q) pair and cached process-wide.
struct NttTable {
    uint32_t n = 0;
    uint64_t q = 0;
    // powers of psi (2n-th root) merged into the butterflies, bit-reversed
    std::vector<uint64_t> roots, roots_shoup;
    std::vector<uint64_t> inv_roots, inv_roots_shoup;
    uint64_t n_inv = 0, n_inv_shoup = 0;

    static const NttTable& get(uint32_t n, uint64_t q);
};

// In-place transforms. forward: coefficient order in, bit-reversed out;
// inverse undoes it, including the 1/n scaling. q must be prime and
// = 1 (mod 2n).
void ntt_forward(std::span<uint64_t> poly, const NttTable& t);
void ntt_inverse(std::span<uint64_t> poly, const NttTable& t);

// Spec-facing wrapper operating on a ring limb; validates parameters and
// throws std::invalid_argument for a non-NTT-friendly modulus or a length
// mismatch.
void ntt_transform(std::span<uint64_t> poly, uint32_t n, uint64_t q,
                   NttDirection dir);

// Exact negacyclic product of a and b in Z_q[X]/(X^n+1) for prime q = 1
// (mod 2n), via forward transforms, pointwise multiply, inverse transform.
Poly negacyclic_multiply_prime(std::span<const uint64_t> a,
                               std::span<const uint64_t> b, uint32_t n,
                               uint64_t q);

// Exact negacyclic product mod q = 2^width (width <= 64). Computed over two
// ~62-bit helper primes = 1 (mod 2n) with centered lifting and CRT
// reconstruction, so the result is exact for any operand magnitudes up to
// n <= 2^16.
Poly negacyclic_multiply_pow2(std::span<const uint64_t> a,
                              std::span<const uint64_t> b, uint32_t n,
                              uint32_t width);

// Dispatcher on the ring's limb structure; operands and result are
// limb-major concatenations of n-coefficient polynomials.
Poly negacyclic_multiply(const RingParams& ring, std::span<const uint64_t> a,
                         std::span<const uint64_t> b);

// The helper primes used by the power-of-two path (found once at startup by
// descending search below 2^62, supporting n up to 2^16).
const std::vector<uint64_t>& crt_helper_primes();

// Centered-lift CRT over the two helper primes: residues of the signed
// representative go in, the centered integer comes back truncated mod 2^64.
struct CrtPair {
    uint64_t p1 = 0, p2 = 0;
    uint64_t p1_inv_mod_p2 = 0;
    unsigned __int128 big_p = 0, half_p = 0;

    static const CrtPair& get();

    // residue mod p of the centered representative of x (mod 2^width)
    static uint64_t center_lift(uint64_t x, uint32_t width, uint64_t p);

    // centered integer congruent to (r1 mod p1, r2 mod p2), truncated to the
    // low 64 bits (callers mask to their modulus width)
    uint64_t reconstruct(uint64_t r1, uint64_t r2) const;
};

}  // namespace fhe
}  // namespace apsim
