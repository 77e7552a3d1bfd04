// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "apsim/fhe/params.hpp"

namespace apsim {
namespace fhe {

// X^e * a(X) in Z_q[X]/(X^n+1); e taken mod 2n, wrap flips sign. This is
// the index-permutation-with-sign-flip pass the rotation unit performs
// during blind rotation.
Poly negacyclic_monomial_mul(std::span<const uint64_t> a, uint64_t e,
                             uint64_t q);

// Galois map a(X) -> a(X^k), k odd, same ring. Used by slot rotations.
// Throws std::invalid_argument for even k.
Poly galois_map(std::span<const uint64_t> a, uint64_t k, uint64_t q);

// Fused X^{-a} * acc - acc in one coefficient pass. This is the update the
// rotation unit feeds into the external product during blind rotation; doing
// the subtract inside the permutation pass saves a full buffer walk. a must
// lie in [0, 2n), else std::out_of_range. a=0 returns the zero polynomial.
Poly tfhe_rotate_sub(std::span<const uint64_t> acc, uint64_t a, uint64_t q);

}  // namespace fhe
}  // namespace apsim
