// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "apsim/fhe/params.hpp"

namespace apsim {
namespace fhe {

struct LweCiphertext {
    LweParams params;
    std::vector<uint64_t> a;  // params.n mask words
    uint64_t b = 0;
};

// RLWE pair (a, b) with b = a*z + m + e. Polynomials are limb-major
// (limbs * n words). level counts remaining multiplicative levels; it is a
// budget annotation carried through arithmetic, not part of the wire format.
struct RlweCiphertext {
    RingParams ring;
    Poly a, b;
    uint32_t level = 0;
};

// 2*levels RLWE rows; rows [0, levels) carry the gadget on the a component,
// rows [levels, 2*levels) on the b component.
struct RgswCiphertext {
    RingParams ring;
    GadgetParams gadget;
    std::vector<RlweCiphertext> rows;
};

struct LweSecretKey {
    LweParams params;
    std::vector<uint64_t> s;  // binary
};

struct RlweSecretKey {
    RingParams ring;
    Poly z;  // binary, n coefficients (shared across limbs)
};

}  // namespace fhe
}  // namespace apsim
