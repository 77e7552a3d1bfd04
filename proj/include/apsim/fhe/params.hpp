// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace apsim {
namespace fhe {

using Poly = std::vector<uint64_t>;  // coefficient vector, one ring limb

// Negacyclic ring Z_q[X]/(X^n + 1). moduli holds the RNS limbs; a single
// power-of-two limb (e.g. 2^32) selects the CRT helper-prime multiply path,
// prime limbs = 1 (mod 2n) are transformed natively.
struct RingParams {
    uint32_t n = 0;
    std::vector<uint64_t> moduli;

    uint32_t limbs() const { return static_cast<uint32_t>(moduli.size()); }
    uint64_t modulus() const;  // single-limb convenience, throws otherwise
    bool ntt_friendly() const;
    void validate() const;  // power-of-two n, n >= 2, nonempty moduli
};

struct LweParams {
    uint32_t n = 0;       // mask dimension
    uint64_t q = 0;       // modulus, power of two in this library
    uint32_t width = 0;   // log2(q)

    void validate() const;
};

struct GadgetParams {
    uint32_t base_log = 0;  // log2 of the digit base
    uint32_t levels = 0;    // digits kept, most significant first
    uint32_t width = 0;     // log2(q) of the decomposed modulus

    void validate() const;
};

// Gate bootstrapping parameter bundle for the binary-TFHE lane.
struct BootstrapParams {
    LweParams lwe;           // ciphertext dimension n, q = 2^32
    RingParams ring;         // accumulator ring, same modulus
    GadgetParams rgsw;       // bootstrap key digits
    uint32_t ks_base_log = 0, ks_levels = 0;  // extract -> lwe keyswitch
    double noise_lwe = 0.0, noise_bk = 0.0, noise_ks = 0.0;  // absolute sigma
};

// Two-limb RNS parameter bundle for the approximate-arithmetic lane.
struct CkksParams {
    RingParams ring;
    GadgetParams relin;      // per-limb digit decomposition for keyswitching
    double noise = 0.0;
};

BootstrapParams make_bootstrap_toy();          // n = 512, N = 512, 32-bit
BootstrapParams make_bootstrap_cb_toy();       // wide-ring variant for circuit bootstrap
CkksParams make_ckks_toy();                    // N = 4096, two 31-bit limbs

}  // namespace fhe
}  // namespace apsim
