// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "apsim/fhe/ciphertext.hpp"
#include "apsim/fhe/crypto.hpp"
#include "apsim/fhe/keyswitch.hpp"

namespace apsim {
namespace fhe {

// RGSW (x) RLWE external product; single-limb power-of-two rings.
RlweCiphertext external_product(const RgswCiphertext& g,
                                const RlweCiphertext& c);

// cmux(sel, c0, c1) = c0 + sel (x) (c1 - c0); sel encrypts 0 or 1.
RlweCiphertext cmux(const RgswCiphertext& sel, const RlweCiphertext& c0,
                    const RlweCiphertext& c1);

// coefficient `index` of the RLWE payload as an LWE sample under the ring
// key read as an LWE key of dimension n
LweCiphertext sample_extract(const RlweCiphertext& ct, uint32_t index);

// round(x * 2N / q) mod 2N for q = 2^width
uint64_t modswitch_exponent(uint64_t x, uint32_t width, uint32_t two_n);

// Bootstrap key: one RGSW row per mask coefficient, with NTT-domain images
// of every row cached over the CRT helper primes so the rotation loop only
// transforms the freshly decomposed digits.
struct BootstrapKey {
    LweParams lwe;
    RingParams ring;
    GadgetParams gadget;
    std::vector<RgswCiphertext> rows;

    // cache[i][row*2 + comp][prime] -> NTT(poly) and its Shoup image
    struct CachedPoly {
        Poly ntt;
        Poly shoup;
    };
    std::vector<std::vector<std::vector<CachedPoly>>> cache;
};

BootstrapKey make_bootstrap_key(const LweSecretKey& lwe_key,
                                const RlweSecretKey& ring_key,
                                const GadgetParams& g, NoiseSampler& s);

// ACC <- X^{-b~} * test, then per mask coefficient the fused
// "rotate, subtract, decompose, multiply-accumulate" update
// ACC <- ACC + bk_i (x) (X^{a~_i} ACC - ACC).
RlweCiphertext blind_rotate(const Poly& test, const LweCiphertext& ct,
                            const BootstrapKey& bk);

struct GateBootstrapResult {
    LweCiphertext ct;
    uint64_t ks_transmitted_bits = 0;
};

// NAND with inputs/outputs encoded as +-q/8; blind rotate over an all-q/8
// test vector, extract, then public keyswitch back to the LWE key.
GateBootstrapResult gate_bootstrap_nand(const LweCiphertext& c1,
                                        const LweCiphertext& c2,
                                        const BootstrapKey& bk,
                                        const KeySwitchKey& ks);

struct CircuitBootstrapKeys {
    const BootstrapKey* bk = nullptr;
    const PrivKeySwitchKeyRlwe* to_b_row = nullptr;  // g = 1
    const PrivKeySwitchKeyRlwe* to_a_row = nullptr;  // g = -z
};

struct CircuitBootstrapResult {
    RgswCiphertext ct;
    uint64_t ks_transmitted_bits = 0;
};

// LWE bit -> RGSW of the same bit: one blind rotation per digit level
// followed by the two private keyswitches that form the a/b gadget rows.
CircuitBootstrapResult circuit_bootstrap(const LweCiphertext& ct,
                                         const CircuitBootstrapKeys& keys,
                                         const GadgetParams& out_gadget);

}  // namespace fhe
}  // namespace apsim
