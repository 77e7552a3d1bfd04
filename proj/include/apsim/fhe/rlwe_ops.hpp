// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "apsim/fhe/ciphertext.hpp"
#include "apsim/fhe/crypto.hpp"

namespace apsim {
namespace fhe {

RlweCiphertext rlwe_add(const RlweCiphertext& x, const RlweCiphertext& y);
RlweCiphertext rlwe_sub(const RlweCiphertext& x, const RlweCiphertext& y);

// ciphertext * plaintext polynomial (limb-major residues)
RlweCiphertext rlwe_pmult(const RlweCiphertext& x,
                          std::span<const uint64_t> pt);

// Keyswitching key for the squared secret, one row per RNS limb digit:
// rows[j] encrypts z^2 * u_j where u_j is the CRT unit of limb j.
struct RelinKey {
    RingParams ring;
    std::vector<RlweCiphertext> rows;
};

// Rotation key for the Galois map X -> X^k, rows[j] encrypts z(X^k) * u_j.
struct GaloisKey {
    RingParams ring;
    uint64_t k = 0;
    std::vector<RlweCiphertext> rows;
};

RelinKey make_relin_key(const RlweSecretKey& key, NoiseSampler& s);
GaloisKey make_galois_key(const RlweSecretKey& key, uint64_t k,
                          NoiseSampler& s);

// tensor product followed by relinearization of the degree-2 term
RlweCiphertext rlwe_cmult(const RlweCiphertext& x, const RlweCiphertext& y,
                          const RelinKey& rk);

// slot rotation: Galois map on both components, then keyswitch back
RlweCiphertext rlwe_rotate(const RlweCiphertext& x, const GaloisKey& gk);

}  // namespace fhe
}  // namespace apsim
