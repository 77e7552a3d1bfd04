// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "apsim/fhe/ciphertext.hpp"

namespace apsim {
namespace fhe {

// Discrete gaussian by inversion sampling from a precomputed CDF table
// (cut at 6 sigma), driven by a seeded mt19937_64. sigma = 0 yields the
// constant 0, which the noiseless test fixtures rely on.
class NoiseSampler {
  public:
    NoiseSampler(uint64_t seed, double sigma);

    int64_t sample_noise();
    uint64_t uniform(uint64_t modulus);  // uniform in [0, modulus)
    uint64_t bit();

    std::mt19937_64& rng() { return rng_; }

  private:
    std::mt19937_64 rng_;
    double sigma_;
    std::vector<double> cdf_;  // P(X <= k), k = 0 .. tail
};

LweSecretKey gen_lwe_key(const LweParams& p, NoiseSampler& s);
RlweSecretKey gen_rlwe_key(const RingParams& r, NoiseSampler& s);

// message is a raw residue mod q (callers scale/encode)
LweCiphertext lwe_encrypt(uint64_t message, const LweSecretKey& key,
                          NoiseSampler& s);
LweCiphertext lwe_trivial(uint64_t message, const LweParams& p);
// b - <a, s> mod q
uint64_t lwe_phase(const LweCiphertext& ct, const LweSecretKey& key);

// message limb-major (limbs * n), raw residues
RlweCiphertext rlwe_encrypt(std::span<const uint64_t> message,
                            const RlweSecretKey& key, NoiseSampler& s);
RlweCiphertext rlwe_trivial(std::span<const uint64_t> message,
                            const RingParams& r);
Poly rlwe_phase(const RlweCiphertext& ct, const RlweSecretKey& key);

// message is a single-limb polynomial (n coefficients) in the key's ring;
// single-limb rings only (the gate bootstrapping lane)
RgswCiphertext rgsw_encrypt(std::span<const uint64_t> message,
                            const RlweSecretKey& key, const GadgetParams& g,
                            NoiseSampler& s);

// zero-mask RGSW (the gadget matrix scaled by the message); decryptable by
// anyone, useful as an exact selector
RgswCiphertext rgsw_trivial(std::span<const uint64_t> message,
                            const RingParams& r, const GadgetParams& g);

// centered distance |x - y| on the mod-2^width circle
uint64_t torus_distance(uint64_t x, uint64_t y, uint32_t width);

}  // namespace fhe
}  // namespace apsim
