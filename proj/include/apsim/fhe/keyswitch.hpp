// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "apsim/fhe/ciphertext.hpp"
#include "apsim/fhe/crypto.hpp"

namespace apsim {
namespace fhe {

// Linear combination f(x_1..x_p) = sum lambda_z * x_z with small public
// integer coefficients; identity is {1}. This is the function family the
// aggregated public keyswitch supports.
struct LinearFn {
    std::vector<int64_t> coeffs;

    static LinearFn identity() { return LinearFn{{1}}; }
    size_t arity() const { return coeffs.size(); }
    uint64_t eval(std::span<const uint64_t> xs, uint64_t q) const;
};

enum class KeySwitchKind { public_fn, private_fn };

// Digit-decomposed keyswitch key with LWE entries.
//   public_fn: entries[i*t + j] encrypts s_i * w_j,           i < n
//   private_fn: entries[(z*(n+1) + i)*t + j] encrypts
//       lambda_z * s_i * w_j   (i < n)   and  -lambda_z * w_j  (i = n)
// where w_j = 2^(width - j*base_log), j = 1..t.
struct KeySwitchKey {
    KeySwitchKind kind = KeySwitchKind::public_fn;
    uint32_t n_src = 0;    // source dimension
    uint32_t t = 0;        // digits per coefficient
    uint32_t base_log = 0;
    uint32_t p = 1;        // function arity (private only)
    std::vector<int64_t> lambdas;  // private only, length p
    LweParams target;
    std::vector<LweCiphertext> entries;

    void validate() const;
    uint64_t key_bytes() const;  // dense size of the stored entries
};

// LWE -> RLWE packing key: entries[i*t + j] is an RLWE encryption of
// s_i * w_j under the ring key.
struct PackingKey {
    uint32_t n_src = 0;
    uint32_t t = 0;
    uint32_t base_log = 0;
    RingParams ring;
    std::vector<RlweCiphertext> entries;

    uint64_t key_bytes() const;
};

// Private keyswitch key with RLWE entries: row (i, j) encrypts
// g(X) * s_i * w_j for i < n and -g(X) * w_j for i = n. Carrying the
// secret-dependent polynomial g inside the key is what makes the switch
// "private"; the evaluator only ever sees digit broadcasts.
struct PrivKeySwitchKeyRlwe {
    uint32_t n_src = 0;
    uint32_t t = 0;
    uint32_t base_log = 0;
    RingParams ring;
    std::vector<RlweCiphertext> entries;

    uint64_t key_bytes() const;
};

KeySwitchKey make_pub_keyswitch_key(const LweSecretKey& src,
                                    const LweSecretKey& dst, uint32_t t,
                                    uint32_t base_log, NoiseSampler& s);

KeySwitchKey make_priv_keyswitch_key(const LweSecretKey& src,
                                     const LweSecretKey& dst,
                                     const LinearFn& f, uint32_t t,
                                     uint32_t base_log, NoiseSampler& s);

PackingKey make_packing_key(const LweSecretKey& src, const RlweSecretKey& dst,
                            uint32_t t, uint32_t base_log, NoiseSampler& s);

// g has dst.ring.n signed coefficients (e.g. {1} or the negated ring key)
PrivKeySwitchKeyRlwe make_priv_keyswitch_key_rlwe(
    const LweSecretKey& src, const RlweSecretKey& dst,
    std::span<const int64_t> g, uint32_t t, uint32_t base_log,
    NoiseSampler& s);

struct KeySwitchResult {
    LweCiphertext ct;
    uint64_t transmitted_bits = 0;  // digit broadcasts on the shared bus
};

struct KeySwitchResultRlwe {
    RlweCiphertext ct;
    uint64_t transmitted_bits = 0;
};

// Aggregated public functional keyswitch:
// out = (0, f(b^1..b^p)) - sum_{i<n} sum_{j<=t} dig_j(f(a_i^1..a_i^p)) * K_ij
// Transmitted digits: n * t regardless of arity.
KeySwitchResult pub_keyswitch(const LinearFn& f, const KeySwitchKey& key,
                              std::span<const LweCiphertext> cts);

// Private functional keyswitch (function baked into the key):
// out = - sum_z sum_{i<=n} sum_j dig_j(c^z_i) * K_zij, c^z_{n} = b^z.
// Transmitted digits: p * (n+1) * t.
KeySwitchResult priv_keyswitch(const KeySwitchKey& key,
                               std::span<const LweCiphertext> cts);

KeySwitchResultRlwe priv_keyswitch_rlwe(const PrivKeySwitchKeyRlwe& key,
                                        const LweCiphertext& ct);

// Packs up to ring.n LWE samples into slot coefficients of one RLWE.
KeySwitchResultRlwe pack_lwe_to_rlwe(std::span<const LweCiphertext> cts,
                                     const PackingKey& key);

}  // namespace fhe
}  // namespace apsim
