// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/fhe/crypto.hpp"

#include <cmath>
#include <stdexcept>

#include "apsim/fhe/modmul.hpp"
#include "apsim/fhe/ntt.hpp"

namespace apsim {
namespace fhe {

NoiseSampler::NoiseSampler(uint64_t seed, double sigma)
    : rng_(seed), sigma_(sigma) {
    if (sigma < 0) throw std::invalid_argument("NoiseSampler: negative sigma");
    if (sigma_ > 0) {
        int tail = static_cast<int>(std::ceil(6.0 * sigma_)) + 1;
        std::vector<double> weights(tail + 1);
        double total = 0;
        for (int k = 0; k <= tail; ++k) {
            double w = std::exp(-0.5 * (k / sigma_) * (k / sigma_));
            if (k > 0) w *= 2.0;  // both signs
            weights[k] = w;
            total += w;
        }
        cdf_.resize(tail + 1);
        double acc = 0;
        for (int k = 0; k <= tail; ++k) {
            acc += weights[k] / total;
            cdf_[k] = acc;
        }
        cdf_.back() = 1.0;
    }
}

int64_t NoiseSampler::sample_noise() {
    if (sigma_ == 0) return 0;
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    size_t lo = 0, hi = cdf_.size() - 1;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (cdf_[mid] < u) lo = mid + 1; else hi = mid;
    }
    if (lo == 0) return 0;
    return (rng_() & 1) ? static_cast<int64_t>(lo) : -static_cast<int64_t>(lo);
}

uint64_t NoiseSampler::uniform(uint64_t modulus) {
    if (modulus == 0) throw std::invalid_argument("NoiseSampler::uniform: modulus 0");
    std::uniform_int_distribution<uint64_t> d(0, modulus - 1);
    return d(rng_);
}

uint64_t NoiseSampler::bit() { return rng_() & 1; }

LweSecretKey gen_lwe_key(const LweParams& p, NoiseSampler& s) {
    p.validate();
    LweSecretKey k;
    k.params = p;
    k.s.resize(p.n);
    for (auto& v : k.s) v = s.bit();
    return k;
}

RlweSecretKey gen_rlwe_key(const RingParams& r, NoiseSampler& s) {
    r.validate();
    RlweSecretKey k;
    k.ring = r;
    k.z.resize(r.n);
    for (auto& v : k.z) v = s.bit();
    return k;
}

namespace {

inline uint64_t reduce_width(uint64_t x, uint64_t q) { return q ? x % q : x; }

uint64_t add_signed_mod(uint64_t x, int64_t e, uint64_t q) {
    if (e >= 0) return add_mod(x, static_cast<uint64_t>(e) % q, q);
    return sub_mod(x, static_cast<uint64_t>(-e) % q, q);
}

}  // namespace

LweCiphertext lwe_encrypt(uint64_t message, const LweSecretKey& key,
                          NoiseSampler& s) {
    const LweParams& p = key.params;
    LweCiphertext ct;
    ct.params = p;
    ct.a.resize(p.n);
    uint64_t dot = 0;
    for (uint32_t i = 0; i < p.n; ++i) {
        ct.a[i] = s.uniform(p.q);
        if (key.s[i]) dot = add_mod(dot, ct.a[i], p.q);
    }
    ct.b = add_mod(dot, reduce_width(message, p.q), p.q);
    ct.b = add_signed_mod(ct.b, s.sample_noise(), p.q);
    return ct;
}

LweCiphertext lwe_trivial(uint64_t message, const LweParams& p) {
    p.validate();
    LweCiphertext ct;
    ct.params = p;
    ct.a.assign(p.n, 0);
    ct.b = reduce_width(message, p.q);
    return ct;
}

uint64_t lwe_phase(const LweCiphertext& ct, const LweSecretKey& key) {
    if (ct.params.n != key.params.n)
        throw std::invalid_argument("lwe_phase: dimension mismatch");
    uint64_t dot = 0;
    for (uint32_t i = 0; i < ct.params.n; ++i)
        if (key.s[i]) dot = add_mod(dot, ct.a[i], ct.params.q);
    return sub_mod(ct.b, dot, ct.params.q);
}

RlweCiphertext rlwe_encrypt(std::span<const uint64_t> message,
                            const RlweSecretKey& key, NoiseSampler& s) {
    const RingParams& r = key.ring;
    const size_t total = static_cast<size_t>(r.n) * r.limbs();
    if (message.size() != total)
        throw std::invalid_argument("rlwe_encrypt: message length mismatch");
    RlweCiphertext ct;
    ct.ring = r;
    ct.a.resize(total);
    ct.b.resize(total);
    // one integer error vector shared by all limbs keeps the RNS view
    // consistent
    std::vector<int64_t> noise(r.n);
    for (auto& e : noise) e = s.sample_noise();
    for (uint32_t l = 0; l < r.limbs(); ++l) {
        uint64_t q = r.moduli[l];
        size_t off = static_cast<size_t>(l) * r.n;
        for (uint32_t i = 0; i < r.n; ++i) ct.a[off + i] = s.uniform(q);
        Poly az = negacyclic_multiply(
            RingParams{r.n, {q}},
            std::span<const uint64_t>(ct.a.data() + off, r.n),
            std::span<const uint64_t>(key.z.data(), r.n));
        for (uint32_t i = 0; i < r.n; ++i) {
            uint64_t b = add_mod(az[i], message[off + i] % q, q);
            ct.b[off + i] = add_signed_mod(b, noise[i], q);
        }
    }
    return ct;
}

RlweCiphertext rlwe_trivial(std::span<const uint64_t> message,
                            const RingParams& r) {
    r.validate();
    const size_t total = static_cast<size_t>(r.n) * r.limbs();
    if (message.size() != total)
        throw std::invalid_argument("rlwe_trivial: message length mismatch");
    RlweCiphertext ct;
    ct.ring = r;
    ct.a.assign(total, 0);
    ct.b.assign(message.begin(), message.end());
    for (uint32_t l = 0; l < r.limbs(); ++l)
        for (uint32_t i = 0; i < r.n; ++i)
            ct.b[static_cast<size_t>(l) * r.n + i] %= r.moduli[l];
    return ct;
}

Poly rlwe_phase(const RlweCiphertext& ct, const RlweSecretKey& key) {
    const RingParams& r = ct.ring;
    if (r.n != key.ring.n)
        throw std::invalid_argument("rlwe_phase: ring mismatch");
    Poly out(static_cast<size_t>(r.n) * r.limbs());
    for (uint32_t l = 0; l < r.limbs(); ++l) {
        uint64_t q = r.moduli[l];
        size_t off = static_cast<size_t>(l) * r.n;
        Poly az = negacyclic_multiply(
            RingParams{r.n, {q}},
            std::span<const uint64_t>(ct.a.data() + off, r.n),
            std::span<const uint64_t>(key.z.data(), r.n));
        for (uint32_t i = 0; i < r.n; ++i)
            out[off + i] = sub_mod(ct.b[off + i], az[i], q);
    }
    return out;
}

RgswCiphertext rgsw_encrypt(std::span<const uint64_t> message,
                            const RlweSecretKey& key, const GadgetParams& g,
                            NoiseSampler& s) {
    const RingParams& r = key.ring;
    if (r.limbs() != 1)
        throw std::invalid_argument("rgsw_encrypt: single-limb rings only");
    if (message.size() != r.n)
        throw std::invalid_argument("rgsw_encrypt: message length mismatch");
    g.validate();
    const uint64_t q = r.modulus();
    RgswCiphertext ct;
    ct.ring = r;
    ct.gadget = g;
    Poly zero(r.n, 0);
    for (uint32_t j = 0; j < 2 * g.levels; ++j) {
        RlweCiphertext row = rlwe_encrypt(zero, key, s);
        uint32_t level = j % g.levels;
        uint64_t w = 1ull << (g.width - (level + 1) * g.base_log);
        Poly& tgt = (j < g.levels) ? row.a : row.b;
        for (uint32_t i = 0; i < r.n; ++i)
            tgt[i] = add_mod(tgt[i], mul_mod(message[i] % q, w % q, q), q);
        ct.rows.push_back(std::move(row));
    }
    return ct;
}

RgswCiphertext rgsw_trivial(std::span<const uint64_t> message,
                            const RingParams& r, const GadgetParams& g) {
    r.validate();
    g.validate();
    if (r.limbs() != 1)
        throw std::invalid_argument("rgsw_trivial: single-limb rings only");
    if (message.size() != r.n)
        throw std::invalid_argument("rgsw_trivial: message length mismatch");
    const uint64_t q = r.modulus();
    RgswCiphertext ct;
    ct.ring = r;
    ct.gadget = g;
    for (uint32_t j = 0; j < 2 * g.levels; ++j) {
        RlweCiphertext row;
        row.ring = r;
        row.a.assign(r.n, 0);
        row.b.assign(r.n, 0);
        uint32_t level = j % g.levels;
        uint64_t w = 1ull << (g.width - (level + 1) * g.base_log);
        Poly& tgt = (j < g.levels) ? row.a : row.b;
        for (uint32_t i = 0; i < r.n; ++i)
            tgt[i] = mul_mod(message[i] % q, w % q, q);
        ct.rows.push_back(std::move(row));
    }
    return ct;
}

uint64_t torus_distance(uint64_t x, uint64_t y, uint32_t width) {
    uint64_t q = (width == 64) ? 0 : (1ull << width);
    uint64_t d = (width == 64) ? (x - y) : sub_mod(x % q, y % q, q);
    uint64_t half = 1ull << (width - 1);
    return d > half ? ((width == 64) ? (0 - d) : (q - d)) : d;
}

}  // namespace fhe
}  // namespace apsim
