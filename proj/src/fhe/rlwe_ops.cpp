// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/fhe/rlwe_ops.hpp"

#include <algorithm>
#include <stdexcept>

#include "apsim/fhe/automorphism.hpp"
#include "apsim/fhe/modmul.hpp"
#include "apsim/fhe/ntt.hpp"

namespace apsim {
namespace fhe {

namespace {

void check_same_ring(const RlweCiphertext& x, const RlweCiphertext& y) {
    if (x.ring.n != y.ring.n || x.ring.moduli != y.ring.moduli)
        throw std::invalid_argument("rlwe op: ring mismatch");
}

// per-limb negacyclic product of limb-major vectors
Poly limbwise_mult(const RingParams& r, std::span<const uint64_t> x,
                   std::span<const uint64_t> y) {
    return negacyclic_multiply(r, x, y);
}

}  // namespace

RlweCiphertext rlwe_add(const RlweCiphertext& x, const RlweCiphertext& y) {
    check_same_ring(x, y);
    RlweCiphertext out = x;
    out.level = std::min(x.level, y.level);
    for (uint32_t l = 0; l < x.ring.limbs(); ++l) {
        uint64_t q = x.ring.moduli[l];
        size_t off = static_cast<size_t>(l) * x.ring.n;
        for (uint32_t i = 0; i < x.ring.n; ++i) {
            out.a[off + i] = add_mod(out.a[off + i], y.a[off + i], q);
            out.b[off + i] = add_mod(out.b[off + i], y.b[off + i], q);
        }
    }
    return out;
}

RlweCiphertext rlwe_sub(const RlweCiphertext& x, const RlweCiphertext& y) {
    check_same_ring(x, y);
    RlweCiphertext out = x;
    out.level = std::min(x.level, y.level);
    for (uint32_t l = 0; l < x.ring.limbs(); ++l) {
        uint64_t q = x.ring.moduli[l];
        size_t off = static_cast<size_t>(l) * x.ring.n;
        for (uint32_t i = 0; i < x.ring.n; ++i) {
            out.a[off + i] = sub_mod(out.a[off + i], y.a[off + i], q);
            out.b[off + i] = sub_mod(out.b[off + i], y.b[off + i], q);
        }
    }
    return out;
}

RlweCiphertext rlwe_pmult(const RlweCiphertext& x,
                          std::span<const uint64_t> pt) {
    if (pt.size() != x.a.size())
        throw std::invalid_argument("rlwe_pmult: plaintext length mismatch");
    RlweCiphertext out;
    out.ring = x.ring;
    out.level = x.level;
    out.a = limbwise_mult(x.ring, x.a, pt);
    out.b = limbwise_mult(x.ring, x.b, pt);
    return out;
}

namespace {

// limb-major message with limb j holding `poly` and the others zero
Poly crt_unit_message(const RingParams& r, uint32_t j,
                      std::span<const uint64_t> poly) {
    Poly msg(static_cast<size_t>(r.n) * r.limbs(), 0);
    std::copy(poly.begin(), poly.end(),
              msg.begin() + static_cast<size_t>(j) * r.n);
    return msg;
}

// digit polynomial for limb j: the limb-j residues replicated into every
// limb (values < p_j are lifted as plain integers)
Poly spread_digit(const RingParams& r, std::span<const uint64_t> limb_poly) {
    Poly out(static_cast<size_t>(r.n) * r.limbs());
    for (uint32_t l = 0; l < r.limbs(); ++l) {
        uint64_t q = r.moduli[l];
        size_t off = static_cast<size_t>(l) * r.n;
        for (uint32_t i = 0; i < r.n; ++i) out[off + i] = limb_poly[i] % q;
    }
    return out;
}

}  // namespace

RelinKey make_relin_key(const RlweSecretKey& key, NoiseSampler& s) {
    const RingParams& r = key.ring;
    RelinKey rk;
    rk.ring = r;
    for (uint32_t j = 0; j < r.limbs(); ++j) {
        uint64_t q = r.moduli[j];
        Poly z2 = negacyclic_multiply(RingParams{r.n, {q}},
                                      std::span<const uint64_t>(key.z),
                                      std::span<const uint64_t>(key.z));
        rk.rows.push_back(rlwe_encrypt(crt_unit_message(r, j, z2), key, s));
    }
    return rk;
}

GaloisKey make_galois_key(const RlweSecretKey& key, uint64_t k,
                          NoiseSampler& s) {
    const RingParams& r = key.ring;
    GaloisKey gk;
    gk.ring = r;
    gk.k = k;
    for (uint32_t j = 0; j < r.limbs(); ++j) {
        uint64_t q = r.moduli[j];
        Poly zk = galois_map(key.z, k, q);
        gk.rows.push_back(rlwe_encrypt(crt_unit_message(r, j, zk), key, s));
    }
    return gk;
}

RlweCiphertext rlwe_cmult(const RlweCiphertext& x, const RlweCiphertext& y,
                          const RelinKey& rk) {
    check_same_ring(x, y);
    if (rk.rows.size() != x.ring.limbs())
        throw std::invalid_argument("rlwe_cmult: relin key limb mismatch");
    const RingParams& r = x.ring;
    const uint32_t n = r.n;

    Poly d0 = limbwise_mult(r, x.b, y.b);
    Poly a1b2 = limbwise_mult(r, x.a, y.b);
    Poly a2b1 = limbwise_mult(r, y.a, x.b);
    Poly d2 = limbwise_mult(r, x.a, y.a);

    RlweCiphertext out;
    out.ring = r;
    uint32_t lo = std::min(x.level, y.level);
    out.level = lo > 0 ? lo - 1 : 0;  // a multiplication spends one level
    out.a.resize(d0.size());
    out.b = d0;
    for (uint32_t l = 0; l < r.limbs(); ++l) {
        uint64_t q = r.moduli[l];
        size_t off = static_cast<size_t>(l) * n;
        for (uint32_t i = 0; i < n; ++i)
            out.a[off + i] = add_mod(a1b2[off + i], a2b1[off + i], q);
    }
    // relinearize: out += sum_j D_j * rows[j], D_j = limb-j digits of d2
    for (uint32_t j = 0; j < r.limbs(); ++j) {
        Poly dj = spread_digit(
            r, std::span<const uint64_t>(d2.data() + static_cast<size_t>(j) * n, n));
        Poly pa = limbwise_mult(r, dj, rk.rows[j].a);
        Poly pb = limbwise_mult(r, dj, rk.rows[j].b);
        for (uint32_t l = 0; l < r.limbs(); ++l) {
            uint64_t q = r.moduli[l];
            size_t off = static_cast<size_t>(l) * n;
            for (uint32_t i = 0; i < n; ++i) {
                out.a[off + i] = add_mod(out.a[off + i], pa[off + i], q);
                out.b[off + i] = add_mod(out.b[off + i], pb[off + i], q);
            }
        }
    }
    return out;
}

RlweCiphertext rlwe_rotate(const RlweCiphertext& x, const GaloisKey& gk) {
    if (gk.rows.size() != x.ring.limbs())
        throw std::invalid_argument("rlwe_rotate: key limb mismatch");
    const RingParams& r = x.ring;
    const uint32_t n = r.n;
    Poly ga(x.a.size()), gb(x.b.size());
    for (uint32_t l = 0; l < r.limbs(); ++l) {
        uint64_t q = r.moduli[l];
        size_t off = static_cast<size_t>(l) * n;
        Poly pa = galois_map(
            std::span<const uint64_t>(x.a.data() + off, n), gk.k, q);
        Poly pb = galois_map(
            std::span<const uint64_t>(x.b.data() + off, n), gk.k, q);
        std::copy(pa.begin(), pa.end(), ga.begin() + off);
        std::copy(pb.begin(), pb.end(), gb.begin() + off);
    }
    RlweCiphertext out;
    out.ring = r;
    out.level = x.level;
    out.a.assign(x.a.size(), 0);
    out.b = gb;
    // keyswitch the rotated mask back under z: out -= sum_j D_j * rows[j]
    for (uint32_t j = 0; j < r.limbs(); ++j) {
        Poly dj = spread_digit(
            r, std::span<const uint64_t>(ga.data() + static_cast<size_t>(j) * n, n));
        Poly pa = limbwise_mult(r, dj, gk.rows[j].a);
        Poly pb = limbwise_mult(r, dj, gk.rows[j].b);
        for (uint32_t l = 0; l < r.limbs(); ++l) {
            uint64_t q = r.moduli[l];
            size_t off = static_cast<size_t>(l) * n;
            for (uint32_t i = 0; i < n; ++i) {
                out.a[off + i] = sub_mod(out.a[off + i], pa[off + i], q);
                out.b[off + i] = sub_mod(out.b[off + i], pb[off + i], q);
            }
        }
    }
    return out;
}

}  // namespace fhe
}  // namespace apsim
