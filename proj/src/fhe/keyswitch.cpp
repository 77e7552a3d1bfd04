// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/fhe/keyswitch.hpp"

#include <stdexcept>

#include "apsim/fhe/gadget.hpp"
#include "apsim/fhe/modmul.hpp"
#include "apsim/fhe/ntt.hpp"

namespace apsim {
namespace fhe {

uint64_t LinearFn::eval(std::span<const uint64_t> xs, uint64_t q) const {
    if (xs.size() != coeffs.size())
        throw std::invalid_argument("LinearFn: arity mismatch");
    uint64_t acc = 0;
    for (size_t z = 0; z < xs.size(); ++z) {
        int64_t l = coeffs[z];
        uint64_t mag = static_cast<uint64_t>(l < 0 ? -l : l) % q;
        uint64_t term = mul_mod(xs[z] % q, mag, q);
        acc = l < 0 ? sub_mod(acc, term, q) : add_mod(acc, term, q);
    }
    return acc;
}

void KeySwitchKey::validate() const {
    if (n_src == 0 || t == 0 || base_log == 0)
        throw std::invalid_argument("KeySwitchKey: empty dimensions");
    size_t expect = (kind == KeySwitchKind::public_fn)
                        ? static_cast<size_t>(n_src) * t
                        : static_cast<size_t>(p) * (n_src + 1) * t;
    if (entries.size() != expect)
        throw std::invalid_argument("KeySwitchKey: entry count mismatch");
    if (kind == KeySwitchKind::private_fn && lambdas.size() != p)
        throw std::invalid_argument("KeySwitchKey: lambda count mismatch");
}

namespace {

uint64_t word_bytes(uint32_t width) { return (width + 7) / 8; }

uint64_t rlwe_bytes(const RingParams& r) {
    uint64_t total = 0;
    for (uint64_t q : r.moduli) {
        uint32_t w = 64;
        if ((q & (q - 1)) == 0) {
            w = 0;
            while ((1ull << w) < q) ++w;
        }
        total += 2ull * r.n * word_bytes(w);
    }
    return total;
}

}  // namespace

uint64_t KeySwitchKey::key_bytes() const {
    return entries.size() *
           (static_cast<uint64_t>(target.n) + 1) * word_bytes(target.width);
}

uint64_t PackingKey::key_bytes() const {
    return entries.size() * rlwe_bytes(ring);
}

uint64_t PrivKeySwitchKeyRlwe::key_bytes() const {
    return entries.size() * rlwe_bytes(ring);
}

namespace {

// weight of digit level j (0-based) for a width-bit modulus
inline uint64_t digit_weight(uint32_t width, uint32_t base_log, uint32_t j) {
    uint32_t sh = width - (j + 1) * base_log;
    return sh >= 64 ? 0 : (1ull << sh);
}

uint64_t mul_signed_mod(uint64_t x, int64_t m, uint64_t q) {
    uint64_t mag = static_cast<uint64_t>(m < 0 ? -m : m) % q;
    uint64_t r = mul_mod(x % q, mag, q);
    return m < 0 ? neg_mod(r, q) : r;
}

// acc -= d * entry (LWE)
void sub_scaled_lwe(LweCiphertext& acc, int64_t d, const LweCiphertext& e) {
    const uint64_t q = acc.params.q;
    for (uint32_t i = 0; i < acc.params.n; ++i)
        acc.a[i] = sub_mod(acc.a[i], mul_signed_mod(e.a[i], d, q), q);
    acc.b = sub_mod(acc.b, mul_signed_mod(e.b, d, q), q);
}

// acc -= d * entry (RLWE, scalar digit)
void sub_scaled_rlwe(RlweCiphertext& acc, int64_t d, const RlweCiphertext& e) {
    for (uint32_t l = 0; l < acc.ring.limbs(); ++l) {
        uint64_t q = acc.ring.moduli[l];
        size_t off = static_cast<size_t>(l) * acc.ring.n;
        for (uint32_t i = 0; i < acc.ring.n; ++i) {
            acc.a[off + i] =
                sub_mod(acc.a[off + i], mul_signed_mod(e.a[off + i], d, q), q);
            acc.b[off + i] =
                sub_mod(acc.b[off + i], mul_signed_mod(e.b[off + i], d, q), q);
        }
    }
}

Poly signed_scaled_poly(std::span<const int64_t> g, uint64_t scale,
                        uint64_t q, bool negate) {
    Poly out(g.size());
    for (size_t i = 0; i < g.size(); ++i) {
        int64_t c = g[i];
        uint64_t mag = static_cast<uint64_t>(c < 0 ? -c : c) % q;
        uint64_t v = mul_mod(mag, scale % q, q);
        bool neg = (c < 0) != negate;
        out[i] = neg ? neg_mod(v, q) : v;
    }
    return out;
}

}  // namespace

KeySwitchKey make_pub_keyswitch_key(const LweSecretKey& src,
                                    const LweSecretKey& dst, uint32_t t,
                                    uint32_t base_log, NoiseSampler& s) {
    GadgetParams{base_log, t, src.params.width}.validate();
    if (src.params.q != dst.params.q)
        throw std::invalid_argument("make_pub_keyswitch_key: modulus mismatch");
    KeySwitchKey key;
    key.kind = KeySwitchKind::public_fn;
    key.n_src = src.params.n;
    key.t = t;
    key.base_log = base_log;
    key.target = dst.params;
    key.entries.reserve(static_cast<size_t>(key.n_src) * t);
    for (uint32_t i = 0; i < key.n_src; ++i)
        for (uint32_t j = 0; j < t; ++j) {
            uint64_t w = digit_weight(src.params.width, base_log, j);
            uint64_t msg = src.s[i] ? w : 0;
            key.entries.push_back(lwe_encrypt(msg, dst, s));
        }
    return key;
}

KeySwitchKey make_priv_keyswitch_key(const LweSecretKey& src,
                                     const LweSecretKey& dst,
                                     const LinearFn& f, uint32_t t,
                                     uint32_t base_log, NoiseSampler& s) {
    GadgetParams{base_log, t, src.params.width}.validate();
    if (f.coeffs.empty())
        throw std::invalid_argument("make_priv_keyswitch_key: empty function");
    KeySwitchKey key;
    key.kind = KeySwitchKind::private_fn;
    key.n_src = src.params.n;
    key.t = t;
    key.base_log = base_log;
    key.p = static_cast<uint32_t>(f.coeffs.size());
    key.lambdas = f.coeffs;
    key.target = dst.params;
    const uint64_t q = dst.params.q;
    for (uint32_t z = 0; z < key.p; ++z)
        for (uint32_t i = 0; i <= key.n_src; ++i)
            for (uint32_t j = 0; j < t; ++j) {
                uint64_t w = digit_weight(src.params.width, base_log, j);
                int64_t lam = f.coeffs[z];
                uint64_t msg;
                if (i < key.n_src) {
                    msg = src.s[i] ? mul_signed_mod(w, lam, q) : 0;
                } else {
                    msg = neg_mod(mul_signed_mod(w, lam, q), q);
                }
                key.entries.push_back(lwe_encrypt(msg, dst, s));
            }
    return key;
}

PackingKey make_packing_key(const LweSecretKey& src, const RlweSecretKey& dst,
                            uint32_t t, uint32_t base_log, NoiseSampler& s) {
    GadgetParams{base_log, t, src.params.width}.validate();
    PackingKey key;
    key.n_src = src.params.n;
    key.t = t;
    key.base_log = base_log;
    key.ring = dst.ring;
    const size_t total = static_cast<size_t>(dst.ring.n) * dst.ring.limbs();
    for (uint32_t i = 0; i < key.n_src; ++i)
        for (uint32_t j = 0; j < t; ++j) {
            uint64_t w = digit_weight(src.params.width, base_log, j);
            Poly msg(total, 0);
            if (src.s[i])
                for (uint32_t l = 0; l < dst.ring.limbs(); ++l)
                    msg[static_cast<size_t>(l) * dst.ring.n] =
                        w % dst.ring.moduli[l];
            key.entries.push_back(rlwe_encrypt(msg, dst, s));
        }
    return key;
}

PrivKeySwitchKeyRlwe make_priv_keyswitch_key_rlwe(
    const LweSecretKey& src, const RlweSecretKey& dst,
    std::span<const int64_t> g, uint32_t t, uint32_t base_log,
    NoiseSampler& s) {
    GadgetParams{base_log, t, src.params.width}.validate();
    if (g.size() != dst.ring.n)
        throw std::invalid_argument("make_priv_keyswitch_key_rlwe: bad g length");
    PrivKeySwitchKeyRlwe key;
    key.n_src = src.params.n;
    key.t = t;
    key.base_log = base_log;
    key.ring = dst.ring;
    const uint32_t n = dst.ring.n;
    const uint32_t limbs = dst.ring.limbs();
    for (uint32_t i = 0; i <= key.n_src; ++i)
        for (uint32_t j = 0; j < t; ++j) {
            uint64_t w = digit_weight(src.params.width, base_log, j);
            Poly msg(static_cast<size_t>(n) * limbs, 0);
            bool used = (i == key.n_src) || src.s[i] != 0;
            if (used) {
                bool negate = (i == key.n_src);
                for (uint32_t l = 0; l < limbs; ++l) {
                    Poly part = signed_scaled_poly(g, w, dst.ring.moduli[l], negate);
                    std::copy(part.begin(), part.end(),
                              msg.begin() + static_cast<size_t>(l) * n);
                }
            }
            key.entries.push_back(rlwe_encrypt(msg, dst, s));
        }
    return key;
}

KeySwitchResult pub_keyswitch(const LinearFn& f, const KeySwitchKey& key,
                              std::span<const LweCiphertext> cts) {
    key.validate();
    if (key.kind != KeySwitchKind::public_fn)
        throw std::invalid_argument("pub_keyswitch: key kind mismatch");
    if (f.coeffs.empty() || f.coeffs.size() != cts.size())
        throw std::invalid_argument("pub_keyswitch: unsupported function arity");
    const uint32_t n = key.n_src;
    for (const auto& ct : cts)
        if (ct.params.n != n)
            throw std::invalid_argument("pub_keyswitch: dimension mismatch");
    const uint32_t width = cts[0].params.width;
    const uint64_t q = cts[0].params.q;

    LweCiphertext out = lwe_trivial(0, key.target);
    std::vector<uint64_t> bs(cts.size());
    for (size_t z = 0; z < cts.size(); ++z) bs[z] = cts[z].b;
    out.b = f.eval(bs, q);

    std::vector<uint64_t> ahat(n);
    std::vector<uint64_t> col(cts.size());
    for (uint32_t i = 0; i < n; ++i) {
        for (size_t z = 0; z < cts.size(); ++z) col[z] = cts[z].a[i];
        ahat[i] = f.eval(col, q);
    }
    DecomposedBits digs = gadget_decompose(ahat, key.base_log, key.t, width);
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = 0; j < key.t; ++j) {
            int64_t d = digs.digits[static_cast<size_t>(j) * n + i];
            if (d == 0) continue;
            sub_scaled_lwe(out, d, key.entries[static_cast<size_t>(i) * key.t + j]);
        }
    return {std::move(out), static_cast<uint64_t>(n) * key.t};
}

KeySwitchResult priv_keyswitch(const KeySwitchKey& key,
                               std::span<const LweCiphertext> cts) {
    key.validate();
    if (key.kind != KeySwitchKind::private_fn)
        throw std::invalid_argument("priv_keyswitch: key kind mismatch");
    if (cts.size() != key.p)
        throw std::invalid_argument("priv_keyswitch: arity mismatch");
    const uint32_t n = key.n_src;
    for (const auto& ct : cts)
        if (ct.params.n != n)
            throw std::invalid_argument("priv_keyswitch: dimension mismatch");
    const uint32_t width = cts[0].params.width;

    LweCiphertext out = lwe_trivial(0, key.target);
    std::vector<uint64_t> coeffs(n + 1);
    for (uint32_t z = 0; z < key.p; ++z) {
        for (uint32_t i = 0; i < n; ++i) coeffs[i] = cts[z].a[i];
        coeffs[n] = cts[z].b;
        DecomposedBits digs = gadget_decompose(coeffs, key.base_log, key.t, width);
        for (uint32_t i = 0; i <= n; ++i)
            for (uint32_t j = 0; j < key.t; ++j) {
                int64_t d = digs.digits[static_cast<size_t>(j) * (n + 1) + i];
                if (d == 0) continue;
                size_t idx = (static_cast<size_t>(z) * (n + 1) + i) * key.t + j;
                sub_scaled_lwe(out, d, key.entries[idx]);
            }
    }
    return {std::move(out),
            static_cast<uint64_t>(key.p) * (n + 1) * key.t};
}

KeySwitchResultRlwe priv_keyswitch_rlwe(const PrivKeySwitchKeyRlwe& key,
                                        const LweCiphertext& ct) {
    if (ct.params.n != key.n_src)
        throw std::invalid_argument("priv_keyswitch_rlwe: dimension mismatch");
    const uint32_t n = key.n_src;
    const uint32_t width = ct.params.width;
    const size_t total = static_cast<size_t>(key.ring.n) * key.ring.limbs();
    RlweCiphertext out = rlwe_trivial(Poly(total, 0), key.ring);

    std::vector<uint64_t> coeffs(n + 1);
    for (uint32_t i = 0; i < n; ++i) coeffs[i] = ct.a[i];
    coeffs[n] = ct.b;
    DecomposedBits digs = gadget_decompose(coeffs, key.base_log, key.t, width);
    for (uint32_t i = 0; i <= n; ++i)
        for (uint32_t j = 0; j < key.t; ++j) {
            int64_t d = digs.digits[static_cast<size_t>(j) * (n + 1) + i];
            if (d == 0) continue;
            size_t idx = static_cast<size_t>(i) * key.t + j;
            sub_scaled_rlwe(out, d, key.entries[idx]);
        }
    return {std::move(out),
            static_cast<uint64_t>(n + 1) * key.t};
}

KeySwitchResultRlwe pack_lwe_to_rlwe(std::span<const LweCiphertext> cts,
                                     const PackingKey& key) {
    if (cts.empty()) throw std::invalid_argument("pack_lwe_to_rlwe: no inputs");
    if (cts.size() > key.ring.n)
        throw std::invalid_argument("pack_lwe_to_rlwe: batch exceeds ring capacity");
    if (key.ring.limbs() != 1)
        throw std::invalid_argument("pack_lwe_to_rlwe: single-limb rings only");
    const uint32_t n = key.n_src;
    const uint32_t N = key.ring.n;
    const uint64_t q = key.ring.modulus();
    const uint32_t width = cts[0].params.width;
    for (const auto& ct : cts)
        if (ct.params.n != n || ct.params.q != q)
            throw std::invalid_argument("pack_lwe_to_rlwe: parameter mismatch");

    Poly slots(N, 0);
    for (size_t k = 0; k < cts.size(); ++k) slots[k] = cts[k].b % q;
    RlweCiphertext out = rlwe_trivial(slots, key.ring);

    // digit polynomials P_ij(X) = sum_k dig_j(a_k[i]) X^k; all-zero digit
    // polynomials (common when packing trivial samples) are skipped
    std::vector<uint64_t> column(cts.size());
    for (uint32_t i = 0; i < n; ++i) {
        for (size_t k = 0; k < cts.size(); ++k) column[k] = cts[k].a[i];
        DecomposedBits digs =
            gadget_decompose(column, key.base_log, key.t, width);
        for (uint32_t j = 0; j < key.t; ++j) {
            auto row = digs.row(j);
            bool all_zero = true;
            for (int64_t d : row)
                if (d != 0) { all_zero = false; break; }
            if (all_zero) continue;
            Poly pj(N, 0);
            for (size_t k = 0; k < row.size(); ++k) {
                int64_t d = row[k];
                pj[k] = d >= 0 ? static_cast<uint64_t>(d) % q
                               : neg_mod(static_cast<uint64_t>(-d) % q, q);
            }
            const RlweCiphertext& e = key.entries[static_cast<size_t>(i) * key.t + j];
            Poly pa = negacyclic_multiply(key.ring, pj, e.a);
            Poly pb = negacyclic_multiply(key.ring, pj, e.b);
            for (uint32_t c = 0; c < N; ++c) {
                out.a[c] = sub_mod(out.a[c], pa[c], q);
                out.b[c] = sub_mod(out.b[c], pb[c], q);
            }
        }
    }
    return {std::move(out), static_cast<uint64_t>(n) * key.t};
}

}  // namespace fhe
}  // namespace apsim
