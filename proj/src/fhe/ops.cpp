// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/fhe/ops.hpp"

#include <stdexcept>

#include "apsim/fhe/automorphism.hpp"
#include "apsim/fhe/gadget.hpp"
#include "apsim/fhe/modmul.hpp"
#include "apsim/fhe/ntt.hpp"

namespace apsim {
namespace fhe {

namespace {

uint32_t pow2_width(uint64_t q) {
    if ((q & (q - 1)) != 0) throw std::invalid_argument("modulus is not a power of two");
    uint32_t w = 0;
    while ((1ull << w) < q) ++w;
    return w;
}

void check_single_pow2(const RingParams& r) {
    if (r.limbs() != 1 || (r.modulus() & (r.modulus() - 1)) != 0)
        throw std::invalid_argument("operation requires a single power-of-two limb");
}

}  // namespace

RlweCiphertext external_product(const RgswCiphertext& g,
                                const RlweCiphertext& c) {
    check_single_pow2(c.ring);
    if (g.ring.n != c.ring.n || g.ring.modulus() != c.ring.modulus())
        throw std::invalid_argument("external_product: ring mismatch");
    const uint32_t n = c.ring.n;
    const uint64_t q = c.ring.modulus();
    const uint32_t width = pow2_width(q);
    const GadgetParams& gp = g.gadget;
    if (g.rows.size() != 2ull * gp.levels)
        throw std::invalid_argument("external_product: malformed gadget rows");

    RlweCiphertext out;
    out.ring = c.ring;
    out.a.assign(n, 0);
    out.b.assign(n, 0);
    DecomposedBits da = gadget_decompose(c.a, gp.base_log, gp.levels, width);
    DecomposedBits db = gadget_decompose(c.b, gp.base_log, gp.levels, width);
    for (uint32_t comp = 0; comp < 2; ++comp) {
        const DecomposedBits& d = comp == 0 ? da : db;
        for (uint32_t j = 0; j < gp.levels; ++j) {
            auto row = d.row(j);
            Poly pj(n);
            for (uint32_t k = 0; k < n; ++k) {
                int64_t dig = row[k];
                pj[k] = dig >= 0 ? static_cast<uint64_t>(dig)
                                 : (q - static_cast<uint64_t>(-dig));
            }
            const RlweCiphertext& e = g.rows[comp * gp.levels + j];
            Poly pa = negacyclic_multiply(c.ring, pj, e.a);
            Poly pb = negacyclic_multiply(c.ring, pj, e.b);
            for (uint32_t k = 0; k < n; ++k) {
                out.a[k] = add_mod(out.a[k], pa[k], q);
                out.b[k] = add_mod(out.b[k], pb[k], q);
            }
        }
    }
    return out;
}

RlweCiphertext cmux(const RgswCiphertext& sel, const RlweCiphertext& c0,
                    const RlweCiphertext& c1) {
    if (c0.ring.n != c1.ring.n || c0.ring.moduli != c1.ring.moduli)
        throw std::invalid_argument("cmux: operand ring mismatch");
    const uint32_t n = c0.ring.n;
    const uint64_t q = c0.ring.modulus();
    RlweCiphertext diff;
    diff.ring = c0.ring;
    diff.a.resize(n);
    diff.b.resize(n);
    for (uint32_t k = 0; k < n; ++k) {
        diff.a[k] = sub_mod(c1.a[k], c0.a[k], q);
        diff.b[k] = sub_mod(c1.b[k], c0.b[k], q);
    }
    RlweCiphertext prod = external_product(sel, diff);
    for (uint32_t k = 0; k < n; ++k) {
        prod.a[k] = add_mod(prod.a[k], c0.a[k], q);
        prod.b[k] = add_mod(prod.b[k], c0.b[k], q);
    }
    return prod;
}

LweCiphertext sample_extract(const RlweCiphertext& ct, uint32_t index) {
    check_single_pow2(ct.ring);
    const uint32_t n = ct.ring.n;
    if (index >= n) throw std::out_of_range("sample_extract: index");
    const uint64_t q = ct.ring.modulus();
    LweCiphertext out;
    out.params = LweParams{n, q, pow2_width(q)};
    out.a.resize(n);
    for (uint32_t j = 0; j < n; ++j) {
        if (j <= index)
            out.a[j] = ct.a[index - j];
        else
            out.a[j] = neg_mod(ct.a[n + index - j], q);
    }
    out.b = ct.b[index];
    return out;
}

uint64_t modswitch_exponent(uint64_t x, uint32_t width, uint32_t two_n) {
    uint128_t scaled = static_cast<uint128_t>(x % (width == 64 ? ~0ull : (1ull << width))) * two_n;
    scaled += static_cast<uint128_t>(1) << (width - 1);
    return static_cast<uint64_t>(scaled >> width) % two_n;
}

BootstrapKey make_bootstrap_key(const LweSecretKey& lwe_key,
                                const RlweSecretKey& ring_key,
                                const GadgetParams& g, NoiseSampler& s) {
    check_single_pow2(ring_key.ring);
    BootstrapKey bk;
    bk.lwe = lwe_key.params;
    bk.ring = ring_key.ring;
    bk.gadget = g;
    const uint32_t n = ring_key.ring.n;
    const uint64_t q = ring_key.ring.modulus();
    const uint32_t width = pow2_width(q);
    const CrtPair& crt = CrtPair::get();
    const NttTable& tab1 = NttTable::get(n, crt.p1);
    const NttTable& tab2 = NttTable::get(n, crt.p2);

    Poly msg(n, 0);
    bk.rows.reserve(lwe_key.params.n);
    bk.cache.resize(lwe_key.params.n);
    for (uint32_t i = 0; i < lwe_key.params.n; ++i) {
        msg[0] = lwe_key.s[i];
        RgswCiphertext row = rgsw_encrypt(msg, ring_key, g, s);
        auto& slot = bk.cache[i];
        slot.resize(2ull * g.levels * 2);
        for (uint32_t r = 0; r < 2 * g.levels; ++r) {
            for (uint32_t comp = 0; comp < 2; ++comp) {
                const Poly& src = comp == 0 ? row.rows[r].a : row.rows[r].b;
                for (int pi = 0; pi < 2; ++pi) {
                    uint64_t p = pi == 0 ? crt.p1 : crt.p2;
                    BootstrapKey::CachedPoly cp;
                    cp.ntt.resize(n);
                    for (uint32_t k = 0; k < n; ++k)
                        cp.ntt[k] = CrtPair::center_lift(src[k], width, p);
                    ntt_forward(cp.ntt, pi == 0 ? tab1 : tab2);
                    cp.shoup.resize(n);
                    for (uint32_t k = 0; k < n; ++k)
                        cp.shoup[k] = shoup_precompute(cp.ntt[k], p);
                    slot[r * 2 + comp].push_back(std::move(cp));
                }
            }
        }
        bk.rows.push_back(std::move(row));
    }
    return bk;
}

RlweCiphertext blind_rotate(const Poly& test, const LweCiphertext& ct,
                            const BootstrapKey& bk) {
    check_single_pow2(bk.ring);
    const uint32_t n = bk.ring.n;
    const uint64_t q = bk.ring.modulus();
    const uint32_t width = pow2_width(q);
    if (test.size() != n) throw std::invalid_argument("blind_rotate: test length");
    if (ct.params.n != bk.lwe.n || ct.params.q != q)
        throw std::invalid_argument("blind_rotate: ciphertext/key mismatch");
    const uint32_t two_n = 2 * n;
    const GadgetParams& gp = bk.gadget;
    const CrtPair& crt = CrtPair::get();
    const NttTable& tab1 = NttTable::get(n, crt.p1);
    const NttTable& tab2 = NttTable::get(n, crt.p2);

    RlweCiphertext acc;
    acc.ring = bk.ring;
    uint64_t bt = modswitch_exponent(ct.b, width, two_n);
    acc.b = negacyclic_monomial_mul(test, two_n - bt, q);
    acc.a.assign(n, 0);

    Poly dig_ntt[2];                 // per-prime forward image of one digit row
    Poly sum[2][2];                  // [comp][prime] accumulators, NTT domain
    for (uint32_t i = 0; i < bk.lwe.n; ++i) {
        uint64_t e = modswitch_exponent(ct.a[i], width, two_n);
        if (e == 0) continue;  // X^0 - 1 vanishes, the update is a no-op
        // diff = X^e * acc - acc, one fused pass per component
        Poly da = tfhe_rotate_sub(acc.a, two_n - e, q);
        Poly db = tfhe_rotate_sub(acc.b, two_n - e, q);
        DecomposedBits dda = gadget_decompose(da, gp.base_log, gp.levels, width);
        DecomposedBits ddb = gadget_decompose(db, gp.base_log, gp.levels, width);
        for (int comp = 0; comp < 2; ++comp)
            for (int pi = 0; pi < 2; ++pi) sum[comp][pi].assign(n, 0);
        for (uint32_t r = 0; r < 2 * gp.levels; ++r) {
            const DecomposedBits& d = r < gp.levels ? dda : ddb;
            auto row = d.row(r % gp.levels);
            for (int pi = 0; pi < 2; ++pi) {
                uint64_t p = pi == 0 ? crt.p1 : crt.p2;
                dig_ntt[pi].resize(n);
                for (uint32_t k = 0; k < n; ++k) {
                    int64_t dg = row[k];
                    dig_ntt[pi][k] = dg >= 0 ? static_cast<uint64_t>(dg)
                                             : p - static_cast<uint64_t>(-dg);
                }
                ntt_forward(dig_ntt[pi], pi == 0 ? tab1 : tab2);
                for (int comp = 0; comp < 2; ++comp) {
                    const auto& key = bk.cache[i][r * 2 + comp][pi];
                    Poly& dst = sum[comp][pi];
                    for (uint32_t k = 0; k < n; ++k)
                        dst[k] = add_mod(
                            dst[k],
                            mul_mod_shoup(dig_ntt[pi][k], key.ntt[k],
                                          key.shoup[k], p),
                            p);
                }
            }
        }
        for (int comp = 0; comp < 2; ++comp) {
            ntt_inverse(sum[comp][0], tab1);
            ntt_inverse(sum[comp][1], tab2);
            Poly& dst = comp == 0 ? acc.a : acc.b;
            const uint64_t mask = (width == 64) ? ~0ull : ((1ull << width) - 1);
            for (uint32_t k = 0; k < n; ++k) {
                uint64_t delta =
                    crt.reconstruct(sum[comp][0][k], sum[comp][1][k]) & mask;
                dst[k] = add_mod(dst[k], delta, q);
            }
        }
    }
    return acc;
}

GateBootstrapResult gate_bootstrap_nand(const LweCiphertext& c1,
                                        const LweCiphertext& c2,
                                        const BootstrapKey& bk,
                                        const KeySwitchKey& ks) {
    if (c1.params.n != c2.params.n || c1.params.q != c2.params.q)
        throw std::invalid_argument("gate_bootstrap_nand: operand mismatch");
    const uint64_t q = c1.params.q;
    const uint64_t eighth = q >> 3;
    LweCiphertext pre = lwe_trivial(eighth, c1.params);
    for (uint32_t i = 0; i < c1.params.n; ++i)
        pre.a[i] = sub_mod(pre.a[i], add_mod(c1.a[i], c2.a[i], q), q);
    pre.b = sub_mod(pre.b, add_mod(c1.b, c2.b, q), q);

    Poly test(bk.ring.n, eighth);
    RlweCiphertext acc = blind_rotate(test, pre, bk);
    LweCiphertext raw = sample_extract(acc, 0);
    KeySwitchResult res = pub_keyswitch(LinearFn::identity(), ks, {&raw, 1});
    return {std::move(res.ct), res.transmitted_bits};
}

CircuitBootstrapResult circuit_bootstrap(const LweCiphertext& ct,
                                         const CircuitBootstrapKeys& keys,
                                         const GadgetParams& out_gadget) {
    if (!keys.bk || !keys.to_b_row || !keys.to_a_row)
        throw std::invalid_argument("circuit_bootstrap: missing keys");
    const BootstrapKey& bk = *keys.bk;
    const uint64_t q = bk.ring.modulus();
    out_gadget.validate();

    CircuitBootstrapResult out;
    out.ct.ring = bk.ring;
    out.ct.gadget = out_gadget;
    out.ct.rows.resize(2ull * out_gadget.levels);
    for (uint32_t j = 0; j < out_gadget.levels; ++j) {
        uint64_t w = 1ull << (out_gadget.width - (j + 1) * out_gadget.base_log);
        uint64_t half_w = w >> 1;
        // Input bits are encoded at phase -q/4 (bit 0) / +q/4 (bit 1). With a
        // constant +w/2 test vector the rotation lands on -w/2 for bit 0 and
        // +w/2 for bit 1 with N/2 headroom on either side; adding w/2 gives
        // an exact encryption of bit * w.
        Poly test(bk.ring.n, half_w % q);
        RlweCiphertext acc = blind_rotate(test, ct, bk);
        LweCiphertext lev = sample_extract(acc, 0);
        lev.b = add_mod(lev.b, half_w, q);

        KeySwitchResultRlwe brow = priv_keyswitch_rlwe(*keys.to_b_row, lev);
        KeySwitchResultRlwe arow = priv_keyswitch_rlwe(*keys.to_a_row, lev);
        out.ks_transmitted_bits += brow.transmitted_bits + arow.transmitted_bits;
        out.ct.rows[out_gadget.levels + j] = std::move(brow.ct);
        out.ct.rows[j] = std::move(arow.ct);
    }
    return out;
}

}  // namespace fhe
}  // namespace apsim
