// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "apsim/fhe/automorphism.hpp"
#include "apsim/fhe/crypto.hpp"
#include "apsim/fhe/gadget.hpp"
#include "apsim/fhe/keyswitch.hpp"
#include "apsim/fhe/modmul.hpp"
#include "apsim/fhe/ntt.hpp"
#include "apsim/fhe/ops.hpp"
#include "apsim/fhe/primes.hpp"
#include "apsim/fhe/rlwe_ops.hpp"
#include "apsim/fhe/serialize.hpp"

using namespace apsim::fhe;

namespace {

Poly random_poly(std::mt19937_64& rng, uint32_t n, uint64_t q) {
    Poly p(n);
    for (auto& v : p) v = rng() % q;
    return p;
}

// quadratic-time reference: c[k] = sum_{i+j=k} a_i b_j - sum_{i+j=k+n} a_i b_j
Poly schoolbook_negacyclic(const Poly& a, const Poly& b, uint64_t q) {
    const size_t n = a.size();
    Poly out(n, 0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            uint64_t prod = static_cast<uint64_t>(
                static_cast<unsigned __int128>(a[i] % q) * (b[j] % q) % q);
            size_t k = i + j;
            if (k < n)
                out[k] = add_mod(out[k], prod, q);
            else
                out[k - n] = sub_mod(out[k - n], prod, q);
        }
    return out;
}

// same reference for a power-of-two modulus via wrapping arithmetic
Poly schoolbook_negacyclic_pow2(const Poly& a, const Poly& b, uint32_t width) {
    const size_t n = a.size();
    const uint64_t mask = width == 64 ? ~0ull : ((1ull << width) - 1);
    Poly out(n, 0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            uint64_t prod = (a[i] * b[j]) & mask;
            size_t k = i + j;
            if (k < n)
                out[k] = (out[k] + prod) & mask;
            else
                out[k - n] = (out[k - n] - prod) & mask;
        }
    return out;
}

// independent digit reference used by the keyswitch oracles
std::vector<int64_t> oracle_digits(uint64_t v, uint32_t bl, uint32_t t,
                                   uint32_t width) {
    uint32_t shift = width - bl * t;
    uint64_t u = width == 64 ? v : (v & ((1ull << width) - 1));
    if (shift) u = (u + (1ull << (shift - 1))) >> shift;
    std::vector<int64_t> out(t);
    const uint64_t base = 1ull << bl;
    for (uint32_t j = t; j-- > 0;) {
        int64_t d = static_cast<int64_t>(u & (base - 1));
        u >>= bl;
        if (static_cast<uint64_t>(d) > base / 2) {
            d -= static_cast<int64_t>(base);
            ++u;
        }
        out[j] = d;
    }
    return out;
}

uint64_t signed_scale_mod(uint64_t x, int64_t d, uint64_t q) {
    uint64_t mag = static_cast<uint64_t>(d < 0 ? -d : d) % q;
    uint64_t r = static_cast<uint64_t>(
        static_cast<unsigned __int128>(x % q) * mag % q);
    return d < 0 ? (r == 0 ? 0 : q - r) : r;
}

int64_t signed_lc(std::span<const int64_t> lambdas,
                  std::span<const uint64_t> xs, uint64_t q, uint64_t* out) {
    uint64_t acc = 0;
    for (size_t z = 0; z < lambdas.size(); ++z)
        acc = add_mod(acc, signed_scale_mod(xs[z], lambdas[z], q), q);
    *out = acc;
    return 0;
}

// literal triple-loop evaluation of the aggregated public keyswitch
LweCiphertext oracle_pub_ks(const LinearFn& f, const KeySwitchKey& key,
                            std::span<const LweCiphertext> cts) {
    const uint64_t q = cts[0].params.q;
    const uint32_t n = key.n_src;
    LweCiphertext out;
    out.params = key.target;
    out.a.assign(key.target.n, 0);
    std::vector<uint64_t> col(cts.size());
    for (size_t z = 0; z < cts.size(); ++z) col[z] = cts[z].b;
    signed_lc(f.coeffs, col, q, &out.b);
    for (uint32_t i = 0; i < n; ++i) {
        for (size_t z = 0; z < cts.size(); ++z) col[z] = cts[z].a[i];
        uint64_t ahat;
        signed_lc(f.coeffs, col, q, &ahat);
        auto digs = oracle_digits(ahat, key.base_log, key.t,
                                  cts[0].params.width);
        for (uint32_t j = 0; j < key.t; ++j) {
            const LweCiphertext& e = key.entries[size_t(i) * key.t + j];
            for (uint32_t k = 0; k < key.target.n; ++k)
                out.a[k] = sub_mod(out.a[k],
                                   signed_scale_mod(e.a[k], digs[j], q), q);
            out.b = sub_mod(out.b, signed_scale_mod(e.b, digs[j], q), q);
        }
    }
    return out;
}

// literal triple-loop evaluation of the private keyswitch
LweCiphertext oracle_priv_ks(const KeySwitchKey& key,
                             std::span<const LweCiphertext> cts) {
    const uint64_t q = cts[0].params.q;
    const uint32_t n = key.n_src;
    LweCiphertext out;
    out.params = key.target;
    out.a.assign(key.target.n, 0);
    out.b = 0;
    for (uint32_t z = 0; z < key.p; ++z)
        for (uint32_t i = 0; i <= n; ++i) {
            uint64_t c = (i < n) ? cts[z].a[i] : cts[z].b;
            auto digs = oracle_digits(c, key.base_log, key.t,
                                      cts[0].params.width);
            for (uint32_t j = 0; j < key.t; ++j) {
                const LweCiphertext& e =
                    key.entries[(size_t(z) * (n + 1) + i) * key.t + j];
                for (uint32_t k = 0; k < key.target.n; ++k)
                    out.a[k] = sub_mod(
                        out.a[k], signed_scale_mod(e.a[k], digs[j], q), q);
                out.b = sub_mod(out.b, signed_scale_mod(e.b, digs[j], q), q);
            }
        }
    return out;
}

}  // namespace

TEST_CASE("configurable multiplier matches wide-product reference") {
    std::mt19937_64 rng(7001);
    for (int iter = 0; iter < 2000; ++iter) {
        uint64_t q = (rng() | (1ull << 62)) >> (rng() % 32);
        if (q < 2) q = 2;
        uint64_t x = rng() % q, y = rng() % q;
        MulOperand r = mod_mul_configurable(MultiplierMode::one64, {x, 0},
                                            {y, 0}, {q, 0});
        uint64_t want = static_cast<uint64_t>(
            static_cast<unsigned __int128>(x) * y % q);
        REQUIRE(r.lane0 == want);
    }
}

TEST_CASE("dual-lane mode equals two independent narrow multiplies") {
    std::mt19937_64 rng(7002);
    for (int iter = 0; iter < 2000; ++iter) {
        uint64_t q0 = (rng() % ((1ull << 32) - 2)) + 2;
        uint64_t q1 = (rng() % ((1ull << 32) - 2)) + 2;
        uint64_t x0 = rng() % q0, x1 = rng() % q1;
        uint64_t y0 = rng() % q0, y1 = rng() % q1;
        MulOperand both = mod_mul_configurable(
            MultiplierMode::two32, {x0, x1}, {y0, y1}, {q0, q1});
        MulOperand lane0 = mod_mul_configurable(
            MultiplierMode::two32, {x0, 0}, {y0, 0}, {q0, 2});
        MulOperand lane1 = mod_mul_configurable(
            MultiplierMode::two32, {x1, 0}, {y1, 0}, {q1, 2});
        CHECK(both.lane0 == lane0.lane0);
        CHECK(both.lane1 == lane1.lane0);
        CHECK(both.lane0 == x0 * y0 % q0);
        CHECK(both.lane1 == x1 * y1 % q1);
    }
}

TEST_CASE("multiplier rejects bad operands") {
    CHECK_THROWS_AS(mod_mul_configurable(MultiplierMode::one64, {1, 0}, {1, 0},
                                         {1, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(mod_mul_configurable(MultiplierMode::one64, {1, 0}, {1, 0},
                                         {0, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(mod_mul_configurable(MultiplierMode::one64, {7, 0}, {1, 0},
                                         {7, 0}),
                    std::domain_error);
    CHECK_THROWS_AS(mod_mul_configurable(MultiplierMode::two32, {5, 1ull << 33},
                                         {1, 1}, {7, 1ull << 33}),
                    std::invalid_argument);
}

TEST_CASE("karatsuba composition is the full product") {
    std::mt19937_64 rng(7003);
    for (int iter = 0; iter < 2000; ++iter) {
        uint64_t a = rng(), b = rng();
        CHECK(karatsuba_mul_64(a, b) ==
              static_cast<unsigned __int128>(a) * b);
    }
}

TEST_CASE("transform roundtrip over the reference prime") {
    const uint64_t q = 0x7FFFD801;  // largest 31-bit prime supporting
                                    // degrees up to 1024
    CHECK(find_ntt_prime(31, 1024) == q);
    std::mt19937_64 rng(7010);
    for (uint32_t n : {8u, 256u}) {
        Poly a = random_poly(rng, n, q);
        Poly copy = a;
        ntt_transform(copy, n, q, NttDirection::forward);
        CHECK(copy != a);  // overwhelmingly likely for random input
        ntt_transform(copy, n, q, NttDirection::inverse);
        CHECK(copy == a);
    }
    for (int iter = 0; iter < 100; ++iter) {
        Poly a = random_poly(rng, 1024, q);
        Poly copy = a;
        ntt_transform(copy, 1024, q, NttDirection::forward);
        ntt_transform(copy, 1024, q, NttDirection::inverse);
        REQUIRE(copy == a);
    }
    Poly bad(2048, 0);
    CHECK_THROWS_AS(ntt_transform(bad, 2048, q, NttDirection::forward),
                    std::invalid_argument);
}

TEST_CASE("negacyclic products match schoolbook convolution") {
    std::mt19937_64 rng(7011);
    const uint64_t q = 0x7FFFD801;
    for (uint32_t n : {8u, 256u, 1024u}) {
        Poly a = random_poly(rng, n, q);
        Poly b = random_poly(rng, n, q);
        CHECK(negacyclic_multiply_prime(a, b, n, q) ==
              schoolbook_negacyclic(a, b, q));
    }
    for (uint32_t n : {8u, 256u, 1024u}) {
        Poly a = random_poly(rng, n, 1ull << 32);
        Poly b = random_poly(rng, n, 1ull << 32);
        CHECK(negacyclic_multiply_pow2(a, b, n, 32) ==
              schoolbook_negacyclic_pow2(a, b, 32));
    }
    // narrow power-of-two modulus
    Poly a = random_poly(rng, 8, 1ull << 16);
    Poly b = random_poly(rng, 8, 1ull << 16);
    CHECK(negacyclic_multiply_pow2(a, b, 8, 16) ==
          schoolbook_negacyclic_pow2(a, b, 16));
}

TEST_CASE("helper primes for the power-of-two path") {
    const auto& ps = crt_helper_primes();
    REQUIRE(ps.size() == 2);
    CHECK(ps[0] != ps[1]);
    for (uint64_t p : ps) {
        CHECK(p < (1ull << 62));
        CHECK(p % (1ull << 17) == 1);
        CHECK(is_prime_u64(p));
    }
}

TEST_CASE("balanced digit decomposition") {
    SUBCASE("exact recomposition when digits cover the width") {
        Poly v{0x12345678};
        auto d = gadget_decompose(v, 8, 4, 32);
        CHECK(d.row(0)[0] == 0x12);
        CHECK(d.row(1)[0] == 0x34);
        CHECK(d.row(2)[0] == 0x56);
        CHECK(d.row(3)[0] == 0x78);
        CHECK(gadget_recompose(d, 0) == 0x12345678);

        std::mt19937_64 rng(7020);
        for (int iter = 0; iter < 500; ++iter) {
            Poly w{rng() & 0xffffffff};
            auto dd = gadget_decompose(w, 8, 4, 32);
            CHECK(gadget_recompose(dd, 0) == w[0]);
            auto d16 = gadget_decompose(w, 16, 2, 32);
            CHECK(gadget_recompose(d16, 0) == w[0]);
        }
    }
    SUBCASE("digit magnitude and truncation error bounds") {
        std::mt19937_64 rng(7021);
        const uint32_t bl = 8, t = 3, width = 32;
        const uint64_t bound = 1ull << (width - bl * t - 1);  // q / (2 B^t)
        for (int iter = 0; iter < 2000; ++iter) {
            uint64_t v = rng() & 0xffffffff;
            Poly p{v};
            auto d = gadget_decompose(p, bl, t, width);
            for (uint32_t j = 0; j < t; ++j) {
                CHECK(d.row(j)[0] >= -(1 << (bl - 1)));
                CHECK(d.row(j)[0] <= (1 << (bl - 1)));
            }
            uint64_t err = torus_distance(gadget_recompose(d, 0), v, width);
            CHECK(err <= bound);
            uint64_t tail = v & ((1ull << (width - bl * t)) - 1);
            if (tail != bound) CHECK(err < bound);
        }
        // the rounding boundary itself sits exactly on the bound
        Poly half{bound};
        auto d = gadget_decompose(half, bl, t, width);
        CHECK(torus_distance(gadget_recompose(d, 0), bound, width) == bound);
    }
    SUBCASE("three 7-bit digits over a 32-bit word") {
        std::mt19937_64 rng(7022);
        const uint32_t bl = 7, t = 3, width = 32;
        const uint64_t bound = 1ull << (width - bl * t - 1);  // 1024
        Poly v(1000);
        for (auto& x : v) x = rng() & 0xffffffff;
        auto d = gadget_decompose(v, bl, t, width);
        uint64_t max_err = 0;
        for (size_t i = 0; i < v.size(); ++i) {
            uint64_t err = torus_distance(gadget_recompose(d, i), v[i], width);
            max_err = std::max(max_err, err);
            uint64_t tail = v[i] & ((1ull << (width - bl * t)) - 1);
            if (tail != bound) CHECK(err < bound);
        }
        CHECK(max_err <= bound);
    }
    SUBCASE("bad parameters") {
        Poly v{1};
        CHECK_THROWS_AS(gadget_decompose(v, 8, 5, 32), std::invalid_argument);
        CHECK_THROWS_AS(gadget_decompose(v, 0, 4, 32), std::invalid_argument);
    }
}

TEST_CASE("rotation and index maps") {
    std::mt19937_64 rng(7030);
    const uint32_t n = 64;
    const uint64_t q = 1ull << 32;
    Poly a = random_poly(rng, n, q);

    SUBCASE("monomial multiply agrees with ring multiply") {
        for (uint64_t e : {0ull, 1ull, 5ull, 63ull, 64ull, 100ull, 127ull}) {
            Poly mono(n, 0);
            uint64_t em = e % (2 * n);
            if (em < n)
                mono[em] = 1;
            else
                mono[em - n] = q - 1;
            Poly want = negacyclic_multiply_pow2(a, mono, n, 32);
            CHECK(negacyclic_monomial_mul(a, e, q) == want);
        }
    }
    SUBCASE("galois map composes multiplicatively") {
        Poly g3 = galois_map(a, 3, q);
        Poly g5 = galois_map(g3, 5, q);
        CHECK(g5 == galois_map(a, 15, q));
        CHECK(galois_map(a, 1, q) == a);
        CHECK_THROWS_AS(galois_map(a, 2, q), std::invalid_argument);
    }
    SUBCASE("galois map respects the ring product") {
        Poly b = random_poly(rng, n, q);
        Poly ab = negacyclic_multiply_pow2(a, b, n, 32);
        Poly lhs = galois_map(ab, 5, q);
        Poly rhs = negacyclic_multiply_pow2(galois_map(a, 5, q),
                                            galois_map(b, 5, q), n, 32);
        CHECK(lhs == rhs);
    }
    SUBCASE("fused rotate-subtract") {
        Poly acc{1, 2, 3, 4, 5, 6, 7, 8};
        Poly got = tfhe_rotate_sub(acc, 2, 17);
        Poly rot = negacyclic_monomial_mul(acc, 16 - 2, 17);  // X^{-2} = X^{14}
        REQUIRE(got.size() == 8);
        for (size_t i = 0; i < 8; ++i)
            CHECK(got[i] == sub_mod(rot[i], acc[i], 17));
        CHECK(tfhe_rotate_sub(acc, 0, 17) == Poly(8, 0));
        CHECK_THROWS_AS(tfhe_rotate_sub(acc, 16, 17), std::out_of_range);

        for (int iter = 0; iter < 20; ++iter) {
            uint64_t e = rng() % (2 * n);
            Poly fused = tfhe_rotate_sub(a, e, q);
            Poly want = negacyclic_monomial_mul(a, (2 * n - e) % (2 * n), q);
            for (uint32_t i = 0; i < n; ++i)
                CHECK(fused[i] == sub_mod(want[i], a[i], q));
        }
    }
}

TEST_CASE("encryption layers round-trip") {
    LweParams lp{64, 1ull << 32, 32};
    RingParams ring{64, {1ull << 32}};
    SUBCASE("lwe phase") {
        NoiseSampler s(42, 4.0);
        auto key = gen_lwe_key(lp, s);
        uint64_t msg = 0x40000000;
        auto ct = lwe_encrypt(msg, key, s);
        CHECK(torus_distance(lwe_phase(ct, key), msg, 32) <= 24);
        auto tv = lwe_trivial(msg, lp);
        CHECK(lwe_phase(tv, key) == msg);
    }
    SUBCASE("rlwe phase") {
        NoiseSampler s(43, 4.0);
        auto key = gen_rlwe_key(ring, s);
        std::mt19937_64 rng(7040);
        Poly msg = random_poly(rng, 64, 1ull << 32);
        auto ct = rlwe_encrypt(msg, key, s);
        Poly ph = rlwe_phase(ct, key);
        for (uint32_t i = 0; i < 64; ++i)
            CHECK(torus_distance(ph[i], msg[i], 32) <= 24);
    }
    SUBCASE("seeded determinism") {
        NoiseSampler s1(99, 3.0), s2(99, 3.0);
        auto k1 = gen_lwe_key(lp, s1);
        auto k2 = gen_lwe_key(lp, s2);
        CHECK(k1.s == k2.s);
        auto c1 = lwe_encrypt(5, k1, s1);
        auto c2 = lwe_encrypt(5, k2, s2);
        CHECK(c1.a == c2.a);
        CHECK(c1.b == c2.b);
    }
    SUBCASE("zero-noise sampler") {
        NoiseSampler s(1, 0.0);
        for (int i = 0; i < 100; ++i) CHECK(s.sample_noise() == 0);
    }
}

TEST_CASE("selector gate is exact for trivial selectors") {
    RingParams ring{64, {1ull << 32}};
    GadgetParams g{16, 2, 32};  // digits cover the full width
    std::mt19937_64 rng(7050);
    NoiseSampler s(44, 0.0);
    auto key = gen_rlwe_key(ring, s);
    Poly m0 = random_poly(rng, 64, 1ull << 32);
    Poly m1 = random_poly(rng, 64, 1ull << 32);
    auto c0 = rlwe_encrypt(m0, key, s);
    auto c1 = rlwe_encrypt(m1, key, s);

    Poly one(64, 0), zero(64, 0);
    one[0] = 1;
    auto sel1 = rgsw_trivial(one, ring, g);
    auto sel0 = rgsw_trivial(zero, ring, g);
    auto picked1 = cmux(sel1, c0, c1);
    CHECK(picked1.a == c1.a);
    CHECK(picked1.b == c1.b);
    auto picked0 = cmux(sel0, c0, c1);
    CHECK(picked0.a == c0.a);
    CHECK(picked0.b == c0.b);
}

TEST_CASE("selector gate with encrypted selectors is phase-exact") {
    RingParams ring{64, {1ull << 32}};
    GadgetParams g{16, 2, 32};
    std::mt19937_64 rng(7051);
    NoiseSampler s(45, 0.0);  // noiseless keys + exact digits = exact phases
    auto key = gen_rlwe_key(ring, s);
    Poly m0 = random_poly(rng, 64, 1ull << 32);
    Poly m1 = random_poly(rng, 64, 1ull << 32);
    auto c0 = rlwe_encrypt(m0, key, s);
    auto c1 = rlwe_encrypt(m1, key, s);
    Poly one(64, 0);
    one[0] = 1;
    auto sel = rgsw_encrypt(one, key, g, s);
    auto picked = cmux(sel, c0, c1);
    CHECK(rlwe_phase(picked, key) == m1);
}

TEST_CASE("external product error stays inside the digit truncation bound") {
    RingParams ring{64, {1ull << 32}};
    GadgetParams g{8, 3, 32};  // drops 8 bits
    std::mt19937_64 rng(7052);
    NoiseSampler s(46, 0.0);
    auto key = gen_rlwe_key(ring, s);
    Poly msg = random_poly(rng, 64, 1ull << 32);
    auto ct = rlwe_encrypt(msg, key, s);
    Poly one(64, 0);
    one[0] = 1;
    auto sel = rgsw_encrypt(one, key, g, s);
    auto prod = external_product(sel, ct);
    Poly ph = rlwe_phase(prod, key);
    // per-coefficient truncation of a and b recompositions, each at most
    // q/(2 B^t), the b part directly and the a part through binary z
    const uint64_t per = 1ull << (32 - 24 - 1);
    const uint64_t bound = per * (1 + 64);
    for (uint32_t i = 0; i < 64; ++i)
        CHECK(torus_distance(ph[i], msg[i], 32) <= bound);
}

TEST_CASE("blind rotation follows the monomial oracle") {
    LweParams lp{32, 1ull << 32, 32};
    RingParams ring{64, {1ull << 32}};
    GadgetParams g{16, 2, 32};
    NoiseSampler s(47, 0.0);
    auto lkey = gen_lwe_key(lp, s);
    auto rkey = gen_rlwe_key(ring, s);
    auto bk = make_bootstrap_key(lkey, rkey, g, s);
    std::mt19937_64 rng(7060);
    SUBCASE("phase follows the modswitched exponents") {
        for (int iter = 0; iter < 10; ++iter) {
            Poly test = random_poly(rng, 64, 1ull << 32);
            auto ct = lwe_encrypt(rng() & 0xffffffff, lkey, s);
            auto acc = blind_rotate(test, ct, bk);
            uint64_t e = 128 - modswitch_exponent(ct.b, 32, 128);
            for (uint32_t i = 0; i < 32; ++i)
                if (lkey.s[i]) e += modswitch_exponent(ct.a[i], 32, 128);
            Poly want = negacyclic_monomial_mul(test, e % 128, 1ull << 32);
            CHECK(rlwe_phase(acc, rkey) == want);
        }
    }
    SUBCASE("pure function: same inputs give identical bits") {
        Poly test = random_poly(rng, 64, 1ull << 32);
        auto ct = lwe_encrypt(rng() & 0xffffffff, lkey, s);
        auto acc1 = blind_rotate(test, ct, bk);
        auto acc2 = blind_rotate(test, ct, bk);
        CHECK(acc1.a == acc2.a);
        CHECK(acc1.b == acc2.b);
    }
    SUBCASE("empty key vector rotates by b alone") {
        LweSecretKey empty_key{LweParams{0, 1ull << 32, 32}, {}};
        auto bk0 = make_bootstrap_key(empty_key, rkey, g, s);
        Poly test = random_poly(rng, 64, 1ull << 32);
        LweCiphertext ct;
        ct.params = empty_key.params;
        ct.b = rng() & 0xffffffff;
        auto acc = blind_rotate(test, ct, bk0);
        uint64_t bt = modswitch_exponent(ct.b, 32, 128);
        CHECK(acc.b == negacyclic_monomial_mul(test, 128 - bt, 1ull << 32));
        CHECK(acc.a == Poly(64, 0));
    }
    SUBCASE("key-count mismatch is rejected") {
        Poly test = random_poly(rng, 64, 1ull << 32);
        LweCiphertext wrong;
        wrong.params = LweParams{16, 1ull << 32, 32};
        wrong.a.assign(16, 0);
        CHECK_THROWS_AS(blind_rotate(test, wrong, bk), std::invalid_argument);
    }
}

TEST_CASE("selector gate survives encrypted noise at toy parameters") {
    BootstrapParams tp = make_bootstrap_toy();
    NoiseSampler s(50, tp.noise_bk);
    auto key = gen_rlwe_key(tp.ring, s);
    std::mt19937_64 rng(7055);
    const uint32_t n = tp.ring.n;
    int ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
        // 4-bit payloads in the top bits leave a 2^27 decision margin
        Poly m0(n), m1(n);
        for (uint32_t i = 0; i < n; ++i) {
            m0[i] = (rng() & 15) << 28;
            m1[i] = (rng() & 15) << 28;
        }
        auto c0 = rlwe_encrypt(m0, key, s);
        auto c1 = rlwe_encrypt(m1, key, s);
        int bit = static_cast<int>(rng() & 1);
        Poly sel_m(n, 0);
        sel_m[0] = static_cast<uint64_t>(bit);
        auto sel = rgsw_encrypt(sel_m, key, tp.rgsw, s);
        auto picked = cmux(sel, c0, c1);
        Poly ph = rlwe_phase(picked, key);
        const Poly& want = bit ? m1 : m0;
        bool all = true;
        for (uint32_t i = 0; i < n; ++i) {
            uint64_t decoded = ((ph[i] + (1ull << 27)) & 0xffffffffull) >> 28;
            if (decoded != want[i] >> 28) all = false;
        }
        if (all) ++ok;
    }
    CHECK(ok >= 99);
}

TEST_CASE("sample extraction preserves the phase") {
    RingParams ring{64, {1ull << 32}};
    NoiseSampler s(48, 0.0);
    auto key = gen_rlwe_key(ring, s);
    std::mt19937_64 rng(7061);
    Poly msg = random_poly(rng, 64, 1ull << 32);
    auto ct = rlwe_encrypt(msg, key, s);
    LweSecretKey as_lwe{LweParams{64, 1ull << 32, 32}, key.z};
    Poly ph = rlwe_phase(ct, key);
    for (uint32_t idx : {0u, 1u, 31u, 63u}) {
        auto lwe = sample_extract(ct, idx);
        CHECK(lwe_phase(lwe, as_lwe) == ph[idx]);
    }
    CHECK_THROWS_AS(sample_extract(ct, 64), std::out_of_range);
}

TEST_CASE("gate bootstrapping computes NAND and survives chaining") {
    LweParams lp{128, 1ull << 32, 32};
    RingParams ring{512, {1ull << 32}};
    GadgetParams g{8, 3, 32};
    NoiseSampler s(49, 4.0);
    auto lkey = gen_lwe_key(lp, s);
    auto rkey = gen_rlwe_key(ring, s);
    auto bk = make_bootstrap_key(lkey, rkey, g, s);
    LweSecretKey ring_as_lwe{LweParams{512, 1ull << 32, 32}, rkey.z};
    auto ks = make_pub_keyswitch_key(ring_as_lwe, lkey, 7, 4, s);

    const uint64_t q = 1ull << 32;
    const uint64_t eighth = q >> 3;
    auto enc_bit = [&](int bit) {
        uint64_t msg = bit ? eighth : q - eighth;
        return lwe_encrypt(msg, lkey, s);
    };
    auto dec_bit = [&](const LweCiphertext& ct) {
        uint64_t ph = lwe_phase(ct, lkey);
        return torus_distance(ph, eighth, 32) < torus_distance(ph, q - eighth, 32)
                   ? 1
                   : 0;
    };
    SUBCASE("truth table") {
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                auto out = gate_bootstrap_nand(enc_bit(x), enc_bit(y), bk, ks);
                CHECK(dec_bit(out.ct) == static_cast<int>(!(x && y)));
                CHECK(out.ks_transmitted_bits == 512ull * 7);
            }
    }
    SUBCASE("chains of dependent gates") {
        std::mt19937_64 rng(7070);
        auto cur = enc_bit(1);
        int expect = 1;
        for (int step = 0; step < 10; ++step) {
            int other = static_cast<int>(rng() & 1);
            auto out = gate_bootstrap_nand(cur, enc_bit(other), bk, ks);
            expect = !(expect && other);
            cur = std::move(out.ct);
            CHECK(dec_bit(cur) == expect);
        }
    }
}

TEST_CASE("keyswitch matches direct evaluation bit for bit") {
    LweParams src_p{96, 1ull << 32, 32};
    LweParams dst_p{64, 1ull << 32, 32};
    NoiseSampler s(50, 4.0);
    auto src = gen_lwe_key(src_p, s);
    auto dst = gen_lwe_key(dst_p, s);

    SUBCASE("aggregated public switch") {
        auto key = make_pub_keyswitch_key(src, dst, 8, 4, s);
        LinearFn f{{1, -1, 2}};
        std::vector<LweCiphertext> cts;
        uint64_t msgs[3] = {1ull << 30, 1ull << 29, 1ull << 28};
        for (uint64_t m : msgs) cts.push_back(lwe_encrypt(m, src, s));
        auto got = pub_keyswitch(f, key, cts);
        auto want = oracle_pub_ks(f, key, cts);
        CHECK(got.ct.a == want.a);
        CHECK(got.ct.b == want.b);
        CHECK(got.transmitted_bits == 96ull * 8);
        // and the phase actually computes f on the inputs
        uint64_t expect = sub_mod(
            add_mod(msgs[0], add_mod(msgs[2], msgs[2], 1ull << 32), 1ull << 32),
            msgs[1], 1ull << 32);
        CHECK(torus_distance(lwe_phase(got.ct, dst), expect, 32) < (1ull << 20));
    }
    SUBCASE("private switch with hidden coefficients") {
        LinearFn f{{1, -1}};
        auto key = make_priv_keyswitch_key(src, dst, f, 8, 4, s);
        std::vector<LweCiphertext> cts{lwe_encrypt(1ull << 30, src, s),
                                       lwe_encrypt(1ull << 28, src, s)};
        auto got = priv_keyswitch(key, cts);
        auto want = oracle_priv_ks(key, cts);
        CHECK(got.ct.a == want.a);
        CHECK(got.ct.b == want.b);
        CHECK(got.transmitted_bits == 2ull * 97 * 8);
        uint64_t expect = sub_mod(1ull << 30, 1ull << 28, 1ull << 32);
        CHECK(torus_distance(lwe_phase(got.ct, dst), expect, 32) < (1ull << 20));
    }
    SUBCASE("arity and kind errors") {
        auto key = make_pub_keyswitch_key(src, dst, 8, 4, s);
        std::vector<LweCiphertext> cts{lwe_encrypt(0, src, s)};
        LinearFn empty{{}};
        CHECK_THROWS_AS(pub_keyswitch(empty, key, cts), std::invalid_argument);
        LinearFn two{{1, 1}};
        CHECK_THROWS_AS(pub_keyswitch(two, key, cts), std::invalid_argument);
        CHECK_THROWS_AS(priv_keyswitch(key, cts), std::invalid_argument);
    }
}

TEST_CASE("private switch embeds an LWE sample into a ring sample") {
    LweParams src_p{48, 1ull << 32, 32};
    RingParams ring{64, {1ull << 32}};
    NoiseSampler s(51, 0.0);
    auto src = gen_lwe_key(src_p, s);
    auto rkey = gen_rlwe_key(ring, s);

    std::vector<int64_t> ident(64, 0);
    ident[0] = 1;
    std::vector<int64_t> neg_z(64);
    for (uint32_t i = 0; i < 64; ++i) neg_z[i] = -static_cast<int64_t>(rkey.z[i]);

    auto key_id = make_priv_keyswitch_key_rlwe(src, rkey, ident, 2, 16, s);
    auto key_nz = make_priv_keyswitch_key_rlwe(src, rkey, neg_z, 2, 16, s);

    uint64_t msg = 0xABCD0000;
    auto ct = lwe_encrypt(msg, src, s);
    uint64_t mu = lwe_phase(ct, src);  // noiseless: mu == msg

    auto got_id = priv_keyswitch_rlwe(key_id, ct);
    CHECK(got_id.transmitted_bits == 49ull * 2);
    Poly ph = rlwe_phase(got_id.ct, rkey);
    Poly want(64, 0);
    want[0] = mu;  // exact digits + noiseless keys
    CHECK(ph == want);

    auto got_nz = priv_keyswitch_rlwe(key_nz, ct);
    Poly zpoly(rkey.z.begin(), rkey.z.end());
    Poly mu_poly(64, 0);
    mu_poly[0] = mu;
    Poly prod = negacyclic_multiply_pow2(zpoly, mu_poly, 64, 32);
    for (auto& v : prod) v = neg_mod(v, 1ull << 32);
    CHECK(rlwe_phase(got_nz.ct, rkey) == prod);
}

TEST_CASE("packing keyswitch fills ring slots with sample phases") {
    LweParams lp{48, 1ull << 32, 32};
    RingParams ring{256, {1ull << 32}};
    NoiseSampler s(52, 0.0);
    auto lkey = gen_lwe_key(lp, s);
    auto rkey = gen_rlwe_key(ring, s);
    auto pk = make_packing_key(lkey, rkey, 2, 16, s);

    std::mt19937_64 rng(7080);
    SUBCASE("partial batches") {
        for (size_t batch : {1u, 4u}) {
            std::vector<LweCiphertext> cts;
            std::vector<uint64_t> phases;
            for (size_t k = 0; k < batch; ++k) {
                cts.push_back(lwe_encrypt(rng() & 0xffffffff, lkey, s));
                phases.push_back(lwe_phase(cts.back(), lkey));
            }
            auto res = pack_lwe_to_rlwe(cts, pk);
            CHECK(res.transmitted_bits == 48ull * 2);
            Poly ph = rlwe_phase(res.ct, rkey);
            for (size_t k = 0; k < batch; ++k) CHECK(ph[k] == phases[k]);
            for (size_t k = batch; k < 256; ++k) CHECK(ph[k] == 0);
        }
    }
    SUBCASE("full capacity") {
        std::vector<LweCiphertext> cts;
        std::vector<uint64_t> phases;
        for (size_t k = 0; k < 256; ++k) {
            cts.push_back(lwe_encrypt(rng() & 0xffffffff, lkey, s));
            phases.push_back(lwe_phase(cts.back(), lkey));
        }
        auto res = pack_lwe_to_rlwe(cts, pk);
        Poly ph = rlwe_phase(res.ct, rkey);
        for (size_t k = 0; k < 256; ++k) CHECK(ph[k] == phases[k]);
    }
    SUBCASE("over capacity") {
        std::vector<LweCiphertext> cts(257, lwe_trivial(1, lp));
        CHECK_THROWS_AS(pack_lwe_to_rlwe(cts, pk), std::invalid_argument);
    }
}

TEST_CASE("bit bootstrap produces a working selector") {
    // LWE bit -> gadget ciphertext -> selector gate, all functional
    LweParams lp{32, 1ull << 32, 32};
    RingParams ring{256, {1ull << 32}};
    GadgetParams bk_g{16, 2, 32};
    GadgetParams out_g{8, 2, 32};
    NoiseSampler s(53, 0.0);
    auto lkey = gen_lwe_key(lp, s);
    auto rkey = gen_rlwe_key(ring, s);
    auto bk = make_bootstrap_key(lkey, rkey, bk_g, s);
    LweSecretKey ring_as_lwe{LweParams{256, 1ull << 32, 32}, rkey.z};
    std::vector<int64_t> ident(256, 0);
    ident[0] = 1;
    std::vector<int64_t> neg_z(256);
    for (uint32_t i = 0; i < 256; ++i)
        neg_z[i] = -static_cast<int64_t>(rkey.z[i]);
    auto to_b = make_priv_keyswitch_key_rlwe(ring_as_lwe, rkey, ident, 4, 8, s);
    auto to_a = make_priv_keyswitch_key_rlwe(ring_as_lwe, rkey, neg_z, 4, 8, s);
    CircuitBootstrapKeys keys{&bk, &to_b, &to_a};

    std::mt19937_64 rng(7090);
    Poly m0 = random_poly(rng, 256, 1ull << 32);
    Poly m1 = random_poly(rng, 256, 1ull << 32);
    auto c0 = rlwe_encrypt(m0, rkey, s);
    auto c1 = rlwe_encrypt(m1, rkey, s);

    const uint64_t q = 1ull << 32;
    for (int bit = 0; bit < 2; ++bit) {
        uint64_t msg = bit ? (q >> 2) : (q - (q >> 2));
        auto ct = lwe_encrypt(msg, lkey, s);
        auto cb = circuit_bootstrap(ct, keys, out_g);
        CHECK(cb.ks_transmitted_bits == 2ull * 2 * 257 * 4);
        auto picked = cmux(cb.ct, c0, c1);
        Poly ph = rlwe_phase(picked, rkey);
        const Poly& want = bit ? m1 : m0;
        // selector rows are noiseless here, so the cmux error is just the
        // digit truncation of c1 - c0 folded through the binary ring key:
        // (n + 1) coefficients, each off by at most q / (2 B^t)
        const uint64_t bound = 257ull << 15;
        for (uint32_t i = 0; i < 256; ++i) {
            CHECK(torus_distance(ph[i], want[i], 32) <= bound);
        }
    }
}

TEST_CASE("ring arithmetic lane: add, plaintext and ciphertext products, rotation") {
    CkksParams cp = make_ckks_toy();
    // shrink the degree for unit speed; same limb structure
    RingParams ring{256, cp.ring.moduli};
    NoiseSampler s(54, 0.0);
    auto key = gen_rlwe_key(ring, s);
    std::mt19937_64 rng(7100);
    const size_t total = 2 * 256;

    auto rand_msg = [&] {
        Poly m(total);
        for (uint32_t l = 0; l < 2; ++l)
            for (uint32_t i = 0; i < 256; ++i)
                m[l * 256 + i] = rng() % ring.moduli[l];
        return m;
    };
    Poly m1 = rand_msg(), m2 = rand_msg();
    auto c1 = rlwe_encrypt(m1, key, s);
    auto c2 = rlwe_encrypt(m2, key, s);

    SUBCASE("addition") {
        auto sum = rlwe_add(c1, c2);
        Poly ph = rlwe_phase(sum, key);
        for (uint32_t l = 0; l < 2; ++l)
            for (uint32_t i = 0; i < 256; ++i) {
                size_t k = l * 256 + i;
                CHECK(ph[k] == add_mod(m1[k], m2[k], ring.moduli[l]));
            }
    }
    SUBCASE("plaintext product") {
        auto prod = rlwe_pmult(c1, m2);
        Poly ph = rlwe_phase(prod, key);
        Poly want = negacyclic_multiply(ring, m1, m2);
        CHECK(ph == want);
    }
    SUBCASE("ciphertext product with relinearization") {
        auto rk = make_relin_key(key, s);
        auto prod = rlwe_cmult(c1, c2, rk);
        Poly ph = rlwe_phase(prod, key);
        Poly want = negacyclic_multiply(ring, m1, m2);
        CHECK(ph == want);  // noiseless keys make the identity exact
    }
    SUBCASE("level budget bookkeeping") {
        auto a = c1, b = c2;
        a.level = 3;
        b.level = 5;
        CHECK(rlwe_add(a, b).level == 3);
        CHECK(rlwe_sub(b, a).level == 3);
        CHECK(rlwe_pmult(a, m2).level == 3);
        auto rk = make_relin_key(key, s);
        CHECK(rlwe_cmult(a, b, rk).level == 2);
        a.level = 0;
        CHECK(rlwe_cmult(a, b, rk).level == 0);  // floor, never wraps
        auto gk = make_galois_key(key, 5, s);
        b.level = 5;
        CHECK(rlwe_rotate(b, gk).level == 5);
    }
    SUBCASE("rotation") {
        auto gk = make_galois_key(key, 5, s);
        auto rot = rlwe_rotate(c1, gk);
        Poly ph = rlwe_phase(rot, key);
        for (uint32_t l = 0; l < 2; ++l) {
            Poly want = galois_map(
                std::span<const uint64_t>(m1.data() + l * 256, 256), 5,
                ring.moduli[l]);
            for (uint32_t i = 0; i < 256; ++i)
                CHECK(ph[l * 256 + i] == want[i]);
        }
    }
}

TEST_CASE("ciphertext container round-trips and rejects corruption") {
    LweCiphertext ct;
    ct.params = LweParams{2, 1ull << 32, 32};
    ct.a = {0x11223344, 0xAABBCCDD};
    ct.b = 0xDEADBEEF;
    auto bytes = serialize_lwe(ct);
    const std::vector<uint8_t> golden = {
        'A',  'P',  'C',  'H',  0x01, 0x00, 0x01, 0x00, 0x02, 0x00, 0x00,
        0x00, 0x20, 0x00, 0x00, 0x00, 0x44, 0x33, 0x22, 0x11, 0xDD, 0xCC,
        0xBB, 0xAA, 0xEF, 0xBE, 0xAD, 0xDE};
    CHECK(bytes == golden);
    auto back = deserialize_lwe(bytes);
    CHECK(back.a == ct.a);
    CHECK(back.b == ct.b);
    CHECK(back.params.n == 2);
    CHECK(back.params.width == 32);

    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_WITH_AS(deserialize_lwe(bad),
                         "ciphertext container: bad magic", std::runtime_error);
    auto truncated = bytes;
    truncated.pop_back();
    CHECK_THROWS_AS(deserialize_lwe(truncated), std::runtime_error);
    auto trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS(deserialize_lwe(trailing), std::runtime_error);
    auto vbad = bytes;
    vbad[4] = 9;
    CHECK_THROWS_AS(deserialize_lwe(vbad), std::runtime_error);

    RlweCiphertext rct;
    rct.ring = RingParams{4, {1ull << 32, 0x7FFFD801}};
    rct.a = {1, 2, 3, 4, 5, 6, 7, 8};
    rct.b = {9, 10, 11, 12, 13, 14, 15, 16};
    auto rbytes = serialize_rlwe(rct);
    auto rback = deserialize_rlwe(rbytes);
    CHECK(rback.a == rct.a);
    CHECK(rback.b == rct.b);
    CHECK(rback.ring.moduli == rct.ring.moduli);
}
