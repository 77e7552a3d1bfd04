// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/fhe/ntt.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "apsim/fhe/modmul.hpp"
#include "apsim/fhe/primes.hpp"

namespace apsim {
namespace fhe {

namespace {

unsigned log2_exact(uint64_t n) {
    unsigned lg = 0;
    while ((1ull << lg) < n) ++lg;
    if ((1ull << lg) != n) throw std::invalid_argument("ring degree must be a power of two");
    return lg;
}

uint64_t bit_reverse(uint64_t x, unsigned bits) {
    uint64_t r = 0;
    for (unsigned i = 0; i < bits; ++i) r |= ((x >> i) & 1) << (bits - 1 - i);
    return r;
}

// primitive 2n-th root of unity mod q (q prime, q = 1 mod 2n)
uint64_t find_psi(uint32_t n, uint64_t q) {
    uint64_t order = 2ull * n;
    for (uint64_t h = 2;; ++h) {
        uint64_t cand = pow_mod(h, (q - 1) / order, q);
        // primitive iff cand^n = -1
        if (pow_mod(cand, n, q) == q - 1) return cand;
        if (h > 1000) throw std::runtime_error("find_psi: no generator found");
    }
}

std::unique_ptr<NttTable> build_table(uint32_t n, uint64_t q) {
    if (q >= (1ull << 63)) throw std::invalid_argument("ntt modulus must be < 2^63");
    if ((q - 1) % (2ull * n) != 0 || !is_prime_u64(q))
        throw std::invalid_argument("modulus is not NTT-friendly for this degree");
    auto t = std::make_unique<NttTable>();
    t->n = n;
    t->q = q;
    unsigned lg = log2_exact(n);
    uint64_t psi = find_psi(n, q);
    uint64_t psi_inv = inv_mod(psi, q);
    t->roots.resize(n);
    t->roots_shoup.resize(n);
    t->inv_roots.resize(n);
    t->inv_roots_shoup.resize(n);
    for (uint32_t i = 0; i < n; ++i) {
        uint64_t e = bit_reverse(i, lg);
        t->roots[i] = pow_mod(psi, e, q);
        t->roots_shoup[i] = shoup_precompute(t->roots[i], q);
        t->inv_roots[i] = pow_mod(psi_inv, e, q);
        t->inv_roots_shoup[i] = shoup_precompute(t->inv_roots[i], q);
    }
    t->n_inv = inv_mod(n, q);
    t->n_inv_shoup = shoup_precompute(t->n_inv, q);
    return t;
}

std::mutex g_table_mutex;
std::map<std::pair<uint32_t, uint64_t>, std::unique_ptr<NttTable>> g_tables;

}  // namespace

const NttTable& NttTable::get(uint32_t n, uint64_t q) {
    std::lock_guard<std::mutex> lock(g_table_mutex);
    auto key = std::make_pair(n, q);
    auto it = g_tables.find(key);
    if (it == g_tables.end()) it = g_tables.emplace(key, build_table(n, q)).first;
    return *it->second;
}

void ntt_forward(std::span<uint64_t> a, const NttTable& tab) {
    const uint64_t q = tab.q;
    const uint32_t n = tab.n;
    uint32_t t = n >> 1;
    for (uint32_t m = 1; m < n; m <<= 1) {
        for (uint32_t i = 0; i < m; ++i) {
            uint64_t w = tab.roots[m + i];
            uint64_t ws = tab.roots_shoup[m + i];
            uint64_t* lo = a.data() + 2 * i * t;
            uint64_t* hi = lo + t;
            for (uint32_t j = 0; j < t; ++j) {
                uint64_t u = lo[j];
                uint64_t v = mul_mod_shoup(hi[j], w, ws, q);
                lo[j] = add_mod(u, v, q);
                hi[j] = sub_mod(u, v, q);
            }
        }
        t >>= 1;
    }
}

void ntt_inverse(std::span<uint64_t> a, const NttTable& tab) {
    const uint64_t q = tab.q;
    const uint32_t n = tab.n;
    uint32_t t = 1;
    for (uint32_t m = n >> 1; m >= 1; m >>= 1) {
        for (uint32_t i = 0; i < m; ++i) {
            uint64_t w = tab.inv_roots[m + i];
            uint64_t ws = tab.inv_roots_shoup[m + i];
            uint64_t* lo = a.data() + 2 * i * t;
            uint64_t* hi = lo + t;
            for (uint32_t j = 0; j < t; ++j) {
                uint64_t u = lo[j];
                uint64_t v = hi[j];
                lo[j] = add_mod(u, v, q);
                hi[j] = mul_mod_shoup(sub_mod(u, v, q), w, ws, q);
            }
        }
        t <<= 1;
    }
    for (uint32_t j = 0; j < n; ++j)
        a[j] = mul_mod_shoup(a[j], tab.n_inv, tab.n_inv_shoup, q);
}

void ntt_transform(std::span<uint64_t> poly, uint32_t n, uint64_t q,
                   NttDirection dir) {
    if (poly.size() != n) throw std::invalid_argument("ntt_transform: length mismatch");
    const NttTable& tab = NttTable::get(n, q);  // throws if not NTT-friendly
    if (dir == NttDirection::forward)
        ntt_forward(poly, tab);
    else
        ntt_inverse(poly, tab);
}

Poly negacyclic_multiply_prime(std::span<const uint64_t> a,
                               std::span<const uint64_t> b, uint32_t n,
                               uint64_t q) {
    if (a.size() != n || b.size() != n)
        throw std::invalid_argument("negacyclic_multiply_prime: length mismatch");
    const NttTable& tab = NttTable::get(n, q);
    Poly fa(a.begin(), a.end()), fb(b.begin(), b.end());
    ntt_forward(fa, tab);
    ntt_forward(fb, tab);
    for (uint32_t i = 0; i < n; ++i) fa[i] = mul_mod(fa[i], fb[i], q);
    ntt_inverse(fa, tab);
    return fa;
}

const std::vector<uint64_t>& crt_helper_primes() {
    // = 1 (mod 2^17) so every power-of-two degree up to 2^16 is supported
    static const std::vector<uint64_t> primes =
        find_ntt_primes(62, 1ull << 16, 2);
    return primes;
}

const CrtPair& CrtPair::get() {
    static const CrtPair pair = [] {
        const auto& primes = crt_helper_primes();
        CrtPair p;
        p.p1 = primes[0];
        p.p2 = primes[1];
        p.p1_inv_mod_p2 = inv_mod(p.p1 % p.p2, p.p2);
        p.big_p = static_cast<uint128_t>(p.p1) * p.p2;
        p.half_p = p.big_p >> 1;
        return p;
    }();
    return pair;
}

uint64_t CrtPair::center_lift(uint64_t x, uint32_t width, uint64_t p) {
    uint64_t half = 1ull << (width - 1);
    if (x < half) return x % p;
    uint64_t mag = (width == 64) ? (~x + 1) : ((1ull << width) - x);
    uint64_t r = mag % p;
    return r == 0 ? 0 : p - r;
}

uint64_t CrtPair::reconstruct(uint64_t r1, uint64_t r2) const {
    uint64_t diff = sub_mod(r2 % p2, r1 % p2, p2);
    uint64_t v2 = mul_mod(diff, p1_inv_mod_p2, p2);
    uint128_t y = static_cast<uint128_t>(p1) * v2 + r1;
    if (y >= half_p)
        return static_cast<uint64_t>(y) - static_cast<uint64_t>(big_p);
    return static_cast<uint64_t>(y);
}

Poly negacyclic_multiply_pow2(std::span<const uint64_t> a,
                              std::span<const uint64_t> b, uint32_t n,
                              uint32_t width) {
    if (a.size() != n || b.size() != n)
        throw std::invalid_argument("negacyclic_multiply_pow2: length mismatch");
    if (width == 0 || width > 32)
        throw std::invalid_argument("negacyclic_multiply_pow2: width must be in [1,32]");
    if (n > (1u << 16))
        throw std::invalid_argument("negacyclic_multiply_pow2: degree too large for helper primes");
    const CrtPair& crt = CrtPair::get();
    Poly r1(n), r2(n), t1(n), t2(n);
    for (uint32_t i = 0; i < n; ++i) {
        r1[i] = CrtPair::center_lift(a[i], width, crt.p1);
        t1[i] = CrtPair::center_lift(b[i], width, crt.p1);
        r2[i] = CrtPair::center_lift(a[i], width, crt.p2);
        t2[i] = CrtPair::center_lift(b[i], width, crt.p2);
    }
    r1 = negacyclic_multiply_prime(r1, t1, n, crt.p1);
    r2 = negacyclic_multiply_prime(r2, t2, n, crt.p2);
    const uint64_t mask = (width == 64) ? ~0ull : ((1ull << width) - 1);
    Poly out(n);
    for (uint32_t i = 0; i < n; ++i)
        out[i] = crt.reconstruct(r1[i], r2[i]) & mask;
    return out;
}

Poly negacyclic_multiply(const RingParams& ring, std::span<const uint64_t> a,
                         std::span<const uint64_t> b) {
    ring.validate();
    const uint32_t n = ring.n;
    const uint32_t limbs = ring.limbs();
    if (a.size() != static_cast<size_t>(n) * limbs ||
        b.size() != static_cast<size_t>(n) * limbs)
        throw std::invalid_argument("negacyclic_multiply: length mismatch");
    Poly out(static_cast<size_t>(n) * limbs);
    for (uint32_t l = 0; l < limbs; ++l) {
        uint64_t q = ring.moduli[l];
        std::span<const uint64_t> al = a.subspan(static_cast<size_t>(l) * n, n);
        std::span<const uint64_t> bl = b.subspan(static_cast<size_t>(l) * n, n);
        Poly prod;
        if ((q & (q - 1)) == 0) {
            uint32_t w = 0;
            while ((1ull << w) < q) ++w;
            prod = negacyclic_multiply_pow2(al, bl, n, w);
        } else {
            prod = negacyclic_multiply_prime(al, bl, n, q);
        }
        std::copy(prod.begin(), prod.end(), out.begin() + static_cast<size_t>(l) * n);
    }
    return out;
}

}  // namespace fhe
}  // namespace apsim
