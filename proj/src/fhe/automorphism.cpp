// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/fhe/automorphism.hpp"

#include <stdexcept>

#include "apsim/fhe/modmul.hpp"

namespace apsim {
namespace fhe {

Poly negacyclic_monomial_mul(std::span<const uint64_t> a, uint64_t e,
                             uint64_t q) {
    const size_t n = a.size();
    e %= 2 * n;
    Poly out(n, 0);
    for (size_t i = 0; i < n; ++i) {
        size_t j = i + e;
        bool neg = false;
        if (j >= 2 * n) j -= 2 * n;
        if (j >= n) { j -= n; neg = true; }
        out[j] = neg ? neg_mod(a[i] % q, q) : a[i] % q;
    }
    return out;
}

Poly tfhe_rotate_sub(std::span<const uint64_t> acc, uint64_t a, uint64_t q) {
    const size_t n = acc.size();
    if (a >= 2 * n) throw std::out_of_range("tfhe_rotate_sub: exponent out of range");
    // X^{-a} = X^{2n-a} in the negacyclic ring; walk the source once and
    // subtract the stationary coefficient at each target slot.
    const uint64_t e = (2 * n - a) % (2 * n);
    Poly out(n, 0);
    for (size_t i = 0; i < n; ++i) {
        size_t j = i + e;
        bool neg = false;
        if (j >= 2 * n) j -= 2 * n;
        if (j >= n) { j -= n; neg = true; }
        uint64_t rot = neg ? neg_mod(acc[i] % q, q) : acc[i] % q;
        out[j] = sub_mod(rot, acc[j] % q, q);
    }
    return out;
}

Poly galois_map(std::span<const uint64_t> a, uint64_t k, uint64_t q) {
    const size_t n = a.size();
    if ((k & 1) == 0) throw std::invalid_argument("galois_map: k must be odd");
    k %= 2 * n;
    Poly out(n, 0);
    for (size_t i = 0; i < n; ++i) {
        size_t j = (i * k) % (2 * n);
        bool neg = false;
        if (j >= n) { j -= n; neg = true; }
        out[j] = neg ? neg_mod(a[i] % q, q) : a[i] % q;
    }
    return out;
}

}  // namespace fhe
}  // namespace apsim
