// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/fhe/primes.hpp"

#include <stdexcept>

#include "apsim/fhe/modmul.hpp"

namespace apsim {
namespace fhe {

bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                       23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    unsigned r = 0;
    while ((d & 1) == 0) { d >>= 1; ++r; }
    // This witness set is deterministic for every n < 2^64.
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                       23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned i = 1; i < r; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

uint64_t find_ntt_prime(unsigned bits, uint64_t n) {
    if (bits < 3 || bits > 63) throw std::invalid_argument("find_ntt_prime: bits out of range");
    uint64_t step = 2 * n;
    uint64_t top = static_cast<uint64_t>(1) << bits;
    // largest candidate = 1 (mod 2n) below 2^bits
    uint64_t c = top - step + 1;
    for (uint64_t tries = 0; tries < (1u << 24); ++tries) {
        if (is_prime_u64(c)) return c;
        if (c < step) break;
        c -= step;
    }
    throw std::runtime_error("find_ntt_prime: no prime found");
}

std::vector<uint64_t> find_ntt_primes(unsigned bits, uint64_t n, size_t count) {
    std::vector<uint64_t> out;
    uint64_t step = 2 * n;
    uint64_t c = (static_cast<uint64_t>(1) << bits) - step + 1;
    while (out.size() < count) {
        if (is_prime_u64(c)) out.push_back(c);
        if (c < step) throw std::runtime_error("find_ntt_primes: ran out of candidates");
        c -= step;
    }
    return out;
}

}  // namespace fhe
}  // namespace apsim
