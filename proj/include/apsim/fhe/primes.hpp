// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace apsim {
namespace fhe {

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
bool is_prime_u64(uint64_t n);

// Largest prime p < 2^bits with p = 1 (mod 2n), n a power of two. Throws
// std::runtime_error when none exists in the top 2^24 candidates.
uint64_t find_ntt_prime(unsigned bits, uint64_t n);

// Descending list of distinct such primes.
std::vector<uint64_t> find_ntt_primes(unsigned bits, uint64_t n, size_t count);

}  // namespace fhe
}  // namespace apsim
