// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "apsim/mem/dimm.hpp"

namespace apsim::mem {

enum class KsKind { public_ks, private_ks };

// Dimensions of one key switch. n is the source LWE dimension, t the digit
// count of the decomposition, p the number of private-functional outputs
// (ignored for public_ks).
struct KsDims {
    std::uint32_t n = 0;
    std::uint32_t t = 0;
    std::uint32_t p = 1;
};

// Digits broadcast into the ranks instead of the key material itself:
// n*t for a public switch, p*(n+1)*t for a private one.
std::uint64_t inmem_transmitted_bits(KsKind kind, const KsDims& dims);

// Ratio between shipping the raw key and shipping the digits. Throws
// std::domain_error when the transmitted bit count is zero, since the
// ratio is undefined there.
double bandwidth_reduction_factor(KsKind kind, const KsDims& dims,
                                  std::uint64_t key_bytes);

struct InMemKsResult {
    std::uint64_t transmitted_bits = 0;
    std::uint64_t cycles = 0;  // DRAM cycles at cfg.clock_hz
};

// Key-switch engine living in the DRAM ranks of one DIMM. Keys are staged
// into a rank once, ahead of time; that load is setup cost and is not part
// of any per-op cycle count here. Execution then only broadcasts digits.
struct InMemKs {
    DimmConfig cfg;
    // preloaded[r] holds the ids of keys resident in rank r.
    std::vector<std::set<std::string>> preloaded;

    explicit InMemKs(const DimmConfig& c);

    // Marks key_id resident in rank. Throws std::out_of_range for a bad
    // rank index.
    void preload(std::uint32_t rank, const std::string& key_id);

    bool is_preloaded(std::uint32_t rank, const std::string& key_id) const;

    // Runs one key switch against a resident key. out_ct_words is the
    // 32-bit word count of one key row (the accumulator target). Throws
    // std::invalid_argument when the key is not resident in that rank.
    //
    // Cycle model: every transmitted bit is broadcast serially (one bit
    // per DRAM cycle) and gates one row-wide accumulation by the bank
    // adders. A row accumulation takes 4 cycles per slice, where a slice
    // is the chunk of the key row that fits the rank's open page
    // (chips_per_rank x page_bytes). n == 0 costs nothing.
    InMemKsResult execute(std::uint32_t rank, const std::string& key_id,
                          KsKind kind, const KsDims& dims,
                          std::uint64_t out_ct_words) const;
};

}  // namespace apsim::mem
