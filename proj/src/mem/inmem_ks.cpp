// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/mem/inmem_ks.hpp"

#include <stdexcept>

namespace apsim::mem {

std::uint64_t inmem_transmitted_bits(KsKind kind, const KsDims& dims) {
    if (dims.n == 0) return 0;
    std::uint64_t n = dims.n;
    std::uint64_t t = dims.t;
    if (kind == KsKind::public_ks) return n * t;
    return static_cast<std::uint64_t>(dims.p) * (n + 1) * t;
}

double bandwidth_reduction_factor(KsKind kind, const KsDims& dims,
                                  std::uint64_t key_bytes) {
    std::uint64_t bits = inmem_transmitted_bits(kind, dims);
    if (bits == 0)
        throw std::domain_error(
            "bandwidth_reduction_factor: zero transmitted bits, ratio undefined");
    return static_cast<double>(key_bytes) * 8.0 / static_cast<double>(bits);
}

InMemKs::InMemKs(const DimmConfig& c) : cfg(c) {
    cfg.validate();
    preloaded.resize(cfg.ranks);
}

void InMemKs::preload(std::uint32_t rank, const std::string& key_id) {
    if (rank >= preloaded.size())
        throw std::out_of_range("InMemKs::preload: rank index out of range");
    preloaded[rank].insert(key_id);
}

bool InMemKs::is_preloaded(std::uint32_t rank, const std::string& key_id) const {
    if (rank >= preloaded.size()) return false;
    return preloaded[rank].count(key_id) != 0;
}

InMemKsResult InMemKs::execute(std::uint32_t rank, const std::string& key_id,
                               KsKind kind, const KsDims& dims,
                               std::uint64_t out_ct_words) const {
    if (rank >= preloaded.size())
        throw std::out_of_range("InMemKs::execute: rank index out of range");
    if (!is_preloaded(rank, key_id))
        throw std::invalid_argument("InMemKs::execute: key '" + key_id +
                                    "' not resident in rank " +
                                    std::to_string(rank) +
                                    ", preload it first");
    InMemKsResult res;
    res.transmitted_bits = inmem_transmitted_bits(kind, dims);
    if (res.transmitted_bits == 0) return res;

    // One broadcast cycle per bit, then 4 cycles per row slice. The slice
    // count is how many open pages the accumulator row spans across the
    // rank's chips.
    std::uint64_t row_bytes = out_ct_words * 4;
    std::uint64_t page_span =
        static_cast<std::uint64_t>(cfg.chips_per_rank) * cfg.page_bytes;
    std::uint64_t slices = row_bytes == 0 ? 1 : (row_bytes + page_span - 1) / page_span;
    if (slices == 0) slices = 1;
    res.cycles = res.transmitted_bits + 4 * res.transmitted_bits * slices;
    return res;
}

}  // namespace apsim::mem
