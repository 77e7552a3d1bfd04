// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "apsim/mem/dimm.hpp"

namespace apsim::mem {

// Append-only record of bits crossing each memory tier, one row per op
// event. Totals only ever grow during a run, which makes replays directly
// comparable.
class BitLedger {
public:
    struct Entry {
        std::string op_id;
        MemLevel level = MemLevel::io;
        std::uint64_t bits_in = 0;
        std::uint64_t bits_out = 0;
    };

    void record(const std::string& op_id, MemLevel level,
                std::uint64_t bits_in, std::uint64_t bits_out);

    std::uint64_t total_in(MemLevel level) const;
    std::uint64_t total_out(MemLevel level) const;

    const std::vector<Entry>& entries() const { return rows_; }

    // Header op_id,level,bits_in,bits_out then one line per entry in
    // record order.
    void write_csv(std::ostream& out) const;

private:
    std::vector<Entry> rows_;
    std::uint64_t in_[3] = {0, 0, 0};
    std::uint64_t out_[3] = {0, 0, 0};
};

}  // namespace apsim::mem
