// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/mem/bit_ledger.hpp"

#include <ostream>

namespace apsim::mem {

void BitLedger::record(const std::string& op_id, MemLevel level,
                       std::uint64_t bits_in, std::uint64_t bits_out) {
    rows_.push_back(Entry{op_id, level, bits_in, bits_out});
    in_[static_cast<int>(level)] += bits_in;
    out_[static_cast<int>(level)] += bits_out;
}

std::uint64_t BitLedger::total_in(MemLevel level) const {
    return in_[static_cast<int>(level)];
}

std::uint64_t BitLedger::total_out(MemLevel level) const {
    return out_[static_cast<int>(level)];
}

void BitLedger::write_csv(std::ostream& out) const {
    out << "op_id,level,bits_in,bits_out\n";
    for (const Entry& e : rows_) {
        out << e.op_id << ',' << mem_level_name(e.level) << ',' << e.bits_in
            << ',' << e.bits_out << '\n';
    }
}

}  // namespace apsim::mem
