// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

namespace apsim::mem {

// One DDR4 DIMM as seen by the near-memory controller. Defaults describe
// the reference module: 8 GB, 8 ranks of x8 chips, one controller per DIMM,
// 3200 MT/s pins on a 1600 MHz clock, 22-22-22 timing.
struct DimmConfig {
    std::uint64_t capacity_bytes = 8ull * 1024 * 1024 * 1024;
    std::uint32_t ranks = 8;
    std::uint32_t chips_per_rank = 8;
    std::uint32_t banks_per_chip = 16;
    std::uint32_t nmc_per_dimm = 1;
    std::uint64_t transfer_mts = 3200;          // mega-transfers per second
    std::uint64_t clock_hz = 1'600'000'000;
    std::uint32_t t_rcd = 22;                   // cycles
    std::uint32_t t_cas = 22;
    std::uint32_t t_rp = 22;
    std::uint64_t data_buffer_bytes = 24ull * 1024 * 1024;
    std::uint64_t page_bytes = 1024;            // per-chip open row

    // Cycle time in nanoseconds (0.625 ns at the default clock).
    double tck_ns() const { return 1e9 / static_cast<double>(clock_hz); }

    // Burst bandwidth of a single x8 chip in bytes per second.
    // 8 data pins at transfer_mts move one byte per transfer.
    double chip_bandwidth_bytes_per_s() const {
        return static_cast<double>(transfer_mts) * 1e6;
    }

    // Throws std::invalid_argument when any field is zero.
    void validate() const;
};

// Sum of all rank pin bandwidth behind one DIMM: ranks x chips x 8 bits
// at transfer_mts. 204.8 GB/s for the defaults. Simulated traffic in the
// near-memory tier must never exceed this.
double near_mem_aggregate_bytes_per_s(const DimmConfig& cfg);

enum class MemLevel { io, near_memory, in_memory };

const char* mem_level_name(MemLevel level);

// Bandwidth envelope of one tier of the hierarchy.
struct MemoryLevelModel {
    MemLevel level = MemLevel::io;
    double bandwidth_bytes_per_s = 0.0;
};

// io: the 32 GB/s host link shared by every DIMM. near_memory: the pin
// aggregate above. in_memory: the digit broadcast ingest rate of the rank
// key-switch adders (ranks x clock / 8 bytes per second); the row-local
// accumulations themselves move no data.
MemoryLevelModel make_level_model(MemLevel level, const DimmConfig& cfg);

// Latency of one DRAM access in nanoseconds. A row hit pays CAS plus the
// burst at single-chip bandwidth; a row miss adds precharge and activate.
// burst_bytes == 0 degenerates to the command latency alone.
double dram_access_latency(const DimmConfig& cfg, bool row_hit,
                           std::uint64_t burst_bytes);

enum class BufferLevel { regfile, data_buffer };

// On-chip capacities a working set is checked against. Defaults match the
// compute cluster: 8 MB register file, 24 MB staging buffer.
struct BufferCaps {
    std::uint64_t regfile_bytes = 8ull * 1024 * 1024;
    std::uint64_t data_buffer_bytes = 24ull * 1024 * 1024;
};

struct TilingPlan {
    bool fits = false;
    std::uint32_t tiles = 1;        // passes over the working set
    std::uint64_t tile_bytes = 0;   // capacity used per pass
};

// fits iff the working set is at most the level capacity; otherwise the
// plan splits it into ceil(working_set / capacity) tiles.
TilingPlan buffer_fit_check(std::uint64_t working_set_bytes, BufferLevel level,
                            const BufferCaps& caps = {});

}  // namespace apsim::mem
