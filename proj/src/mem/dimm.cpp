// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/mem/dimm.hpp"

#include <stdexcept>

namespace apsim::mem {

void DimmConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("DimmConfig: ") + what);
    };
    require(capacity_bytes > 0, "capacity must be positive");
    require(ranks > 0, "rank count must be positive");
    require(chips_per_rank > 0, "chip count must be positive");
    require(banks_per_chip > 0, "bank count must be positive");
    require(nmc_per_dimm > 0, "controller count must be positive");
    require(transfer_mts > 0, "transfer rate must be positive");
    require(clock_hz > 0, "clock must be positive");
    require(t_rcd > 0 && t_cas > 0 && t_rp > 0, "timing fields must be positive");
    require(data_buffer_bytes > 0, "data buffer must be positive");
    require(page_bytes > 0, "page size must be positive");
}

double near_mem_aggregate_bytes_per_s(const DimmConfig& cfg) {
    // ranks x chips x 8 bits per transfer, expressed in bytes.
    return static_cast<double>(cfg.ranks) * cfg.chips_per_rank *
           static_cast<double>(cfg.transfer_mts) * 1e6;
}

const char* mem_level_name(MemLevel level) {
    switch (level) {
        case MemLevel::io: return "io";
        case MemLevel::near_memory: return "near_memory";
        case MemLevel::in_memory: return "in_memory";
    }
    throw std::invalid_argument("mem_level_name: unknown level");
}

MemoryLevelModel make_level_model(MemLevel level, const DimmConfig& cfg) {
    cfg.validate();
    MemoryLevelModel m;
    m.level = level;
    switch (level) {
        case MemLevel::io:
            m.bandwidth_bytes_per_s = 32.0 * 1e9;
            break;
        case MemLevel::near_memory:
            m.bandwidth_bytes_per_s = near_mem_aggregate_bytes_per_s(cfg);
            break;
        case MemLevel::in_memory:
            // Digit broadcast ingest: one bit per cycle per rank.
            m.bandwidth_bytes_per_s =
                static_cast<double>(cfg.ranks) * cfg.clock_hz / 8.0;
            break;
    }
    return m;
}

double dram_access_latency(const DimmConfig& cfg, bool row_hit,
                           std::uint64_t burst_bytes) {
    cfg.validate();
    double command_ns = cfg.t_cas * cfg.tck_ns();
    if (!row_hit) command_ns += (cfg.t_rp + cfg.t_rcd) * cfg.tck_ns();
    double burst_ns =
        static_cast<double>(burst_bytes) / cfg.chip_bandwidth_bytes_per_s() * 1e9;
    return command_ns + burst_ns;
}

TilingPlan buffer_fit_check(std::uint64_t working_set_bytes, BufferLevel level,
                            const BufferCaps& caps) {
    std::uint64_t cap = level == BufferLevel::regfile ? caps.regfile_bytes
                                                      : caps.data_buffer_bytes;
    if (cap == 0) throw std::invalid_argument("buffer_fit_check: zero capacity");
    TilingPlan plan;
    if (working_set_bytes <= cap) {
        plan.fits = true;
        plan.tiles = 1;
        plan.tile_bytes = working_set_bytes;
        return plan;
    }
    plan.fits = false;
    plan.tiles = static_cast<std::uint32_t>((working_set_bytes + cap - 1) / cap);
    plan.tile_bytes = cap;
    return plan;
}

}  // namespace apsim::mem
