// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "apsim/arch/fu.hpp"
#include "apsim/mem/bit_ledger.hpp"
#include "apsim/mem/dimm.hpp"
#include "apsim/sched/graph.hpp"
#include "apsim/sched/placement.hpp"
#include "apsim/sched/trace.hpp"

namespace apsim {
namespace sim {

// Knobs of one simulation run. The inventory describes a single NMC module;
// every DIMM gets an identical copy.
struct SimConfig {
    arch::FuInventory inv = arch::default_inventory();
    mem::DimmConfig dimm;
    std::uint32_t n_dimms = 2;
    double io_bytes_per_s = 32e9;  // host link shared by all DIMMs
    std::uint64_t seed = 1;
    bool functional = true;         // run the value-level evaluation too
    bool check_invariants = true;   // self-checks, including the f=0 replay
};

struct OpStats {
    std::uint64_t count = 0;
    std::uint64_t total_ps = 0;  // summed per-node latencies
    double ops_per_s = 0.0;      // count over the whole-run makespan
};

struct NodeTiming {
    std::string id;
    std::string op;
    int dimm = 0;
    std::uint64_t start_ps = 0;
    std::uint64_t end_ps = 0;
};

struct SimReport {
    std::uint64_t makespan_ps = 0;
    std::uint64_t makespan_cycles = 0;  // NMC clock ticks, rounded up
    std::size_t completed = 0;

    std::map<std::string, OpStats> per_op;
    std::map<std::string, double> fu_utilization;  // busy share per unit kind

    // Transform-utilization figures over the whole run. Negative means
    // undefined (no busy window at all). The dual figure divides by the
    // joint busy window of both routines; the replay figure comes from an
    // internal rerun with the offload fraction forced to zero.
    double ntt_util = -1.0;
    double ntt_util_dual = -1.0;
    double ntt_util_single_replay = -1.0;

    mem::BitLedger ledger;
    double peak_io_bps = 0.0;
    double peak_near_bps = 0.0;
    std::uint64_t host_bytes = 0;

    std::vector<NodeTiming> nodes;
    std::vector<std::string> violations;  // empty on a healthy run

    // Byte-traffic reduction factors of the in-rank key switches versus
    // shipping the key material over the host link, keyed by switch
    // flavor. Filled in by callers that know the key geometry.
    std::map<std::string, double> reduction_factors;

    std::uint64_t functional_digest = 0;
    std::size_t gate_checks = 0;
    std::size_t gate_failures = 0;
    std::size_t switch_checks = 0;
    std::size_t switch_failures = 0;
    bool functional_ok = true;

    std::string to_json() const;
    std::string to_csv() const;
};

// Replay one placed task graph against the timing model. Keys are assumed
// staged into the ranks before time zero; setup traffic is not part of the
// makespan. Throws std::runtime_error when the transfer plan leaves a
// cross-DIMM input unreachable.
SimReport run_simulation(const sched::TaskGraph& graph,
                         const sched::TransferSchedule& plan,
                         const SimConfig& cfg);

// Convenience wrapper: build the graph, assign DIMMs, plan transfers, run.
SimReport simulate_trace(const std::vector<sched::TraceRecord>& records,
                         const std::vector<std::string>& resident,
                         const SimConfig& cfg);

}  // namespace sim
}  // namespace apsim
