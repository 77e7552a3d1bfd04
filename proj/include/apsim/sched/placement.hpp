// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "apsim/arch/fu.hpp"
#include "apsim/sched/graph.hpp"

namespace apsim::sched {

// Places every node on a DIMM. Order-free nodes go balanced round-robin
// across ascending DIMM ids. Ordered nodes follow their predecessor while
// the accumulated working set fits capacity_bytes, then spill to the next
// DIMM. Throws std::invalid_argument for n_dimms == 0 and
// std::runtime_error when a node cannot fit any DIMM at all.
std::vector<int> assign_dimms(const TaskGraph& graph, std::uint32_t n_dimms,
                              std::uint64_t capacity_bytes = 8ull * 1024 *
                                                             1024 * 1024);

enum class PackChoice { pack, no_pack };

// Evaluated costs for moving one batch between DIMMs, all in seconds.
struct TransferCost {
    double t_pack = 0.0;        // folding the batch into one ring pair
    double lwe_transfer = 0.0;  // one raw vector ciphertext
    double rlwe_transfer = 0.0; // the packed ring ciphertext
};

// pack iff t_pack + rlwe_transfer <= t * lwe_transfer, ties pack.
// Throws std::invalid_argument for t == 0.
PackChoice packing_decision(std::uint32_t t, const TransferCost& costs);

// Host link shared by all DIMMs, first come first served.
struct IoLink {
    double bytes_per_s = 32e9;
};

double lwe_transfer_seconds(std::uint32_t n, std::uint32_t width,
                            const IoLink& io = {});
double rlwe_transfer_seconds(std::uint32_t n, std::uint32_t limbs,
                             std::uint32_t width, const IoLink& io = {});

// Latency of folding t vector ciphertexts into one ring pair of degree n
// on one controller, in seconds at the unit clock.
double pack_latency_seconds(std::uint32_t t, std::uint32_t n,
                            std::uint32_t width,
                            const arch::FuInventory& inv);

// Assembles the three costs for a t-batch of n-dimensional vectors packed
// into a ring of degree ring_n.
TransferCost make_transfer_cost(std::uint32_t t, std::uint32_t n,
                                std::uint32_t ring_n, std::uint32_t width,
                                const arch::FuInventory& inv,
                                const IoLink& io = {});

enum class XferFormat { raw_lwe, raw_rlwe, packed };

struct Transfer {
    std::vector<std::string> ct_ids;  // payload, in trace order
    std::uint32_t consumer = 0;       // node index this delivery feeds
    std::uint32_t from_dimm = 0;
    std::uint32_t to_dimm = 0;
    XferFormat format = XferFormat::raw_lwe;
    std::uint64_t bytes = 0;
    double seconds = 0.0;       // host link occupancy only
    double pack_seconds = 0.0;  // fold compute on the source, packed only
};

struct TransferSchedule {
    std::vector<Transfer> transfers;
    // Final per-node placement. Consumers with inputs spread over several
    // DIMMs may move to the cheapest aggregation point.
    std::vector<int> dimm;
    std::uint64_t total_bytes = 0;
};

struct AggCostModel {
    arch::FuInventory inv;
    IoLink io;
    std::uint32_t ring_n = 2048;  // packing target degree
};

// Plans every cross-DIMM movement of the assignment. For each consumer of
// remote data the aggregation point is chosen among the involved DIMMs by
// exhaustive search for minimal transferred bytes (ties keep the assigned
// DIMM, then take the lowest id). Vector-ciphertext batches from one
// source are packed when packing_decision says so.
TransferSchedule aggregation_plan(const TaskGraph& graph,
                                  const std::vector<int>& assignment,
                                  const AggCostModel& model);

// Full schedule dump: per-node placement with execution order hints plus
// the transfer list, as a JSON object string.
std::string schedule_to_json(const TaskGraph& graph,
                             const TransferSchedule& plan);

}  // namespace apsim::sched
