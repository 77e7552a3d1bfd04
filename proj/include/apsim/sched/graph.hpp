// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "apsim/arch/routing.hpp"
#include "apsim/sched/trace.hpp"

namespace apsim::sched {

struct TaskNode {
    std::string id;
    arch::OpDescriptor op;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<std::uint32_t> deps;        // producers of our inputs
    std::vector<std::uint32_t> dependents;  // consumers of our outputs
    int dimm = -1;                          // unset until scheduled
    // True when the node neither waits on nor feeds another node, so the
    // dispatcher may run it anywhere in any order.
    bool order_free = false;
    // Peak resident bytes of the operator's largest phase, used for DIMM
    // capacity fit checks.
    std::uint64_t working_set_bytes = 0;
};

struct TaskGraph {
    std::vector<TaskNode> nodes;
    std::size_t edge_count = 0;
    // Ciphertext ids available before the trace starts (host inputs).
    std::vector<std::string> resident;
    // One valid execution order, lowest node index first among ready sets.
    std::vector<std::uint32_t> topo_order;
};

// Builds the dependency graph of a trace. Every input id must be produced
// by some record or listed in resident. Output ids are single assignment.
//
// Throws std::invalid_argument for a reference to an id nobody produces
// (message starts with "dangling reference") or a doubly produced id, and
// std::runtime_error when the references form a cycle (message starts
// with "cycle").
TaskGraph build_task_graph(const std::vector<TraceRecord>& records,
                           std::vector<std::string> resident = {});

// Bytes of the ciphertext an operator emits. Key switches and gate
// bootstraps emit small vectors, bit bootstraps emit one gadget column,
// everything else emits one ring pair per limb.
std::uint64_t output_ct_bytes(const arch::OpDescriptor& op);

}  // namespace apsim::sched
