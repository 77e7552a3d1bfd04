// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/sched/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace apsim::sched {

std::uint64_t output_ct_bytes(const arch::OpDescriptor& op) {
    std::uint64_t word = op.width <= 32 ? 4 : 8;
    std::uint64_t n = op.n;
    switch (op.kind) {
        case arch::OpKind::pubks:
        case arch::OpKind::privks:
        case arch::OpKind::homgate:
            // Vector ciphertext, n coefficients plus the body.
            return (n + 1) * word;
        case arch::OpKind::cboot:
            // One gadget column: out_levels ring pairs.
            return static_cast<std::uint64_t>(op.out_levels) * 2 * n * word;
        default:
            // Ring pair per limb.
            return 2 * n * op.limbs * word;
    }
}

TaskGraph build_task_graph(const std::vector<TraceRecord>& records,
                           std::vector<std::string> resident) {
    TaskGraph g;
    g.resident = std::move(resident);
    g.nodes.reserve(records.size());

    std::unordered_map<std::string, std::uint32_t> producer;
    for (std::uint32_t i = 0; i < records.size(); ++i) {
        const TraceRecord& rec = records[i];
        TaskNode node;
        node.id = rec.id;
        node.op = descriptor_from_record(rec);
        node.inputs = rec.inputs;
        node.outputs = rec.outputs;
        for (const std::string& out : rec.outputs) {
            if (!producer.emplace(out, i).second)
                throw std::invalid_argument("ciphertext '" + out +
                                            "' is produced twice");
        }
        g.nodes.push_back(std::move(node));
    }

    std::set<std::string> external(g.resident.begin(), g.resident.end());
    for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
        std::set<std::uint32_t> seen;
        for (const std::string& in : g.nodes[i].inputs) {
            auto it = producer.find(in);
            if (it == producer.end()) {
                if (external.count(in)) continue;
                throw std::invalid_argument("dangling reference to ciphertext '" +
                                            in + "' in record '" +
                                            g.nodes[i].id + "'");
            }
            if (seen.insert(it->second).second) {
                g.nodes[i].deps.push_back(it->second);
                g.nodes[it->second].dependents.push_back(i);
                ++g.edge_count;
            }
        }
    }

    // Kahn traversal, smallest ready index first so the order is stable.
    std::vector<std::uint32_t> indeg(g.nodes.size());
    for (std::uint32_t i = 0; i < g.nodes.size(); ++i)
        indeg[i] = static_cast<std::uint32_t>(g.nodes[i].deps.size());
    std::priority_queue<std::uint32_t, std::vector<std::uint32_t>,
                        std::greater<>> ready;
    for (std::uint32_t i = 0; i < g.nodes.size(); ++i)
        if (indeg[i] == 0) ready.push(i);
    while (!ready.empty()) {
        std::uint32_t i = ready.top();
        ready.pop();
        g.topo_order.push_back(i);
        for (std::uint32_t d : g.nodes[i].dependents)
            if (--indeg[d] == 0) ready.push(d);
    }
    if (g.topo_order.size() != g.nodes.size()) {
        std::string stuck;
        for (std::uint32_t i = 0; i < g.nodes.size(); ++i)
            if (indeg[i] != 0) stuck += stuck.empty() ? g.nodes[i].id
                                                      : ", " + g.nodes[i].id;
        throw std::runtime_error("cycle among trace records: " + stuck);
    }

    for (TaskNode& node : g.nodes) {
        node.order_free = node.deps.empty() && node.dependents.empty();
        std::uint64_t word = node.op.width <= 32 ? 4 : 8;
        std::uint64_t peak = 0;
        for (const arch::PhaseSpec& phase : arch::route_operation(node.op, 0.0))
            peak = std::max(peak, phase.resident_elements * word);
        node.working_set_bytes = peak;
    }
    return g;
}

}  // namespace apsim::sched
