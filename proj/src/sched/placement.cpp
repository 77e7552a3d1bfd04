// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/sched/placement.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "apsim/arch/timing.hpp"

namespace apsim::sched {

std::vector<int> assign_dimms(const TaskGraph& graph, std::uint32_t n_dimms,
                              std::uint64_t capacity_bytes) {
    if (n_dimms == 0)
        throw std::invalid_argument("assign_dimms: need at least one DIMM");
    for (const TaskNode& node : graph.nodes)
        if (node.working_set_bytes > capacity_bytes)
            throw std::runtime_error("assign_dimms: node '" + node.id +
                                     "' does not fit any DIMM");

    std::vector<int> dimm(graph.nodes.size(), -1);

    // Independent work spreads evenly, nothing to keep local.
    std::uint32_t rr = 0;
    for (std::uint32_t i = 0; i < graph.nodes.size(); ++i)
        if (graph.nodes[i].order_free) dimm[i] = static_cast<int>(rr++ % n_dimms);

    // Ordered work follows its producer while the DIMM has room.
    std::vector<std::uint64_t> occupancy(n_dimms, 0);
    std::uint32_t next_chain = 0;
    for (std::uint32_t i : graph.topo_order) {
        const TaskNode& node = graph.nodes[i];
        if (node.order_free) continue;
        std::uint32_t cand = node.deps.empty()
                                 ? next_chain++ % n_dimms
                                 : static_cast<std::uint32_t>(dimm[node.deps[0]]);
        bool placed = false;
        for (std::uint32_t tries = 0; tries < n_dimms; ++tries) {
            std::uint32_t d = (cand + tries) % n_dimms;
            if (occupancy[d] + node.working_set_bytes <= capacity_bytes) {
                occupancy[d] += node.working_set_bytes;
                dimm[i] = static_cast<int>(d);
                placed = true;
                break;
            }
        }
        if (!placed)
            throw std::runtime_error("assign_dimms: no DIMM has room for '" +
                                     node.id + "'");
    }
    return dimm;
}

PackChoice packing_decision(std::uint32_t t, const TransferCost& costs) {
    if (t == 0)
        throw std::invalid_argument("packing_decision: batch must be at least 1");
    double packed = costs.t_pack + costs.rlwe_transfer;
    double raw = static_cast<double>(t) * costs.lwe_transfer;
    return packed <= raw ? PackChoice::pack : PackChoice::no_pack;
}

double lwe_transfer_seconds(std::uint32_t n, std::uint32_t width,
                            const IoLink& io) {
    double word = width <= 32 ? 4.0 : 8.0;
    return (static_cast<double>(n) + 1.0) * word / io.bytes_per_s;
}

double rlwe_transfer_seconds(std::uint32_t n, std::uint32_t limbs,
                             std::uint32_t width, const IoLink& io) {
    double word = width <= 32 ? 4.0 : 8.0;
    return 2.0 * n * limbs * word / io.bytes_per_s;
}

double pack_latency_seconds(std::uint32_t t, std::uint32_t n,
                            std::uint32_t width,
                            const arch::FuInventory& inv) {
    arch::OpDescriptor op;
    op.kind = arch::OpKind::pack;
    op.n = n;
    op.ks_digits = t;
    op.width = width;
    op.batch = 1;
    auto segs = arch::pipeline_latency(op, inv);
    std::uint64_t span = 0;
    for (const arch::TimingSegment& s : segs) span = std::max(span, s.end);
    // The inventory runs one clock domain.
    return static_cast<double>(span) / inv.units.front().clock_hz;
}

TransferCost make_transfer_cost(std::uint32_t t, std::uint32_t n,
                                std::uint32_t ring_n, std::uint32_t width,
                                const arch::FuInventory& inv,
                                const IoLink& io) {
    TransferCost c;
    c.t_pack = pack_latency_seconds(t, ring_n, width, inv);
    c.lwe_transfer = lwe_transfer_seconds(n, width, io);
    c.rlwe_transfer = rlwe_transfer_seconds(ring_n, 1, width, io);
    return c;
}

namespace {

bool packable_output(arch::OpKind kind) {
    return kind == arch::OpKind::pubks || kind == arch::OpKind::privks ||
           kind == arch::OpKind::homgate;
}

const char* format_name(XferFormat f) {
    switch (f) {
        case XferFormat::raw_lwe: return "raw_lwe";
        case XferFormat::raw_rlwe: return "raw_rlwe";
        case XferFormat::packed: return "packed";
    }
    return "?";
}

}  // namespace

TransferSchedule aggregation_plan(const TaskGraph& graph,
                                  const std::vector<int>& assignment,
                                  const AggCostModel& model) {
    if (assignment.size() != graph.nodes.size())
        throw std::invalid_argument("aggregation_plan: assignment size mismatch");
    TransferSchedule plan;
    plan.dimm = assignment;

    std::unordered_map<std::string, std::uint32_t> producer;
    for (std::uint32_t i = 0; i < graph.nodes.size(); ++i)
        for (const std::string& out : graph.nodes[i].outputs)
            producer[out] = i;

    for (std::uint32_t i : graph.topo_order) {
        const TaskNode& node = graph.nodes[i];
        if (node.deps.empty()) continue;

        // Remote operands per source DIMM, split by whether they can fold
        // into one ring pair for the ride.
        struct Operand {
            std::string ct;
            std::uint32_t from;
            std::uint64_t bytes;
            bool packable;
            std::uint32_t n;
            std::uint32_t width;
        };
        std::vector<Operand> operands;
        std::vector<std::uint32_t> candidates{
            static_cast<std::uint32_t>(plan.dimm[i])};
        for (const std::string& in : node.inputs) {
            auto it = producer.find(in);
            if (it == producer.end()) continue;  // host resident, loaded via io
            const TaskNode& src = graph.nodes[it->second];
            std::uint32_t from = static_cast<std::uint32_t>(plan.dimm[it->second]);
            operands.push_back({in, from, output_ct_bytes(src.op),
                                packable_output(src.op.kind), src.op.n,
                                src.op.width});
            if (std::find(candidates.begin(), candidates.end(), from) ==
                candidates.end())
                candidates.push_back(from);
        }
        if (operands.empty()) continue;

        // Cost of aggregating at each candidate: bytes of everything that
        // is not already there, packed where the rule prefers it.
        auto plan_for = [&](std::uint32_t at) {
            std::vector<Transfer> xfers;
            std::uint64_t total = 0;
            for (std::uint32_t from : candidates) {
                if (from == at) continue;
                std::vector<const Operand*> lwe, ring;
                for (const Operand& op : operands)
                    if (op.from == from) (op.packable ? lwe : ring).push_back(&op);
                if (!lwe.empty()) {
                    std::uint32_t t = static_cast<std::uint32_t>(lwe.size());
                    std::uint32_t n = 0, width = 32;
                    for (const Operand* op : lwe) {
                        n = std::max(n, op->n);
                        width = std::max(width, op->width);
                    }
                    TransferCost c = make_transfer_cost(t, n, model.ring_n,
                                                        width, model.inv,
                                                        model.io);
                    Transfer x;
                    for (const Operand* op : lwe) x.ct_ids.push_back(op->ct);
                    x.consumer = i;
                    x.from_dimm = from;
                    x.to_dimm = at;
                    if (packing_decision(t, c) == PackChoice::pack) {
                        x.format = XferFormat::packed;
                        std::uint64_t word = width <= 32 ? 4 : 8;
                        x.bytes = 2ull * model.ring_n * word;
                        x.seconds = c.rlwe_transfer;
                        x.pack_seconds = c.t_pack;
                    } else {
                        x.format = XferFormat::raw_lwe;
                        for (const Operand* op : lwe) x.bytes += op->bytes;
                        x.seconds = x.bytes / model.io.bytes_per_s;
                    }
                    total += x.bytes;
                    xfers.push_back(std::move(x));
                }
                if (!ring.empty()) {
                    Transfer x;
                    x.consumer = i;
                    x.from_dimm = from;
                    x.to_dimm = at;
                    x.format = XferFormat::raw_rlwe;
                    for (const Operand* op : ring) {
                        x.ct_ids.push_back(op->ct);
                        x.bytes += op->bytes;
                    }
                    x.seconds = x.bytes / model.io.bytes_per_s;
                    total += x.bytes;
                    xfers.push_back(std::move(x));
                }
            }
            return std::pair<std::uint64_t, std::vector<Transfer>>(total,
                                                                   std::move(xfers));
        };

        std::uint32_t best = candidates[0];
        auto best_plan = plan_for(best);
        for (std::size_t c = 1; c < candidates.size(); ++c) {
            auto alt = plan_for(candidates[c]);
            bool better = alt.first < best_plan.first ||
                          (alt.first == best_plan.first &&
                           candidates[c] < best &&
                           best != static_cast<std::uint32_t>(assignment[i]));
            if (better) {
                best = candidates[c];
                best_plan = std::move(alt);
            }
        }
        plan.dimm[i] = static_cast<int>(best);
        plan.total_bytes += best_plan.first;
        for (Transfer& x : best_plan.second) plan.transfers.push_back(std::move(x));
    }
    return plan;
}

std::string schedule_to_json(const TaskGraph& graph,
                             const TransferSchedule& plan) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    std::vector<std::uint32_t> order(graph.nodes.size());
    for (std::uint32_t pos = 0; pos < graph.topo_order.size(); ++pos)
        order[graph.topo_order[pos]] = pos;
    for (std::uint32_t i = 0; i < graph.nodes.size(); ++i) {
        nlohmann::json n;
        n["id"] = graph.nodes[i].id;
        n["op"] = arch::op_kind_name(graph.nodes[i].op.kind);
        n["dimm"] = plan.dimm[i];
        n["order"] = order[i];
        n["order_free"] = graph.nodes[i].order_free;
        j["nodes"].push_back(std::move(n));
    }
    j["transfers"] = nlohmann::json::array();
    for (const Transfer& x : plan.transfers) {
        nlohmann::json t;
        t["cts"] = x.ct_ids;
        t["from"] = x.from_dimm;
        t["to"] = x.to_dimm;
        t["format"] = format_name(x.format);
        t["bytes"] = x.bytes;
        t["seconds"] = x.seconds;
        j["transfers"].push_back(std::move(t));
    }
    j["total_bytes"] = plan.total_bytes;
    return j.dump(2);
}

}  // namespace apsim::sched
