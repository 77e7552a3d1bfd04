// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/sim/engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "apsim/arch/routing.hpp"
#include "apsim/arch/timing.hpp"
#include "apsim/mem/inmem_ks.hpp"
#include "apsim/sim/functional.hpp"

namespace apsim {
namespace sim {

namespace {

constexpr double kPsPerSecond = 1e12;

std::uint64_t seconds_to_ps(double s) {
    if (s <= 0.0) return 0;
    return static_cast<std::uint64_t>(std::llround(s * kPsPerSecond));
}

std::uint64_t bytes_time_ps(std::uint64_t bytes, double bytes_per_s) {
    if (bytes == 0) return 0;
    return seconds_to_ps(static_cast<double>(bytes) / bytes_per_s);
}

// Bytes the host ships when a consumer pulls a ciphertext straight from
// its staging area. Sized by what the consumer expects at that port, since
// nothing in the trace produced the object.
std::uint64_t resident_bytes(const arch::OpDescriptor& op, std::size_t pos) {
    std::uint64_t word = op.width <= 32 ? 4 : 8;
    std::uint64_t n = op.n;
    switch (op.kind) {
        case arch::OpKind::homgate:
        case arch::OpKind::pubks:
        case arch::OpKind::privks:
        case arch::OpKind::pack:
        case arch::OpKind::cboot:
            return (n + 1) * word;
        case arch::OpKind::cmux:
            // Selector port carries a gadget ciphertext, branch ports ring
            // pairs.
            if (pos == 0) return std::uint64_t(op.glevels) * 2 * n * word;
            return 2 * n * word;
        default:
            return 2 * n * op.limbs * word;
    }
}

// In-rank key-switch work hanging off one node, after its pipeline phase.
struct KsEvent {
    mem::KsKind kind = mem::KsKind::public_ks;
    mem::KsDims dims;
    std::uint64_t out_words = 0;
};

std::vector<KsEvent> ks_tail(const arch::OpDescriptor& op) {
    std::vector<KsEvent> events;
    std::uint32_t batch = std::max<std::uint32_t>(1, op.batch);
    switch (op.kind) {
        case arch::OpKind::homgate:
            for (std::uint32_t b = 0; b < batch; ++b)
                events.push_back({mem::KsKind::public_ks,
                                  {op.n, op.ks_digits, 1},
                                  std::uint64_t(op.n) + 1});
            break;
        case arch::OpKind::cboot:
            // Every output gadget row pair needs its own functional switch;
            // they land on distinct ranks and run concurrently.
            for (std::uint32_t b = 0; b < batch; ++b)
                for (std::uint32_t l = 0; l < 2 * op.out_levels; ++l)
                    events.push_back({mem::KsKind::private_ks,
                                      {op.n, op.ks_digits, 1},
                                      2ull * op.n});
            break;
        case arch::OpKind::pubks:
            for (std::uint32_t b = 0; b < batch; ++b)
                events.push_back({mem::KsKind::public_ks,
                                  {op.n, op.ks_digits, 1},
                                  std::uint64_t(op.n) + 1});
            break;
        case arch::OpKind::privks:
            // iters carries the function arity for private switches.
            for (std::uint32_t b = 0; b < batch; ++b)
                events.push_back({mem::KsKind::private_ks,
                                  {op.n, op.ks_digits,
                                   std::max<std::uint32_t>(1, op.iters)},
                                  std::uint64_t(op.n) + 1});
            break;
        default:
            break;
    }
    return events;
}

bool has_ring_output(arch::OpKind k) {
    switch (k) {
        case arch::OpKind::homgate:
        case arch::OpKind::cboot:
        case arch::OpKind::pubks:
        case arch::OpKind::privks:
            return false;  // result drains to rank rows inside the switch
        default:
            return true;
    }
}

struct Window {
    std::uint64_t start = 0;
    std::uint64_t end = 0;
    std::uint64_t bytes = 0;
};

double peak_rate(const std::vector<Window>& ws) {
    double peak = 0.0;
    for (const Window& w : ws) {
        if (w.end <= w.start) continue;
        double dur_s = static_cast<double>(w.end - w.start) / kPsPerSecond;
        peak = std::max(peak, static_cast<double>(w.bytes) / dur_s);
    }
    return peak;
}

std::array<std::uint64_t, 9> descriptor_key(const arch::OpDescriptor& op) {
    return {static_cast<std::uint64_t>(op.kind), op.n,     op.limbs,
            op.glevels,                          op.iters, op.out_levels,
            op.ks_digits,                        op.batch, op.width};
}

}  // namespace

SimReport run_simulation(const sched::TaskGraph& graph,
                         const sched::TransferSchedule& plan,
                         const SimConfig& cfg) {
    cfg.inv.validate();
    cfg.dimm.validate();
    if (cfg.n_dimms == 0)
        throw std::invalid_argument("run_simulation: need at least one DIMM");
    if (cfg.io_bytes_per_s <= 0.0)
        throw std::invalid_argument("run_simulation: io bandwidth must be positive");
    if (plan.dimm.size() != graph.nodes.size())
        throw std::invalid_argument("run_simulation: plan does not match graph");
    for (int d : plan.dimm)
        if (d < 0 || static_cast<std::uint32_t>(d) >= cfg.n_dimms)
            throw std::invalid_argument(
                "run_simulation: plan references DIMM " + std::to_string(d) +
                " outside the configured " + std::to_string(cfg.n_dimms));

    SimReport rep;
    const std::size_t n_nodes = graph.nodes.size();
    const std::size_t n_units = cfg.inv.units.size();
    const std::uint64_t unit_cycle_ps =
        seconds_to_ps(1.0 / static_cast<double>(cfg.inv.units.front().clock_hz));
    const std::uint64_t dram_cycle_ps =
        seconds_to_ps(1.0 / cfg.dimm.clock_hz);
    const double near_bps = mem::near_mem_aggregate_bytes_per_s(cfg.dimm);
    const std::uint64_t miss_ps =
        seconds_to_ps(mem::dram_access_latency(cfg.dimm, false, 0) * 1e-9);

    // Per-DIMM resources.
    std::vector<std::uint64_t> r1_free(cfg.n_dimms, 0), r2_free(cfg.n_dimms, 0),
        dram_free(cfg.n_dimms, 0);
    std::vector<std::vector<std::uint64_t>> rank_free(
        cfg.n_dimms, std::vector<std::uint64_t>(cfg.dimm.ranks, 0));
    std::vector<std::uint32_t> rank_rr(cfg.n_dimms, 0);
    std::uint64_t host_free = 0;

    // Key material is staged into every rank ahead of time; that traffic is
    // setup cost, not part of the replay.
    std::vector<mem::InMemKs> ks_units;
    ks_units.reserve(cfg.n_dimms);
    for (std::uint32_t d = 0; d < cfg.n_dimms; ++d) {
        ks_units.emplace_back(cfg.dimm);
        for (std::uint32_t r = 0; r < cfg.dimm.ranks; ++r) {
            ks_units[d].preload(r, "pub");
            ks_units[d].preload(r, "priv");
        }
    }

    std::unordered_map<std::string, std::uint32_t> producer;
    for (std::uint32_t i = 0; i < n_nodes; ++i)
        for (const std::string& out : graph.nodes[i].outputs)
            producer[out] = i;
    std::set<std::string> resident(graph.resident.begin(),
                                   graph.resident.end());

    std::vector<std::vector<std::uint32_t>> xfers_of(n_nodes);
    for (std::uint32_t x = 0; x < plan.transfers.size(); ++x) {
        if (plan.transfers[x].consumer >= n_nodes)
            throw std::invalid_argument(
                "run_simulation: transfer consumer index out of range");
        xfers_of[plan.transfers[x].consumer].push_back(x);
    }

    std::vector<std::uint64_t> completion(n_nodes, 0);
    // Host loads are one per (ciphertext, destination DIMM); the host keeps
    // the master copy.
    std::map<std::pair<std::string, std::uint32_t>, std::uint64_t> load_end;

    std::vector<arch::TimingSegment> segs;  // ps, fu globalized per DIMM
    std::vector<Window> io_windows, near_windows;
    std::map<std::array<std::uint64_t, 9>, std::vector<arch::TimingSegment>>
        pipe_cache;
    std::uint64_t makespan = 0;

    std::vector<std::uint32_t> pack_units = cfg.inv.units_of(
        arch::RoutineId::R1, arch::FuKind::madd);
    std::uint32_t pack_fu = pack_units.empty() ? 0 : pack_units.front();

    for (std::uint32_t i : graph.topo_order) {
        const sched::TaskNode& node = graph.nodes[i];
        const std::uint32_t d = static_cast<std::uint32_t>(plan.dimm[i]);

        // Incoming cross-DIMM deliveries, in plan order on the host FIFO.
        std::unordered_map<std::string, std::uint64_t> arrival;
        for (std::uint32_t xi : xfers_of[i]) {
            const sched::Transfer& x = plan.transfers[xi];
            std::uint64_t src_ready = 0;
            for (const std::string& ct : x.ct_ids) {
                auto it = producer.find(ct);
                if (it != producer.end())
                    src_ready = std::max(src_ready, completion[it->second]);
            }
            if (x.format == sched::XferFormat::packed && x.pack_seconds > 0.0) {
                // Folding the batch into one ring pair runs on the source
                // module before the link sees any bytes.
                std::uint64_t pack_ps = seconds_to_ps(x.pack_seconds);
                std::uint64_t pstart = std::max(src_ready, r1_free[x.from_dimm]);
                r1_free[x.from_dimm] = pstart + pack_ps;
                segs.push_back({static_cast<std::uint32_t>(
                                    x.from_dimm * n_units + pack_fu),
                                pstart, pstart + pack_ps,
                                arch::SegLabel::non_ntt, arch::RoutineId::R1});
                src_ready = pstart + pack_ps;
            }
            std::uint64_t xstart = std::max(src_ready, host_free);
            std::uint64_t xend = xstart + seconds_to_ps(x.seconds);
            host_free = xend;
            rep.host_bytes += x.bytes;
            io_windows.push_back({xstart, xend, x.bytes});
            rep.ledger.record(node.id, mem::MemLevel::io, x.bytes * 8, 0);
            for (const std::string& ct : x.ct_ids) arrival[ct] = xend;
            makespan = std::max(makespan, xend);
        }

        std::uint64_t ready = 0;
        std::uint64_t staged_bytes = 0;
        for (std::size_t p = 0; p < node.inputs.size(); ++p) {
            const std::string& ct = node.inputs[p];
            auto it = producer.find(ct);
            if (it != producer.end()) {
                std::uint32_t src = it->second;
                if (static_cast<std::uint32_t>(plan.dimm[src]) == d) {
                    ready = std::max(ready, completion[src]);
                    staged_bytes += sched::output_ct_bytes(graph.nodes[src].op);
                } else {
                    auto at = arrival.find(ct);
                    if (at == arrival.end()) {
                        std::ostringstream msg;
                        msg << "scheduling bug: ciphertext '" << ct
                            << "' produced on DIMM " << plan.dimm[src]
                            << " by '" << graph.nodes[src].id
                            << "' is needed on DIMM " << d << " by '"
                            << node.id << "' but no transfer delivers it";
                        throw std::runtime_error(msg.str());
                    }
                    ready = std::max(ready, at->second);
                }
            } else if (resident.count(ct)) {
                auto key = std::make_pair(ct, d);
                auto lit = load_end.find(key);
                if (lit == load_end.end()) {
                    std::uint64_t bytes = resident_bytes(node.op, p);
                    std::uint64_t lstart = host_free;
                    std::uint64_t lend =
                        lstart + bytes_time_ps(bytes, cfg.io_bytes_per_s);
                    host_free = lend;
                    rep.host_bytes += bytes;
                    io_windows.push_back({lstart, lend, bytes});
                    rep.ledger.record("load:" + ct, mem::MemLevel::io,
                                      bytes * 8, 0);
                    lit = load_end.emplace(key, lend).first;
                    makespan = std::max(makespan, lend);
                }
                ready = std::max(ready, lit->second);
            }
            // Anything else would have failed graph construction already.
        }

        // Same-DIMM intermediates are pulled out of the rank rows through
        // the pins before the pipelines can stream them.
        std::uint64_t stage_start = ready;
        if (staged_bytes > 0) {
            stage_start = std::max(ready, dram_free[d]);
            std::uint64_t sdur = miss_ps + bytes_time_ps(staged_bytes, near_bps);
            dram_free[d] = stage_start + sdur;
            near_windows.push_back({stage_start, stage_start + sdur,
                                    staged_bytes});
            ready = stage_start + sdur;
        }

        // Pipeline phases, cached per shape and laid down at the first slot
        // where every routine the op touches is free.
        auto cached = pipe_cache.find(descriptor_key(node.op));
        if (cached == pipe_cache.end()) {
            std::vector<arch::TimingSegment> base =
                arch::pipeline_latency(node.op, cfg.inv);
            for (arch::TimingSegment& s : base) {
                s.start *= unit_cycle_ps;
                s.end *= unit_cycle_ps;
            }
            cached = pipe_cache.emplace(descriptor_key(node.op),
                                        std::move(base)).first;
        }
        std::uint64_t r1_span = 0, r2_span = 0;
        for (const arch::TimingSegment& s : cached->second) {
            std::uint64_t& span =
                s.routine == arch::RoutineId::R1 ? r1_span : r2_span;
            span = std::max(span, s.end);
        }
        std::uint64_t cstart = ready;
        if (r1_span > 0) cstart = std::max(cstart, r1_free[d]);
        if (r2_span > 0) cstart = std::max(cstart, r2_free[d]);
        for (const arch::TimingSegment& s : cached->second)
            segs.push_back({static_cast<std::uint32_t>(d * n_units + s.fu),
                            cstart + s.start, cstart + s.end, s.label,
                            s.routine});
        if (r1_span > 0) r1_free[d] = cstart + r1_span;
        if (r2_span > 0) r2_free[d] = cstart + r2_span;
        std::uint64_t cend = cstart + std::max(r1_span, r2_span);

        // Digit broadcasts into the ranks, round-robin so independent
        // switches overlap across the rank pool.
        std::uint64_t node_end = cend;
        std::uint64_t ks_bits = 0, ks_out_bits = 0;
        for (const KsEvent& e : ks_tail(node.op)) {
            std::uint32_t rank = rank_rr[d]++ % cfg.dimm.ranks;
            const char* key = e.kind == mem::KsKind::public_ks ? "pub" : "priv";
            mem::InMemKsResult r =
                ks_units[d].execute(rank, key, e.kind, e.dims, e.out_words);
            std::uint64_t kstart = std::max(cend, rank_free[d][rank]);
            std::uint64_t kend = kstart + r.cycles * dram_cycle_ps;
            rank_free[d][rank] = kend;
            node_end = std::max(node_end, kend);
            ks_bits += r.transmitted_bits;
            ks_out_bits += e.out_words * 32;
        }
        if (ks_bits > 0)
            rep.ledger.record(node.id, mem::MemLevel::in_memory, ks_bits,
                              ks_out_bits);

        // Ring-shaped results retire through the pins back into the rows;
        // switch results are already sitting in their rank.
        std::uint64_t out_bytes = 0;
        for (std::size_t o = 0; o < node.outputs.size(); ++o)
            out_bytes += sched::output_ct_bytes(node.op);
        if (out_bytes > 0 && has_ring_output(node.op.kind)) {
            std::uint64_t wstart = std::max(node_end, dram_free[d]);
            std::uint64_t wdur = miss_ps + bytes_time_ps(out_bytes, near_bps);
            dram_free[d] = wstart + wdur;
            near_windows.push_back({wstart, wstart + wdur, out_bytes});
            node_end = wstart + wdur;
        }
        rep.ledger.record(node.id, mem::MemLevel::near_memory,
                          staged_bytes * 8,
                          has_ring_output(node.op.kind) ? out_bytes * 8 : 0);

        completion[i] = node_end;
        makespan = std::max(makespan, node_end);
        rep.nodes.push_back({node.id, arch::op_kind_name(node.op.kind),
                             plan.dimm[i], stage_start, node_end});
        OpStats& st = rep.per_op[arch::op_kind_name(node.op.kind)];
        st.count += std::max<std::uint32_t>(1, node.op.batch);
        st.total_ps += node_end - stage_start;
    }

    rep.makespan_ps = makespan;
    rep.makespan_cycles = (makespan + unit_cycle_ps - 1) / unit_cycle_ps;
    rep.completed = n_nodes;
    rep.peak_io_bps = peak_rate(io_windows);
    rep.peak_near_bps = peak_rate(near_windows);

    double makespan_s = static_cast<double>(makespan) / kPsPerSecond;
    for (auto& [name, st] : rep.per_op)
        st.ops_per_s = makespan_s > 0.0
                           ? static_cast<double>(st.count) / makespan_s
                           : 0.0;

    if (makespan > 0) {
        std::map<arch::FuKind, std::uint64_t> busy, pool;
        for (const arch::TimingSegment& s : segs)
            busy[cfg.inv.units[s.fu % n_units].kind] += s.end - s.start;
        for (const arch::FuInstance& u : cfg.inv.units) pool[u.kind] += 1;
        for (auto& [kind, cycles] : busy) {
            double denom = static_cast<double>(makespan) * pool[kind] *
                           cfg.n_dimms;
            rep.fu_utilization[arch::fu_kind_name(kind)] =
                static_cast<double>(cycles) / denom;
        }
    }

    if (!segs.empty()) {
        arch::UtilizationQuantities q = arch::utilization_metrics(segs);
        if (q.r1_busy > 0) {
            rep.ntt_util = q.ntt_utilization();
            rep.ntt_util_dual = q.ntt_utilization_dual();
        }
    }

    if (cfg.functional) {
        FunctionalOutcome f = evaluate_trace(graph, cfg.seed);
        rep.functional_digest = f.digest;
        rep.gate_checks = f.gate_checks;
        rep.gate_failures = f.gate_failures;
        rep.switch_checks = f.switch_checks;
        rep.switch_failures = f.switch_failures;
        // Toy-parameter gates keep a small per-gate noise budget, so a run
        // is healthy while flips stay under one percent.
        rep.functional_ok = f.switch_failures == 0 &&
                            f.gate_failures * 100 <= f.gate_checks;
        if (!rep.functional_ok)
            rep.violations.push_back("functional check failed: " +
                                     std::to_string(f.gate_failures) +
                                     " gate and " +
                                     std::to_string(f.switch_failures) +
                                     " switch mismatches");
    }

    if (cfg.check_invariants) {
        for (const auto& [name, u] : rep.fu_utilization)
            if (u < 0.0 || u > 1.0 + 1e-9)
                rep.violations.push_back("unit utilization out of range: " +
                                         name + " = " + std::to_string(u));
        for (double u : {rep.ntt_util, rep.ntt_util_dual})
            if (u > 1.0 + 1e-9)
                rep.violations.push_back(
                    "transform utilization above one: " + std::to_string(u));
        if (rep.peak_io_bps > cfg.io_bytes_per_s * 1.001)
            rep.violations.push_back("host link rate exceeds its ceiling");
        if (rep.peak_near_bps > near_bps * 1.001)
            rep.violations.push_back("near-memory rate exceeds its ceiling");
        for (const NodeTiming& nt : rep.nodes)
            if (nt.end_ps > rep.makespan_ps)
                rep.violations.push_back("node outlives the makespan: " +
                                         nt.id);

        if (cfg.inv.r2_offload > 0.0) {
            SimConfig replay = cfg;
            replay.inv.r2_offload = 0.0;
            replay.functional = false;
            replay.check_invariants = false;
            SimReport single = run_simulation(graph, plan, replay);
            rep.ntt_util_single_replay = single.ntt_util;
        } else {
            rep.ntt_util_single_replay = rep.ntt_util;
        }
        if (rep.ntt_util_single_replay >= 0.0 && rep.ntt_util_dual >= 0.0 &&
            rep.ntt_util_dual + 1e-9 < rep.ntt_util_single_replay)
            rep.violations.push_back(
                "offload made the transform share worse: dual " +
                std::to_string(rep.ntt_util_dual) + " vs single " +
                std::to_string(rep.ntt_util_single_replay));
    }

    return rep;
}

SimReport simulate_trace(const std::vector<sched::TraceRecord>& records,
                         const std::vector<std::string>& resident,
                         const SimConfig& cfg) {
    sched::TaskGraph graph = sched::build_task_graph(records, resident);
    std::vector<int> assignment = sched::assign_dimms(graph, cfg.n_dimms);
    sched::AggCostModel model;
    model.inv = cfg.inv;
    model.io.bytes_per_s = cfg.io_bytes_per_s;
    sched::TransferSchedule plan =
        sched::aggregation_plan(graph, assignment, model);
    return run_simulation(graph, plan, cfg);
}

std::string SimReport::to_json() const {
    nlohmann::json j;
    j["makespan_ps"] = makespan_ps;
    j["makespan_cycles"] = makespan_cycles;
    j["completed"] = completed;
    j["host_bytes"] = host_bytes;
    j["peak_io_bps"] = peak_io_bps;
    j["peak_near_bps"] = peak_near_bps;
    j["ntt_util"] = ntt_util;
    j["ntt_util_dual"] = ntt_util_dual;
    j["ntt_util_single_replay"] = ntt_util_single_replay;
    j["per_op"] = nlohmann::json::object();
    for (const auto& [name, st] : per_op)
        j["per_op"][name] = {{"count", st.count},
                             {"total_ps", st.total_ps},
                             {"ops_per_s", st.ops_per_s}};
    j["fu_utilization"] = fu_utilization;
    j["ledger"] = nlohmann::json::object();
    for (mem::MemLevel lvl : {mem::MemLevel::io, mem::MemLevel::near_memory,
                              mem::MemLevel::in_memory})
        j["ledger"][mem::mem_level_name(lvl)] = {
            {"bits_in", ledger.total_in(lvl)},
            {"bits_out", ledger.total_out(lvl)}};
    j["nodes"] = nlohmann::json::array();
    for (const NodeTiming& nt : nodes)
        j["nodes"].push_back({{"id", nt.id},
                              {"op", nt.op},
                              {"dimm", nt.dimm},
                              {"start_ps", nt.start_ps},
                              {"end_ps", nt.end_ps}});
    j["violations"] = violations;
    if (!reduction_factors.empty()) j["reduction_factors"] = reduction_factors;
    j["functional"] = {{"digest", functional_digest},
                       {"gate_checks", gate_checks},
                       {"gate_failures", gate_failures},
                       {"switch_checks", switch_checks},
                       {"switch_failures", switch_failures},
                       {"ok", functional_ok}};
    return j.dump(2);
}

std::string SimReport::to_csv() const {
    std::ostringstream out;
    out << "metric,value\n";
    out << "makespan_ps," << makespan_ps << "\n";
    out << "makespan_cycles," << makespan_cycles << "\n";
    out << "completed," << completed << "\n";
    out << "host_bytes," << host_bytes << "\n";
    out << "peak_io_bps," << peak_io_bps << "\n";
    out << "peak_near_bps," << peak_near_bps << "\n";
    out << "ntt_util," << ntt_util << "\n";
    out << "ntt_util_dual," << ntt_util_dual << "\n";
    out << "ntt_util_single_replay," << ntt_util_single_replay << "\n";
    out << "functional_digest," << functional_digest << "\n";
    out << "violations," << violations.size() << "\n";
    out << "\nop,count,total_ps,ops_per_s\n";
    for (const auto& [name, st] : per_op)
        out << name << "," << st.count << "," << st.total_ps << ","
            << st.ops_per_s << "\n";
    out << "\nfu,utilization\n";
    for (const auto& [name, u] : fu_utilization)
        out << name << "," << u << "\n";
    if (!reduction_factors.empty()) {
        out << "\nswitch,reduction_factor\n";
        for (const auto& [name, f] : reduction_factors)
            out << name << "," << f << "\n";
    }
    out << "\nid,op,dimm,start_ps,end_ps\n";
    for (const NodeTiming& nt : nodes)
        out << nt.id << "," << nt.op << "," << nt.dimm << "," << nt.start_ps
            << "," << nt.end_ps << "\n";
    return out.str();
}

}  // namespace sim
}  // namespace apsim
