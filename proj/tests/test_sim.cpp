// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "apsim/arch/timing.hpp"
#include "apsim/sim/engine.hpp"
#include "apsim/sim/functional.hpp"

using namespace apsim;

namespace {

std::vector<sched::TraceRecord> parse(const std::string& jsonl) {
    std::istringstream in(jsonl);
    return sched::parse_trace(in);
}

sim::SimReport run(const std::string& jsonl,
                   const std::vector<std::string>& resident,
                   std::uint32_t dimms, bool functional = false) {
    sim::SimConfig cfg;
    cfg.n_dimms = dimms;
    cfg.functional = functional;
    return sim::simulate_trace(parse(jsonl), resident, cfg);
}

const char* kGate =
    R"({"op":"homgate","id":"g0","inputs":["a","b"],"outputs":["x"],"params":{"n":512,"iters":512,"ks_digits":7}})";

}  // namespace

TEST_CASE("empty trace gives an empty report") {
    sim::SimReport rep = run("", {}, 2, true);
    CHECK(rep.makespan_ps == 0);
    CHECK(rep.makespan_cycles == 0);
    CHECK(rep.completed == 0);
    CHECK(rep.ntt_util == -1.0);
    CHECK(rep.ntt_util_dual == -1.0);
    CHECK(rep.per_op.empty());
    CHECK(rep.violations.empty());
}

TEST_CASE("single add makespan is loads plus pipeline plus retire") {
    std::string t =
        R"({"op":"hadd","id":"h","inputs":["u","v"],"outputs":["w"],"params":{"n":1024}})";
    sim::SimReport rep = run(t, {"u", "v"}, 1);

    // Two 8192-byte host loads serialize on the 32 GB/s link (256 us each
    // in ps units), the pipeline span comes from the same model the
    // architecture layer exposes, and the result retires through one row
    // miss plus 8192 bytes at the pin aggregate.
    arch::OpDescriptor op;
    op.kind = arch::OpKind::hadd;
    op.n = 1024;
    arch::FuInventory inv = arch::default_inventory();
    std::uint64_t span = 0;
    for (const arch::TimingSegment& s : arch::pipeline_latency(op, inv))
        span = std::max(span, s.end);
    std::uint64_t expect = 2 * 256000 + span * 1000 + 41250 + 40000;
    CHECK(rep.makespan_ps == expect);
    CHECK(rep.completed == 1);
    CHECK(rep.violations.empty());

    // Throughput figures follow directly from the makespan.
    const sim::OpStats& st = rep.per_op.at("HAdd");
    CHECK(st.count == 1);
    CHECK(st.ops_per_s ==
          doctest::Approx(1e12 / static_cast<double>(rep.makespan_ps)));
}

TEST_CASE("reports are byte-identical across reruns") {
    std::string t = std::string(kGate) + "\n" +
        R"({"op":"cmult","id":"m0","inputs":["u","v"],"outputs":["w"],"params":{"n":4096,"limbs":2}})";
    sim::SimReport r1 = run(t, {"a", "b", "u", "v"}, 2);
    sim::SimReport r2 = run(t, {"a", "b", "u", "v"}, 2);
    CHECK(r1.to_json() == r2.to_json());
    CHECK(r1.to_csv() == r2.to_csv());

    // And the json is actually parseable with the expected keys.
    nlohmann::json j = nlohmann::json::parse(r1.to_json());
    CHECK(j.contains("makespan_ps"));
    CHECK(j.contains("per_op"));
    CHECK(j.contains("ledger"));
    CHECK(j["ledger"].contains("in_memory"));
    CHECK(j["per_op"].contains("HomGate"));
}

TEST_CASE("independent gates scale with the module count") {
    std::ostringstream t;
    std::vector<std::string> res;
    for (int i = 0; i < 64; ++i) {
        t << R"({"op":"homgate","id":"g)" << i << R"(","inputs":["a)" << i
          << R"(","b)" << i << R"("],"outputs":["x)" << i
          << R"("],"params":{"n":512,"iters":512,"ks_digits":7}})" << "\n";
        res.push_back("a" + std::to_string(i));
        res.push_back("b" + std::to_string(i));
    }
    sim::SimReport r2 = run(t.str(), res, 2);
    sim::SimReport r4 = run(t.str(), res, 4);
    CHECK(r2.violations.empty());
    CHECK(r4.violations.empty());

    double ratio = r4.per_op.at("HomGate").ops_per_s /
                   r2.per_op.at("HomGate").ops_per_s;
    CHECK(ratio > 1.7);
    CHECK(ratio < 2.3);

    // Gate streams are transform-bound; only the stream fill and drain at
    // the window edges run without a transform active.
    CHECK(r2.ntt_util > 0.99);
    CHECK(r2.ntt_util <= 1.0);
    CHECK(r2.ntt_util_dual >= r2.ntt_util_single_replay - 1e-9);
}

TEST_CASE("in-rank switch traffic lands in the ledger with exact bit counts") {
    std::string t = std::string(kGate) + "\n" +
        R"({"op":"pubks","id":"k0","inputs":["x"],"outputs":["y"],"params":{"n":512,"ks_digits":7}}
{"op":"privks","id":"k1","inputs":["y"],"outputs":["z"],"params":{"n":512,"ks_digits":4,"iters":2}})";
    sim::SimReport rep = run(t, {"a", "b"}, 1);

    // Gate switch 512*7 = 3584, public switch 512*7 = 3584, private switch
    // with arity two 2*(512+1)*4 = 4104.
    CHECK(rep.ledger.total_in(mem::MemLevel::in_memory) == 3584 + 3584 + 4104);
    CHECK(rep.violations.empty());
}

TEST_CASE("switch-only node ends at its broadcast tail") {
    std::string t =
        R"({"op":"pubks","id":"k","inputs":["c"],"outputs":["d"],"params":{"n":512,"ks_digits":7}})";
    sim::SimReport rep = run(t, {"c"}, 1);

    // 513 words * 4 bytes over the host link, then 3584 transmitted bits
    // plus a four-cycle drain per bit at the 1.6 GHz rank clock.
    std::uint64_t load_ps = 64125;
    std::uint64_t ks_ps = (3584 + 4 * 3584) * 625ull;
    CHECK(rep.makespan_ps == load_ps + ks_ps);
}

TEST_CASE("engine rejects inconsistent inputs") {
    sched::TaskGraph graph = sched::build_task_graph(parse(kGate), {"a", "b"});
    sim::SimConfig cfg;
    cfg.functional = false;

    sched::TransferSchedule plan;
    plan.dimm = {0};
    CHECK_NOTHROW(sim::run_simulation(graph, plan, cfg));

    sim::SimConfig bad = cfg;
    bad.n_dimms = 0;
    CHECK_THROWS_AS(sim::run_simulation(graph, plan, bad),
                    std::invalid_argument);

    sched::TransferSchedule wrong;
    wrong.dimm = {0, 1};  // size mismatch with the one-node graph
    CHECK_THROWS_AS(sim::run_simulation(graph, wrong, cfg),
                    std::invalid_argument);

    sched::TransferSchedule far;
    far.dimm = {9};
    CHECK_THROWS_AS(sim::run_simulation(graph, far, cfg),
                    std::invalid_argument);
}

TEST_CASE("missing transfer for a cross-module edge is a scheduling bug") {
    std::string t = std::string(kGate) + "\n" +
        R"({"op":"pubks","id":"k0","inputs":["x"],"outputs":["y"],"params":{"n":512,"ks_digits":7}})";
    sched::TaskGraph graph = sched::build_task_graph(parse(t), {"a", "b"});
    sim::SimConfig cfg;
    cfg.functional = false;

    sched::TransferSchedule plan;
    plan.dimm = {0, 1};  // consumer on the other DIMM, no transfer listed
    CHECK_THROWS_WITH_AS(sim::run_simulation(graph, plan, cfg),
                         doctest::Contains("scheduling bug"),
                         std::runtime_error);

    // With the delivery in place the same split runs fine and the link
    // traffic shows up in the io tier.
    sched::Transfer x;
    x.ct_ids = {"x"};
    x.consumer = 1;
    x.from_dimm = 0;
    x.to_dimm = 1;
    x.format = sched::XferFormat::raw_lwe;
    x.bytes = 513 * 4;
    x.seconds = 513 * 4 / 32e9;
    plan.transfers.push_back(x);
    sim::SimReport rep = sim::run_simulation(graph, plan, cfg);
    CHECK(rep.violations.empty());
    CHECK(rep.ledger.total_in(mem::MemLevel::io) >=
          static_cast<std::uint64_t>(513 * 4 * 8));
}

TEST_CASE("no node outlives the makespan") {
    std::string t = std::string(kGate) + "\n" +
        R"({"op":"cboot","id":"c0","inputs":["x"],"outputs":["s"],"params":{"n":400,"iters":400,"out_levels":2,"ks_digits":4}}
{"op":"hadd","id":"h0","inputs":["u","v"],"outputs":["w"],"params":{"n":4096,"limbs":2}})";
    sim::SimReport rep = run(t, {"a", "b", "u", "v"}, 2);
    CHECK(rep.violations.empty());
    for (const sim::NodeTiming& nt : rep.nodes) {
        CHECK(nt.end_ps <= rep.makespan_ps);
        CHECK(nt.end_ps > nt.start_ps);
    }
}

TEST_CASE("offloading never lowers the dual transform share") {
    // A mix with heavy add and pointwise streams, where routine 2 has real
    // work to take.
    std::ostringstream t;
    t << R"({"op":"cmult","id":"m0","inputs":["u","v"],"outputs":["w0"],"params":{"n":8192,"limbs":4}})"
      << "\n";
    for (int i = 0; i < 6; ++i)
        t << R"({"op":"hadd","id":"h)" << i << R"(","inputs":["w)" << i
          << R"(","u"],"outputs":["w)" << i + 1
          << R"("],"params":{"n":8192,"limbs":4}})" << "\n";
    sim::SimReport rep = run(t.str(), {"u", "v"}, 1);
    CHECK(rep.violations.empty());
    CHECK(rep.ntt_util_single_replay >= 0.0);
    CHECK(rep.ntt_util_dual >= rep.ntt_util_single_replay - 1e-9);
}

TEST_CASE("functional digests do not depend on the placement") {
    std::string t = std::string(kGate) + "\n" +
        R"({"op":"homgate","id":"g1","inputs":["c","d"],"outputs":["y"],"params":{"n":512,"iters":512,"ks_digits":7}}
{"op":"homgate","id":"g2","inputs":["x","y"],"outputs":["z"],"params":{"n":512,"iters":512,"ks_digits":7}})";
    sim::SimReport r1 = run(t, {"a", "b", "c", "d"}, 1, true);
    sim::SimReport r2 = run(t, {"a", "b", "c", "d"}, 2, true);
    CHECK(r1.functional_digest == r2.functional_digest);
    CHECK(r1.functional_ok);
    CHECK(r2.functional_ok);
    CHECK(r1.gate_checks == 3);
    CHECK(r1.gate_failures == 0);
    CHECK(r1.switch_failures == 0);
}

TEST_CASE("functional evaluation is a pure function of trace and seed") {
    sched::TaskGraph graph = sched::build_task_graph(parse(kGate), {"a", "b"});
    sim::FunctionalOutcome a = sim::evaluate_trace(graph, 7);
    sim::FunctionalOutcome b = sim::evaluate_trace(graph, 7);
    sim::FunctionalOutcome c = sim::evaluate_trace(graph, 8);
    CHECK(a.digest == b.digest);
    CHECK(a.digest != c.digest);
    CHECK(a.produced == 1);
}
