// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/sim/workloads.hpp"

#include <cstdint>
#include <stdexcept>

namespace apsim::sim {

namespace {

using sched::TraceRecord;

std::string num(int i) { return std::to_string(i); }

// Encrypted RAM lookup: a binary select tree folds 2^bits entries down
// to one, steered by one selector per level. The two lowest address
// bits arrive as fresh LWE samples and are bootstrapped into selector
// form on the fly; the rest are preloaded. The select nodes dominate
// the runtime, the bootstrap pair is the warm-up.
Workload make_vsp() {
    Workload w;
    w.name = "vsp_style";
    w.description =
        "encrypted 8-bit RAM readout: select tree over 256 entries with "
        "two bootstrapped address bits";
    const int bits = 8;
    const int entries = 1 << bits;
    for (int i = 0; i < entries; ++i) w.resident.push_back("e" + num(i));
    for (int b = 2; b < bits; ++b) w.resident.push_back("s" + num(b));
    w.resident.push_back("a0");
    w.resident.push_back("a1");
    for (int b = 0; b < 2; ++b)
        w.records.push_back({"cboot",
                             "cb" + num(b),
                             {"a" + num(b)},
                             {"s" + num(b)},
                             {{"n", 2048},
                              {"iters", 400},
                              {"glevels", 3},
                              {"out_levels", 2},
                              {"ks_digits", 4}}});
    std::vector<std::string> cur;
    for (int i = 0; i < entries; ++i) cur.push_back("e" + num(i));
    int id = 0;
    for (int b = 0; b < bits; ++b) {
        std::vector<std::string> nxt;
        for (std::size_t i = 0; i + 1 < cur.size(); i += 2) {
            std::string out = "t" + num(id);
            w.records.push_back({"cmux",
                                 "m" + num(id),
                                 {"s" + num(b), cur[i], cur[i + 1]},
                                 {out},
                                 {{"n", 4096}, {"glevels", 3}}});
            nxt.push_back(out);
            ++id;
        }
        cur = nxt;
    }
    return w;
}

// Database-style predicate evaluation: two layers of comparator gates
// over packed LWE wires next to a strand of leveled arithmetic doing
// the aggregation. Keeps the gate pipeline and the big multiplier lanes
// busy at the same time.
Workload make_he3db() {
    Workload w;
    w.name = "he3db_style";
    w.description =
        "database predicate mix: two gate layers plus a leveled "
        "aggregation strand";
    for (int i = 0; i < 16; ++i) w.resident.push_back("w" + num(i));
    w.resident.push_back("u");
    w.resident.push_back("v");
    for (int i = 0; i < 8; ++i)
        w.records.push_back({"homgate",
                             "g" + num(i),
                             {"w" + num(2 * i), "w" + num(2 * i + 1)},
                             {"gb" + num(i)},
                             {{"n", 512}, {"iters", 512}, {"ks_digits", 7}}});
    for (int i = 0; i < 4; ++i)
        w.records.push_back({"homgate",
                             "g" + num(8 + i),
                             {"gb" + num(2 * i), "gb" + num(2 * i + 1)},
                             {"gc" + num(i)},
                             {{"n", 512}, {"iters", 512}, {"ks_digits", 7}}});
    for (int i = 0; i < 4; ++i) {
        w.records.push_back({"cmult",
                             "c" + num(i),
                             {"u", "v"},
                             {"cm" + num(i)},
                             {{"n", 4096}, {"limbs", 2}}});
        w.records.push_back({"hadd",
                             "h" + num(i),
                             {"cm" + num(i), "u"},
                             {"ag" + num(i)},
                             {{"n", 4096}, {"limbs", 2}}});
    }
    return w;
}

// Small dense network inference: two rotate-and-sum linear layers with
// a squaring activation between them, all on one modest ring.
Workload make_lola() {
    Workload w;
    w.name = "lola_mnist_style";
    w.description =
        "small dense network inference: two rotate-and-sum layers with "
        "a squaring activation";
    w.resident = {"x", "k0", "k1", "b0", "b1"};
    auto arith = [&](const std::string& op, const std::string& id,
                     std::vector<std::string> in, const std::string& out) {
        w.records.push_back({op, id, std::move(in), {out},
                             {{"n", 2048}, {"limbs", 2}}});
    };
    arith("pmult", "p0", {"x", "k0"}, "l0");
    arith("hrot", "r0", {"l0"}, "l0r");
    arith("hadd", "a0", {"l0", "l0r"}, "l0s");
    arith("hadd", "a1", {"l0s", "b0"}, "l0b");
    arith("cmult", "sq", {"l0b", "l0b"}, "act");
    arith("pmult", "p1", {"act", "k1"}, "l1");
    arith("hrot", "r1", {"l1"}, "l1r");
    arith("hadd", "a2", {"l1", "l1r"}, "l1s");
    arith("hadd", "a3", {"l1s", "b1"}, "out");
    return w;
}

// Gate batch whose refreshed outputs are folded back into two ring
// ciphertexts, eight samples per fold.
Workload make_packed_bootstrap() {
    Workload w;
    w.name = "packed_bootstrap_style";
    w.description =
        "sixteen refreshed gates folded into two ring ciphertexts";
    for (int i = 0; i < 16; ++i) w.resident.push_back("w" + num(i));
    for (int i = 0; i < 16; ++i)
        w.records.push_back({"homgate",
                             "g" + num(i),
                             {"w" + num(i), "w" + num((i + 1) % 16)},
                             {"gb" + num(i)},
                             {{"n", 512}, {"iters", 512}, {"ks_digits", 7}}});
    for (int k = 0; k < 2; ++k) {
        std::vector<std::string> in;
        for (int i = 0; i < 8; ++i) in.push_back("gb" + num(8 * k + i));
        w.records.push_back({"pack",
                             "pk" + num(k),
                             in,
                             {"pr" + num(k)},
                             {{"n", 2048}, {"ks_digits", 8}, {"batch", 8}}});
    }
    return w;
}

// Regression-training loop: each round multiplies the running weights
// into the data, folds partial sums with a rotation, masks, and
// accumulates back into the weights. Rounds are serially dependent.
Workload make_helr() {
    Workload w;
    w.name = "helr_style";
    w.description =
        "three serially dependent regression-training rounds on a wide "
        "ring";
    w.resident = {"x", "m", "wt0"};
    auto arith = [&](const std::string& op, const std::string& id,
                     std::vector<std::string> in, const std::string& out) {
        w.records.push_back({op, id, std::move(in), {out},
                             {{"n", 8192}, {"limbs", 4}}});
    };
    for (int i = 0; i < 3; ++i) {
        std::string wi = "wt" + num(i);
        std::string wn = "wt" + num(i + 1);
        arith("cmult", "c" + num(i), {wi, "x"}, "g" + num(i));
        arith("hrot", "r" + num(i), {"g" + num(i)}, "gr" + num(i));
        arith("hadd", "s" + num(i), {"g" + num(i), "gr" + num(i)},
              "gs" + num(i));
        arith("pmult", "p" + num(i), {"gs" + num(i)}, "gm" + num(i));
        arith("hadd", "u" + num(i), {wi, "gm" + num(i)}, wn);
    }
    return w;
}

// Wide independent arithmetic stream sized so the transform lanes stay
// nearly saturated while a measurable share of plain elementwise work
// rides alongside.
Workload make_ckks_mixed() {
    Workload w;
    w.name = "ckks_mixed_style";
    w.description =
        "independent wide-ring stream: eight full multiplies, two "
        "rotations, twelve adds, four pointwise multiplies";
    w.resident = {"u", "v"};
    auto arith = [&](const std::string& op, const std::string& id,
                     std::vector<std::string> in, const std::string& out) {
        w.records.push_back({op, id, std::move(in), {out},
                             {{"n", 8192}, {"limbs", 4}}});
    };
    for (int i = 0; i < 8; ++i)
        arith("cmult", "c" + num(i), {"u", "v"}, "cm" + num(i));
    for (int i = 0; i < 2; ++i)
        arith("hrot", "r" + num(i), {"u"}, "ro" + num(i));
    for (int i = 0; i < 12; ++i)
        arith("hadd", "h" + num(i), {"u", "v"}, "ha" + num(i));
    for (int i = 0; i < 4; ++i)
        arith("pmult", "p" + num(i), {"u"}, "pm" + num(i));
    return w;
}

}  // namespace

std::vector<std::string> workload_names() {
    return {"vsp_style",          "he3db_style",
            "lola_mnist_style",   "lola_mnist_zero",
            "packed_bootstrap_style", "helr_style",
            "ckks_mixed_style"};
}

Workload make_workload(const std::string& name) {
    if (name == "vsp_style") return make_vsp();
    if (name == "he3db_style") return make_he3db();
    if (name == "lola_mnist_style") return make_lola();
    if (name == "lola_mnist_zero") {
        Workload w;
        w.name = "lola_mnist_zero";
        w.description = "empty trace, measures fixed setup cost only";
        return w;
    }
    if (name == "packed_bootstrap_style") return make_packed_bootstrap();
    if (name == "helr_style") return make_helr();
    if (name == "ckks_mixed_style") return make_ckks_mixed();
    std::string valid;
    for (const auto& n : workload_names()) {
        if (!valid.empty()) valid += ", ";
        valid += n;
    }
    throw std::invalid_argument("unknown workload '" + name +
                                "', expected one of: " + valid);
}

}  // namespace apsim::sim
