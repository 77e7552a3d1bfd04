// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "apsim/sched/graph.hpp"

namespace apsim::sim {

// Result of running a trace's ciphertext payloads for real.
struct FunctionalOutcome {
    std::uint64_t digest = 0;      // FNV-1a over every produced ciphertext
    std::size_t produced = 0;      // values computed
    std::size_t gate_checks = 0;   // NAND gates with a known truth value
    std::size_t gate_failures = 0;
    std::size_t switch_checks = 0;  // key switches checked for phase drift
    std::size_t switch_failures = 0;
};

// Evaluates every node of the graph with the cryptographic kernels, in
// topological order, using bundled desk-scale parameter lanes (binary
// gates at n=512/N=512, bit bootstraps at n=400/N=2048, ring arithmetic
// at N=4096 with two limbs). Ciphertext inputs declared resident are
// synthesized deterministically from the seed. The outcome is a pure
// function of (trace, seed): DIMM placement and timing never touch it.
//
// Gate nodes with tracked plaintext bits are decrypted and checked
// against the NAND truth table; key-switch nodes are checked for phase
// preservation. Structural misuse (an operator fed the wrong ciphertext
// kind or ring) throws std::invalid_argument naming the record.
FunctionalOutcome evaluate_trace(const sched::TaskGraph& graph,
                                 std::uint64_t seed);

}  // namespace apsim::sim
