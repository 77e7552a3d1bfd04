// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "apsim/arch/fu.hpp"

namespace apsim {
namespace arch {

enum class OpKind {
    hadd,
    pmult,
    cmult,
    cmux,
    hrot,
    homgate,
    cboot,
    pubks,
    privks,
    pack
};

const char* op_kind_name(OpKind k);

// Shape parameters of one operator instance. Unused fields are ignored by
// the ops that do not need them (e.g. iters only matters for the bootstrap
// kinds).
struct OpDescriptor {
    OpKind kind = OpKind::hadd;
    uint32_t n = 1024;        // polynomial degree
    uint32_t limbs = 1;       // residue limbs per polynomial
    uint32_t glevels = 3;     // gadget rows per component (selector ops)
    uint32_t iters = 0;       // rotate-select iterations (mask dimension)
    uint32_t out_levels = 2;  // output gadget rows of a bit bootstrap
    uint32_t ks_digits = 4;   // key-switch digit count
    uint32_t batch = 1;       // independent instances coalesced in one stream
    uint32_t width = 32;      // operand bits
};

struct StagePass {
    FuKind fu;
    uint64_t elements;  // total elements streamed through this stage
};

// One streaming pass through a chain of FU stages. Phases sharing a group
// id start together (they run on disjoint routines); groups execute in
// ascending order, each starting when the previous group drains.
struct PhaseSpec {
    RoutineId routine = RoutineId::R1;
    uint32_t group = 0;
    std::vector<StagePass> chain;
    uint64_t resident_elements = 0;  // live working set, for capacity checks
    const char* name = "";
};

// Decompose one operator into its pipeline passes. Add and pointwise
// multiply streams are split between the routines according to r2_offload
// (at most half may leave routine 1); every transform-bearing pass stays on
// routine 1. Key switches execute inside the memory ranks and produce no
// near-memory passes. Throws std::invalid_argument for an unknown kind and
// std::domain_error for an offload fraction outside [0, 0.5].
std::vector<PhaseSpec> route_operation(const OpDescriptor& op,
                                       double r2_offload);

// Batched form; an empty input yields an empty assignment.
std::vector<std::vector<PhaseSpec>> route_operations(
    std::span<const OpDescriptor> ops, double r2_offload);

}  // namespace arch
}  // namespace apsim
