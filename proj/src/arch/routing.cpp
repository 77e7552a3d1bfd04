// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/arch/routing.hpp"

#include <stdexcept>

namespace apsim {
namespace arch {

const char* op_kind_name(OpKind k) {
    switch (k) {
        case OpKind::hadd: return "HAdd";
        case OpKind::pmult: return "PMult";
        case OpKind::cmult: return "CMult";
        case OpKind::cmux: return "CMUX";
        case OpKind::hrot: return "HRot";
        case OpKind::homgate: return "HomGate";
        case OpKind::cboot: return "CBoot";
        case OpKind::pubks: return "PubKS";
        case OpKind::privks: return "PrivKS";
        case OpKind::pack: return "Pack";
    }
    return "?";
}

namespace {

// Split a lane-parallel stream between the routines. The second routine
// takes floor(f * elements); the rest, always at least half, stays on the
// first. A zero slice collapses to a single phase.
void split_stream(std::vector<PhaseSpec>& out, FuKind fu, uint64_t elements,
                  uint64_t resident, double f, const char* name) {
    uint64_t to_r2 = static_cast<uint64_t>(f * static_cast<double>(elements));
    uint64_t to_r1 = elements - to_r2;
    if (to_r1 > 0)
        out.push_back({RoutineId::R1, 0, {{fu, to_r1}}, resident, name});
    if (to_r2 > 0)
        out.push_back({RoutineId::R2, 0, {{fu, to_r2}}, resident, name});
}

// One rotate-select sweep: permute, decompose, transform the digit rows and
// the two running sums, multiply against the cached key rows, accumulate.
PhaseSpec rotate_select_phase(const OpDescriptor& op, uint64_t per,
                              uint32_t group) {
    const uint64_t n = op.n;
    const uint64_t g = op.glevels;
    PhaseSpec ph;
    ph.routine = RoutineId::R1;
    ph.group = group;
    ph.chain = {{FuKind::automorph, per * 2 * n},
                {FuKind::decomp, per * 2 * n},
                {FuKind::ntt, per * (2 * g + 2) * n},
                {FuKind::mmult, per * 4 * g * n},
                {FuKind::madd, per * 4 * g * n}};
    ph.resident_elements = (4 + 4 * g) * n;  // one iteration in flight
    ph.name = "rotate-select";
    return ph;
}

}  // namespace

std::vector<PhaseSpec> route_operation(const OpDescriptor& op,
                                       double r2_offload) {
    if (r2_offload < 0.0 || r2_offload > 0.5)
        throw std::domain_error("route_operation: offload outside [0, 0.5]");
    const uint64_t n = op.n;
    const uint64_t l = op.limbs;
    const uint64_t g = op.glevels;
    const uint64_t t = op.ks_digits;
    const uint64_t b = op.batch;
    const uint64_t nl = n * l;
    std::vector<PhaseSpec> out;

    switch (op.kind) {
        case OpKind::hadd:
            split_stream(out, FuKind::madd, b * 2 * nl, 6 * nl, r2_offload,
                         "add");
            break;
        case OpKind::pmult:
            split_stream(out, FuKind::mmult, b * 2 * nl, 6 * nl, r2_offload,
                         "pointwise-mult");
            break;
        case OpKind::cmux:
            out.push_back({RoutineId::R1,
                           0,
                           {{FuKind::decomp, b * 2 * nl},
                            {FuKind::ntt, b * (2 * g + 2) * nl},
                            {FuKind::mmult, b * 4 * g * nl},
                            {FuKind::madd, b * 4 * g * nl}},
                           (6 + 4 * g) * nl,
                           "select"});
            break;
        case OpKind::cmult: {
            // Tensor product and relinearization ladder as one streaming
            // pass: digit products, the transforms that move them between
            // domains, and the folds all stay resident in the chain, so the
            // transform stage is lit for the whole pass. Element totals:
            // (6+3l) multiplies and (5+3l) adds per coefficient around 4
            // transform traversals.
            const uint64_t res = (8 + 2 * l) * nl;
            out.push_back({RoutineId::R1, 0,
                           {{FuKind::mmult, b * (6 + 3 * l) * nl},
                            {FuKind::ntt, b * 4 * nl},
                            {FuKind::madd, b * (5 + 3 * l) * nl}},
                           res, "tensor-relin"});
            break;
        }
        case OpKind::hrot:
            out.push_back({RoutineId::R1,
                           0,
                           {{FuKind::automorph, b * 2 * nl},
                            {FuKind::decomp, b * nl},
                            {FuKind::ntt, b * (l + 2) * nl},
                            {FuKind::mmult, b * 2 * nl * l},
                            {FuKind::madd, b * 2 * nl * l}},
                           (6 + 2 * l) * nl,
                           "rotate"});
            break;
        case OpKind::homgate:
            out.push_back(rotate_select_phase(op, b * op.iters, 0));
            break;
        case OpKind::cboot:
            // one rotate-select sweep per output digit row; the in-memory
            // key switches between sweeps are accounted by the memory model
            for (uint32_t j = 0; j < op.out_levels; ++j)
                out.push_back(rotate_select_phase(op, b * op.iters, j));
            break;
        case OpKind::pubks:
        case OpKind::privks:
            break;  // executes inside the memory ranks, no near-memory pass
        case OpKind::pack:
            // batch counts the samples folded into one ring word
            out.push_back({RoutineId::R1,
                           0,
                           {{FuKind::decomp, b * (n + 1)},
                            {FuKind::mmult, b * t * 2 * n},
                            {FuKind::madd, b * t * 2 * n}},
                           b * (n + 1) + (2 + 2 * t) * n,
                           "pack"});
            break;
        default:
            throw std::invalid_argument("route_operation: unknown operator");
    }
    return out;
}

std::vector<std::vector<PhaseSpec>> route_operations(
    std::span<const OpDescriptor> ops, double r2_offload) {
    std::vector<std::vector<PhaseSpec>> out;
    out.reserve(ops.size());
    for (const OpDescriptor& op : ops)
        out.push_back(route_operation(op, r2_offload));
    return out;
}

}  // namespace arch
}  // namespace apsim
