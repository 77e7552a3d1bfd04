// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/arch/fu.hpp"

#include <stdexcept>

namespace apsim {
namespace arch {

const char* fu_kind_name(FuKind k) {
    switch (k) {
        case FuKind::ntt: return "ntt";
        case FuKind::mmult: return "mmult";
        case FuKind::madd: return "madd";
        case FuKind::automorph: return "automorph";
        case FuKind::decomp: return "decomp";
        case FuKind::regfile: return "regfile";
    }
    return "?";
}

uint32_t FuInstance::effective_lanes(uint32_t op_width_bits) const {
    if (mode == MultiplierMode::two32 && op_width_bits <= 32) return 2 * lanes;
    return lanes;
}

void FuInstance::validate() const {
    if (lanes == 0) throw std::invalid_argument("FuInstance: zero lanes");
    if (clock_hz == 0) throw std::invalid_argument("FuInstance: zero clock");
    switch (kind) {
        case FuKind::ntt:
            if (pipeline_depth < 150 || pipeline_depth > 250)
                throw std::invalid_argument(
                    "FuInstance: ntt depth outside [150, 250]");
            break;
        case FuKind::madd:
            if (pipeline_depth == 0 || pipeline_depth > 3)
                throw std::invalid_argument("FuInstance: madd depth outside [1, 3]");
            break;
        case FuKind::mmult:
            if (pipeline_depth == 0 || pipeline_depth > 5)
                throw std::invalid_argument(
                    "FuInstance: mmult depth outside [1, 5]");
            break;
        case FuKind::automorph:
            // a permutation network over 128 lanes needs at least 63 stages
            if (lanes >= 128 && pipeline_depth < 63)
                throw std::invalid_argument(
                    "FuInstance: automorph depth below the 128-lane minimum");
            if (pipeline_depth == 0)
                throw std::invalid_argument("FuInstance: zero depth");
            break;
        case FuKind::decomp:
        case FuKind::regfile:
            if (pipeline_depth == 0)
                throw std::invalid_argument("FuInstance: zero depth");
            break;
    }
}

std::vector<uint32_t> FuInventory::units_of(RoutineId r, FuKind k) const {
    std::vector<uint32_t> out;
    for (uint32_t i = 0; i < units.size(); ++i)
        if (routine_of[i] == r && units[i].kind == k) out.push_back(i);
    return out;
}

void FuInventory::validate() const {
    if (units.size() != routine_of.size())
        throw std::invalid_argument("FuInventory: routine table size mismatch");
    for (uint32_t i = 0; i < units.size(); ++i) {
        units[i].validate();
        if (routine_of[i] == RoutineId::R2 && units[i].kind == FuKind::ntt)
            throw std::invalid_argument(
                "FuInventory: routine 2 must stay transform-free");
    }
    if (r2_offload < 0.0 || r2_offload > 0.5)
        throw std::domain_error("FuInventory: r2_offload outside [0, 0.5]");
    if (regfile_bytes == 0 || data_buffer_bytes == 0)
        throw std::invalid_argument("FuInventory: zero storage capacity");
}

FuInventory default_inventory() {
    FuInventory inv;
    auto add = [&](FuKind k, uint32_t depth, uint32_t lanes, RoutineId r) {
        FuInstance fu;
        fu.kind = k;
        fu.pipeline_depth = depth;
        fu.lanes = lanes;
        inv.units.push_back(fu);
        inv.routine_of.push_back(r);
    };
    for (int i = 0; i < 4; ++i) add(FuKind::ntt, 200, 64, RoutineId::R1);
    for (int i = 0; i < 2; ++i) add(FuKind::automorph, 63, 128, RoutineId::R1);
    for (int i = 0; i < 2; ++i) add(FuKind::decomp, 2, 256, RoutineId::R1);
    add(FuKind::mmult, 5, 256, RoutineId::R1);
    add(FuKind::mmult, 5, 256, RoutineId::R2);
    add(FuKind::madd, 3, 256, RoutineId::R1);
    add(FuKind::madd, 3, 256, RoutineId::R2);
    add(FuKind::regfile, 1, 256, RoutineId::R1);
    inv.validate();
    return inv;
}

FuInstance configure_fu_bitwidth(const FuInstance& fu, MultiplierMode mode) {
    if (fu.kind != FuKind::mmult && fu.kind != FuKind::madd &&
        fu.kind != FuKind::ntt)
        throw std::invalid_argument(
            "configure_fu_bitwidth: unit has no dual-lane datapath");
    FuInstance out = fu;
    out.mode = mode;
    return out;
}

uint32_t mode_switch_cost(const FuInstance& fu, MultiplierMode next) {
    return fu.mode == next ? 0 : fu.pipeline_depth;
}

}  // namespace arch
}  // namespace apsim
