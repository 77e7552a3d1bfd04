// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace apsim {
namespace arch {

enum class FuKind { ntt, mmult, madd, automorph, decomp, regfile };

// Arithmetic units run either as one 64-bit lane or as two independent
// 32-bit lanes sharing the same datapath.
enum class MultiplierMode { one64, two32 };

enum class RoutineId { R1, R2 };

const char* fu_kind_name(FuKind k);

struct FuInstance {
    FuKind kind = FuKind::madd;
    uint32_t pipeline_depth = 1;  // stages, = cycles of fill
    uint32_t lanes = 1;           // elements accepted per cycle at full width
    MultiplierMode mode = MultiplierMode::one64;
    uint64_t clock_hz = 1'000'000'000;

    // Lanes available to a stream of the given operand width. two32 doubles
    // the count for operands of 32 bits or less; wider operands pair the two
    // half lanes back into one, so the rate falls back to the one64 figure.
    uint32_t effective_lanes(uint32_t op_width_bits) const;

    // Depth sanity per unit kind (deep transform pipes, shallow adders).
    void validate() const;
};

// One NMC module's worth of units plus its local storage and the routing
// policy knobs. Units are split between the two pipeline routines up front;
// routine 2 is the transform-free side and never owns an ntt unit.
struct FuInventory {
    std::vector<FuInstance> units;
    std::vector<RoutineId> routine_of;  // parallel to units

    uint64_t regfile_bytes = 8ull << 20;      // central register file
    uint64_t regfile_aux_bytes = 1ull << 20;  // auxiliary bank
    uint64_t data_buffer_bytes = 24ull << 20;

    // Fraction of an add/pointwise-multiply stream handed to routine 2.
    // At least half stays on routine 1, so the valid range is [0, 0.5].
    double r2_offload = 0.5;

    // When set, routine 2 may borrow idle routine-1 multiplier lanes; the
    // engine grants them with routine-1 priority. Off by default.
    bool mmult_shared_pool = false;

    std::vector<uint32_t> units_of(RoutineId r, FuKind k) const;
    void validate() const;
};

// Table-like default: four 64-lane transform units, two automorphism and two
// decomposition units, and a 256-lane multiplier/adder pair per routine.
FuInventory default_inventory();

// Returns the unit reconfigured to the requested lane mode. Only the
// arithmetic kinds (mmult, madd, ntt) have the dual-lane datapath; anything
// else is a configuration error. Re-applying the current mode is a no-op.
FuInstance configure_fu_bitwidth(const FuInstance& fu, MultiplierMode mode);

// Cycles lost when switching an FU to a different lane mode: one pipeline
// flush. Zero when the mode already matches.
uint32_t mode_switch_cost(const FuInstance& fu, MultiplierMode next);

}  // namespace arch
}  // namespace apsim
