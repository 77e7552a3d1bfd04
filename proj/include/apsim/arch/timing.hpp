// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "apsim/arch/fu.hpp"
#include "apsim/arch/routing.hpp"

namespace apsim {
namespace arch {

enum class SegLabel { ntt, non_ntt };

// Busy window of one physical unit. Windows on the same unit never overlap.
struct TimingSegment {
    uint32_t fu = 0;  // index into FuInventory::units
    uint64_t start = 0;
    uint64_t end = 0;  // exclusive; always > start
    SegLabel label = SegLabel::non_ntt;
    RoutineId routine = RoutineId::R1;
};

// Stream `elements` through the given FU chain of one routine starting at
// `start`. Stage k begins filling once stage k-1 has produced its first
// element, so the last element leaves at start + sum(depths) + S where S is
// the bottleneck streaming time max_k ceil(elements_k / pooled lanes_k).
// Every unit of a pooled stage gets its own segment over the same window.
// Zero-element chains produce no segments. Throws std::length_error when
// the live working set does not fit the data buffer.
std::vector<TimingSegment> stream_chain(const FuInventory& inv,
                                        RoutineId routine,
                                        std::span<const StagePass> chain,
                                        uint32_t op_width_bits,
                                        uint64_t start,
                                        uint64_t resident_elements = 0);

// Route one operator and lay its phases onto the inventory, returning the
// per-unit busy segments. Phase groups run back to back; phases inside a
// group start together on their separate routines.
std::vector<TimingSegment> pipeline_latency(const OpDescriptor& op,
                                            const FuInventory& inv,
                                            uint64_t start = 0);

// Interval-union busy measures of a segment set, the raw material of the
// transform-utilization figures. All durations are in cycles.
struct UtilizationQuantities {
    uint64_t r1_busy = 0;     // union measure of routine-1 windows
    uint64_t r1_nonntt = 0;   // routine-1 busy time with no transform active
    uint64_t r2_busy = 0;     // union measure of routine-2 windows
    uint64_t union_busy = 0;  // both routines together

    // Transform utilization seen by a single-routine execution: the share
    // of its run time with a transform unit active. Throws std::domain_error
    // when there is no busy time at all.
    double ntt_utilization() const;

    // Dual-routine view: transform-active time of routine 1 over the joint
    // busy window of both routines. Offloading shrinks the denominator, so
    // this is the figure the second routine improves.
    double ntt_utilization_dual() const;
};

UtilizationQuantities utilization_metrics(std::span<const TimingSegment> segs);

// Total busy cycles of one unit (sum of its segment lengths; they never
// overlap, so no union is needed).
uint64_t unit_busy_cycles(std::span<const TimingSegment> segs, uint32_t fu);

}  // namespace arch
}  // namespace apsim
