// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/arch/timing.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace apsim {
namespace arch {

namespace {

uint64_t ceil_div(uint64_t a, uint64_t b) { return (a + b - 1) / b; }

// Lebesgue measure of a union of half-open intervals.
uint64_t measure_union(std::vector<std::pair<uint64_t, uint64_t>>& iv) {
    if (iv.empty()) return 0;
    std::sort(iv.begin(), iv.end());
    uint64_t total = 0, lo = iv[0].first, hi = iv[0].second;
    for (size_t i = 1; i < iv.size(); ++i) {
        if (iv[i].first > hi) {
            total += hi - lo;
            lo = iv[i].first;
            hi = iv[i].second;
        } else {
            hi = std::max(hi, iv[i].second);
        }
    }
    return total + (hi - lo);
}

}  // namespace

std::vector<TimingSegment> stream_chain(const FuInventory& inv,
                                        RoutineId routine,
                                        std::span<const StagePass> chain,
                                        uint32_t op_width_bits,
                                        uint64_t start,
                                        uint64_t resident_elements) {
    const uint64_t word_bytes = op_width_bits <= 32 ? 4 : 8;
    if (resident_elements * word_bytes > inv.data_buffer_bytes)
        throw std::length_error(
            "stream_chain: working set exceeds the data buffer, tile first");

    struct Stage {
        const StagePass* pass;
        std::vector<uint32_t> pool;
        uint32_t depth;
        uint64_t stream;
    };
    std::vector<Stage> stages;
    uint64_t bottleneck = 0;
    for (const StagePass& p : chain) {
        if (p.elements == 0) continue;
        Stage st;
        st.pass = &p;
        st.pool = inv.units_of(routine, p.fu);
        if (st.pool.empty())
            throw std::invalid_argument(
                std::string("stream_chain: no ") + fu_kind_name(p.fu) +
                " unit on routine " + (routine == RoutineId::R1 ? "1" : "2"));
        uint64_t lanes = 0;
        uint32_t depth = 0;
        for (uint32_t u : st.pool) {
            lanes += inv.units[u].effective_lanes(op_width_bits);
            depth = std::max(depth, inv.units[u].pipeline_depth);
        }
        st.depth = depth;
        st.stream = ceil_div(p.elements, lanes);
        bottleneck = std::max(bottleneck, st.stream);
        stages.push_back(std::move(st));
    }

    std::vector<TimingSegment> out;
    uint64_t offset = 0;
    for (const Stage& st : stages) {
        SegLabel label =
            st.pass->fu == FuKind::ntt ? SegLabel::ntt : SegLabel::non_ntt;
        for (uint32_t u : st.pool)
            out.push_back({u, start + offset,
                           start + offset + st.depth + bottleneck, label,
                           routine});
        offset += st.depth;
    }
    return out;
}

std::vector<TimingSegment> pipeline_latency(const OpDescriptor& op,
                                            const FuInventory& inv,
                                            uint64_t start) {
    inv.validate();
    std::vector<PhaseSpec> phases = route_operation(op, inv.r2_offload);
    std::vector<TimingSegment> out;
    uint64_t cursor = start;
    size_t i = 0;
    while (i < phases.size()) {
        uint32_t group = phases[i].group;
        uint64_t group_end = cursor;
        for (; i < phases.size() && phases[i].group == group; ++i) {
            auto segs = stream_chain(inv, phases[i].routine, phases[i].chain,
                                     op.width, cursor,
                                     phases[i].resident_elements);
            for (const TimingSegment& s : segs)
                group_end = std::max(group_end, s.end);
            out.insert(out.end(), segs.begin(), segs.end());
        }
        cursor = group_end;
    }
    return out;
}

double UtilizationQuantities::ntt_utilization() const {
    if (r1_busy == 0)
        throw std::domain_error("utilization undefined: no busy cycles");
    return static_cast<double>(r1_busy - r1_nonntt) /
           static_cast<double>(r1_busy);
}

double UtilizationQuantities::ntt_utilization_dual() const {
    if (union_busy == 0)
        throw std::domain_error("utilization undefined: no busy cycles");
    return static_cast<double>(r1_busy - r1_nonntt) /
           static_cast<double>(union_busy);
}

UtilizationQuantities utilization_metrics(
    std::span<const TimingSegment> segs) {
    std::vector<std::pair<uint64_t, uint64_t>> r1, r1_ntt, r2, both;
    for (const TimingSegment& s : segs) {
        both.emplace_back(s.start, s.end);
        if (s.routine == RoutineId::R1) {
            r1.emplace_back(s.start, s.end);
            if (s.label == SegLabel::ntt) r1_ntt.emplace_back(s.start, s.end);
        } else {
            r2.emplace_back(s.start, s.end);
        }
    }
    UtilizationQuantities q;
    q.r1_busy = measure_union(r1);
    // transform windows are routine-1 windows themselves, so busy time
    // without a transform is the difference of the two union measures
    q.r1_nonntt = q.r1_busy - measure_union(r1_ntt);
    q.r2_busy = measure_union(r2);
    q.union_busy = measure_union(both);
    return q;
}

uint64_t unit_busy_cycles(std::span<const TimingSegment> segs, uint32_t fu) {
    uint64_t total = 0;
    for (const TimingSegment& s : segs)
        if (s.fu == fu) total += s.end - s.start;
    return total;
}

}  // namespace arch
}  // namespace apsim
