// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "apsim/arch/routing.hpp"

namespace apsim::sched {

// One operator record of a workload trace. Traces are JSON lines, one
// record per line: {"op": "HomGate", "id": "g0", "inputs": [...],
// "outputs": [...], "params": {"n": 512}}. inputs, outputs and params
// may be omitted when empty.
struct TraceRecord {
    std::string op;
    std::string id;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::map<std::string, std::int64_t> params;
};

// Throws std::invalid_argument on malformed JSON, a missing op or id
// field, or an unrecognized params key. Blank lines are skipped.
std::vector<TraceRecord> parse_trace(std::istream& in);
std::vector<TraceRecord> parse_trace_file(const std::string& path);

// Writes records back out as JSON lines, one per record.
void dump_trace(std::ostream& out, const std::vector<TraceRecord>& records);

// Maps an operator name such as "HomGate" or "homgate" to its kind.
// Throws std::invalid_argument for unknown names.
arch::OpKind parse_op_name(const std::string& name);

// Builds the architectural descriptor for a record, starting from the
// defaults and overriding any dimension present in params. Recognized
// keys: n, limbs, glevels, iters, out_levels, ks_digits, batch, width.
arch::OpDescriptor descriptor_from_record(const TraceRecord& rec);

}  // namespace apsim::sched
