// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "apsim/sched/trace.hpp"

namespace apsim::sim {

// A bundled benchmark trace plus the ciphertexts it expects to find
// preloaded in memory (inputs, evaluation keys encoded as selector or
// weight ciphertexts, lookup entries).
struct Workload {
    std::string name;
    std::string description;
    std::vector<sched::TraceRecord> records;
    std::vector<std::string> resident;
};

// Names of all bundled workloads, in a fixed order.
std::vector<std::string> workload_names();

// Builds a bundled workload by name. Throws std::invalid_argument for
// an unknown name; the message lists the valid ones.
Workload make_workload(const std::string& name);

}  // namespace apsim::sim
