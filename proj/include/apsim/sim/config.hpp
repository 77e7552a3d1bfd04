// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "apsim/sim/engine.hpp"

namespace apsim {
namespace sim {

// Everything a benchmark run reads from its config file. The simulator
// knobs live in `sim`; the rest parameterizes the synthetic traces and the
// key-switch reduction figures.
struct RunSettings {
    SimConfig sim;

    // Aggregation ring used when several small ciphertexts fold into one
    // ring pair for a hop.
    std::uint32_t ring_degree = 2048;
    std::uint32_t ring_width = 32;

    // Reference key-switch operating points and the key material they
    // would otherwise ship, for the reduction-factor figures.
    std::uint32_t pub_ks_n = 1024;
    std::uint32_t pub_ks_t = 21;
    std::uint64_t pub_key_bytes = 82837504;  // 79 MiB
    std::uint32_t priv_ks_n = 2047;
    std::uint32_t priv_ks_t = 4;
    std::uint32_t priv_ks_p = 6;
    std::uint64_t priv_key_bytes = 1932735283;  // 1.8 GiB

    // Lane mode applied to the arithmetic units (one64 or two32).
    arch::MultiplierMode mode = arch::MultiplierMode::one64;
};

// Strict INI reader. Sections [ring], [fu], [dimm], [scheduler]; '#' and
// ';' start comments. Unknown sections or keys, duplicate keys, malformed
// lines, and out-of-range values all throw std::invalid_argument naming
// the offending line.
RunSettings parse_config(std::istream& in);

// File wrapper; throws std::runtime_error when the file cannot be opened.
RunSettings parse_config_file(const std::string& path);

// Canonical INI dump of every setting; parse_config(dump_config(s))
// round-trips.
std::string dump_config(const RunSettings& s);

// Public/private reduction factors at the configured operating points.
double pub_reduction_factor(const RunSettings& s);
double priv_reduction_factor(const RunSettings& s);

}  // namespace sim
}  // namespace apsim
