// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "apsim/fhe/ciphertext.hpp"

namespace apsim {
namespace fhe {

// Ciphertext container: "APCH" magic, u16 version, u16 kind, dimensions,
// then little-endian coefficient words (4 bytes for widths <= 32, else 8).
constexpr char kMagic[4] = {'A', 'P', 'C', 'H'};
constexpr uint16_t kFormatVersion = 1;

std::vector<uint8_t> serialize_lwe(const LweCiphertext& ct);
LweCiphertext deserialize_lwe(const std::vector<uint8_t>& bytes);

std::vector<uint8_t> serialize_rlwe(const RlweCiphertext& ct);
RlweCiphertext deserialize_rlwe(const std::vector<uint8_t>& bytes);

void write_file(const std::string& path, const std::vector<uint8_t>& bytes);
std::vector<uint8_t> read_file(const std::string& path);

}  // namespace fhe
}  // namespace apsim
