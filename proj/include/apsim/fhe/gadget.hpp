// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "apsim/fhe/params.hpp"

namespace apsim {
namespace fhe {

// Balanced signed digits of a coefficient vector. Row j (0-based) holds the
// digits of weight 2^(width - (j+1)*base_log), i.e. most significant first,
// each digit in [-base/2, base/2].
struct DecomposedBits {
    uint32_t base_log = 0;
    uint32_t levels = 0;
    uint32_t width = 0;
    size_t count = 0;                 // coefficients per row
    std::vector<int64_t> digits;      // levels * count, row-major

    std::span<const int64_t> row(uint32_t j) const {
        return {digits.data() + static_cast<size_t>(j) * count, count};
    }
};

// Round-half-up decomposition dropping width - base_log*levels low bits.
// Values are residues mod 2^width. Throws std::invalid_argument on bad
// gadget parameters (base_log*levels > width, zero levels, width > 64).
DecomposedBits gadget_decompose(std::span<const uint64_t> values,
                                uint32_t base_log, uint32_t levels,
                                uint32_t width);

// Sum of digit*weight mod 2^width for one coefficient index.
uint64_t gadget_recompose(const DecomposedBits& d, size_t index);

// Digit row as residues mod p (p arbitrary, e.g. a CRT helper prime).
Poly digits_to_residues(std::span<const int64_t> row, uint64_t p);

}  // namespace fhe
}  // namespace apsim
