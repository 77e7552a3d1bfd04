// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/fhe/gadget.hpp"

#include <stdexcept>

namespace apsim {
namespace fhe {

DecomposedBits gadget_decompose(std::span<const uint64_t> values,
                                uint32_t base_log, uint32_t levels,
                                uint32_t width) {
    GadgetParams gp{base_log, levels, width};
    gp.validate();
    const uint32_t keep = base_log * levels;
    const uint32_t shift = width - keep;
    const uint64_t base = 1ull << base_log;
    const uint64_t half_base = base >> 1;
    const uint64_t digit_mask = base - 1;

    DecomposedBits out;
    out.base_log = base_log;
    out.levels = levels;
    out.width = width;
    out.count = values.size();
    out.digits.assign(static_cast<size_t>(levels) * values.size(), 0);

    for (size_t i = 0; i < values.size(); ++i) {
        uint64_t c = (width == 64) ? values[i]
                                   : (values[i] & ((1ull << width) - 1));
        // round half up on the dropped tail; the wrap at 2^width is a
        // multiple of the modulus and can be discarded
        uint64_t u = c;
        if (shift > 0) u = (c + (1ull << (shift - 1))) >> shift;
        if (keep < 64) u &= (1ull << keep) - 1;
        // balanced digits, least significant first, with carry
        for (uint32_t j = levels; j-- > 0;) {
            int64_t d = static_cast<int64_t>(u & digit_mask);
            u >>= base_log;
            if (static_cast<uint64_t>(d) > half_base) {
                d -= static_cast<int64_t>(base);
                ++u;
            }
            out.digits[static_cast<size_t>(j) * values.size() + i] = d;
        }
        // any remaining carry has weight 2^width = 0 (mod q)
    }
    return out;
}

uint64_t gadget_recompose(const DecomposedBits& d, size_t index) {
    if (index >= d.count) throw std::out_of_range("gadget_recompose: index");
    uint64_t acc = 0;
    for (uint32_t j = 0; j < d.levels; ++j) {
        uint32_t w = d.width - (j + 1) * d.base_log;
        int64_t dig = d.digits[static_cast<size_t>(j) * d.count + index];
        uint64_t term = static_cast<uint64_t>(dig) << w;  // two's complement wrap
        acc += term;
    }
    if (d.width < 64) acc &= (1ull << d.width) - 1;
    return acc;
}

Poly digits_to_residues(std::span<const int64_t> row, uint64_t p) {
    Poly out(row.size());
    for (size_t i = 0; i < row.size(); ++i) {
        int64_t d = row[i];
        if (d >= 0) {
            out[i] = static_cast<uint64_t>(d) % p;
        } else {
            uint64_t r = static_cast<uint64_t>(-d) % p;
            out[i] = r == 0 ? 0 : p - r;
        }
    }
    return out;
}

}  // namespace fhe
}  // namespace apsim
