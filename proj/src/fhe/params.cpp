// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/fhe/params.hpp"

#include <stdexcept>

#include "apsim/fhe/primes.hpp"

namespace apsim {
namespace fhe {

uint64_t RingParams::modulus() const {
    if (moduli.size() != 1)
        throw std::logic_error("RingParams::modulus: ring has multiple limbs");
    return moduli[0];
}

bool RingParams::ntt_friendly() const {
    for (uint64_t q : moduli) {
        if ((q & (q - 1)) == 0) return false;  // power-of-two limb
        if ((q - 1) % (2ull * n) != 0) return false;
    }
    return true;
}

void RingParams::validate() const {
    if (n < 2 || (n & (n - 1)) != 0)
        throw std::invalid_argument("RingParams: degree must be a power of two >= 2");
    if (moduli.empty())
        throw std::invalid_argument("RingParams: no moduli");
    for (uint64_t q : moduli)
        if (q < 2) throw std::invalid_argument("RingParams: modulus < 2");
}

void LweParams::validate() const {
    if (n == 0) throw std::invalid_argument("LweParams: dimension 0");
    if (width != 32 && width != 64)
        throw std::invalid_argument("LweParams: width must be 32 or 64");
    if (width < 64 && q != (1ull << width))
        throw std::invalid_argument("LweParams: q/width mismatch");
}

void GadgetParams::validate() const {
    if (base_log == 0 || base_log > 32)
        throw std::invalid_argument("GadgetParams: base_log out of range");
    if (levels == 0) throw std::invalid_argument("GadgetParams: levels 0");
    if (width == 0 || width > 64)
        throw std::invalid_argument("GadgetParams: width out of range");
    if (static_cast<uint64_t>(base_log) * levels > width)
        throw std::invalid_argument("GadgetParams: digits exceed modulus width");
}

BootstrapParams make_bootstrap_toy() {
    BootstrapParams p;
    p.lwe = LweParams{512, 1ull << 32, 32};
    p.ring = RingParams{512, {1ull << 32}};
    p.rgsw = GadgetParams{7, 3, 32};
    p.ks_base_log = 4;
    p.ks_levels = 7;
    p.noise_lwe = 16.0;   // fresh LWE sigma, ~2^4 on a 2^32 torus
    p.noise_bk = 4.0;
    p.noise_ks = 4.0;
    return p;
}

BootstrapParams make_bootstrap_cb_toy() {
    // circuit-bootstrap lane: wider ring so extracted samples match the
    // lookup-tree ring, smaller mask dimension to keep rotations cheap
    BootstrapParams p;
    p.lwe = LweParams{400, 1ull << 32, 32};
    p.ring = RingParams{2048, {1ull << 32}};
    p.rgsw = GadgetParams{8, 3, 32};
    p.ks_base_log = 4;
    p.ks_levels = 7;
    p.noise_lwe = 16.0;
    p.noise_bk = 4.0;
    p.noise_ks = 4.0;
    return p;
}

CkksParams make_ckks_toy() {
    CkksParams p;
    p.ring.n = 4096;
    p.ring.moduli = find_ntt_primes(31, 4096, 2);
    p.relin = GadgetParams{31, 1, 31};  // one digit per RNS limb
    p.noise = 3.2;
    return p;
}

}  // namespace fhe
}  // namespace apsim
