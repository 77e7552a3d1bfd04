// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/sim/config.hpp"

#include <cstdint>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "apsim/mem/inmem_ks.hpp"

namespace apsim {
namespace sim {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": " +
                                what);
}

std::uint64_t parse_u64(const std::string& v, std::size_t line) {
    try {
        std::size_t used = 0;
        unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        fail(line, "expected an unsigned integer, got '" + v + "'");
    }
}

double parse_f64(const std::string& v, std::size_t line) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        fail(line, "expected a number, got '" + v + "'");
    }
}

bool parse_bool(const std::string& v, std::size_t line) {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    fail(line, "expected 0/1/true/false, got '" + v + "'");
}

}  // namespace

RunSettings parse_config(std::istream& in) {
    RunSettings s;
    std::string section;
    std::set<std::string> seen;
    std::string raw;
    std::size_t lineno = 0;

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "ring" && section != "fu" && section != "dimm" &&
                section != "scheduler")
                fail(lineno, "unknown section [" + section + "]");
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) fail(lineno, "expected key = value");
        if (section.empty()) fail(lineno, "key '" + key + "' outside a section");
        if (!seen.insert(section + "." + key).second)
            fail(lineno, "duplicate key '" + key + "' in [" + section + "]");

        if (section == "ring") {
            if (key == "degree")
                s.ring_degree = static_cast<std::uint32_t>(parse_u64(val, lineno));
            else if (key == "width") {
                std::uint64_t w = parse_u64(val, lineno);
                if (w != 32 && w != 64) fail(lineno, "width must be 32 or 64");
                s.ring_width = static_cast<std::uint32_t>(w);
            } else if (key == "pub_ks_n")
                s.pub_ks_n = static_cast<std::uint32_t>(parse_u64(val, lineno));
            else if (key == "pub_ks_t")
                s.pub_ks_t = static_cast<std::uint32_t>(parse_u64(val, lineno));
            else if (key == "pub_key_bytes")
                s.pub_key_bytes = parse_u64(val, lineno);
            else if (key == "priv_ks_n")
                s.priv_ks_n = static_cast<std::uint32_t>(parse_u64(val, lineno));
            else if (key == "priv_ks_t")
                s.priv_ks_t = static_cast<std::uint32_t>(parse_u64(val, lineno));
            else if (key == "priv_ks_p")
                s.priv_ks_p = static_cast<std::uint32_t>(parse_u64(val, lineno));
            else if (key == "priv_key_bytes")
                s.priv_key_bytes = parse_u64(val, lineno);
            else
                fail(lineno, "unknown key '" + key + "' in [ring]");
        } else if (section == "fu") {
            if (key == "mode") {
                if (val == "one64")
                    s.mode = arch::MultiplierMode::one64;
                else if (val == "two32")
                    s.mode = arch::MultiplierMode::two32;
                else
                    fail(lineno, "mode must be one64 or two32");
            } else if (key == "r2_offload") {
                double f = parse_f64(val, lineno);
                if (f < 0.0 || f > 0.5)
                    fail(lineno, "r2_offload must lie in [0, 0.5]");
                s.sim.inv.r2_offload = f;
            } else if (key == "clock_hz") {
                std::uint64_t hz = parse_u64(val, lineno);
                if (hz == 0) fail(lineno, "clock_hz must be positive");
                for (arch::FuInstance& u : s.sim.inv.units) u.clock_hz = hz;
            } else if (key == "mmult_shared_pool")
                s.sim.inv.mmult_shared_pool = parse_bool(val, lineno);
            else
                fail(lineno, "unknown key '" + key + "' in [fu]");
        } else if (section == "dimm") {
            if (key == "count") {
                std::uint64_t c = parse_u64(val, lineno);
                if (c == 0) fail(lineno, "count must be at least 1");
                s.sim.n_dimms = static_cast<std::uint32_t>(c);
            } else if (key == "ranks")
                s.sim.dimm.ranks = static_cast<std::uint32_t>(parse_u64(val, lineno));
            else if (key == "chips_per_rank")
                s.sim.dimm.chips_per_rank =
                    static_cast<std::uint32_t>(parse_u64(val, lineno));
            else if (key == "banks_per_chip")
                s.sim.dimm.banks_per_chip =
                    static_cast<std::uint32_t>(parse_u64(val, lineno));
            else if (key == "page_bytes")
                s.sim.dimm.page_bytes =
                    static_cast<std::uint32_t>(parse_u64(val, lineno));
            else if (key == "transfer_mts")
                s.sim.dimm.transfer_mts =
                    static_cast<std::uint32_t>(parse_u64(val, lineno));
            else if (key == "clock_hz")
                s.sim.dimm.clock_hz = parse_f64(val, lineno);
            else if (key == "t_rcd")
                s.sim.dimm.t_rcd = static_cast<std::uint32_t>(parse_u64(val, lineno));
            else if (key == "t_cas")
                s.sim.dimm.t_cas = static_cast<std::uint32_t>(parse_u64(val, lineno));
            else if (key == "t_rp")
                s.sim.dimm.t_rp = static_cast<std::uint32_t>(parse_u64(val, lineno));
            else if (key == "capacity_bytes")
                s.sim.dimm.capacity_bytes = parse_u64(val, lineno);
            else if (key == "data_buffer_bytes")
                s.sim.dimm.data_buffer_bytes = parse_u64(val, lineno);
            else
                fail(lineno, "unknown key '" + key + "' in [dimm]");
        } else {  // scheduler
            if (key == "io_bytes_per_s") {
                double bw = parse_f64(val, lineno);
                if (bw <= 0.0) fail(lineno, "io_bytes_per_s must be positive");
                s.sim.io_bytes_per_s = bw;
            } else if (key == "seed")
                s.sim.seed = parse_u64(val, lineno);
            else if (key == "functional")
                s.sim.functional = parse_bool(val, lineno);
            else if (key == "check_invariants")
                s.sim.check_invariants = parse_bool(val, lineno);
            else
                fail(lineno, "unknown key '" + key + "' in [scheduler]");
        }
    }

    // Lane mode is applied to every dual-datapath unit once, after parsing.
    for (arch::FuInstance& u : s.sim.inv.units)
        if (u.kind == arch::FuKind::ntt || u.kind == arch::FuKind::mmult ||
            u.kind == arch::FuKind::madd)
            u = arch::configure_fu_bitwidth(u, s.mode);

    s.sim.dimm.validate();
    s.sim.inv.validate();
    return s;
}

RunSettings parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(in);
}

std::string dump_config(const RunSettings& s) {
    std::ostringstream out;
    out << "[ring]\n";
    out << "degree = " << s.ring_degree << "\n";
    out << "width = " << s.ring_width << "\n";
    out << "pub_ks_n = " << s.pub_ks_n << "\n";
    out << "pub_ks_t = " << s.pub_ks_t << "\n";
    out << "pub_key_bytes = " << s.pub_key_bytes << "\n";
    out << "priv_ks_n = " << s.priv_ks_n << "\n";
    out << "priv_ks_t = " << s.priv_ks_t << "\n";
    out << "priv_ks_p = " << s.priv_ks_p << "\n";
    out << "priv_key_bytes = " << s.priv_key_bytes << "\n";
    out << "\n[fu]\n";
    out << "mode = "
        << (s.mode == arch::MultiplierMode::two32 ? "two32" : "one64") << "\n";
    out << "r2_offload = " << s.sim.inv.r2_offload << "\n";
    out << "clock_hz = " << s.sim.inv.units.front().clock_hz << "\n";
    out << "mmult_shared_pool = " << (s.sim.inv.mmult_shared_pool ? 1 : 0)
        << "\n";
    out << "\n[dimm]\n";
    out << "count = " << s.sim.n_dimms << "\n";
    out << "ranks = " << s.sim.dimm.ranks << "\n";
    out << "chips_per_rank = " << s.sim.dimm.chips_per_rank << "\n";
    out << "banks_per_chip = " << s.sim.dimm.banks_per_chip << "\n";
    out << "page_bytes = " << s.sim.dimm.page_bytes << "\n";
    out << "transfer_mts = " << s.sim.dimm.transfer_mts << "\n";
    out << "clock_hz = " << static_cast<std::uint64_t>(s.sim.dimm.clock_hz)
        << "\n";
    out << "t_rcd = " << s.sim.dimm.t_rcd << "\n";
    out << "t_cas = " << s.sim.dimm.t_cas << "\n";
    out << "t_rp = " << s.sim.dimm.t_rp << "\n";
    out << "capacity_bytes = " << s.sim.dimm.capacity_bytes << "\n";
    out << "data_buffer_bytes = " << s.sim.dimm.data_buffer_bytes << "\n";
    out << "\n[scheduler]\n";
    out << "io_bytes_per_s = " << s.sim.io_bytes_per_s << "\n";
    out << "seed = " << s.sim.seed << "\n";
    out << "functional = " << (s.sim.functional ? 1 : 0) << "\n";
    out << "check_invariants = " << (s.sim.check_invariants ? 1 : 0) << "\n";
    return out.str();
}

double pub_reduction_factor(const RunSettings& s) {
    return mem::bandwidth_reduction_factor(
        mem::KsKind::public_ks, {s.pub_ks_n, s.pub_ks_t, 1}, s.pub_key_bytes);
}

double priv_reduction_factor(const RunSettings& s) {
    return mem::bandwidth_reduction_factor(
        mem::KsKind::private_ks, {s.priv_ks_n, s.priv_ks_t, s.priv_ks_p},
        s.priv_key_bytes);
}

}  // namespace sim
}  // namespace apsim
