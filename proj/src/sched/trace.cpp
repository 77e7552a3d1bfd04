// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/sched/trace.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace apsim::sched {

namespace {

const char* kParamKeys[] = {"n",          "limbs",     "glevels",
                            "iters",      "out_levels", "ks_digits",
                            "batch",      "width"};

bool known_param(const std::string& key) {
    for (const char* k : kParamKeys)
        if (key == k) return true;
    return false;
}

}  // namespace

std::vector<TraceRecord> parse_trace(std::istream& in) {
    std::vector<TraceRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (blank) continue;

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::invalid_argument("trace line " + std::to_string(lineno) +
                                        ": " + e.what());
        }
        if (!j.is_object() || !j.contains("op") || !j.contains("id"))
            throw std::invalid_argument("trace line " + std::to_string(lineno) +
                                        ": record needs op and id fields");
        TraceRecord rec;
        rec.op = j.at("op").get<std::string>();
        rec.id = j.at("id").get<std::string>();
        if (j.contains("inputs"))
            rec.inputs = j.at("inputs").get<std::vector<std::string>>();
        if (j.contains("outputs"))
            rec.outputs = j.at("outputs").get<std::vector<std::string>>();
        if (j.contains("params")) {
            for (auto& [key, value] : j.at("params").items()) {
                if (!known_param(key))
                    throw std::invalid_argument(
                        "trace line " + std::to_string(lineno) +
                        ": unknown params key '" + key + "'");
                rec.params[key] = value.get<std::int64_t>();
            }
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<TraceRecord> parse_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file " + path);
    return parse_trace(in);
}

void dump_trace(std::ostream& out, const std::vector<TraceRecord>& records) {
    for (const TraceRecord& rec : records) {
        nlohmann::json j;
        j["op"] = rec.op;
        j["id"] = rec.id;
        if (!rec.inputs.empty()) j["inputs"] = rec.inputs;
        if (!rec.outputs.empty()) j["outputs"] = rec.outputs;
        if (!rec.params.empty()) j["params"] = rec.params;
        out << j.dump() << '\n';
    }
}

arch::OpKind parse_op_name(const std::string& name) {
    std::string low;
    for (char c : name) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (low == "hadd") return arch::OpKind::hadd;
    if (low == "pmult") return arch::OpKind::pmult;
    if (low == "cmult") return arch::OpKind::cmult;
    if (low == "cmux") return arch::OpKind::cmux;
    if (low == "hrot") return arch::OpKind::hrot;
    if (low == "homgate") return arch::OpKind::homgate;
    if (low == "cboot") return arch::OpKind::cboot;
    if (low == "pubks") return arch::OpKind::pubks;
    if (low == "privks") return arch::OpKind::privks;
    if (low == "pack") return arch::OpKind::pack;
    throw std::invalid_argument("unknown operator name '" + name + "'");
}

arch::OpDescriptor descriptor_from_record(const TraceRecord& rec) {
    arch::OpDescriptor op;
    op.kind = parse_op_name(rec.op);
    auto u32 = [&](const char* key, std::uint32_t fallback) {
        auto it = rec.params.find(key);
        if (it == rec.params.end()) return fallback;
        if (it->second < 0)
            throw std::invalid_argument("record '" + rec.id + "': " + key +
                                        " must be non-negative");
        return static_cast<std::uint32_t>(it->second);
    };
    op.n = u32("n", op.n);
    op.limbs = u32("limbs", op.limbs);
    op.glevels = u32("glevels", op.glevels);
    op.iters = u32("iters", op.iters);
    op.out_levels = u32("out_levels", op.out_levels);
    op.ks_digits = u32("ks_digits", op.ks_digits);
    op.batch = u32("batch", op.batch);
    op.width = u32("width", op.width);
    return op;
}

}  // namespace apsim::sched
