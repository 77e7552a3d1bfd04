// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/sim/functional.hpp"

#include <optional>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "apsim/fhe/crypto.hpp"
#include "apsim/fhe/keyswitch.hpp"
#include "apsim/fhe/ops.hpp"
#include "apsim/fhe/params.hpp"
#include "apsim/fhe/rlwe_ops.hpp"
#include "apsim/fhe/serialize.hpp"

namespace apsim::sim {

namespace {

using namespace apsim::fhe;

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::uint64_t h, const std::uint8_t* data, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

struct Value {
    enum class Kind { lwe, rlwe, gadget } kind = Kind::lwe;
    LweCiphertext lwe;
    RlweCiphertext rlwe;
    RgswCiphertext rgsw;
    int bit = -1;  // tracked plaintext bit where known
};

// Binary gate lane: NAND bootstrapping at the bundled toy dimensions.
struct GateLane {
    BootstrapParams p;
    NoiseSampler noise;
    LweSecretKey lkey;
    RlweSecretKey rkey;
    BootstrapKey bk;
    KeySwitchKey ks;

    explicit GateLane(std::uint64_t seed)
        : p(make_bootstrap_toy()),
          noise(seed, p.noise_bk),
          lkey(gen_lwe_key(p.lwe, noise)),
          rkey(gen_rlwe_key(p.ring, noise)),
          bk(make_bootstrap_key(lkey, rkey, p.rgsw, noise)),
          ks(make_pub_keyswitch_key(
              LweSecretKey{LweParams{p.ring.n, p.lwe.q, p.lwe.width}, rkey.z},
              lkey, p.ks_levels, p.ks_base_log, noise)) {}

    LweCiphertext enc_bit(int bit) {
        std::uint64_t eighth = p.lwe.q >> 3;
        return lwe_encrypt(bit ? eighth : p.lwe.q - eighth, lkey, noise);
    }

    int dec_bit(const LweCiphertext& ct) const {
        std::uint64_t ph = lwe_phase(ct, lkey);
        std::uint64_t eighth = p.lwe.q >> 3;
        return torus_distance(ph, eighth, p.lwe.width) <
                       torus_distance(ph, p.lwe.q - eighth, p.lwe.width)
                   ? 1
                   : 0;
    }
};

// Bit bootstrap lane: LWE bit to gadget ciphertext on the wide ring.
struct CbLane {
    BootstrapParams p;
    NoiseSampler noise;
    LweSecretKey lkey;
    RlweSecretKey rkey;
    BootstrapKey bk;
    PrivKeySwitchKeyRlwe to_b;
    PrivKeySwitchKeyRlwe to_a;

    static PrivKeySwitchKeyRlwe make_to_b(const RlweSecretKey& rk,
                                          const BootstrapParams& bp,
                                          NoiseSampler& s) {
        std::vector<std::int64_t> ident(bp.ring.n, 0);
        ident[0] = 1;
        LweSecretKey ring_as_lwe{LweParams{bp.ring.n, bp.lwe.q, bp.lwe.width},
                                 rk.z};
        return make_priv_keyswitch_key_rlwe(ring_as_lwe, rk, ident, 4, 8, s);
    }

    static PrivKeySwitchKeyRlwe make_to_a(const RlweSecretKey& rk,
                                          const BootstrapParams& bp,
                                          NoiseSampler& s) {
        std::vector<std::int64_t> neg_z(bp.ring.n);
        for (std::uint32_t i = 0; i < bp.ring.n; ++i)
            neg_z[i] = -static_cast<std::int64_t>(rk.z[i]);
        LweSecretKey ring_as_lwe{LweParams{bp.ring.n, bp.lwe.q, bp.lwe.width},
                                 rk.z};
        return make_priv_keyswitch_key_rlwe(ring_as_lwe, rk, neg_z, 4, 8, s);
    }

    explicit CbLane(std::uint64_t seed)
        : p(make_bootstrap_cb_toy()),
          noise(seed, p.noise_bk),
          lkey(gen_lwe_key(p.lwe, noise)),
          rkey(gen_rlwe_key(p.ring, noise)),
          bk(make_bootstrap_key(lkey, rkey, p.rgsw, noise)),
          to_b(make_to_b(rkey, p, noise)),
          to_a(make_to_a(rkey, p, noise)) {}

    LweCiphertext enc_bit(int bit) {
        std::uint64_t quarter = p.lwe.q >> 2;
        return lwe_encrypt(bit ? quarter : p.lwe.q - quarter, lkey, noise);
    }

    RlweCiphertext enc_poly(std::mt19937_64& rng) {
        Poly m(p.ring.n);
        for (auto& c : m) c = rng() % p.ring.modulus();
        return rlwe_encrypt(m, rkey, noise);
    }
};

// Ring arithmetic lane: adds, plaintext and ciphertext products, slot
// rotations on the two-limb ring.
struct ArithLane {
    CkksParams p;
    NoiseSampler noise;
    RlweSecretKey zkey;
    RelinKey relin;
    GaloisKey galois;

    explicit ArithLane(std::uint64_t seed)
        : p(make_ckks_toy()),
          noise(seed, p.noise),
          zkey(gen_rlwe_key(p.ring, noise)),
          relin(make_relin_key(zkey, noise)),
          galois(make_galois_key(zkey, 5, noise)) {}

    RlweCiphertext enc_random(std::mt19937_64& rng) {
        Poly m(static_cast<std::size_t>(p.ring.limbs()) * p.ring.n);
        for (std::uint32_t l = 0; l < p.ring.limbs(); ++l)
            for (std::uint32_t i = 0; i < p.ring.n; ++i)
                m[static_cast<std::size_t>(l) * p.ring.n + i] =
                    rng() % p.ring.moduli[l];
        return rlwe_encrypt(m, zkey, noise);
    }
};

// Key-switch lane for standalone switch nodes: a second vector key to
// land on, one public and one private identity key.
struct SwitchLane {
    NoiseSampler noise;
    LweSecretKey dst;
    KeySwitchKey pub;
    KeySwitchKey priv;

    SwitchLane(std::uint64_t seed, const LweSecretKey& src)
        : noise(seed, 4.0),
          dst(gen_lwe_key(src.params, noise)),
          pub(make_pub_keyswitch_key(src, dst, 7, 4, noise)),
          priv(make_priv_keyswitch_key(src, dst, LinearFn::identity(), 7, 4,
                                       noise)) {}
};

struct PackLane {
    NoiseSampler noise;
    RlweSecretKey rkey;
    PackingKey key;

    PackLane(std::uint64_t seed, const LweSecretKey& src,
             const RingParams& ring)
        : noise(seed, 0.0),
          rkey(gen_rlwe_key(ring, noise)),
          key(make_packing_key(src, rkey, 2, 16, noise)) {}
};

struct Evaluator {
    const sched::TaskGraph& graph;
    std::uint64_t seed;
    FunctionalOutcome out;
    std::unordered_map<std::string, Value> values;

    std::optional<GateLane> gate;
    std::optional<CbLane> cb;
    std::optional<ArithLane> arith;
    std::optional<SwitchLane> sw;
    std::optional<PackLane> pk;

    Evaluator(const sched::TaskGraph& g, std::uint64_t s) : graph(g), seed(s) {}

    GateLane& gate_lane() {
        if (!gate) gate.emplace(splitmix(seed ^ 0x67617465));
        return *gate;
    }
    CbLane& cb_lane() {
        if (!cb) cb.emplace(splitmix(seed ^ 0x63626f6f));
        return *cb;
    }
    ArithLane& arith_lane() {
        if (!arith) arith.emplace(splitmix(seed ^ 0x636b6b73));
        return *arith;
    }
    SwitchLane& switch_lane() {
        if (!sw) sw.emplace(splitmix(seed ^ 0x73776368), gate_lane().lkey);
        return *sw;
    }
    PackLane& pack_lane() {
        if (!pk)
            pk.emplace(splitmix(seed ^ 0x7061636b), gate_lane().lkey,
                       gate_lane().p.ring);
        return *pk;
    }

    std::mt19937_64 rng_for(const std::string& ct_id) {
        std::uint64_t h = fnv1a(1469598103934665603ull,
                                reinterpret_cast<const std::uint8_t*>(
                                    ct_id.data()),
                                ct_id.size());
        return std::mt19937_64(splitmix(h ^ seed));
    }

    // Synthesizes a resident input the way its consumer expects it.
    Value synth(const std::string& ct_id, arch::OpKind consumer,
                std::size_t position) {
        auto rng = rng_for(ct_id);
        Value v;
        switch (consumer) {
            case arch::OpKind::homgate:
            case arch::OpKind::pubks:
            case arch::OpKind::privks:
            case arch::OpKind::pack: {
                v.kind = Value::Kind::lwe;
                v.bit = static_cast<int>(rng() & 1);
                v.lwe = gate_lane().enc_bit(v.bit);
                return v;
            }
            case arch::OpKind::cboot: {
                v.kind = Value::Kind::lwe;
                v.bit = static_cast<int>(rng() & 1);
                v.lwe = cb_lane().enc_bit(v.bit);
                return v;
            }
            case arch::OpKind::cmux: {
                if (position == 0) {
                    v.kind = Value::Kind::gadget;
                    v.bit = static_cast<int>(rng() & 1);
                    Poly m(cb_lane().p.ring.n, 0);
                    m[0] = static_cast<std::uint64_t>(v.bit);
                    v.rgsw = rgsw_encrypt(m, cb_lane().rkey,
                                          GadgetParams{8, 2, 32},
                                          cb_lane().noise);
                } else {
                    v.kind = Value::Kind::rlwe;
                    v.rlwe = cb_lane().enc_poly(rng);
                }
                return v;
            }
            default: {
                v.kind = Value::Kind::rlwe;
                v.rlwe = arith_lane().enc_random(rng);
                return v;
            }
        }
    }

    const Value& input(const sched::TaskNode& node, std::size_t position) {
        const std::string& ct = node.inputs[position];
        auto it = values.find(ct);
        if (it != values.end()) return it->second;
        // Not produced by any node, so it must be resident.
        return values.emplace(ct, synth(ct, node.op.kind, position))
            .first->second;
    }

    static void expect(bool ok, const sched::TaskNode& node, const char* what) {
        if (!ok)
            throw std::invalid_argument("record '" + node.id + "': " + what);
    }

    Value eval(const sched::TaskNode& node) {
        using arch::OpKind;
        Value out_v;
        switch (node.op.kind) {
            case OpKind::hadd: {
                expect(node.inputs.size() == 2, node, "needs two inputs");
                const Value& x = input(node, 0);
                const Value& y = input(node, 1);
                if (x.kind == Value::Kind::lwe && y.kind == Value::Kind::lwe) {
                    expect(x.lwe.params.n == y.lwe.params.n, node,
                           "vector dimensions differ");
                    out_v.kind = Value::Kind::lwe;
                    out_v.lwe = x.lwe;
                    std::uint64_t mask = x.lwe.params.q - 1;
                    for (std::size_t i = 0; i < out_v.lwe.a.size(); ++i)
                        out_v.lwe.a[i] = (x.lwe.a[i] + y.lwe.a[i]) & mask;
                    out_v.lwe.b = (x.lwe.b + y.lwe.b) & mask;
                } else {
                    expect(x.kind == Value::Kind::rlwe &&
                               y.kind == Value::Kind::rlwe,
                           node, "add needs two ciphertexts of the same kind");
                    out_v.kind = Value::Kind::rlwe;
                    out_v.rlwe = rlwe_add(x.rlwe, y.rlwe);
                }
                return out_v;
            }
            case OpKind::pmult: {
                expect(node.inputs.size() == 1, node, "needs one input");
                const Value& x = input(node, 0);
                expect(x.kind == Value::Kind::rlwe, node,
                       "plaintext product needs a ring ciphertext");
                auto rng = rng_for(node.id);
                const RingParams& r = x.rlwe.ring;
                Poly pt(static_cast<std::size_t>(r.limbs()) * r.n);
                for (std::uint32_t l = 0; l < r.limbs(); ++l)
                    for (std::uint32_t i = 0; i < r.n; ++i)
                        pt[static_cast<std::size_t>(l) * r.n + i] =
                            rng() % r.moduli[l];
                out_v.kind = Value::Kind::rlwe;
                out_v.rlwe = rlwe_pmult(x.rlwe, pt);
                return out_v;
            }
            case OpKind::cmult: {
                expect(node.inputs.size() == 2, node, "needs two inputs");
                const Value& x = input(node, 0);
                const Value& y = input(node, 1);
                expect(x.kind == Value::Kind::rlwe &&
                           y.kind == Value::Kind::rlwe,
                       node, "product needs two ring ciphertexts");
                ArithLane& lane = arith_lane();
                expect(x.rlwe.ring.moduli == lane.p.ring.moduli &&
                           x.rlwe.ring.n == lane.p.ring.n,
                       node, "product runs on the arithmetic lane ring");
                out_v.kind = Value::Kind::rlwe;
                out_v.rlwe = rlwe_cmult(x.rlwe, y.rlwe, lane.relin);
                return out_v;
            }
            case OpKind::hrot: {
                expect(node.inputs.size() == 1, node, "needs one input");
                const Value& x = input(node, 0);
                expect(x.kind == Value::Kind::rlwe, node,
                       "rotation needs a ring ciphertext");
                ArithLane& lane = arith_lane();
                expect(x.rlwe.ring.n == lane.p.ring.n, node,
                       "rotation runs on the arithmetic lane ring");
                out_v.kind = Value::Kind::rlwe;
                out_v.rlwe = rlwe_rotate(x.rlwe, lane.galois);
                return out_v;
            }
            case OpKind::cmux: {
                expect(node.inputs.size() == 3, node,
                       "needs selector and two branches");
                const Value& sel = input(node, 0);
                const Value& c0 = input(node, 1);
                const Value& c1 = input(node, 2);
                expect(sel.kind == Value::Kind::gadget, node,
                       "selector must be a gadget ciphertext");
                expect(c0.kind == Value::Kind::rlwe &&
                           c1.kind == Value::Kind::rlwe,
                       node, "branches must be ring ciphertexts");
                out_v.kind = Value::Kind::rlwe;
                out_v.rlwe = cmux(sel.rgsw, c0.rlwe, c1.rlwe);
                return out_v;
            }
            case OpKind::homgate: {
                expect(!node.inputs.empty(), node, "needs at least one input");
                const Value& x = input(node, 0);
                const Value& y =
                    node.inputs.size() > 1 ? input(node, 1) : input(node, 0);
                expect(x.kind == Value::Kind::lwe &&
                           y.kind == Value::Kind::lwe,
                       node, "gate needs vector ciphertexts");
                GateLane& lane = gate_lane();
                auto res = gate_bootstrap_nand(x.lwe, y.lwe, lane.bk, lane.ks);
                out_v.kind = Value::Kind::lwe;
                out_v.lwe = std::move(res.ct);
                int dec = lane.dec_bit(out_v.lwe);
                if (x.bit >= 0 && y.bit >= 0) {
                    ++out.gate_checks;
                    int want = !(x.bit && y.bit);
                    if (dec != want) ++out.gate_failures;
                }
                out_v.bit = dec;
                return out_v;
            }
            case OpKind::cboot: {
                expect(node.inputs.size() == 1, node, "needs one input");
                const Value& x = input(node, 0);
                expect(x.kind == Value::Kind::lwe, node,
                       "bit bootstrap needs a vector ciphertext");
                CbLane& lane = cb_lane();
                LweCiphertext in = x.lwe;
                if (in.params.n != lane.p.lwe.n) {
                    // Lane bridge: the tracked bit re-enters at the wide
                    // ring's dimensions, standing in for a parameter switch.
                    auto rng = rng_for(node.id);
                    int bit = x.bit >= 0 ? x.bit : static_cast<int>(rng() & 1);
                    in = lane.enc_bit(bit);
                    out_v.bit = bit;
                } else {
                    out_v.bit = x.bit;
                }
                std::uint32_t levels = std::max<std::uint32_t>(
                    1, std::min<std::uint32_t>(node.op.out_levels, 4));
                auto res = circuit_bootstrap(in, {&lane.bk, &lane.to_b,
                                                  &lane.to_a},
                                             GadgetParams{8, levels, 32});
                out_v.kind = Value::Kind::gadget;
                out_v.rgsw = std::move(res.ct);
                return out_v;
            }
            case OpKind::pubks:
            case OpKind::privks: {
                expect(node.inputs.size() == 1, node, "needs one input");
                const Value& x = input(node, 0);
                expect(x.kind == Value::Kind::lwe, node,
                       "key switch needs a vector ciphertext");
                GateLane& src_lane = gate_lane();
                SwitchLane& lane = switch_lane();
                expect(x.lwe.params.n == src_lane.p.lwe.n, node,
                       "key switch input is not on the gate lane key");
                LweCiphertext switched;
                if (node.op.kind == OpKind::pubks) {
                    auto res = pub_keyswitch(LinearFn::identity(), lane.pub,
                                             std::vector<LweCiphertext>{x.lwe});
                    switched = std::move(res.ct);
                } else {
                    auto res = priv_keyswitch(lane.priv,
                                              std::vector<LweCiphertext>{x.lwe});
                    switched = std::move(res.ct);
                }
                ++out.switch_checks;
                std::uint64_t before = lwe_phase(x.lwe, src_lane.lkey);
                std::uint64_t after = lwe_phase(switched, lane.dst);
                std::uint32_t w = x.lwe.params.width;
                if (torus_distance(before, after, w) > (x.lwe.params.q >> 6))
                    ++out.switch_failures;
                out_v.kind = Value::Kind::lwe;
                out_v.lwe = std::move(switched);
                out_v.bit = x.bit;
                return out_v;
            }
            case OpKind::pack: {
                expect(!node.inputs.empty(), node, "needs inputs");
                PackLane& lane = pack_lane();
                std::vector<LweCiphertext> cts;
                for (std::size_t i = 0; i < node.inputs.size(); ++i) {
                    const Value& v = input(node, i);
                    expect(v.kind == Value::Kind::lwe, node,
                           "pack folds vector ciphertexts");
                    cts.push_back(v.lwe);
                }
                auto res = pack_lwe_to_rlwe(cts, lane.key);
                out_v.kind = Value::Kind::rlwe;
                out_v.rlwe = std::move(res.ct);
                return out_v;
            }
            default:
                throw std::invalid_argument("record '" + node.id +
                                            "': no functional rule");
        }
    }

    void fold_digest(const Value& v) {
        std::vector<std::uint8_t> bytes;
        switch (v.kind) {
            case Value::Kind::lwe:
                bytes = serialize_lwe(v.lwe);
                break;
            case Value::Kind::rlwe:
                bytes = serialize_rlwe(v.rlwe);
                break;
            case Value::Kind::gadget:
                for (const RlweCiphertext& row : v.rgsw.rows) {
                    auto rb = serialize_rlwe(row);
                    bytes.insert(bytes.end(), rb.begin(), rb.end());
                }
                break;
        }
        out.digest = fnv1a(out.digest ? out.digest : 1469598103934665603ull,
                           bytes.data(), bytes.size());
    }

    FunctionalOutcome run() {
        for (std::uint32_t i : graph.topo_order) {
            const sched::TaskNode& node = graph.nodes[i];
            Value v = eval(node);
            fold_digest(v);
            ++out.produced;
            for (const std::string& o : node.outputs) values[o] = v;
            if (node.outputs.empty()) values["#" + node.id] = std::move(v);
        }
        return out;
    }
};

}  // namespace

FunctionalOutcome evaluate_trace(const sched::TaskGraph& graph,
                                 std::uint64_t seed) {
    Evaluator ev(graph, seed);
    return ev.run();
}

}  // namespace apsim::sim
