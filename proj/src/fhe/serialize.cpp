// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include "apsim/fhe/serialize.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace apsim {
namespace fhe {

namespace {

constexpr uint16_t kKindLwe = 1;
constexpr uint16_t kKindRlwe = 2;

class Writer {
  public:
    void u8(uint8_t v) { out_.push_back(v); }
    void u16(uint16_t v) { for (int i = 0; i < 2; ++i) u8(v >> (8 * i)); }
    void u32(uint32_t v) { for (int i = 0; i < 4; ++i) u8(v >> (8 * i)); }
    void u64(uint64_t v) { for (int i = 0; i < 8; ++i) u8(v >> (8 * i)); }
    void word(uint64_t v, unsigned bytes) {
        for (unsigned i = 0; i < bytes; ++i) u8(v >> (8 * i));
    }
    std::vector<uint8_t> take() { return std::move(out_); }

  private:
    std::vector<uint8_t> out_;
};

class Reader {
  public:
    explicit Reader(const std::vector<uint8_t>& b) : b_(b) {}
    uint8_t u8() {
        if (pos_ >= b_.size())
            throw std::runtime_error("ciphertext container: truncated payload");
        return b_[pos_++];
    }
    uint16_t u16() { uint16_t v = u8(); v |= uint16_t(u8()) << 8; return v; }
    uint32_t u32() {
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(u8()) << (8 * i);
        return v;
    }
    uint64_t u64() {
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(u8()) << (8 * i);
        return v;
    }
    uint64_t word(unsigned bytes) {
        uint64_t v = 0;
        for (unsigned i = 0; i < bytes; ++i) v |= uint64_t(u8()) << (8 * i);
        return v;
    }
    bool done() const { return pos_ == b_.size(); }

  private:
    const std::vector<uint8_t>& b_;
    size_t pos_ = 0;
};

uint16_t check_header(Reader& r, uint16_t want_kind) {
    char magic[4];
    for (char& c : magic) c = static_cast<char>(r.u8());
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("ciphertext container: bad magic");
    uint16_t version = r.u16();
    if (version > kFormatVersion)
        throw std::runtime_error("ciphertext container: unsupported version");
    uint16_t kind = r.u16();
    if (kind != want_kind)
        throw std::runtime_error("ciphertext container: kind mismatch");
    return version;
}

unsigned width_bytes(uint32_t width) { return width <= 32 ? 4 : 8; }

uint32_t limb_width(uint64_t q) {
    if ((q & (q - 1)) == 0) {
        uint32_t w = 0;
        while ((1ull << w) < q) ++w;
        return w;
    }
    uint32_t w = 0;
    while (w < 64 && (q >> w) != 0) ++w;
    return w;
}

}  // namespace

std::vector<uint8_t> serialize_lwe(const LweCiphertext& ct) {
    Writer w;
    for (char c : kMagic) w.u8(static_cast<uint8_t>(c));
    w.u16(kFormatVersion);
    w.u16(kKindLwe);
    w.u32(ct.params.n);
    w.u32(ct.params.width);
    unsigned wb = width_bytes(ct.params.width);
    for (uint64_t v : ct.a) w.word(v, wb);
    w.word(ct.b, wb);
    return w.take();
}

LweCiphertext deserialize_lwe(const std::vector<uint8_t>& bytes) {
    Reader r(bytes);
    check_header(r, kKindLwe);
    LweCiphertext ct;
    ct.params.n = r.u32();
    ct.params.width = r.u32();
    if (ct.params.width == 0 || ct.params.width > 64)
        throw std::runtime_error("ciphertext container: bad width");
    ct.params.q = ct.params.width == 64 ? 0 : (1ull << ct.params.width);
    unsigned wb = width_bytes(ct.params.width);
    ct.a.resize(ct.params.n);
    for (auto& v : ct.a) v = r.word(wb);
    ct.b = r.word(wb);
    if (!r.done())
        throw std::runtime_error("ciphertext container: trailing bytes");
    return ct;
}

std::vector<uint8_t> serialize_rlwe(const RlweCiphertext& ct) {
    Writer w;
    for (char c : kMagic) w.u8(static_cast<uint8_t>(c));
    w.u16(kFormatVersion);
    w.u16(kKindRlwe);
    w.u32(ct.ring.n);
    w.u32(ct.ring.limbs());
    for (uint64_t q : ct.ring.moduli) w.u64(q);
    for (uint32_t l = 0; l < ct.ring.limbs(); ++l) {
        unsigned wb = width_bytes(limb_width(ct.ring.moduli[l]));
        size_t off = static_cast<size_t>(l) * ct.ring.n;
        for (uint32_t i = 0; i < ct.ring.n; ++i) w.word(ct.a[off + i], wb);
        for (uint32_t i = 0; i < ct.ring.n; ++i) w.word(ct.b[off + i], wb);
    }
    return w.take();
}

RlweCiphertext deserialize_rlwe(const std::vector<uint8_t>& bytes) {
    Reader r(bytes);
    check_header(r, kKindRlwe);
    RlweCiphertext ct;
    ct.ring.n = r.u32();
    uint32_t limbs = r.u32();
    if (limbs == 0 || limbs > 64)
        throw std::runtime_error("ciphertext container: bad limb count");
    ct.ring.moduli.resize(limbs);
    for (auto& q : ct.ring.moduli) q = r.u64();
    ct.ring.validate();
    size_t total = static_cast<size_t>(ct.ring.n) * limbs;
    ct.a.resize(total);
    ct.b.resize(total);
    for (uint32_t l = 0; l < limbs; ++l) {
        unsigned wb = width_bytes(limb_width(ct.ring.moduli[l]));
        size_t off = static_cast<size_t>(l) * ct.ring.n;
        for (uint32_t i = 0; i < ct.ring.n; ++i) ct.a[off + i] = r.word(wb);
        for (uint32_t i = 0; i < ct.ring.n; ++i) ct.b[off + i] = r.word(wb);
    }
    if (!r.done())
        throw std::runtime_error("ciphertext container: trailing bytes");
    return ct;
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("short write: " + path);
}

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for read: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                               std::istreambuf_iterator<char>());
    return bytes;
}

}  // namespace fhe
}  // namespace apsim
