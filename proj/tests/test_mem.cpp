// Copyright (C) 2026 apache-sim contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdint>
#include <sstream>
#include <stdexcept>

#include "apsim/mem/bit_ledger.hpp"
#include "apsim/mem/dimm.hpp"
#include "apsim/mem/inmem_ks.hpp"

using namespace apsim::mem;

TEST_CASE("dimm defaults and validation") {
    DimmConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.capacity_bytes == 8ull * 1024 * 1024 * 1024);
    CHECK(cfg.ranks == 8);
    CHECK(cfg.nmc_per_dimm == 1);
    CHECK(cfg.transfer_mts == 3200);
    CHECK(cfg.clock_hz == 1'600'000'000);
    CHECK(cfg.t_rcd == 22);
    CHECK(cfg.t_cas == 22);
    CHECK(cfg.t_rp == 22);
    CHECK(cfg.tck_ns() == doctest::Approx(0.625));
    CHECK(cfg.chip_bandwidth_bytes_per_s() == doctest::Approx(3.2e9));

    DimmConfig bad = cfg;
    bad.ranks = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.t_cas = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.clock_hz = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("memory tier bandwidth envelopes") {
    DimmConfig cfg;
    // 8 ranks x 8 chips x 8 bits x 3200 MT/s. This is the hard ceiling for
    // traffic inside one DIMM.
    CHECK(near_mem_aggregate_bytes_per_s(cfg) == doctest::Approx(204.8e9));

    CHECK(make_level_model(MemLevel::io, cfg).bandwidth_bytes_per_s ==
          doctest::Approx(32e9));
    CHECK(make_level_model(MemLevel::near_memory, cfg).bandwidth_bytes_per_s ==
          doctest::Approx(204.8e9));
    // Broadcast ingest only, one bit per cycle per rank.
    CHECK(make_level_model(MemLevel::in_memory, cfg).bandwidth_bytes_per_s ==
          doctest::Approx(1.6e9));

    CHECK(mem_level_name(MemLevel::io) == std::string("io"));
    CHECK(mem_level_name(MemLevel::near_memory) == std::string("near_memory"));
    CHECK(mem_level_name(MemLevel::in_memory) == std::string("in_memory"));
}

TEST_CASE("dram access latency") {
    DimmConfig cfg;

    SUBCASE("row hit pays column access plus the burst") {
        // 22 cycles x 0.625 ns + 64 B over one x8 chip at 3.2 GB/s.
        CHECK(dram_access_latency(cfg, true, 64) == doctest::Approx(33.75));
    }

    SUBCASE("row miss adds precharge and activate") {
        CHECK(dram_access_latency(cfg, false, 64) ==
              doctest::Approx(33.75 + 27.5));
    }

    SUBCASE("a zero byte burst degenerates to the command latency") {
        CHECK(dram_access_latency(cfg, true, 0) == doctest::Approx(13.75));
        CHECK(dram_access_latency(cfg, false, 0) == doctest::Approx(41.25));
    }

    SUBCASE("burst time scales linearly with size") {
        double small = dram_access_latency(cfg, true, 256);
        double large = dram_access_latency(cfg, true, 512);
        CHECK(large - small == doctest::Approx(256.0 / 3.2));
    }
}

TEST_CASE("in-memory key switch transmits digits not keys") {
    DimmConfig cfg;
    InMemKs ks(cfg);
    ks.preload(0, "lwe-switch");
    ks.preload(3, "rlwe-switch");

    SUBCASE("public switch broadcast is n t bits") {
        KsDims d{1024, 4, 1};
        auto r = ks.execute(0, "lwe-switch", KsKind::public_ks, d, 513);
        CHECK(r.transmitted_bits == 4096);
        // One broadcast cycle per bit plus a 4-cycle row accumulation; the
        // 513-word accumulator row fits one open page span.
        CHECK(r.cycles == 4096 + 4 * 4096);
    }

    SUBCASE("private switch broadcast is p (n+1) t bits") {
        KsDims d{2047, 4, 6};
        auto r = ks.execute(3, "rlwe-switch", KsKind::private_ks, d, 4096);
        CHECK(r.transmitted_bits == 49152);
        // A 4096-word accumulator row spans two page slices, so each bit
        // drains in 8 cycles.
        CHECK(r.cycles == 49152 + 8 * 49152);
    }

    SUBCASE("empty dimensions cost nothing") {
        KsDims d{0, 4, 6};
        auto r = ks.execute(0, "lwe-switch", KsKind::public_ks, d, 513);
        CHECK(r.transmitted_bits == 0);
        CHECK(r.cycles == 0);
        r = ks.execute(3, "rlwe-switch", KsKind::private_ks, d, 4096);
        CHECK(r.transmitted_bits == 0);
        CHECK(r.cycles == 0);
    }

    SUBCASE("execution requires the key resident in that rank") {
        KsDims d{1024, 4, 1};
        CHECK_THROWS_AS(
            ks.execute(1, "lwe-switch", KsKind::public_ks, d, 513),
            std::invalid_argument);
        CHECK_THROWS_AS(
            ks.execute(0, "never-loaded", KsKind::public_ks, d, 513),
            std::invalid_argument);
        CHECK_THROWS_AS(ks.execute(99, "lwe-switch", KsKind::public_ks, d, 513),
                        std::out_of_range);
        CHECK_THROWS_AS(ks.preload(8, "x"), std::out_of_range);
    }

    SUBCASE("preloading is setup only and idempotent") {
        KsDims d{1024, 4, 1};
        auto before = ks.execute(0, "lwe-switch", KsKind::public_ks, d, 513);
        ks.preload(0, "lwe-switch");
        ks.preload(0, "another-key");
        auto after = ks.execute(0, "lwe-switch", KsKind::public_ks, d, 513);
        CHECK(before.transmitted_bits == after.transmitted_bits);
        CHECK(before.cycles == after.cycles);
    }

    SUBCASE("broadcast volume does not depend on key material size") {
        // The same dimensions transmit the same bits whatever the resident
        // key weighs; only the reduction ratio moves.
        KsDims d{512, 7, 1};
        CHECK(inmem_transmitted_bits(KsKind::public_ks, d) == 3584);
        double r1 = bandwidth_reduction_factor(KsKind::public_ks, d, 1 << 20);
        double r2 = bandwidth_reduction_factor(KsKind::public_ks, d, 1 << 21);
        CHECK(r2 == doctest::Approx(2.0 * r1));
    }
}

TEST_CASE("bandwidth reduction factor") {
    SUBCASE("exact ratio of key bits to transmitted bits") {
        KsDims d{1024, 4, 1};  // 4096 bits transmitted
        CHECK(bandwidth_reduction_factor(KsKind::public_ks, d, 4096 * 100) ==
              doctest::Approx(800.0));
        // A key exactly as large as the broadcast gives ratio one.
        CHECK(bandwidth_reduction_factor(KsKind::public_ks, d, 512) ==
              doctest::Approx(1.0));
    }

    SUBCASE("zero transmitted bits has no defined ratio") {
        KsDims d{0, 4, 1};
        CHECK_THROWS_AS(
            bandwidth_reduction_factor(KsKind::public_ks, d, 1024),
            std::domain_error);
    }

    SUBCASE("reference operating points") {
        // Private switch with a 1.8 GiB key: p=6, n=2047, t=4 broadcasts
        // 49152 bits, cutting traffic by about 3.1e5.
        KsDims priv{2047, 4, 6};
        double rp = bandwidth_reduction_factor(KsKind::private_ks, priv,
                                               1932735283ull);
        CHECK(rp == doctest::Approx(314572.8).epsilon(1e-4));
        CHECK(rp > 3.15e5 * 0.8);
        CHECK(rp < 3.15e5 * 1.2);

        // Public switch with a 79 MiB key: n=1024, t=21 broadcasts 21504
        // bits, cutting traffic by about 3.1e4.
        KsDims pub{1024, 21, 1};
        double rq = bandwidth_reduction_factor(KsKind::public_ks, pub,
                                               79ull * 1024 * 1024);
        CHECK(rq == doctest::Approx(30817.52).epsilon(1e-4));
        CHECK(rq > 3.05e4 * 0.8);
        CHECK(rq < 3.05e4 * 1.2);
    }
}

TEST_CASE("buffer fit and tiling") {
    BufferCaps caps;
    CHECK(caps.regfile_bytes == 8ull * 1024 * 1024);
    CHECK(caps.data_buffer_bytes == 24ull * 1024 * 1024);

    SUBCASE("small sets fit in one pass") {
        auto p = buffer_fit_check(1ull * 1024 * 1024, BufferLevel::regfile);
        CHECK(p.fits);
        CHECK(p.tiles == 1);
        p = buffer_fit_check(0, BufferLevel::data_buffer);
        CHECK(p.fits);
        CHECK(p.tiles == 1);
        // Exactly at capacity still fits.
        p = buffer_fit_check(8ull * 1024 * 1024, BufferLevel::regfile);
        CHECK(p.fits);
        CHECK(p.tiles == 1);
    }

    SUBCASE("oversized sets tile by the ceiling rule") {
        auto p = buffer_fit_check(48ull * 1024 * 1024, BufferLevel::data_buffer);
        CHECK_FALSE(p.fits);
        CHECK(p.tiles == 2);
        CHECK(p.tile_bytes == 24ull * 1024 * 1024);

        p = buffer_fit_check(120ull * 1024 * 1024, BufferLevel::data_buffer);
        CHECK_FALSE(p.fits);
        CHECK(p.tiles == 5);

        p = buffer_fit_check(24ull * 1024 * 1024 + 1, BufferLevel::data_buffer);
        CHECK_FALSE(p.fits);
        CHECK(p.tiles == 2);
    }
}

TEST_CASE("bit ledger accumulates monotonically") {
    BitLedger ledger;
    CHECK(ledger.total_in(MemLevel::io) == 0);

    std::uint64_t prev_in = 0;
    std::uint64_t prev_out = 0;
    for (int i = 0; i < 20; ++i) {
        ledger.record("op" + std::to_string(i), MemLevel::near_memory,
                      100 + i, 50 + i);
        std::uint64_t cur_in = ledger.total_in(MemLevel::near_memory);
        std::uint64_t cur_out = ledger.total_out(MemLevel::near_memory);
        CHECK(cur_in > prev_in);
        CHECK(cur_out > prev_out);
        prev_in = cur_in;
        prev_out = cur_out;
    }
    CHECK(ledger.entries().size() == 20);
    CHECK(ledger.total_in(MemLevel::io) == 0);

    SUBCASE("csv dump lists every entry under a fixed header") {
        BitLedger small;
        small.record("boot0", MemLevel::io, 64, 32);
        small.record("boot0", MemLevel::in_memory, 4096, 513);
        std::ostringstream os;
        small.write_csv(os);
        CHECK(os.str() ==
              "op_id,level,bits_in,bits_out\n"
              "boot0,io,64,32\n"
              "boot0,in_memory,4096,513\n");
    }
}
