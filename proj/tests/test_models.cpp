#include <doctest.h>

#include <stdexcept>
#include "girih/models.hpp"

#include <cstdio>
#include <fstream>
#include <random>

using namespace girih;

TEST_CASE("cache block size worked example: 94 * N_xb") {
    for (long long n_xb : {1LL, 1000LL, 7680LL})
        CHECK(cache_block_size({n_xb, 8, 1, 1, 2}) == 94 * n_xb);
}

TEST_CASE("cache block size high-order hand evaluation") {
    CHECK(cache_block_size({7680, 16, 4, 4, 2}) == 7680LL * 480);
}

TEST_CASE("general and first-order cache models agree at R=1") {
    std::mt19937_64 rng(2024);
    for (int it = 0; it < 1000; ++it) {
        const int dw = 2 * static_cast<int>(rng() % 64 + 1);
        const int nf = static_cast<int>(rng() % 16 + 1);
        const int nd = static_cast<int>(rng() % 16 + 1);
        const long long n_xb = static_cast<long long>(rng() % 8192 + 1);
        CHECK(cache_block_size({n_xb, dw, nf, 1, nd}) ==
              cache_block_size_first_order(n_xb, dw, nf, nd));
    }
}

TEST_CASE("code balance hand evaluations") {
    CHECK(code_balance(8, 2, 1) == 8.0);
    CHECK(code_balance(16, 2, 4) == 16.0);
}

TEST_CASE("general and first-order code balance agree at R=1") {
    std::mt19937_64 rng(7);
    for (int it = 0; it < 1000; ++it) {
        const int dw = 2 * static_cast<int>(rng() % 64 + 1);
        const int nd = static_cast<int>(rng() % 16 + 1);
        CHECK(code_balance(dw, nd, 1) == code_balance_first_order(dw, nd));
    }
}

TEST_CASE("code balance strictly decreases with diamond width") {
    for (int nd : {2, 9, 15})
        for (int r : {1, 4}) {
            double prev = code_balance(2 * r, nd, r);
            for (int dw = 4 * r; dw <= 128 * r; dw += 2 * r) {
                const double cur = code_balance(dw, nd, r);
                CHECK(cur < prev);
                prev = cur;
            }
        }
}

TEST_CASE("cache block size strictly increases in every input") {
    const CacheModelInput base{512, 16, 4, 4, 3};
    const long long ref = cache_block_size(base);
    for (int ddw = 8; ddw <= 64; ddw += 8) {
        CacheModelInput in = base;
        in.dw = base.dw + ddw;
        CHECK(cache_block_size(in) > ref);
    }
    for (int dnf = 1; dnf <= 16; ++dnf) {
        CacheModelInput in = base;
        in.nf = base.nf + dnf;
        CHECK(cache_block_size(in) > ref);
    }
    for (int dnd = 1; dnd <= 12; ++dnd) {
        CacheModelInput in = base;
        in.nd = base.nd + dnd;
        CHECK(cache_block_size(in) > ref);
    }
    for (long long dxb = 1; dxb <= 4096; dxb *= 4) {
        CacheModelInput in = base;
        in.n_xb = base.n_xb + dxb;
        CHECK(cache_block_size(in) > ref);
    }
}

TEST_CASE("spatial blocking baselines") {
    CHECK(spatial_balance(StencilKind::Const7pt) == 24.0);
    CHECK(spatial_balance(StencilKind::Var7pt) == 80.0);
    CHECK(spatial_balance(StencilKind::Const25pt) == 32.0);
    CHECK(spatial_balance(StencilKind::Var25pt) == 128.0);
}

TEST_CASE("ecm worked example") {
    const EcmModel m{4, 4, 2, 4, 9, 8};
    CHECK(ecm_cycles(m, DataPath::L3) == 10.0);
    const auto chain = ecm_chain(m);
    CHECK(chain[0] == 4.0);
    CHECK(chain[1] == 6.0);
    CHECK(chain[2] == 10.0);
    CHECK(chain[3] == 19.0);
}

TEST_CASE("ecm L1 prediction reduces to max(T_nOL, T_OL)") {
    CHECK(ecm_cycles({9, 4, 2, 4, 9, 8}, DataPath::L1) == 9.0);
    CHECK(ecm_cycles({3, 4, 2, 4, 9, 8}, DataPath::L1) == 4.0);
}

TEST_CASE("ecm chain is nondecreasing along the hierarchy") {
    std::mt19937_64 rng(99);
    for (int it = 0; it < 200; ++it) {
        const EcmModel m{static_cast<double>(rng() % 100), static_cast<double>(rng() % 100),
                         static_cast<double>(rng() % 50), static_cast<double>(rng() % 50),
                         static_cast<double>(rng() % 50), 8};
        const auto chain = ecm_chain(m);
        CHECK(chain[0] <= chain[1]);
        CHECK(chain[1] <= chain[2]);
        CHECK(chain[2] <= chain[3]);
    }
}

TEST_CASE("multicore prediction: bandwidth-saturated rows") {
    const MachineSpec ivy = MachineSpec::builtin("ivybridge-e5-2660v2");
    const MulticorePrediction p =
        ecm_multicore({12, 14, 14, 8.3, 2.2, 8}, ivy, ivy.cores);
    CHECK(p.glups == doctest::Approx(4.571).epsilon(1e-3));
    CHECK(report_round(p.glups) == doctest::Approx(4.6));
    CHECK(p.saturation_cores == 18);  // beyond the socket: no saturation at 10 cores
    CHECK_FALSE(p.bandwidth_bound);

    const MachineSpec hsw = MachineSpec::builtin("haswell-e5-2699v3");
    const MulticorePrediction q = ecm_multicore({12, 14, 7, 7.5, 1.8, 8}, hsw, hsw.cores);
    CHECK(report_round(q.glups) == doctest::Approx(10.0));
    CHECK(q.saturation_cores == 17);
    CHECK(q.bandwidth_bound);
}

TEST_CASE("multicore prediction reproduces all reference rows within 0.1") {
    for (const ReferencePrediction& row : reference_predictions()) {
        const MachineSpec mach = MachineSpec::builtin(row.machine);
        const MulticorePrediction p = ecm_multicore(row.model, mach, mach.cores);
        CHECK(std::abs(report_round(p.glups) - row.expected_glups) <= 0.1 + 1e-9);
    }
}

TEST_CASE("single core sits in the linear regime") {
    const MachineSpec ivy = MachineSpec::builtin("ivybridge-e5-2660v2");
    const EcmModel m{12, 14, 14, 8.3, 2.2, 8};
    const MulticorePrediction p = ecm_multicore(m, ivy, 1);
    CHECK(p.glups == doctest::Approx(8.0 * 2.2 / 38.5));
    CHECK_THROWS_AS(ecm_multicore(m, ivy, 11), std::invalid_argument);
}

TEST_CASE("zero memory term means compute bound: no saturation point") {
    const MachineSpec ivy = MachineSpec::builtin("ivybridge-e5-2660v2");
    const MulticorePrediction p = ecm_multicore({12, 14, 14, 8.3, 0, 8}, ivy, 10);
    CHECK(p.saturation_cores == 0);
    CHECK(p.saturation_glups == 0);
    CHECK(p.glups == p.linear_glups);
}

TEST_CASE("roofline worked examples") {
    CHECK(roofline(1.0 / 24.0, 41.0) == doctest::Approx(1.71).epsilon(0.03));
    CHECK(roofline(1.0 / 16.0, 41.0) == doctest::Approx(2.56).epsilon(0.02));
    CHECK(roofline(0.5, 0.0) == 0.0);
    CHECK_THROWS_AS(roofline(0.0, 40.0), std::invalid_argument);
}

TEST_CASE("report rounding keeps two significant digits") {
    CHECK(report_round(4.5714) == doctest::Approx(4.6));
    CHECK(report_round(10.222) == doctest::Approx(10.0));
    CHECK(report_round(0.70769) == doctest::Approx(0.71));
    CHECK(report_round(0.0) == 0.0);
}

TEST_CASE("builtin machines and machine files") {
    const MachineSpec ivy = MachineSpec::builtin("ivybridge-e5-2660v2");
    CHECK(ivy.clock_ghz == 2.2);
    CHECK(ivy.bandwidth_gbps == 40.0);
    CHECK(ivy.cores == 10);
    CHECK(ivy.usable_cache_bytes == doctest::Approx(12.5 * 1024 * 1024));
    CHECK_THROWS_AS(MachineSpec::builtin("epyc"), std::invalid_argument);

    const char* path = "test_machine.txt";
    {
        std::ofstream out(path);
        out << "name = testbox\n"
            << "clock_ghz = 3.0\n"
            << "bandwidth_gbps = 80 # dual channel\n"
            << "cores = 8\n"
            << "l3_mib = 16\n";
    }
    const MachineSpec m = MachineSpec::from_file(path);
    CHECK(m.name == "testbox");
    CHECK(m.clock_ghz == 3.0);
    CHECK(m.bandwidth_gbps == 80.0);
    CHECK(m.cores == 8);
    CHECK(m.usable_cache_bytes == doctest::Approx(8.0 * 1024 * 1024));
    std::remove(path);
    CHECK_THROWS(MachineSpec::from_file("does-not-exist.txt"));
}
