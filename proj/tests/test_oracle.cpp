#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <npn/channel.hpp>
#include <npn/oracle.hpp>
#include <npn/orchestrator.hpp>

using namespace npn;

TEST_CASE("power levels")
{
    GridSpec g;
    const auto four = power_levels(1000.0, g);
    REQUIRE(four.size() == 4);
    CHECK(four[0] == 0.0);
    CHECK(four[1] == doctest::Approx(10.0));
    CHECK(four[2] == doctest::Approx(100.0));
    CHECK(four[3] == doctest::Approx(1000.0));
    g.levels_per_variable = 2;
    CHECK(power_levels(5.0, g) == std::vector<double>{0.0, 5.0});
    g.levels_per_variable = 8;
    const auto eight = power_levels(1000.0, GridSpec{4});
    for (double v : eight) {
        const auto fine = power_levels(1000.0, g);
        const bool found = std::any_of(fine.begin(), fine.end(), [&](double w) { return std::abs(w - v) <= 1e-9 * 1000.0; });
        CHECK(found);
    }
}

TEST_CASE("N=1, one user per cell, two levels: hand enumeration")
{
    auto cfg = NetworkConfig::with_dimensions(1, 1, 1);
    const auto ch = draw_instance(cfg, RngSeed{3});
    const double s2 = cfg.noise_power, P = cfg.p_ul_budgets[0], Q = cfg.p_dl_budget;
    const double f = ch.f(0, 0), h = ch.h(0, 0), g = ch.g(0, 0, 0), phi = ch.phi[0];

    // Points with a public user served at full power; the UL user is either silent or at full power.
    const double dl_quiet = std::log2(1.0 + Q * h / s2);
    const double dl_loud = std::log2(1.0 + Q * h / (P * g + s2));
    const double ul_tin = std::log2(1.0 + P * f / (Q * phi + s2));
    const double ul_sic = std::log2(1.0 + P * f / s2);
    const double bs = std::log2(1.0 + Q * phi / (P * f + s2));

    GridSpec grid;
    grid.levels_per_variable = 2;

    SUBCASE("no QoS: DL stays silent and the UL user gets the clean rate")
    {
        cfg.gamma_min = 0.0;
        const auto r = brute_force_common_throughput(ch, cfg, grid);
        REQUIRE(r.feasible);
        CHECK(r.r_best == doctest::Approx(ul_sic).epsilon(1e-12));
        CHECK(r.evaluated == 3 * 3 * 2);
    }
    SUBCASE("QoS below the loud DL rate")
    {
        cfg.gamma_min = 0.5 * dl_loud;
        const double expected = std::max(ul_tin, std::min(dl_loud, bs) >= cfg.gamma_min ? ul_sic : 0.0);
        const auto r = brute_force_common_throughput(ch, cfg, grid);
        REQUIRE(r.feasible);
        CHECK(r.r_best == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("QoS reachable only with the UL silent")
    {
        cfg.gamma_min = 0.5 * (dl_loud + dl_quiet);
        const auto r = brute_force_common_throughput(ch, cfg, grid);
        REQUIRE(r.feasible);
        CHECK(r.r_best == 0.0);
    }
}

TEST_CASE("huge threshold: nothing is feasible")
{
    auto cfg = NetworkConfig::with_dimensions(2, 2, 2);
    cfg.gamma_min = 1e6;
    const auto r = brute_force_common_throughput(draw_instance(cfg, RngSeed{1}), cfg);
    CHECK_FALSE(r.feasible);
    CHECK_FALSE(r.argmax.has_value());
}

TEST_CASE("oracle argmax passes the checker exactly and refining never hurts")
{
    auto cfg = NetworkConfig::with_dimensions(2, 2, 2);
    cfg.gamma_min = 0.5;
    GridSpec coarse, fine;
    fine.levels_per_variable = 8;
    fine.max_enumeration = 1e9;
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
        const auto ch = draw_instance(cfg, RngSeed{seed});
        const auto a = brute_force_common_throughput(ch, cfg, coarse);
        if (!a.feasible) continue;
        REQUIRE(a.argmax);
        const auto rep = check_p1_feasible(*a.argmax, ch, cfg, 1e-12);
        CHECK_MESSAGE(rep.feasible(), rep.summary());
        CHECK(a.argmax->achieved_common_throughput == doctest::Approx(a.r_best).epsilon(1e-12));
        const auto b = brute_force_common_throughput(ch, cfg, fine);
        CHECK(b.r_best >= a.r_best - 1e-12);
    }
}

TEST_CASE("grid optimum never exceeds the pipeline relaxed bound")
{
    auto cfg = NetworkConfig::with_dimensions(2, 2, 2);
    cfg.gamma_min = 0.5;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto ch = draw_instance(cfg, RngSeed{seed});
        const auto o = brute_force_common_throughput(ch, cfg);
        const auto p = solve_pipeline(SchemeKind::adaptive, ch, cfg);
        if (!o.feasible) continue;
        CHECK(p.feasible);
        CHECK(p.relaxed_bound >= o.r_best - 1e-9);
    }
}

TEST_CASE("oversized enumeration is refused with a hint")
{
    const auto cfg = NetworkConfig::desk_default();
    CHECK(enumeration_size(cfg, {}) > 1e7);
    try {
        brute_force_common_throughput(draw_instance(cfg, RngSeed{1}), cfg);
        FAIL("expected std::length_error");
    } catch (const std::length_error& e) {
        CHECK(std::string(e.what()).find("reduce") != std::string::npos);
    }
}
