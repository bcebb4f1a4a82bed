#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <npn/channel.hpp>
#include <npn/orchestrator.hpp>
#include <npn/sca.hpp>
#include <npn/subproblems.hpp>

using namespace npn;

TEST_CASE("mode LP: decodable subcarrier goes to SIC")
{
    auto mp = make_mode_program({2.0}, {5.0}, {10.0}, {3.0}, 1);
    const auto rep = solve_lp(mp.lp);
    REQUIRE(rep.ok());
    CHECK(rep.primal[0] == doctest::Approx(1.0));
    CHECK(rep.objective == doctest::Approx(5.0));
}

TEST_CASE("mode LP: BS rate caps the SIC share")
{
    auto mp = make_mode_program({2.0}, {5.0}, {1.0}, {3.0}, 1);
    const auto rep = solve_lp(mp.lp);
    REQUIRE(rep.ok());
    CHECK(rep.primal[0] == doctest::Approx(1.0 / 3.0));
    CHECK(rep.objective == doctest::Approx(3.0));
}

TEST_CASE("mode LP: all rates zero")
{
    auto mp = make_mode_program({0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, 1);
    const auto rep = solve_lp(mp.lp);
    REQUIRE(rep.ok());
    CHECK(rep.objective == doctest::Approx(0.0));
    for (int n = 0; n < 2; ++n) {
        CHECK(rep.primal[n] >= -1e-12);
        CHECK(rep.primal[n] <= 1.0 + 1e-12);
    }
}

TEST_CASE("mode LP on a solved instance never lowers R")
{
    auto cfg = NetworkConfig::with_dimensions(3, 3, 6);
    cfg.gamma_min = 0.5;
    const auto ch = draw_instance(cfg, RngSeed{21});
    const std::vector<double> tau(6, 0.0);
    const auto init = phase_one(tau, ch, cfg);
    REQUIRE(init);
    const auto sca = sca_solve_p21(tau, *init, {}, ch, cfg);
    const auto rep = solve_p23(sca.solution, ch, cfg);
    REQUIRE(rep.ok());
    CHECK(rep.objective >= sca.solution.r_common - 1e-9);
}

TEST_CASE("single subcarrier with no QoS: full UL power")
{
    auto cfg = NetworkConfig::with_dimensions(1, 1, 1);
    cfg.gamma_min = 0.0;
    const auto ch = draw_instance(cfg, RngSeed{2});
    const std::vector<double> tau{0.0};
    auto local = RelaxedSolution::zeros(cfg);
    local.a_ul(0, 0) = 0.5;
    local.e_ul(0, 0) = 0.5 * cfg.p_ul_budgets[0];
    local.a_dl(0, 0) = 0.5;
    local.e_dl(0, 0) = 0.5 * cfg.p_dl_budget;
    const auto res = solve_p22(local, tau, ch, cfg);
    REQUIRE(res.report.ok());

    // 1-D grid search over UL power and DL power on the exact TIN rate.
    double best = 0.0, best_e = 0.0, best_y = 0.0;
    for (int i = 0; i <= 200; ++i) {
        for (int j = 0; j <= 200; ++j) {
            const double e = cfg.p_ul_budgets[0] * i / 200.0, y = cfg.p_dl_budget * j / 200.0;
            const double r = rate_ul_tin(e, ch.f(0, 0), y * ch.phi[0], cfg.noise_power);
            if (r > best) best = r, best_e = e, best_y = y;
        }
    }
    CHECK(best_e == cfg.p_ul_budgets[0]);
    CHECK(best_y == 0.0);
    CHECK(res.solution.e_ul(0, 0) == doctest::Approx(cfg.p_ul_budgets[0]).epsilon(1e-6));
    CHECK(best == doctest::Approx(rate_ul_sic(cfg.p_ul_budgets[0], ch.f(0, 0), cfg.noise_power)).epsilon(1e-12));
    const double r = common_uplink_throughput(res.solution, ch, cfg);
    CHECK(r >= common_uplink_throughput(local, ch, cfg) - 1e-9);
    CHECK(r <= best + 1e-9);
}

TEST_CASE("local point is feasible for its own linearization")
{
    auto cfg = NetworkConfig::with_dimensions(3, 3, 8);
    cfg.gamma_min = 0.5;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto ch = draw_instance(cfg, RngSeed{seed});
        const std::vector<double> tau(8, 0.0);
        const auto init = phase_one(tau, ch, cfg);
        REQUIRE(init);
        const auto sp = build_p22(*init, tau, ch, cfg);
        const auto x = encode_point(sp, *init, cfg);
        CHECK(sp.program.max_violation(x) <= 1e-8);
        const auto res = solve_p22(*init, tau, ch, cfg);
        REQUIRE(res.report.ok());
        CHECK(res.report.objective >= init->r_common - 1e-9);
    }
}

TEST_CASE("encode and decode are inverse")
{
    auto cfg = NetworkConfig::with_dimensions(2, 2, 3);
    cfg.gamma_min = 0.2;
    const auto ch = draw_instance(cfg, RngSeed{6});
    const std::vector<double> tau(3, 1.0);
    const auto init = phase_one(tau, ch, cfg);
    REQUIRE(init);
    const auto sp = build_p22(*init, tau, ch, cfg);
    const auto back = decode_point(sp, encode_point(sp, *init, cfg), cfg);
    for (std::size_t i = 0; i < init->e_ul.data().size(); ++i)
        CHECK(back.e_ul.data()[i] == doctest::Approx(init->e_ul.data()[i]).epsilon(1e-12));
    for (std::size_t i = 0; i < init->e_dl.data().size(); ++i)
        CHECK(back.e_dl.data()[i] == doctest::Approx(init->e_dl.data()[i]).epsilon(1e-12));
}

TEST_CASE("capped sum rate stops counting at the threshold")
{
    auto cfg = NetworkConfig::with_dimensions(2, 2, 6);
    cfg.gamma_min = 0.25;
    const auto ch = draw_instance(cfg, RngSeed{13});
    const Grid2 silent(2, 6, 0.0);
    const std::vector<double> tau(6, 0.0);
    const auto res = solve_dl_program(silent, tau, ch, cfg, DlObjective::capped_sum_rate);
    REQUIRE(res.report.ok());
    CHECK(res.solution.r_common <= 2 * cfg.gamma_min + 1e-9);
    const auto mm = solve_dl_program(silent, tau, ch, cfg, DlObjective::max_min_rate);
    REQUIRE(mm.report.ok());
    if (mm.solution.r_common >= cfg.gamma_min)
        CHECK(res.solution.r_common == doctest::Approx(2 * cfg.gamma_min).epsilon(1e-6));
}

TEST_CASE("SCA trace is monotone on seeded instances")
{
    auto cfg = NetworkConfig::with_dimensions(3, 3, 8);
    cfg.gamma_min = 0.5;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto ch = draw_instance(cfg, RngSeed{seed});
        for (double t : {0.0, 1.0}) {
            const std::vector<double> tau(8, t);
            const auto init = phase_one(tau, ch, cfg);
            if (!init) continue;
            const auto res = sca_solve_p21(tau, *init, {}, ch, cfg);
            for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
                CHECK(res.objective_trace[i] >= res.objective_trace[i - 1] - 1e-9);
            CHECK(p21_violation(res.solution, tau, ch, cfg) <= 1e-6);
        }
    }
}

TEST_CASE("SCA reaches full power in a 1-subcarrier TIN instance within 3 iterations")
{
    auto cfg = NetworkConfig::with_dimensions(1, 1, 1);
    cfg.gamma_min = 0.0;
    const auto ch = draw_instance(cfg, RngSeed{2});
    const std::vector<double> tau{0.0};
    const auto init = phase_one(tau, ch, cfg);
    REQUIRE(init);
    const auto res = sca_solve_p21(tau, *init, {}, ch, cfg);
    CHECK(res.iterations <= 3);
    CHECK(res.solution.e_dl(0, 0) <= 1e-6 * cfg.p_dl_budget);
    CHECK(res.solution.e_ul(0, 0) == doctest::Approx(cfg.p_ul_budgets[0]).epsilon(1e-6));
    CHECK(res.solution.r_common ==
          doctest::Approx(rate_ul_sic(cfg.p_ul_budgets[0], ch.f(0, 0), cfg.noise_power)).epsilon(1e-6));
}

TEST_CASE("SCA restarted at its own output stops after one iteration")
{
    auto cfg = NetworkConfig::with_dimensions(2, 2, 4);
    cfg.gamma_min = 0.3;
    const auto ch = draw_instance(cfg, RngSeed{31});
    const std::vector<double> tau(4, 0.0);
    const auto init = phase_one(tau, ch, cfg);
    REQUIRE(init);
    const auto first = sca_solve_p21(tau, *init, {}, ch, cfg);
    const auto again = sca_solve_p21(tau, first.solution, {}, ch, cfg);
    CHECK(again.iterations <= 1);
    CHECK(again.solution.r_common == doctest::Approx(first.solution.r_common).epsilon(1e-5));
}
