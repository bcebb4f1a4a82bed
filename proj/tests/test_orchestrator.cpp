#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <npn/channel.hpp>
#include <npn/orchestrator.hpp>

using namespace npn;

namespace {

NetworkConfig small_config(double gamma)
{
    auto cfg = NetworkConfig::with_dimensions(3, 3, 8);
    cfg.gamma_min = gamma;
    return cfg;
}

RelaxedSolution as_relaxed(const IntegralSolution& s)
{
    RelaxedSolution r;
    r.a_ul = s.a_ul;
    r.a_dl = s.a_dl;
    r.tau = s.tau;
    r.e_ul = s.e_ul;
    r.e_dl = s.e_dl;
    r.r_dl = s.r_dl;
    r.r_common = s.achieved_common_throughput;
    return r;
}

} // namespace

TEST_CASE("scheme names round-trip")
{
    for (auto s : all_schemes) CHECK(parse_scheme(to_string(s)) == s);
    CHECK(parse_scheme("sic") == SchemeKind::fixed_sic);
    CHECK_THROWS(parse_scheme("both"));
}

TEST_CASE("zero threshold is always feasible, a huge one never")
{
    auto cfg = NetworkConfig::desk_default();
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto ch = draw_instance(cfg, RngSeed{seed});
        cfg.gamma_min = 0.0;
        CHECK(check_feasibility(ch, cfg).feasible);
        cfg.gamma_min = 1e6;
        CHECK_FALSE(check_feasibility(ch, cfg).feasible);
    }
}

TEST_CASE("single DL user on a single subcarrier has the closed-form L*")
{
    auto cfg = NetworkConfig::with_dimensions(1, 1, 1);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto ch = draw_instance(cfg, RngSeed{seed});
        const double closed = std::log2(1.0 + cfg.p_dl_budget * ch.h(0, 0) / cfg.noise_power);
        cfg.gamma_min = 0.5 * closed;
        auto f = check_feasibility(ch, cfg);
        CHECK(f.feasible);
        CHECK(f.l_star == doctest::Approx(closed).epsilon(1e-6));
        cfg.gamma_min = 1.01 * closed;
        f = check_feasibility(ch, cfg);
        CHECK_FALSE(f.feasible);
        CHECK(f.l_star == doctest::Approx(closed).epsilon(1e-6));
    }
}

TEST_CASE("alternating trace is monotone and never ends below its start")
{
    const auto cfg = small_config(0.5);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto ch = draw_instance(cfg, RngSeed{seed});
        const std::vector<double> tau(cfg.num_subcarriers, 0.0);
        const auto init = phase_one(tau, ch, cfg);
        if (!init) continue;
        const auto res = solve_p2_alternating(*init, ch, cfg);
        REQUIRE(res.objective_trace.size() >= 2);
        for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
            CHECK(res.objective_trace[i] >= res.objective_trace[i - 1] - 1e-9);
        CHECK(res.solution.r_common >= init->r_common - 1e-9);
        CHECK(res.rounds <= 20);

        // Fixed-point consistency.
        const auto again = solve_p2_alternating(res.solution, ch, cfg);
        CHECK(std::abs(again.solution.r_common - res.solution.r_common) <=
              1e-5 * std::max(1.0, res.solution.r_common));
    }
}

TEST_CASE("negligible cross-BS gain drives every mode to TIN")
{
    auto cfg = small_config(0.5);
    auto ch = draw_instance(cfg, RngSeed{7});
    for (auto& p : ch.phi) p = 1e-18;
    const auto all = solve_all_schemes(ch, cfg);
    const auto& adaptive = all[0];
    const auto& tin = all[2];
    REQUIRE(adaptive.relaxed);
    REQUIRE(tin.relaxed);
    for (double t : adaptive.relaxed->tau) CHECK(t <= 1e-6);
    CHECK(adaptive.relaxed_bound == doctest::Approx(tin.relaxed_bound).epsilon(1e-6));
}

TEST_CASE("without cross-BS gain or QoS the three schemes coincide")
{
    auto cfg = small_config(0.0);
    auto ch = draw_instance(cfg, RngSeed{11});
    for (auto& p : ch.phi) p = 0.0;
    const auto all = solve_all_schemes(ch, cfg);
    REQUIRE(all[0].feasible);
    REQUIRE(all[1].feasible);
    REQUIRE(all[2].feasible);
    CHECK(all[0].achieved() == doctest::Approx(all[1].achieved()).epsilon(1e-6));
    CHECK(all[0].achieved() == doctest::Approx(all[2].achieved()).epsilon(1e-6));
    CHECK(all[0].relaxed_bound == doctest::Approx(all[2].relaxed_bound).epsilon(1e-6));
}

TEST_CASE("dominance, upper bound and safety on seeded instances")
{
    const auto cfg = small_config(0.5);
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto ch = draw_instance(cfg, RngSeed{seed});
        const auto all = solve_all_schemes(ch, cfg, {}, seed);
        const auto& a = all[0];
        CHECK(a.relaxed_bound >= all[1].relaxed_bound - 1e-9);
        CHECK(a.relaxed_bound >= all[2].relaxed_bound - 1e-9);
        for (const auto& r : all) {
            CHECK(r.diagnostics.channel_hash == channel_hash(ch));
            CHECK(r.feasible == r.solution.has_value());
            if (!r.feasible) continue;
            CHECK(r.achieved() <= r.relaxed_bound + 1e-6);
            const auto rep = check_p1_feasible(*r.solution, ch, cfg, 1e-6);
            CHECK_MESSAGE(rep.feasible(), rep.summary());
        }
    }
}

TEST_CASE("infeasible instance yields no solution")
{
    const auto cfg = small_config(1e6);
    const auto ch = draw_instance(cfg, RngSeed{1});
    const auto r = solve_pipeline(SchemeKind::adaptive, ch, cfg);
    CHECK_FALSE(r.feasible);
    CHECK_FALSE(r.solution.has_value());
    CHECK(r.diagnostics.status == "qos_infeasible");
}

TEST_CASE("already-binary input keeps its allocations")
{
    const auto cfg = small_config(0.5);
    const auto ch = draw_instance(cfg, RngSeed{2});
    const auto tin = solve_pipeline(SchemeKind::fixed_tin, ch, cfg);
    REQUIRE(tin.feasible);
    const auto res = round_and_resolve(as_relaxed(*tin.solution), ch, cfg, {}, 0.0);
    REQUIRE(res.feasible);
    CHECK(res.solution.a_ul == tin.solution->a_ul);
    CHECK(res.solution.a_dl == tin.solution->a_dl);
    CHECK(res.solution.achieved_common_throughput >= tin.achieved() - 1e-6);
}

TEST_CASE("fractional column (0.6, 0.4) goes to the first user")
{
    auto cfg = NetworkConfig::with_dimensions(2, 1, 2);
    cfg.gamma_min = 0.0;
    const auto ch = ChannelRealization::uniform(cfg, 1e-8);
    auto relaxed = RelaxedSolution::zeros(cfg);
    const double p = cfg.p_ul_budgets[0];
    relaxed.a_ul(0, 0) = 0.6, relaxed.a_ul(1, 0) = 0.4;
    relaxed.a_ul(0, 1) = 0.1, relaxed.a_ul(1, 1) = 0.9;
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t n = 0; n < 2; ++n) relaxed.e_ul(k, n) = relaxed.a_ul(k, n) * p;
    }
    const auto res = round_and_resolve(relaxed, ch, cfg);
    REQUIRE(res.feasible);
    CHECK(res.solution.a_ul(0, 0) == 1.0);
    CHECK(res.solution.a_ul(1, 0) == 0.0);
    CHECK(res.solution.a_ul(1, 1) == 1.0);
    CHECK(res.solution.a_ul(0, 1) == 0.0);
    for (double t : res.solution.tau) CHECK((t == 0.0 || t == 1.0));
}

TEST_CASE("rounding threshold on tau")
{
    auto cfg = NetworkConfig::with_dimensions(1, 1, 3);
    cfg.gamma_min = 0.0;
    const auto ch = draw_instance(cfg, RngSeed{4});
    auto relaxed = RelaxedSolution::zeros(cfg);
    relaxed.tau = {0.49, 0.5, 0.51};
    for (std::size_t n = 0; n < 3; ++n) {
        relaxed.a_ul(0, n) = 1.0 / 3.0;
        relaxed.e_ul(0, n) = cfg.p_ul_budgets[0] / 3.0;
    }
    const auto res = round_and_resolve(relaxed, ch, cfg, {}, std::nullopt);
    REQUIRE(res.feasible);
    const auto rep = check_p1_feasible(res.solution, ch, cfg, 1e-6);
    CHECK_MESSAGE(rep.feasible(), rep.summary());
    // With the DL silent every subcarrier is decodable, so the polish may only raise modes.
    CHECK(res.solution.tau[1] == 1.0);
    CHECK(res.solution.tau[2] == 1.0);
}
