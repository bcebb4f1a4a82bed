#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <npn/channel.hpp>
#include <npn/model.hpp>

using namespace npn;

TEST_CASE("rate_ul_sic")
{
    CHECK(rate_ul_sic(0.0, 1e-9, 1e-5) == 0.0);
    CHECK(rate_ul_sic(1e4, 1e-9, 1e-5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rate_ul_sic(1000.0, 1e-9, 1e-5) == doctest::Approx(std::log2(1.1)).epsilon(1e-14));
    // log2(101) to 17 digits
    CHECK(rate_ul_sic(1000.0, 1e-6, 1e-5) == doctest::Approx(6.6582114827517947).epsilon(1e-14));
}

TEST_CASE("rate_ul_tin")
{
    CHECK(rate_ul_tin(37.0, 2e-8, 0.0, 1e-5) == doctest::Approx(rate_ul_sic(37.0, 2e-8, 1e-5)).epsilon(1e-15));
    CHECK(rate_ul_tin(0.0, 1e-9, 3e-4, 1e-5) == 0.0);
    // log2(1.01)
    CHECK(rate_ul_tin(1000.0, 1e-9, 9e-5, 1e-5) == doctest::Approx(0.014355292977070041).epsilon(1e-13));
}

TEST_CASE("rate_bs and rate_dl")
{
    CHECK(rate_bs(0.0, 5.0, 1e-5) == 0.0);
    CHECK(rate_bs(1e-4 + 1e-5, 1e-4, 1e-5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rate_bs(1e-3, 1e-4, 1e-5) == doctest::Approx(std::log2(1.0 + 1e-3 / 1.1e-4)).epsilon(1e-14));
    CHECK(rate_bs(1e-3, 1e-4, 1e-5) == doctest::Approx(3.3349).epsilon(1e-4));

    CHECK(rate_dl(0.0, 1e-7, 2e-5, 1e-5) == 0.0);
    CHECK(rate_dl(300.0, 1e-7, 2e-5, 1e-5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rate_dl(1e4, 1e-7, 2e-5, 1e-5) == doctest::Approx(std::log2(1.0 + 1e-3 / 3e-5)).epsilon(1e-14));
}

TEST_CASE("rates reject bad arguments")
{
    CHECK_THROWS_AS(rate_ul_sic(-1.0, 1e-9, 1e-5), std::domain_error);
    CHECK_THROWS_AS(rate_ul_sic(1.0, 1e-9, 0.0), std::domain_error);
    CHECK_THROWS_AS(rate_dl(1.0, std::nan(""), 0.0, 1e-5), std::domain_error);
}

TEST_CASE("small SNR keeps relative precision")
{
    const double snr = 1e-12;
    CHECK(rate_ul_sic(snr, 1.0, 1.0) == doctest::Approx(snr / std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("common throughput of trivial solutions")
{
    auto cfg = NetworkConfig::with_dimensions(1, 1, 1);
    auto ch = ChannelRealization::uniform(cfg, 1e-9);
    auto sol = IntegralSolution::zeros(cfg);
    CHECK(common_uplink_throughput(sol, ch, cfg) == 0.0);

    sol.a_ul(0, 0) = 1.0;
    sol.tau[0] = 1.0;
    sol.e_ul(0, 0) = cfg.noise_power / ch.f(0, 0);
    CHECK(common_uplink_throughput(sol, ch, cfg) == doctest::Approx(1.0).epsilon(1e-13));
}

namespace {

// Straight per-term summation with std::log2, sharing nothing with the library.
double resum_common(const RelaxedSolution& s, const ChannelRealization& ch, const NetworkConfig& cfg)
{
    double best = INFINITY;
    for (std::size_t k = 0; k < cfg.num_ul_users; ++k) {
        double total = 0.0;
        for (std::size_t n = 0; n < cfg.num_subcarriers; ++n) {
            double i_dl = 0.0;
            for (std::size_t l = 0; l < cfg.num_dl_users; ++l) i_dl += s.e_dl(l, n) * ch.phi[n];
            const double sig = s.e_ul(k, n) * ch.f(k, n);
            total += (1.0 - s.tau[n]) * std::log2(1.0 + sig / (i_dl + cfg.noise_power)) +
                     s.tau[n] * std::log2(1.0 + sig / cfg.noise_power);
        }
        best = std::min(best, total);
    }
    return best;
}

} // namespace

TEST_CASE("common throughput matches an independent re-summation")
{
    auto cfg = NetworkConfig::with_dimensions(2, 2, 2);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto ch = draw_instance(cfg, RngSeed{seed});
        Rng rng(RngSeed{seed + 100});
        auto sol = RelaxedSolution::zeros(cfg);
        for (std::size_t n = 0; n < 2; ++n) {
            sol.tau[n] = rng.uniform();
            for (std::size_t k = 0; k < 2; ++k) sol.e_ul(k, n) = 400.0 * rng.uniform();
            for (std::size_t l = 0; l < 2; ++l) sol.e_dl(l, n) = 4000.0 * rng.uniform();
        }
        CHECK(common_uplink_throughput(sol, ch, cfg) == doctest::Approx(resum_common(sol, ch, cfg)).epsilon(1e-12));
    }
}

TEST_CASE("checker flags QoS and exclusivity violations")
{
    auto cfg = NetworkConfig::with_dimensions(2, 2, 2);
    cfg.gamma_min = 0.5;
    const auto ch = draw_instance(cfg, RngSeed{3});
    auto sol = IntegralSolution::zeros(cfg);
    sol.refresh_throughput(ch, cfg);
    auto rep = check_p1_feasible(sol, ch, cfg, 1e-6);
    CHECK_FALSE(rep.feasible());
    CHECK_FALSE(rep.find("qos_threshold").passed);
    CHECK(rep.find("qos_threshold").worst_violation == doctest::Approx(0.5));

    cfg.gamma_min = 0.0;
    sol.a_ul(0, 1) = 1.0;
    sol.a_ul(1, 1) = 1.0;
    sol.refresh_throughput(ch, cfg);
    rep = check_p1_feasible(sol, ch, cfg, 1e-6);
    CHECK_FALSE(rep.find("ul_subcarrier_exclusive").passed);
    CHECK(rep.find("ul_subcarrier_exclusive").location.find("n=1") != std::string::npos);
    CHECK(rep.find("dl_subcarrier_exclusive").passed);
}

TEST_CASE("checker flags an over-budget and an undecodable point")
{
    auto cfg = NetworkConfig::with_dimensions(1, 1, 1);
    auto ch = ChannelRealization::uniform(cfg, 1e-7);
    auto sol = IntegralSolution::zeros(cfg);
    sol.a_ul(0, 0) = 1.0;
    sol.a_dl(0, 0) = 1.0;
    sol.e_ul(0, 0) = 2.0 * cfg.p_ul_budgets[0];
    sol.e_dl(0, 0) = cfg.p_dl_budget;
    sol.tau[0] = 1.0;
    sol.r_dl(0, 0) = 30.0;
    sol.refresh_throughput(ch, cfg);
    const auto rep = check_p1_feasible(sol, ch, cfg, 1e-6);
    CHECK_FALSE(rep.find("ul_power_budget").passed);
    CHECK_FALSE(rep.find("sic_decodability").passed);
    CHECK_FALSE(rep.find("dl_rate").passed);
    CHECK(rep.find("dl_power_budget").passed);
}

TEST_CASE("unit conversions")
{
    CHECK(dbm_to_mw(30.0) == doctest::Approx(1000.0));
    CHECK(dbm_to_mw(-50.0) == doctest::Approx(1e-5));
    CHECK(mw_to_dbm(1e4) == doctest::Approx(40.0));
    CHECK(db_to_linear(-60.0) == doctest::Approx(1e-6));
}
