#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <npn/channel.hpp>

using namespace npn;

TEST_CASE("path loss reference points")
{
    const auto cfg = NetworkConfig::desk_default();
    CHECK(path_loss_gain(10.0, cfg) == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(path_loss_gain(100.0, cfg) == doctest::Approx(1e-9).epsilon(1e-12));
    CHECK(path_loss_gain(20.0, cfg) == doctest::Approx(1.25e-7).epsilon(1e-12));
    CHECK_THROWS_AS(path_loss_gain(0.0, cfg), std::domain_error);
}

TEST_CASE("derived seeds are distinct and reproducible")
{
    CHECK(derive_seed(RngSeed{7}, 0).value == derive_seed(RngSeed{7}, 0).value);
    CHECK(derive_seed(RngSeed{7}, 0).value != derive_seed(RngSeed{7}, 1).value);
    CHECK(derive_seed(RngSeed{7}, 0).value != derive_seed(RngSeed{8}, 0).value);
}

TEST_CASE("same seed gives the same topology and channels")
{
    const auto cfg = NetworkConfig::desk_default();
    Topology a, b;
    const auto ca = draw_instance(cfg, RngSeed{42}, &a);
    const auto cb = draw_instance(cfg, RngSeed{42}, &b);
    CHECK(a == b);
    CHECK(ca == cb);
    CHECK(channel_hash(ca) == channel_hash(cb));
    CHECK(channel_hash(ca) != channel_hash(draw_instance(cfg, RngSeed{43})));
}

TEST_CASE("users lie in their disc with mean radius 2R/3")
{
    auto cfg = NetworkConfig::with_dimensions(50, 50, 1);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto topo = draw_topology(cfg, RngSeed{s});
        for (const auto& p : topo.ul_user_pos) {
            const double d = distance(p, topo.nonpublic_bs_pos);
            REQUIRE(d <= cfg.cell_radius);
            sum += d;
            ++count;
        }
        for (const auto& p : topo.dl_user_pos) {
            const double d = distance(p, topo.public_bs_pos);
            REQUIRE(d <= cfg.cell_radius);
            sum += d;
            ++count;
        }
    }
    CHECK(count == 10000);
    CHECK(sum / static_cast<double>(count) == doctest::Approx(2.0 / 3.0 * cfg.cell_radius).epsilon(0.02));
    CHECK(distance(draw_topology(cfg, RngSeed{0}).public_bs_pos, draw_topology(cfg, RngSeed{0}).nonpublic_bs_pos) ==
          doctest::Approx(cfg.bs_separation));
}

TEST_CASE("complex Gaussian has unit power and exponential magnitude")
{
    Rng rng(RngSeed{5});
    const int n = 100000;
    double power = 0.0, below_one = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto z = rng.cscg();
        const double p = z[0] * z[0] + z[1] * z[1];
        power += p;
        if (p < 1.0) below_one += 1.0;
    }
    CHECK(power / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(below_one / n == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(0.02));
}

TEST_CASE("mean UL gain matches path loss at the user's distance")
{
    auto cfg = NetworkConfig::with_dimensions(2, 1, 20000);
    Topology topo;
    const auto ch = draw_instance(cfg, RngSeed{9}, &topo);
    for (std::size_t k = 0; k < 2; ++k) {
        double mean = 0.0;
        for (std::size_t n = 0; n < cfg.num_subcarriers; ++n) mean += ch.f(k, n);
        mean /= static_cast<double>(cfg.num_subcarriers);
        const double d = std::max(min_link_distance, distance(topo.ul_user_pos[k], topo.nonpublic_bs_pos));
        CHECK(mean == doctest::Approx(path_loss_gain(d, cfg)).epsilon(0.03));
    }
}

TEST_CASE("channel shapes follow the configuration")
{
    const auto cfg = NetworkConfig::with_dimensions(3, 2, 5);
    const auto ch = draw_instance(cfg, RngSeed{1});
    CHECK(ch.f.rows() == 3);
    CHECK(ch.f.cols() == 5);
    CHECK(ch.h.rows() == 2);
    CHECK(ch.phi.size() == 5);
    CHECK(ch.g.dim0() == 3);
    CHECK(ch.g.dim1() == 2);
    CHECK(ch.g.dim2() == 5);
    CHECK_NOTHROW(ch.validate(cfg));
    for (double v : ch.f.data()) CHECK(v > 0.0);
}
