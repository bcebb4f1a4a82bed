#include <npn/channel.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace npn {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

RngSeed derive_seed(RngSeed master, std::uint64_t index)
{
    return RngSeed{splitmix64(master.value ^ splitmix64(index + 1))};
}

double Rng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_open_zero()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::array<double, 2> Rng::cscg()
{
    const double scale = std::numbers::sqrt2 / 2.0;
    const double re = normal();
    const double im = normal();
    return {re * scale, im * scale};
}

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double path_loss_gain(double distance_m, const NetworkConfig& cfg)
{
    if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
        throw std::domain_error("path_loss_gain: distance must be positive");
    }
    return cfg.pathloss_ref_gain * std::pow(distance_m / cfg.pathloss_ref_dist, -cfg.pathloss_exponent);
}

namespace {

Point2 uniform_in_disc(Rng& rng, Point2 center, double radius)
{
    const double r = radius * std::sqrt(rng.uniform());
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    return {center.x + r * std::cos(angle), center.y + r * std::sin(angle)};
}

double link_mean_gain(Point2 a, Point2 b, const NetworkConfig& cfg)
{
    return path_loss_gain(std::max(distance(a, b), min_link_distance), cfg);
}

double fading_power(Rng& rng)
{
    const auto z = rng.cscg();
    const double p = z[0] * z[0] + z[1] * z[1];
    // Rayleigh power is almost surely positive; keep the gain invariant strict.
    return p > 0.0 ? p : 1e-300;
}

} // namespace

Topology draw_topology(const NetworkConfig& cfg, RngSeed seed)
{
    cfg.validate();
    Rng rng(seed);
    Topology topo;
    topo.public_bs_pos = {0.0, 0.0};
    topo.nonpublic_bs_pos = {0.0, cfg.bs_separation};
    topo.ul_user_pos.reserve(cfg.num_ul_users);
    for (std::size_t k = 0; k < cfg.num_ul_users; ++k) {
        topo.ul_user_pos.push_back(uniform_in_disc(rng, topo.nonpublic_bs_pos, cfg.cell_radius));
    }
    topo.dl_user_pos.reserve(cfg.num_dl_users);
    for (std::size_t l = 0; l < cfg.num_dl_users; ++l) {
        topo.dl_user_pos.push_back(uniform_in_disc(rng, topo.public_bs_pos, cfg.cell_radius));
    }
    return topo;
}

ChannelRealization draw_channels(const Topology& topo, const NetworkConfig& cfg, RngSeed seed)
{
    cfg.validate();
    const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
    if (topo.ul_user_pos.size() != M || topo.dl_user_pos.size() != L) {
        throw contract_error("draw_channels: topology does not match NetworkConfig");
    }
    Rng rng(seed);
    ChannelRealization ch;
    ch.f = Grid2(M, N);
    ch.phi.assign(N, 0.0);
    ch.h = Grid2(L, N);
    ch.g = Grid3(M, L, N);

    // Fixed draw order: f, phi, h, g; each row-major with n innermost.
    for (std::size_t k = 0; k < M; ++k) {
        const double mean = link_mean_gain(topo.ul_user_pos[k], topo.nonpublic_bs_pos, cfg);
        for (std::size_t n = 0; n < N; ++n) ch.f(k, n) = mean * fading_power(rng);
    }
    const double bs_mean = link_mean_gain(topo.public_bs_pos, topo.nonpublic_bs_pos, cfg);
    for (std::size_t n = 0; n < N; ++n) ch.phi[n] = bs_mean * fading_power(rng);
    for (std::size_t l = 0; l < L; ++l) {
        const double mean = link_mean_gain(topo.public_bs_pos, topo.dl_user_pos[l], cfg);
        for (std::size_t n = 0; n < N; ++n) ch.h(l, n) = mean * fading_power(rng);
    }
    for (std::size_t k = 0; k < M; ++k) {
        for (std::size_t l = 0; l < L; ++l) {
            const double mean = link_mean_gain(topo.ul_user_pos[k], topo.dl_user_pos[l], cfg);
            for (std::size_t n = 0; n < N; ++n) ch.g(k, l, n) = mean * fading_power(rng);
        }
    }
    return ch;
}

ChannelRealization draw_instance(const NetworkConfig& cfg, RngSeed seed, Topology* topo_out)
{
    auto topo = draw_topology(cfg, derive_seed(seed, 0));
    auto ch = draw_channels(topo, cfg, derive_seed(seed, 1));
    if (topo_out) *topo_out = std::move(topo);
    return ch;
}

} // namespace npn
