#pragma once
#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include <npn/model.hpp>

namespace npn {

struct RngSeed
{
    std::uint64_t value = 0;
};

/// splitmix64 finalizer; the documented mixing function for derived seeds.
std::uint64_t splitmix64(std::uint64_t x);
/// Seed for stream `index` derived from `master`: splitmix64(master ^ splitmix64(index + 1)).
RngSeed derive_seed(RngSeed master, std::uint64_t index);

/*
 * Portable random source: std::mt19937_64 (bit-exact by the standard)
 * with hand-written transforms so no library distribution is involved.
 */
class Rng
{
public:
    static constexpr int version = 1;

    explicit Rng(RngSeed seed) : engine_(seed.value) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1].
    double uniform_open_zero() { return 1.0 - uniform(); }
    /// Standard normal via Box-Muller (both outputs are used).
    double normal();
    /// Zero-mean unit-variance circularly-symmetric complex Gaussian, as (re, im).
    std::array<double, 2> cscg();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct Point2
{
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point2&) const = default;
};

double distance(Point2 a, Point2 b);

struct Topology
{
    Point2 public_bs_pos;
    Point2 nonpublic_bs_pos;
    std::vector<Point2> ul_user_pos;
    std::vector<Point2> dl_user_pos;

    bool operator==(const Topology&) const = default;
};

inline constexpr double min_link_distance = 1.0;

/// theta0 * (d / d0)^(-xi); throws std::domain_error for d <= 0.
double path_loss_gain(double distance_m, const NetworkConfig& cfg);

/// Public BS at (0, 0), non-public BS at (0, bs_separation); users uniform on their serving disc.
Topology draw_topology(const NetworkConfig& cfg, RngSeed seed);

/// Path loss (distance clamped to min_link_distance) times |z|^2, z ~ CN(0, 1), i.i.d. per link and subcarrier.
ChannelRealization draw_channels(const Topology& topo, const NetworkConfig& cfg, RngSeed seed);

/// Topology from derive_seed(seed, 0), channels from derive_seed(seed, 1).
ChannelRealization draw_instance(const NetworkConfig& cfg, RngSeed seed, Topology* topo_out = nullptr);

} // namespace npn
