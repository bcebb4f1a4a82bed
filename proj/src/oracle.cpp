#include <npn/oracle.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace npn {

std::vector<double> power_levels(double budget, const GridSpec& grid)
{
    if (grid.levels_per_variable < 2) throw std::invalid_argument("GridSpec: levels_per_variable must be >= 2");
    std::vector<double> out{0.0};
    const int steps = grid.levels_per_variable - 2;
    for (int j = steps; j >= 0; --j) {
        const double exponent = steps == 0 ? 0.0 : -grid.decades * j / steps;
        out.push_back(j == 0 ? budget : budget * std::pow(10.0, exponent));
    }
    return out;
}

double enumeration_size(const NetworkConfig& cfg, const GridSpec& grid)
{
    const double lev = grid.levels_per_variable;
    const double n = static_cast<double>(cfg.num_subcarriers);
    return std::pow(1.0 + static_cast<double>(cfg.num_ul_users) * lev, n) *
           std::pow(1.0 + static_cast<double>(cfg.num_dl_users) * lev, n) * std::pow(2.0, n);
}

namespace {

/// Advances a mixed-radix counter; false once it wraps to all zeros.
bool next(std::vector<int>& digits, int radix)
{
    for (int& d : digits) {
        if (++d < radix) return true;
        d = 0;
    }
    return false;
}

struct Search
{
    const ChannelRealization& ch;
    const NetworkConfig& cfg;
    /// UL levels as fractions of each user's own budget.
    std::vector<double> ul_fraction;
    std::vector<double> dl_levels;
    int levels = 0;

    std::vector<int> ul_owner, dl_owner, tau_bits;
    Grid2 e_ul, e_dl, r_dl;

    OracleResult best;

    void build_powers(const std::vector<int>& ul_idx, const std::vector<int>& dl_idx)
    {
        const auto M = cfg.num_ul_users, N = cfg.num_subcarriers;
        std::fill(e_ul.data().begin(), e_ul.data().end(), 0.0);
        std::fill(e_dl.data().begin(), e_dl.data().end(), 0.0);
        std::size_t iu = 0, id = 0;
        for (std::size_t n = 0; n < N; ++n) {
            if (ul_owner[n] > 0) {
                const auto k = static_cast<std::size_t>(ul_owner[n] - 1);
                e_ul(k, n) = ul_fraction[ul_idx[iu++]] * cfg.p_ul_budgets[k];
            }
            if (dl_owner[n] > 0) e_dl(static_cast<std::size_t>(dl_owner[n] - 1), n) = dl_levels[dl_idx[id++]];
        }
        for (std::size_t k = 0; k < M; ++k) {
            double s = 0.0;
            for (std::size_t n = 0; n < N; ++n) s += e_ul(k, n);
            if (s > cfg.p_ul_budgets[k]) {
                for (std::size_t n = 0; n < N; ++n) e_ul(k, n) *= cfg.p_ul_budgets[k] / s;
            }
        }
        double s = 0.0;
        for (double v : e_dl.data()) s += v;
        if (s > cfg.p_dl_budget) {
            for (double& v : e_dl.data()) v *= cfg.p_dl_budget / s;
        }
    }

    /// Common UL throughput, or a negative value when QoS fails.
    double evaluate()
    {
        const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
        const double s2 = cfg.noise_power;
        std::fill(r_dl.data().begin(), r_dl.data().end(), 0.0);
        std::vector<double> dl_total(L, 0.0), ul_total(M, 0.0);
        for (std::size_t n = 0; n < N; ++n) {
            const int ko = ul_owner[n] - 1, lo = dl_owner[n] - 1;
            const double eu = ko >= 0 ? e_ul(static_cast<std::size_t>(ko), n) : 0.0;
            const double fu = ko >= 0 ? ch.f(static_cast<std::size_t>(ko), n) : 0.0;
            const double ed = lo >= 0 ? e_dl(static_cast<std::size_t>(lo), n) : 0.0;
            if (lo >= 0) {
                const auto l = static_cast<std::size_t>(lo);
                const double itf = ko >= 0 ? eu * ch.g(static_cast<std::size_t>(ko), l, n) : 0.0;
                double r = rate_dl(ed, ch.h(l, n), itf, s2);
                if (tau_bits[n]) r = std::min(r, rate_bs(ed * ch.phi[n], eu * fu, s2));
                r_dl(l, n) = r;
                dl_total[l] += r;
            }
            if (ko >= 0) {
                ul_total[static_cast<std::size_t>(ko)] +=
                    tau_bits[n] ? rate_ul_sic(eu, fu, s2) : rate_ul_tin(eu, fu, ed * ch.phi[n], s2);
            }
        }
        for (double t : dl_total) {
            if (t < cfg.gamma_min) return -1.0;
        }
        return *std::min_element(ul_total.begin(), ul_total.end());
    }

    void record(double value)
    {
        const auto N = cfg.num_subcarriers;
        best.feasible = true;
        best.r_best = value;
        auto sol = IntegralSolution::zeros(cfg);
        for (std::size_t n = 0; n < N; ++n) {
            if (ul_owner[n] > 0) sol.a_ul(static_cast<std::size_t>(ul_owner[n] - 1), n) = 1.0;
            if (dl_owner[n] > 0) sol.a_dl(static_cast<std::size_t>(dl_owner[n] - 1), n) = 1.0;
            sol.tau[n] = tau_bits[n];
        }
        sol.e_ul = e_ul;
        sol.e_dl = e_dl;
        sol.r_dl = r_dl;
        sol.refresh_throughput(ch, cfg);
        sol.r_common = sol.achieved_common_throughput;
        best.argmax = std::move(sol);
    }

    void run()
    {
        const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
        e_ul = Grid2(M, N);
        e_dl = Grid2(L, N);
        r_dl = Grid2(L, N);
        ul_owner.assign(N, 0);
        do {
            dl_owner.assign(N, 0);
            do {
                const auto n_ul = static_cast<std::size_t>(std::count_if(ul_owner.begin(), ul_owner.end(), [](int o) { return o > 0; }));
                const auto n_dl = static_cast<std::size_t>(std::count_if(dl_owner.begin(), dl_owner.end(), [](int o) { return o > 0; }));
                tau_bits.assign(N, 0);
                do {
                    std::vector<int> ul_idx(n_ul, 0);
                    do {
                        std::vector<int> dl_idx(n_dl, 0);
                        do {
                            build_powers(ul_idx, dl_idx);
                            ++best.evaluated;
                            const double v = evaluate();
                            if (v >= 0.0 && (!best.feasible || v > best.r_best)) record(v);
                        } while (next(dl_idx, levels));
                    } while (next(ul_idx, levels));
                } while (next(tau_bits, 2));
            } while (next(dl_owner, static_cast<int>(L) + 1));
        } while (next(ul_owner, static_cast<int>(M) + 1));
    }
};

} // namespace

OracleResult brute_force_common_throughput(const ChannelRealization& ch, const NetworkConfig& cfg,
                                           const GridSpec& grid)
{
    cfg.validate();
    ch.validate(cfg);
    const double size = enumeration_size(cfg, grid);
    if (!(size <= grid.max_enumeration)) {
        throw std::length_error("brute force needs " + std::to_string(size) + " evaluations, limit is " +
                                std::to_string(grid.max_enumeration) +
                                "; reduce subcarriers, users or levels_per_variable");
    }
    Search s{ch, cfg, power_levels(1.0, grid), power_levels(cfg.p_dl_budget, grid), grid.levels_per_variable,
             {}, {}, {}, {}, {}, {}, {}};
    s.run();
    return s.best;
}

} // namespace npn
