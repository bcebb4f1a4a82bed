#include <npn/model.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace npn {

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// =======================================================================
// NetworkConfig
// =======================================================================

void NetworkConfig::validate() const
{
    auto fail = [](const std::string& what) { throw std::invalid_argument("NetworkConfig: " + what); };
    if (num_ul_users < 1 || num_dl_users < 1 || num_subcarriers < 1) fail("all counts must be >= 1");
    if (p_ul_budgets.size() != num_ul_users) fail("p_ul_budgets must have one entry per UL user");
    if (!(p_dl_budget > 0.0) || !std::isfinite(p_dl_budget)) fail("p_dl_budget must be positive");
    for (double p : p_ul_budgets) {
        if (!(p > 0.0) || !std::isfinite(p)) fail("every UL budget must be positive");
    }
    if (!(noise_power > 0.0) || !std::isfinite(noise_power)) fail("noise_power must be positive");
    if (!(gamma_min >= 0.0) || !std::isfinite(gamma_min)) fail("gamma_min must be >= 0");
    if (!(pathloss_exponent > 0.0)) fail("pathloss_exponent must be positive");
    if (!(pathloss_ref_gain > 0.0) || !(pathloss_ref_dist > 0.0)) fail("path-loss reference must be positive");
    if (!(cell_radius > 0.0)) fail("cell_radius must be positive");
    if (!(bs_separation >= 0.0)) fail("bs_separation must be >= 0");
}

NetworkConfig NetworkConfig::with_dimensions(std::size_t ul_users, std::size_t dl_users, std::size_t subcarriers)
{
    NetworkConfig cfg;
    cfg.num_ul_users = ul_users;
    cfg.num_dl_users = dl_users;
    cfg.num_subcarriers = subcarriers;
    cfg.p_dl_budget = dbm_to_mw(40.0);
    cfg.p_ul_budgets.assign(ul_users, dbm_to_mw(30.0));
    cfg.noise_power = dbm_to_mw(-50.0);
    cfg.gamma_min = 4.0;
    cfg.pathloss_ref_gain = db_to_linear(-60.0);
    cfg.pathloss_ref_dist = 10.0;
    cfg.pathloss_exponent = 3.0;
    cfg.cell_radius = 100.0;
    cfg.bs_separation = 100.0;
    return cfg;
}

NetworkConfig NetworkConfig::paper_default() { return with_dimensions(20, 20, 100); }
NetworkConfig NetworkConfig::desk_default() { return with_dimensions(8, 8, 32); }

void NetworkConfig::set_uniform_ul_budget(double mw) { p_ul_budgets.assign(num_ul_users, mw); }

// =======================================================================
// ChannelRealization
// =======================================================================

ChannelRealization ChannelRealization::uniform(const NetworkConfig& cfg, double gain)
{
    ChannelRealization ch;
    ch.f = Grid2(cfg.num_ul_users, cfg.num_subcarriers, gain);
    ch.phi.assign(cfg.num_subcarriers, gain);
    ch.h = Grid2(cfg.num_dl_users, cfg.num_subcarriers, gain);
    ch.g = Grid3(cfg.num_ul_users, cfg.num_dl_users, cfg.num_subcarriers, gain);
    return ch;
}

void ChannelRealization::validate(const NetworkConfig& cfg) const
{
    const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
    if (f.rows() != M || f.cols() != N || phi.size() != N || h.rows() != L || h.cols() != N ||
        g.dim0() != M || g.dim1() != L || g.dim2() != N) {
        throw contract_error("ChannelRealization: dimensions do not match NetworkConfig");
    }
    auto check = [](const std::vector<double>& v) {
        for (double x : v) {
            if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("ChannelRealization: gains must be positive");
        }
    };
    check(f.data());
    for (double x : phi) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw std::invalid_argument("ChannelRealization: cross-BS gains must be non-negative");
    }
    check(h.data());
    check(g.data());
}

std::uint64_t channel_hash(const ChannelRealization& ch)
{
    std::uint64_t hash = 14695981039346656037ull;
    auto mix = [&](const std::vector<double>& v) {
        for (double x : v) {
            auto bits = std::bit_cast<std::uint64_t>(x);
            for (int b = 0; b < 8; ++b) {
                hash ^= (bits >> (8 * b)) & 0xffu;
                hash *= 1099511628211ull;
            }
        }
    };
    mix(ch.f.data());
    mix(ch.phi);
    mix(ch.h.data());
    mix(ch.g.data());
    return hash;
}

// =======================================================================
// Solutions
// =======================================================================

namespace {

template <class Sol>
void check_solution_dims(const Sol& s, const NetworkConfig& cfg, const char* what)
{
    const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
    auto ok2 = [](const Grid2& g, std::size_t r, std::size_t c) { return g.rows() == r && g.cols() == c; };
    if (!ok2(s.a_ul, M, N) || !ok2(s.e_ul, M, N) || !ok2(s.a_dl, L, N) || !ok2(s.e_dl, L, N) ||
        !ok2(s.r_dl, L, N) || s.tau.size() != N) {
        throw contract_error(std::string(what) + ": dimensions do not match NetworkConfig");
    }
}

template <class Sol>
void fill_zeros(Sol& s, const NetworkConfig& cfg)
{
    const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
    s.a_ul = Grid2(M, N);
    s.a_dl = Grid2(L, N);
    s.tau.assign(N, 0.0);
    s.e_ul = Grid2(M, N);
    s.e_dl = Grid2(L, N);
    s.r_dl = Grid2(L, N);
}

} // namespace

RelaxedSolution RelaxedSolution::zeros(const NetworkConfig& cfg)
{
    RelaxedSolution s;
    fill_zeros(s, cfg);
    return s;
}

void RelaxedSolution::check_dimensions(const NetworkConfig& cfg) const { check_solution_dims(*this, cfg, "RelaxedSolution"); }

IntegralSolution IntegralSolution::zeros(const NetworkConfig& cfg)
{
    IntegralSolution s;
    fill_zeros(s, cfg);
    s.per_ul_user_throughput.assign(cfg.num_ul_users, 0.0);
    s.per_dl_user_throughput.assign(cfg.num_dl_users, 0.0);
    return s;
}

void IntegralSolution::check_dimensions(const NetworkConfig& cfg) const { check_solution_dims(*this, cfg, "IntegralSolution"); }

void IntegralSolution::refresh_throughput(const ChannelRealization& ch, const NetworkConfig& cfg)
{
    check_dimensions(cfg);
    per_ul_user_throughput = ul_user_throughputs(e_ul, e_dl, tau, ch, cfg);
    per_dl_user_throughput.assign(cfg.num_dl_users, 0.0);
    for (std::size_t l = 0; l < cfg.num_dl_users; ++l) {
        for (std::size_t n = 0; n < cfg.num_subcarriers; ++n) per_dl_user_throughput[l] += r_dl(l, n);
    }
    achieved_common_throughput = *std::min_element(per_ul_user_throughput.begin(), per_ul_user_throughput.end());
}

// =======================================================================
// Rates
// =======================================================================

namespace {

void require_rate_args(std::initializer_list<double> nonneg, double sigma2)
{
    for (double x : nonneg) {
        if (!std::isfinite(x) || x < 0.0) throw std::domain_error("rate: arguments must be finite and non-negative");
    }
    if (!std::isfinite(sigma2) || !(sigma2 > 0.0)) throw std::domain_error("rate: noise power must be positive");
}

inline double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }

} // namespace

double rate_ul_sic(double e_ul, double f, double sigma2)
{
    require_rate_args({e_ul, f}, sigma2);
    return log2_1p(e_ul * f / sigma2);
}

double rate_ul_tin(double e_ul, double f, double dl_interference, double sigma2)
{
    require_rate_args({e_ul, f, dl_interference}, sigma2);
    return log2_1p(e_ul * f / (dl_interference + sigma2));
}

double rate_bs(double sum_e_dl_phi, double sum_e_ul_f, double sigma2)
{
    require_rate_args({sum_e_dl_phi, sum_e_ul_f}, sigma2);
    return log2_1p(sum_e_dl_phi / (sum_e_ul_f + sigma2));
}

double rate_dl(double e_dl, double h, double ul_interference, double sigma2)
{
    require_rate_args({e_dl, h, ul_interference}, sigma2);
    return log2_1p(e_dl * h / (ul_interference + sigma2));
}

double dl_interference_at_bs(const Grid2& e_dl, const ChannelRealization& ch, std::size_t n)
{
    double s = 0.0;
    for (std::size_t l = 0; l < e_dl.rows(); ++l) s += e_dl(l, n);
    return s * ch.phi[n];
}

double ul_signal_at_bs(const Grid2& e_ul, const ChannelRealization& ch, std::size_t n)
{
    double s = 0.0;
    for (std::size_t k = 0; k < e_ul.rows(); ++k) s += e_ul(k, n) * ch.f(k, n);
    return s;
}

double ul_interference_at_user(const Grid2& e_ul, const ChannelRealization& ch, std::size_t l, std::size_t n)
{
    double s = 0.0;
    for (std::size_t k = 0; k < e_ul.rows(); ++k) s += e_ul(k, n) * ch.g(k, l, n);
    return s;
}

std::vector<double> ul_user_throughputs(const Grid2& e_ul, const Grid2& e_dl, const std::vector<double>& tau,
                                        const ChannelRealization& ch, const NetworkConfig& cfg)
{
    const double sigma2 = cfg.noise_power;
    std::vector<double> out(cfg.num_ul_users, 0.0);
    for (std::size_t n = 0; n < cfg.num_subcarriers; ++n) {
        const double interference = dl_interference_at_bs(e_dl, ch, n);
        for (std::size_t k = 0; k < cfg.num_ul_users; ++k) {
            const double e = e_ul(k, n);
            double r = 0.0;
            if (tau[n] < 1.0) r += (1.0 - tau[n]) * rate_ul_tin(e, ch.f(k, n), interference, sigma2);
            if (tau[n] > 0.0) r += tau[n] * rate_ul_sic(e, ch.f(k, n), sigma2);
            out[k] += r;
        }
    }
    return out;
}

namespace {

template <class Sol>
double common_throughput_impl(const Sol& sol, const ChannelRealization& ch, const NetworkConfig& cfg)
{
    sol.check_dimensions(cfg);
    ch.validate(cfg);
    auto per_user = ul_user_throughputs(sol.e_ul, sol.e_dl, sol.tau, ch, cfg);
    return *std::min_element(per_user.begin(), per_user.end());
}

} // namespace

double common_uplink_throughput(const RelaxedSolution& sol, const ChannelRealization& ch, const NetworkConfig& cfg)
{
    return common_throughput_impl(sol, ch, cfg);
}

double common_uplink_throughput(const IntegralSolution& sol, const ChannelRealization& ch, const NetworkConfig& cfg)
{
    return common_throughput_impl(sol, ch, cfg);
}

// =======================================================================
// Feasibility checker
// =======================================================================

bool FeasibilityReport::feasible() const
{
    return std::all_of(checks.begin(), checks.end(), [](const ConstraintCheck& c) { return c.passed; });
}

const ConstraintCheck& FeasibilityReport::find(const std::string& name) const
{
    for (const auto& c : checks) {
        if (c.name == name) return c;
    }
    throw std::out_of_range("FeasibilityReport: no constraint named " + name);
}

std::string FeasibilityReport::summary() const
{
    std::string out;
    char buf[256];
    for (const auto& c : checks) {
        std::snprintf(buf, sizeof(buf), "%-26s %s worst=%.3e %s\n", c.name.c_str(), c.passed ? "ok  " : "FAIL",
                      c.worst_violation, c.location.c_str());
        out += buf;
    }
    return out;
}

namespace {

// Tracks the worst violation of one constraint family.
class Tracker
{
public:
    Tracker(std::string name, double tol, bool exact = false) : tol_(tol), exact_(exact) { check_.name = std::move(name); }

    void record(double violation, const std::string& where)
    {
        if (std::isnan(violation)) violation = std::numeric_limits<double>::infinity();
        if (violation > check_.worst_violation) {
            check_.worst_violation = violation;
            check_.location = where;
        }
    }

    ConstraintCheck finish()
    {
        check_.passed = exact_ ? check_.worst_violation == 0.0 : check_.worst_violation <= tol_;
        return check_;
    }

private:
    ConstraintCheck check_;
    double tol_;
    bool exact_;
};

std::string at(const char* fmt, std::size_t a, std::size_t b = 0)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, a, b);
    return buf;
}

double binary_gap(double v) { return std::min(std::abs(v), std::abs(v - 1.0)); }

} // namespace

FeasibilityReport check_p1_feasible(const IntegralSolution& sol, const ChannelRealization& ch,
                                    const NetworkConfig& cfg, double tol)
{
    sol.check_dimensions(cfg);
    ch.validate(cfg);
    const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
    const double sigma2 = cfg.noise_power;

    Tracker bin_ul("binary_a_ul", tol, true), bin_dl("binary_a_dl", tol, true), bin_tau("binary_tau", tol, true);
    Tracker excl_ul("ul_subcarrier_exclusive", tol), excl_dl("dl_subcarrier_exclusive", tol);
    Tracker nonneg("nonnegative", tol), unalloc("unallocated_zero_power", tol);
    Tracker budget_dl("dl_power_budget", tol), budget_ul("ul_power_budget", tol);
    Tracker sic("sic_decodability", tol), dl_rate("dl_rate", tol), qos("qos_threshold", tol);
    Tracker consistency("throughput_consistency", tol);

    // Effective powers a * p; an unallocated entry carries no signal.
    Grid2 p_ul(M, N), p_dl(L, N);
    for (std::size_t n = 0; n < N; ++n) {
        double col_ul = 0.0, col_dl = 0.0;
        for (std::size_t k = 0; k < M; ++k) {
            bin_ul.record(binary_gap(sol.a_ul(k, n)), at("k=%zu n=%zu", k, n));
            nonneg.record(std::max(0.0, -sol.e_ul(k, n)), at("e_ul k=%zu n=%zu", k, n));
            if (sol.a_ul(k, n) < 0.5) unalloc.record(std::abs(sol.e_ul(k, n)), at("e_ul k=%zu n=%zu", k, n));
            col_ul += sol.a_ul(k, n);
            p_ul(k, n) = std::max(0.0, sol.a_ul(k, n) * sol.e_ul(k, n));
        }
        for (std::size_t l = 0; l < L; ++l) {
            bin_dl.record(binary_gap(sol.a_dl(l, n)), at("l=%zu n=%zu", l, n));
            nonneg.record(std::max(0.0, -sol.e_dl(l, n)), at("e_dl l=%zu n=%zu", l, n));
            nonneg.record(std::max(0.0, -sol.r_dl(l, n)), at("r_dl l=%zu n=%zu", l, n));
            if (sol.a_dl(l, n) < 0.5) unalloc.record(std::abs(sol.e_dl(l, n)), at("e_dl l=%zu n=%zu", l, n));
            col_dl += sol.a_dl(l, n);
            p_dl(l, n) = std::max(0.0, sol.a_dl(l, n) * sol.e_dl(l, n));
        }
        bin_tau.record(binary_gap(sol.tau[n]), at("n=%zu", n));
        excl_ul.record(std::max(0.0, col_ul - 1.0), at("n=%zu", n));
        excl_dl.record(std::max(0.0, col_dl - 1.0), at("n=%zu", n));
    }

    double total_dl = 0.0;
    for (double v : sol.e_dl.data()) total_dl += v;
    budget_dl.record(std::max(0.0, total_dl - cfg.p_dl_budget), "total");
    for (std::size_t k = 0; k < M; ++k) {
        double s = 0.0;
        for (std::size_t n = 0; n < N; ++n) s += sol.e_ul(k, n);
        budget_ul.record(std::max(0.0, s - cfg.p_ul_budgets[k]), at("k=%zu", k));
    }

    for (std::size_t n = 0; n < N; ++n) {
        double dl_at_bs = 0.0, ul_at_bs = 0.0, rate_sum = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            dl_at_bs += p_dl(l, n) * ch.phi[n];
            rate_sum += sol.r_dl(l, n);
        }
        for (std::size_t k = 0; k < M; ++k) ul_at_bs += p_ul(k, n) * ch.f(k, n);
        sic.record(std::max(0.0, sol.tau[n] * rate_sum - rate_bs(dl_at_bs, ul_at_bs, sigma2)), at("n=%zu", n));
        for (std::size_t l = 0; l < L; ++l) {
            double interference = 0.0;
            for (std::size_t k = 0; k < M; ++k) interference += p_ul(k, n) * ch.g(k, l, n);
            const double cap = rate_dl(p_dl(l, n), ch.h(l, n), interference, sigma2);
            dl_rate.record(std::max(0.0, sol.r_dl(l, n) - cap), at("l=%zu n=%zu", l, n));
        }
    }

    for (std::size_t l = 0; l < L; ++l) {
        double s = 0.0;
        for (std::size_t n = 0; n < N; ++n) s += sol.r_dl(l, n);
        qos.record(std::max(0.0, cfg.gamma_min - s), at("l=%zu", l));
    }

    // Reported throughput must match an evaluation from the effective powers.
    std::vector<double> per_user(M, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        double interference = 0.0;
        for (std::size_t l = 0; l < L; ++l) interference += p_dl(l, n) * ch.phi[n];
        for (std::size_t k = 0; k < M; ++k) {
            const double tin = rate_ul_tin(p_ul(k, n), ch.f(k, n), interference, sigma2);
            const double sc = rate_ul_sic(p_ul(k, n), ch.f(k, n), sigma2);
            per_user[k] += sol.tau[n] >= 0.5 ? sc : tin;
        }
    }
    const double common = *std::min_element(per_user.begin(), per_user.end());
    consistency.record(std::abs(common - sol.achieved_common_throughput), "achieved_common_throughput");

    FeasibilityReport report;
    for (Tracker* t : {&bin_ul, &bin_dl, &bin_tau, &excl_ul, &excl_dl, &nonneg, &unalloc, &budget_dl, &budget_ul, &sic,
                       &dl_rate, &qos, &consistency}) {
        report.checks.push_back(t->finish());
    }
    return report;
}

} // namespace npn
