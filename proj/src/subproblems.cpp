#include <npn/subproblems.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace npn {

namespace {

constexpr double inv_ln2 = 1.0 / std::numbers::ln2;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void check_tau(const std::vector<double>& tau, const NetworkConfig& cfg)
{
    if (tau.size() != cfg.num_subcarriers) throw contract_error("tau has the wrong length");
    for (double t : tau) {
        if (!(t >= 0.0 && t <= 1.0)) throw contract_error("tau entries must lie in [0, 1]");
    }
}

void check_mask(const AllocationMask& mask, const NetworkConfig& cfg)
{
    if (mask.ul.rows() != cfg.num_ul_users || mask.ul.cols() != cfg.num_subcarriers ||
        mask.dl.rows() != cfg.num_dl_users || mask.dl.cols() != cfg.num_subcarriers) {
        throw contract_error("AllocationMask does not match NetworkConfig");
    }
}

void init_layout(SubproblemLayout& lay, const NetworkConfig& cfg)
{
    lay.num_ul = cfg.num_ul_users;
    lay.num_dl = cfg.num_dl_users;
    lay.num_subcarriers = cfg.num_subcarriers;
    lay.e_ul.assign(lay.num_ul * lay.num_subcarriers, -1);
    lay.e_dl.assign(lay.num_dl * lay.num_subcarriers, -1);
    lay.a_dl.assign(lay.num_dl * lay.num_subcarriers, -1);
    lay.r_dl.assign(lay.num_dl * lay.num_subcarriers, -1);
    lay.r_common = -1;
}

/// DL variables (power, rate and, when unmasked, allocation) plus the rows tying them together.
/// `silent[n]` drops every DL variable on subcarrier n.
void add_dl_variables(Subproblem& sp, const NetworkConfig& cfg, const std::vector<double>& rate_cap,
                      const std::vector<bool>& silent = {})
{
    auto& prog = sp.program;
    auto& lay = sp.layout;
    const auto L = cfg.num_dl_users, N = cfg.num_subcarriers;
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t n = 0; n < N; ++n) {
            if (sp.masked && !sp.mask.dl_on(l, n)) continue;
            if (!silent.empty() && silent[n]) continue;
            const std::size_t i = l * N + n;
            lay.e_dl[i] = prog.add_variable(0.0, 1.0);
            lay.r_dl[i] = prog.add_variable(0.0, rate_cap[i]);
            if (!sp.masked) lay.a_dl[i] = prog.add_variable(0.0, 1.0);
        }
    }
    SparseTerms budget;
    for (int idx : lay.e_dl) {
        if (idx >= 0) budget.emplace_back(idx, 1.0);
    }
    if (!budget.empty()) {
        prog.add_le(std::move(budget), 1.0, "dl_budget");
        prog.constraints.back().separate = true;
    }
    if (sp.masked) return;
    for (std::size_t n = 0; n < N; ++n) {
        SparseTerms share;
        for (std::size_t l = 0; l < L; ++l) {
            const std::size_t i = l * N + n;
            if (lay.a_dl[i] < 0) continue;
            share.emplace_back(lay.a_dl[i], 1.0);
            prog.add_le({{lay.r_dl[i], 1.0}, {lay.a_dl[i], -rate_cap[i]}}, 0.0, "dl_rate_share");
            prog.add_le({{lay.e_dl[i], 1.0}, {lay.a_dl[i], -1.0}}, 0.0, "dl_power_share");
        }
        if (share.size() > 1) prog.add_le(std::move(share), 1.0, "dl_subcarrier");
    }
}

bool add_qos_rows(Subproblem& sp, const NetworkConfig& cfg, int common_var)
{
    const auto L = cfg.num_dl_users, N = cfg.num_subcarriers;
    bool reachable = true;
    for (std::size_t l = 0; l < L; ++l) {
        SparseTerms row;
        for (std::size_t n = 0; n < N; ++n) {
            const int idx = sp.layout.r_index(l, n);
            if (idx >= 0) row.emplace_back(idx, 1.0);
        }
        if (common_var >= 0) {
            row.emplace_back(common_var, -1.0);
            sp.program.add_ge(std::move(row), 0.0, "dl_common");
            sp.program.constraints.back().separate = true;
        } else if (cfg.gamma_min > 0.0) {
            if (row.empty()) {
                reachable = false;
            } else {
                sp.program.add_ge(std::move(row), cfg.gamma_min, "qos");
                sp.program.constraints.back().separate = true;
            }
        }
    }
    return reachable;
}

SubproblemResult structurally_infeasible(const NetworkConfig& cfg, const std::vector<double>& tau)
{
    SubproblemResult res;
    res.report.status = SolverStatus::infeasible;
    res.solution = RelaxedSolution::zeros(cfg);
    res.solution.tau = tau;
    return res;
}

} // namespace

AllocationMask AllocationMask::from_solution(const IntegralSolution& sol)
{
    return AllocationMask{sol.a_ul, sol.a_dl};
}

// -----------------------------------------------------------------------
// Linearized resource-allocation program
// -----------------------------------------------------------------------

Subproblem build_p22(const RelaxedSolution& local, const std::vector<double>& tau, const ChannelRealization& ch,
                     const NetworkConfig& cfg, const AllocationMask* mask)
{
    cfg.validate();
    ch.validate(cfg);
    local.check_dimensions(cfg);
    check_tau(tau, cfg);
    const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
    const double s2 = cfg.noise_power, pdl = cfg.p_dl_budget;

    Subproblem sp;
    sp.tau = tau;
    if (mask) {
        check_mask(*mask, cfg);
        sp.masked = true;
        sp.mask = *mask;
    }
    auto& prog = sp.program;
    auto& lay = sp.layout;
    init_layout(lay, cfg);

    auto beta_f = [&](std::size_t k, std::size_t n) { return cfg.p_ul_budgets[k] * ch.f(k, n) / s2; };
    auto beta_g = [&](std::size_t k, std::size_t l, std::size_t n) { return cfg.p_ul_budgets[k] * ch.g(k, l, n) / s2; };
    auto beta_h = [&](std::size_t l, std::size_t n) { return pdl * ch.h(l, n) / s2; };
    const auto beta_phi = [&](std::size_t n) { return pdl * ch.phi[n] / s2; };

    for (std::size_t k = 0; k < M; ++k) {
        for (std::size_t n = 0; n < N; ++n) {
            if (sp.masked && !sp.mask.ul_on(k, n)) continue;
            lay.e_ul[k * N + n] = prog.add_variable(0.0, 1.0);
        }
    }
    std::vector<double> rate_cap(L * N);
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t n = 0; n < N; ++n) rate_cap[l * N + n] = std::log1p(beta_h(l, n)) * inv_ln2;
    }
    // With no cross-BS gain a SIC subcarrier carries no DL rate, and linearizing
    // its decodability row would pin the UL powers, so its DL variables are dropped.
    std::vector<bool> silent(N, false);
    for (std::size_t n = 0; n < N; ++n) silent[n] = tau[n] > 0.0 && ch.phi[n] == 0.0;
    add_dl_variables(sp, cfg, rate_cap, silent);

    double r_cap = infinity;
    for (std::size_t k = 0; k < M; ++k) {
        double cap = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            if (lay.ul_index(k, n) >= 0) cap += std::log1p(beta_f(k, n)) * inv_ln2;
        }
        r_cap = std::min(r_cap, cap);
    }
    lay.r_common = prog.add_variable(0.0, r_cap + 1.0, 1.0);

    for (std::size_t k = 0; k < M; ++k) {
        SparseTerms budget;
        for (std::size_t n = 0; n < N; ++n) {
            if (lay.ul_index(k, n) >= 0) budget.emplace_back(lay.ul_index(k, n), 1.0);
        }
        if (!budget.empty()) {
            prog.add_le(std::move(budget), 1.0, "ul_budget");
            prog.constraints.back().separate = true;
        }
    }

    auto ul_point = [&](std::size_t k, std::size_t n) { return clamp01(local.e_ul(k, n) / cfg.p_ul_budgets[k]); };
    auto dl_point = [&](std::size_t l, std::size_t n) { return clamp01(local.e_dl(l, n) / pdl); };

    std::vector<TangentPlane> tin_tangent(N);
    for (std::size_t n = 0; n < N; ++n) {
        std::vector<std::size_t> ks, ls;
        for (std::size_t k = 0; k < M; ++k) {
            if (lay.ul_index(k, n) >= 0) ks.push_back(k);
        }
        for (std::size_t l = 0; l < L; ++l) {
            if (lay.dl_index(l, n) >= 0) ls.push_back(l);
        }
        if (!sp.masked && ks.size() > 1) {
            SparseTerms link;
            for (auto k : ks) link.emplace_back(lay.ul_index(k, n), 1.0);
            prog.add_le(std::move(link), 1.0, "ul_subcarrier");
        }

        std::vector<double> xpt, bf;
        for (auto k : ks) {
            xpt.push_back(ul_point(k, n));
            bf.push_back(beta_f(k, n));
        }
        std::vector<double> ypt, bphi(ls.size(), beta_phi(n));
        for (auto l : ls) ypt.push_back(dl_point(l, n));
        tin_tangent[n] = make_tangent(1.0, bphi, ypt);

        for (auto l : ls) {
            std::vector<double> bg;
            for (auto k : ks) bg.push_back(beta_g(k, l, n));
            const auto t = make_tangent(1.0, bg, xpt);
            ConvexConstraint row;
            row.label = "dl_rate";
            row.linear.emplace_back(lay.r_index(l, n), -1.0);
            LogTerm lg{inv_ln2, 1.0, {}};
            for (std::size_t j = 0; j < ks.size(); ++j) {
                row.linear.emplace_back(lay.ul_index(ks[j], n), -t.slope[j]);
                lg.coeffs.emplace_back(lay.ul_index(ks[j], n), bg[j]);
            }
            lg.coeffs.emplace_back(lay.dl_index(l, n), beta_h(l, n));
            row.logs.push_back(std::move(lg));
            row.lower = t.intercept();
            prog.constraints.push_back(std::move(row));
        }

        if (tau[n] > 0.0 && !ls.empty()) {
            const auto t = make_tangent(1.0, bf, xpt);
            ConvexConstraint row;
            row.label = "sic_decodability";
            LogTerm lg{inv_ln2, 1.0, {}};
            for (auto l : ls) {
                row.linear.emplace_back(lay.r_index(l, n), -tau[n]);
                lg.coeffs.emplace_back(lay.dl_index(l, n), bphi.empty() ? 0.0 : bphi[0]);
            }
            for (std::size_t j = 0; j < ks.size(); ++j) {
                row.linear.emplace_back(lay.ul_index(ks[j], n), -t.slope[j]);
                lg.coeffs.emplace_back(lay.ul_index(ks[j], n), bf[j]);
            }
            row.logs.push_back(std::move(lg));
            row.lower = t.intercept();
            prog.constraints.push_back(std::move(row));
        }
    }

    for (std::size_t k = 0; k < M; ++k) {
        ConvexConstraint row;
        row.label = "ul_rate";
        row.separate = true;
        row.linear.emplace_back(lay.r_common, -1.0);
        double rhs = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            const int x = lay.ul_index(k, n);
            if (x < 0) continue;
            const double tin_w = 1.0 - tau[n];
            if (tin_w > 0.0) {
                const auto& t = tin_tangent[n];
                LogTerm lg{tin_w * inv_ln2, 1.0, {{x, beta_f(k, n)}}};
                std::size_t j = 0;
                for (std::size_t l = 0; l < L; ++l) {
                    const int y = lay.dl_index(l, n);
                    if (y < 0) continue;
                    lg.coeffs.emplace_back(y, beta_phi(n));
                    row.linear.emplace_back(y, -tin_w * t.slope[j]);
                    ++j;
                }
                row.logs.push_back(std::move(lg));
                rhs += tin_w * t.intercept();
            }
            if (tau[n] > 0.0) row.logs.push_back(LogTerm{tau[n] * inv_ln2, 1.0, {{x, beta_f(k, n)}}});
        }
        row.lower = rhs;
        prog.constraints.push_back(std::move(row));
    }

    if (!add_qos_rows(sp, cfg, -1)) sp.program.constraints.push_back({{}, {}, 1.0, "qos_unreachable"});
    return sp;
}

std::vector<double> encode_point(const Subproblem& sp, const RelaxedSolution& sol, const NetworkConfig& cfg)
{
    sol.check_dimensions(cfg);
    const auto& lay = sp.layout;
    const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
    std::vector<double> x(sp.program.num_vars(), 0.0);
    for (std::size_t k = 0; k < M; ++k) {
        for (std::size_t n = 0; n < N; ++n) {
            const int i = lay.ul_index(k, n);
            if (i >= 0) x[i] = sol.e_ul(k, n) / cfg.p_ul_budgets[k];
        }
    }
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t n = 0; n < N; ++n) {
            if (int i = lay.dl_index(l, n); i >= 0) x[i] = sol.e_dl(l, n) / cfg.p_dl_budget;
            if (int i = lay.a_index(l, n); i >= 0) x[i] = sol.a_dl(l, n);
            if (int i = lay.r_index(l, n); i >= 0) x[i] = sol.r_dl(l, n);
        }
    }
    if (lay.r_common >= 0) x[lay.r_common] = sol.r_common;
    return x;
}

RelaxedSolution decode_point(const Subproblem& sp, const std::vector<double>& x, const NetworkConfig& cfg)
{
    const auto& lay = sp.layout;
    const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
    auto sol = RelaxedSolution::zeros(cfg);
    sol.tau = sp.tau;
    for (std::size_t k = 0; k < M; ++k) {
        for (std::size_t n = 0; n < N; ++n) {
            const int i = lay.ul_index(k, n);
            double v = 0.0;
            if (i >= 0) v = clamp01(x[i]);
            else if (!sp.fixed_e_ul.empty()) v = clamp01(sp.fixed_e_ul[k * N + n] / cfg.p_ul_budgets[k]);
            sol.e_ul(k, n) = v * cfg.p_ul_budgets[k];
            sol.a_ul(k, n) = sp.masked ? sp.mask.ul(k, n) : v;
        }
    }
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t n = 0; n < N; ++n) {
            if (int i = lay.dl_index(l, n); i >= 0) sol.e_dl(l, n) = clamp01(x[i]) * cfg.p_dl_budget;
            if (int i = lay.r_index(l, n); i >= 0) sol.r_dl(l, n) = std::max(0.0, x[i]);
            if (int i = lay.a_index(l, n); i >= 0) sol.a_dl(l, n) = clamp01(x[i]);
            else if (sp.masked) sol.a_dl(l, n) = sp.mask.dl(l, n);
        }
    }
    if (lay.r_common >= 0) sol.r_common = std::max(0.0, x[lay.r_common]);
    return sol;
}

SubproblemResult solve_p22(const RelaxedSolution& local, const std::vector<double>& tau, const ChannelRealization& ch,
                           const NetworkConfig& cfg, const AllocationMask* mask, const SolverSettings& settings)
{
    auto sp = build_p22(local, tau, ch, cfg, mask);
    for (const auto& row : sp.program.constraints) {
        if (row.label == "qos_unreachable") return structurally_infeasible(cfg, tau);
    }
    SubproblemResult res;
    res.report = solve_convex(sp.program, encode_point(sp, local, cfg), settings);
    if (res.report.status == SolverStatus::numerical_failure) {
        auto cold = solve_convex(sp.program, {}, settings);
        cold.iterations += res.report.iterations;
        res.report = std::move(cold);
    }
    if (!res.report.primal.empty()) res.solution = decode_point(sp, res.report.primal, cfg);
    else res.solution = local;
    return res;
}

double p21_violation(const RelaxedSolution& sol, const std::vector<double>& tau, const ChannelRealization& ch,
                     const NetworkConfig& cfg)
{
    sol.check_dimensions(cfg);
    check_tau(tau, cfg);
    const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
    const double s2 = cfg.noise_power;
    double worst = 0.0;
    auto note = [&](double v) { worst = std::max(worst, v); };

    for (double v : sol.e_ul.data()) note(-v);
    for (double v : sol.e_dl.data()) note(-v);
    for (double v : sol.r_dl.data()) note(-v);
    for (double v : sol.a_ul.data()) note(std::max(-v, v - 1.0));
    for (double v : sol.a_dl.data()) note(std::max(-v, v - 1.0));
    note(-sol.r_common);

    double dl_total = 0.0;
    for (double v : sol.e_dl.data()) dl_total += v;
    note(dl_total / cfg.p_dl_budget - 1.0);
    for (std::size_t k = 0; k < M; ++k) {
        double total = 0.0;
        for (std::size_t n = 0; n < N; ++n) total += sol.e_ul(k, n);
        note(total / cfg.p_ul_budgets[k] - 1.0);
    }
    for (std::size_t n = 0; n < N; ++n) {
        double ul_share = 0.0, dl_share = 0.0;
        for (std::size_t k = 0; k < M; ++k) ul_share += sol.a_ul(k, n);
        for (std::size_t l = 0; l < L; ++l) dl_share += sol.a_dl(l, n);
        note(ul_share - 1.0);
        note(dl_share - 1.0);
    }

    for (std::size_t n = 0; n < N; ++n) {
        const double ul = ul_signal_at_bs(sol.e_ul, ch, n);
        const double dl = dl_interference_at_bs(sol.e_dl, ch, n);
        double load = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            load += sol.r_dl(l, n);
            const double itf = ul_interference_at_user(sol.e_ul, ch, l, n);
            note(sol.r_dl(l, n) - rate_dl(std::max(0.0, sol.e_dl(l, n)), ch.h(l, n), std::max(0.0, itf), s2));
        }
        note(tau[n] * load - rate_bs(std::max(0.0, dl), std::max(0.0, ul), s2));
    }
    Grid2 e_ul = sol.e_ul, e_dl = sol.e_dl;
    for (double& v : e_ul.data()) v = std::max(0.0, v);
    for (double& v : e_dl.data()) v = std::max(0.0, v);
    for (double rate : ul_user_throughputs(e_ul, e_dl, tau, ch, cfg)) note(sol.r_common - rate);
    for (std::size_t l = 0; l < L; ++l) {
        double total = 0.0;
        for (std::size_t n = 0; n < N; ++n) total += sol.r_dl(l, n);
        note(cfg.gamma_min - total);
    }
    return worst;
}

// -----------------------------------------------------------------------
// Decoding-mode LP
// -----------------------------------------------------------------------

namespace {

LinearProgram mode_lp(const ModeProgram& mp, std::size_t M, std::size_t N)
{
    LinearProgram lp;
    for (std::size_t n = 0; n < N; ++n) lp.add_variable(0.0, 1.0, 0.0);
    const int r = lp.add_variable(0.0, infinity, 1.0);
    for (std::size_t k = 0; k < M; ++k) {
        SparseTerms row;
        double rhs = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            const double tin = mp.tin[k * N + n], sic = mp.sic[k * N + n];
            rhs -= tin;
            if (sic != tin) row.emplace_back(static_cast<int>(n), sic - tin);
        }
        row.emplace_back(r, -1.0);
        lp.add_row(std::move(row), RowSense::ge, rhs);
    }
    for (std::size_t n = 0; n < N; ++n) {
        if (mp.dl_load[n] > 0.0) lp.add_row({{static_cast<int>(n), mp.dl_load[n]}}, RowSense::le, mp.bs_rate[n]);
    }
    return lp;
}

} // namespace

ModeProgram build_p23(const RelaxedSolution& resources, const ChannelRealization& ch, const NetworkConfig& cfg)
{
    resources.check_dimensions(cfg);
    ch.validate(cfg);
    const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
    const double s2 = cfg.noise_power;
    ModeProgram mp;
    mp.tin.assign(M * N, 0.0);
    mp.sic.assign(M * N, 0.0);
    mp.bs_rate.assign(N, 0.0);
    mp.dl_load.assign(N, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        const double dl = std::max(0.0, dl_interference_at_bs(resources.e_dl, ch, n));
        const double ul = std::max(0.0, ul_signal_at_bs(resources.e_ul, ch, n));
        mp.bs_rate[n] = rate_bs(dl, ul, s2);
        for (std::size_t l = 0; l < L; ++l) mp.dl_load[n] += std::max(0.0, resources.r_dl(l, n));
        for (std::size_t k = 0; k < M; ++k) {
            const double e = std::max(0.0, resources.e_ul(k, n));
            mp.tin[k * N + n] = rate_ul_tin(e, ch.f(k, n), dl, s2);
            mp.sic[k * N + n] = rate_ul_sic(e, ch.f(k, n), s2);
        }
    }
    mp.lp = mode_lp(mp, M, N);
    return mp;
}

ModeProgram make_mode_program(std::vector<double> tin, std::vector<double> sic, std::vector<double> bs_rate,
                              std::vector<double> dl_load, std::size_t num_ul)
{
    ModeProgram mp{{}, std::move(tin), std::move(sic), std::move(bs_rate), std::move(dl_load)};
    mp.lp = mode_lp(mp, num_ul, mp.bs_rate.size());
    return mp;
}

SolverReport solve_p23(const RelaxedSolution& resources, const ChannelRealization& ch, const NetworkConfig& cfg)
{
    return solve_lp(build_p23(resources, ch, cfg).lp);
}

// -----------------------------------------------------------------------
// DL-only program with fixed UL powers
// -----------------------------------------------------------------------

Subproblem build_dl_program(const Grid2& e_ul, const std::vector<double>& tau, const ChannelRealization& ch,
                            const NetworkConfig& cfg, DlObjective objective, const AllocationMask* mask)
{
    cfg.validate();
    ch.validate(cfg);
    check_tau(tau, cfg);
    const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
    if (e_ul.rows() != M || e_ul.cols() != N) throw contract_error("e_ul does not match NetworkConfig");
    const double s2 = cfg.noise_power, pdl = cfg.p_dl_budget;

    Subproblem sp;
    sp.tau = tau;
    sp.fixed_e_ul = e_ul.data();
    if (mask) {
        check_mask(*mask, cfg);
        sp.masked = true;
        sp.mask = *mask;
    }
    init_layout(sp.layout, cfg);
    auto& prog = sp.program;
    auto& lay = sp.layout;

    std::vector<double> beta(L * N), rate_cap(L * N);
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t n = 0; n < N; ++n) {
            const double itf = std::max(0.0, ul_interference_at_user(e_ul, ch, l, n));
            beta[l * N + n] = pdl * ch.h(l, n) / (itf + s2);
            rate_cap[l * N + n] = std::log1p(beta[l * N + n]) * inv_ln2;
        }
    }
    add_dl_variables(sp, cfg, rate_cap);

    if (objective == DlObjective::max_min_rate) {
        lay.r_common = prog.add_variable(0.0, infinity, 1.0);
    } else if (objective == DlObjective::capped_sum_rate) {
        for (std::size_t l = 0; l < L; ++l) {
            const int t = prog.add_variable(0.0, std::max(0.0, cfg.gamma_min), 1.0);
            SparseTerms row{{t, -1.0}};
            for (std::size_t n = 0; n < N; ++n) {
                if (int r = lay.r_index(l, n); r >= 0) row.emplace_back(r, 1.0);
            }
            prog.add_ge(std::move(row), 0.0, "dl_capped");
            prog.constraints.back().separate = true;
        }
    } else {
        for (int idx : lay.e_dl) {
            if (idx >= 0) prog.objective[idx] = -1.0;
        }
    }

    for (std::size_t n = 0; n < N; ++n) {
        const double ul = std::max(0.0, ul_signal_at_bs(e_ul, ch, n));
        const double beta_bs = pdl * ch.phi[n] / (ul + s2);
        ConvexConstraint bs;
        bs.label = "sic_decodability";
        LogTerm bs_log{inv_ln2, 1.0, {}};
        for (std::size_t l = 0; l < L; ++l) {
            const int y = lay.dl_index(l, n);
            if (y < 0) continue;
            const int r = lay.r_index(l, n);
            ConvexConstraint row;
            row.label = "dl_rate";
            row.linear = {{r, -1.0}};
            row.logs.push_back(LogTerm{inv_ln2, 1.0, {{y, beta[l * N + n]}}});
            prog.constraints.push_back(std::move(row));
            bs.linear.emplace_back(r, -tau[n]);
            bs_log.coeffs.emplace_back(y, beta_bs);
        }
        if (tau[n] > 0.0 && !bs.linear.empty()) {
            bs.logs.push_back(std::move(bs_log));
            prog.constraints.push_back(std::move(bs));
        }
    }

    if (objective == DlObjective::capped_sum_rate) return sp;
    if (!add_qos_rows(sp, cfg, lay.r_common)) sp.program.constraints.push_back({{}, {}, 1.0, "qos_unreachable"});
    return sp;
}

SubproblemResult solve_dl_program(const Grid2& e_ul, const std::vector<double>& tau, const ChannelRealization& ch,
                                  const NetworkConfig& cfg, DlObjective objective, const AllocationMask* mask,
                                  const SolverSettings& settings)
{
    auto sp = build_dl_program(e_ul, tau, ch, cfg, objective, mask);
    for (const auto& row : sp.program.constraints) {
        if (row.label == "qos_unreachable") return structurally_infeasible(cfg, tau);
    }
    SubproblemResult res;
    res.report = solve_convex(sp.program, {}, settings);
    if (res.report.primal.empty()) {
        res.solution = RelaxedSolution::zeros(cfg);
        res.solution.tau = tau;
        return res;
    }
    res.solution = decode_point(sp, res.report.primal, cfg);
    if (objective == DlObjective::min_power) res.solution.r_common = common_uplink_throughput(res.solution, ch, cfg);
    if (objective == DlObjective::capped_sum_rate) res.solution.r_common = res.report.objective;
    return res;
}

} // namespace npn
