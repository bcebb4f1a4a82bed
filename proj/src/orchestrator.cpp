#include <npn/orchestrator.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace npn {

const char* to_string(SchemeKind scheme)
{
    switch (scheme) {
    case SchemeKind::adaptive: return "adaptive";
    case SchemeKind::fixed_sic: return "fixed_sic";
    case SchemeKind::fixed_tin: return "fixed_tin";
    }
    return "unknown";
}

SchemeKind parse_scheme(const std::string& name)
{
    if (name == "adaptive") return SchemeKind::adaptive;
    if (name == "fixed_sic" || name == "fixed-sic" || name == "sic") return SchemeKind::fixed_sic;
    if (name == "fixed_tin" || name == "fixed-tin" || name == "tin") return SchemeKind::fixed_tin;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected adaptive, fixed_sic or fixed_tin)");
}

namespace {

using Clock = std::chrono::steady_clock;

/// Owner of each column: the row with the largest entry, lowest index on ties, -1 if all <= zero_tol.
std::vector<int> column_owners(const Grid2& a, double zero_tol)
{
    std::vector<int> owner(a.cols(), -1);
    for (std::size_t n = 0; n < a.cols(); ++n) {
        double best = zero_tol;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (a(i, n) > best) {
                best = a(i, n);
                owner[n] = static_cast<int>(i);
            }
        }
    }
    return owner;
}

Grid2 owners_to_mask(const std::vector<int>& owner, std::size_t rows)
{
    Grid2 m(rows, owner.size());
    for (std::size_t n = 0; n < owner.size(); ++n) {
        if (owner[n] >= 0) m(static_cast<std::size_t>(owner[n]), n) = 1.0;
    }
    return m;
}

std::vector<int> mask_to_owners(const Grid2& m)
{
    return column_owners(m, 0.5);
}

std::vector<double> dl_totals(const RelaxedSolution& sol)
{
    std::vector<double> t(sol.r_dl.rows(), 0.0);
    for (std::size_t l = 0; l < sol.r_dl.rows(); ++l) {
        for (std::size_t n = 0; n < sol.r_dl.cols(); ++n) t[l] += sol.r_dl(l, n);
    }
    return t;
}

/*
 * One repair round: every user short of `target` in `current` takes one
 * subcarrier from a user that is not short (or an unassigned one). The
 * candidate with the largest relaxed rate for the short user wins, then
 * the largest gain h. Returns false when nothing moved.
 */
bool repair_dl_round(Grid2& dl_mask, const RelaxedSolution& current, const Grid2& relaxed_rate,
                     const ChannelRealization& ch, double target, std::vector<double>* tau_to_clear)
{
    const std::size_t L = dl_mask.rows(), N = dl_mask.cols();
    auto owner = mask_to_owners(dl_mask);
    const auto totals = dl_totals(current);
    const double slack = 1e-9 * std::max(1.0, target);
    std::vector<std::size_t> short_users;
    for (std::size_t l = 0; l < L; ++l) {
        if (totals[l] < target - slack) short_users.push_back(l);
    }
    std::stable_sort(short_users.begin(), short_users.end(),
                     [&](std::size_t a, std::size_t b) { return totals[a] < totals[b]; });
    std::vector<bool> is_short(L, false);
    for (auto l : short_users) is_short[l] = true;

    std::vector<bool> moved(N, false);
    bool any = false;
    for (auto l : short_users) {
        int pick = -1;
        double best_rate = -1.0, best_gain = -1.0;
        for (std::size_t n = 0; n < N; ++n) {
            if (moved[n] || owner[n] == static_cast<int>(l)) continue;
            if (owner[n] >= 0 && is_short[static_cast<std::size_t>(owner[n])]) continue;
            const double r = relaxed_rate(l, n), g = ch.h(l, n);
            if (r > best_rate || (r == best_rate && g > best_gain)) {
                best_rate = r;
                best_gain = g;
                pick = static_cast<int>(n);
            }
        }
        if (pick < 0) continue;
        const auto n = static_cast<std::size_t>(pick);
        if (owner[n] >= 0) dl_mask(static_cast<std::size_t>(owner[n]), n) = 0.0;
        dl_mask(l, n) = 1.0;
        owner[n] = static_cast<int>(l);
        moved[n] = true;
        if (tau_to_clear) (*tau_to_clear)[n] = 0.0;
        any = true;
    }
    return any;
}

/// UL users without a subcarrier take their best one from a user holding at least two.
void repair_ul_coverage(Grid2& ul_mask, const Grid2& relaxed_share, const ChannelRealization& ch)
{
    const std::size_t M = ul_mask.rows(), N = ul_mask.cols();
    auto owner = mask_to_owners(ul_mask);
    std::vector<int> count(M, 0);
    for (int o : owner) {
        if (o >= 0) ++count[static_cast<std::size_t>(o)];
    }
    for (std::size_t k = 0; k < M; ++k) {
        if (count[k] > 0) continue;
        int pick = -1;
        double best_share = -1.0, best_gain = -1.0;
        for (std::size_t n = 0; n < N; ++n) {
            if (owner[n] >= 0 && count[static_cast<std::size_t>(owner[n])] < 2) continue;
            const double s = relaxed_share(k, n), g = ch.f(k, n);
            if (s > best_share || (s == best_share && g > best_gain)) {
                best_share = s;
                best_gain = g;
                pick = static_cast<int>(n);
            }
        }
        if (pick < 0) continue;
        const auto n = static_cast<std::size_t>(pick);
        if (owner[n] >= 0) {
            --count[static_cast<std::size_t>(owner[n])];
            ul_mask(static_cast<std::size_t>(owner[n]), n) = 0.0;
        }
        ul_mask(k, n) = 1.0;
        owner[n] = static_cast<int>(k);
        count[k] = 1;
    }
}

/// The repair loop only needs per-user totals, so any primal-feasible iterate will do.
bool usable_estimate(const SolverReport& r)
{
    return r.ok() || (!r.primal.empty() && r.max_violation <= 1e-6 && r.status != SolverStatus::infeasible);
}

/// Minimum-power DL completion of `seed`, shrinking the UL power until the QoS rows can be met.
std::optional<RelaxedSolution> min_power_start(const Grid2& seed, const std::vector<double>& tau,
                                               const AllocationMask* mask, const ChannelRealization& ch,
                                               const NetworkConfig& cfg, const PipelineSettings& settings)
{
    double scale = 1.0;
    for (int step = 0; step <= settings.phase_one_steps; ++step) {
        Grid2 e = seed;
        const double s = step == settings.phase_one_steps ? 0.0 : scale;
        for (double& v : e.data()) v *= s;
        auto res = solve_dl_program(e, tau, ch, cfg, DlObjective::min_power, mask, settings.sca.solver);
        if (res.report.ok() && p21_violation(res.solution, tau, ch, cfg) <= settings.sca.feasibility_tol)
            return std::move(res.solution);
        scale *= 0.1;
    }
    return std::nullopt;
}

/// Binary solution from a masked relaxed point, with powers and rates clipped onto the exact constraints.
IntegralSolution to_integral(const RelaxedSolution& s, const AllocationMask& mask, const std::vector<double>& tau,
                             const ChannelRealization& ch, const NetworkConfig& cfg)
{
    const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
    auto out = IntegralSolution::zeros(cfg);
    out.a_ul = mask.ul;
    out.a_dl = mask.dl;
    out.tau = tau;
    for (std::size_t k = 0; k < M; ++k) {
        double total = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            out.e_ul(k, n) = mask.ul_on(k, n) ? std::max(0.0, s.e_ul(k, n)) : 0.0;
            total += out.e_ul(k, n);
        }
        if (total > cfg.p_ul_budgets[k]) {
            for (std::size_t n = 0; n < N; ++n) out.e_ul(k, n) *= cfg.p_ul_budgets[k] / total;
        }
    }
    double total_dl = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t n = 0; n < N; ++n) {
            out.e_dl(l, n) = mask.dl_on(l, n) ? std::max(0.0, s.e_dl(l, n)) : 0.0;
            total_dl += out.e_dl(l, n);
        }
    }
    if (total_dl > cfg.p_dl_budget) {
        for (double& v : out.e_dl.data()) v *= cfg.p_dl_budget / total_dl;
    }
    for (std::size_t n = 0; n < N; ++n) {
        double rate_sum = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            if (!mask.dl_on(l, n)) continue;
            const double cap = rate_dl(out.e_dl(l, n), ch.h(l, n), ul_interference_at_user(out.e_ul, ch, l, n),
                                       cfg.noise_power);
            out.r_dl(l, n) = std::clamp(s.r_dl(l, n), 0.0, cap);
            rate_sum += out.r_dl(l, n);
        }
        if (tau[n] > 0.5 && rate_sum > 0.0) {
            const double bs = rate_bs(dl_interference_at_bs(out.e_dl, ch, n), ul_signal_at_bs(out.e_ul, ch, n),
                                      cfg.noise_power);
            if (rate_sum > bs) {
                for (std::size_t l = 0; l < L; ++l) out.r_dl(l, n) *= bs / rate_sum;
            }
        }
    }
    out.refresh_throughput(ch, cfg);
    out.r_common = out.achieved_common_throughput;
    return out;
}

std::vector<double> binary_tau(const std::vector<double>& tau, double threshold, std::optional<double> fixed)
{
    std::vector<double> out(tau.size());
    for (std::size_t n = 0; n < tau.size(); ++n) out[n] = fixed ? *fixed : (tau[n] >= threshold ? 1.0 : 0.0);
    return out;
}

} // namespace

// =======================================================================
// Feasibility
// =======================================================================

FeasibilityResult check_feasibility(const ChannelRealization& ch, const NetworkConfig& cfg,
                                    const PipelineSettings& settings)
{
    cfg.validate();
    ch.validate(cfg);
    const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
    const double gamma = cfg.gamma_min;
    FeasibilityResult out;
    const Grid2 silent(M, N);
    const std::vector<double> tin(N, 0.0);

    auto relaxed = solve_dl_program(silent, tin, ch, cfg, DlObjective::max_min_rate, nullptr, settings.sca.solver);
    if (!relaxed.report.ok()) {
        out.degraded = true;
        out.feasible = gamma <= 0.0;
        return out;
    }
    out.l_star_relaxed = relaxed.solution.r_common;

    AllocationMask mask{Grid2(M, N), owners_to_mask(column_owners(relaxed.solution.a_dl, settings.allocation_zero_tol), L)};
    for (std::size_t round = 0;; ++round) {
        auto fixed = solve_dl_program(silent, tin, ch, cfg, DlObjective::max_min_rate, &mask, settings.sca.solver);
        if (!fixed.report.ok()) {
            out.degraded = true;
            break;
        }
        out.l_star = std::max(out.l_star, fixed.solution.r_common);
        if (out.l_star >= gamma || out.l_star_relaxed < gamma || round >= L) break;
        auto capped = solve_dl_program(silent, tin, ch, cfg, DlObjective::capped_sum_rate, &mask, settings.sca.solver);
        if (!usable_estimate(capped.report)) {
            out.degraded = true;
            break;
        }
        if (!repair_dl_round(mask.dl, capped.solution, relaxed.solution.r_dl, ch, gamma, nullptr)) break;
        ++out.repair_rounds;
    }
    out.feasible = gamma <= 0.0 || (!out.degraded && out.l_star >= gamma);
    return out;
}

std::optional<RelaxedSolution> phase_one(const std::vector<double>& tau, const ChannelRealization& ch,
                                         const NetworkConfig& cfg, const PipelineSettings& settings)
{
    const auto M = cfg.num_ul_users, N = cfg.num_subcarriers;
    Grid2 seed(M, N);
    const double share = std::min(1.0 / static_cast<double>(N), 1.0 / static_cast<double>(M));
    for (std::size_t k = 0; k < M; ++k) {
        for (std::size_t n = 0; n < N; ++n) seed(k, n) = share * cfg.p_ul_budgets[k];
    }
    return min_power_start(seed, tau, nullptr, ch, cfg, settings);
}

// =======================================================================
// Alternating optimization
// =======================================================================

AlternatingResult solve_p2_alternating(const RelaxedSolution& init, const ChannelRealization& ch,
                                       const NetworkConfig& cfg, const PipelineSettings& settings)
{
    AlternatingResult out;
    RelaxedSolution cur = init;
    cur.r_common = common_uplink_throughput(cur, ch, cfg);
    out.objective_trace.push_back(cur.r_common);

    for (int round = 1; round <= settings.max_alternating_rounds; ++round) {
        out.rounds = round;
        const double before = cur.r_common;

        auto sca = sca_solve_p21(cur.tau, cur, settings.sca, ch, cfg);
        out.sca_iterations += sca.iterations;
        out.degraded = out.degraded || sca.degraded;
        cur = std::move(sca.solution);
        out.objective_trace.push_back(cur.r_common);

        auto lp = solve_p23(cur, ch, cfg);
        if (!lp.ok()) {
            out.degraded = true;
            break;
        }
        RelaxedSolution cand = cur;
        for (std::size_t n = 0; n < cfg.num_subcarriers; ++n) cand.tau[n] = std::clamp(lp.primal[n], 0.0, 1.0);
        cand.r_common = common_uplink_throughput(cand, ch, cfg);
        if (cand.r_common >= cur.r_common && p21_violation(cand, cand.tau, ch, cfg) <= settings.sca.feasibility_tol) {
            cur = std::move(cand);
        } else if (cand.r_common < cur.r_common - 1e-9) {
            out.degraded = true;
        }
        out.objective_trace.push_back(cur.r_common);

        const double floor = std::max(std::abs(before), settings.sca.objective_abs_floor);
        if (cur.r_common - before <= settings.alternating_rel_tol * floor) {
            out.converged = true;
            break;
        }
    }
    out.solution = std::move(cur);
    return out;
}

// =======================================================================
// Rounding
// =======================================================================

namespace {

/// Rate each UL user draws from each subcarrier at the relaxed point.
Grid2 ul_rate_contribution(const RelaxedSolution& s, const ChannelRealization& ch, const NetworkConfig& cfg)
{
    const auto M = cfg.num_ul_users, N = cfg.num_subcarriers;
    Grid2 out(M, N);
    for (std::size_t n = 0; n < N; ++n) {
        const double itf = dl_interference_at_bs(s.e_dl, ch, n);
        for (std::size_t k = 0; k < M; ++k) {
            const double e = std::max(0.0, s.e_ul(k, n));
            out(k, n) = (1.0 - s.tau[n]) * rate_ul_tin(e, ch.f(k, n), itf, cfg.noise_power) +
                        s.tau[n] * rate_ul_sic(e, ch.f(k, n), cfg.noise_power);
        }
    }
    return out;
}

/// Subcarriers in TIN mode whose DL rates the BS could decode at `sol`.
std::vector<double> decodable_modes(const IntegralSolution& sol, const ChannelRealization& ch, const NetworkConfig& cfg)
{
    auto tau = sol.tau;
    for (std::size_t n = 0; n < tau.size(); ++n) {
        if (tau[n] > 0.5) continue;
        double load = 0.0;
        for (std::size_t l = 0; l < cfg.num_dl_users; ++l) load += sol.r_dl(l, n);
        const double bs = rate_bs(dl_interference_at_bs(sol.e_dl, ch, n), ul_signal_at_bs(sol.e_ul, ch, n),
                                  cfg.noise_power);
        if (load <= bs - 1e-9) tau[n] = 1.0;
    }
    return tau;
}

RoundingResult resolve_assignment(AllocationMask mask, std::vector<double> tau, const RelaxedSolution& relaxed,
                                  const ChannelRealization& ch, const NetworkConfig& cfg,
                                  const PipelineSettings& settings, bool modes_free)
{
    const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
    RoundingResult out;

    Grid2 seed(M, N);
    for (std::size_t k = 0; k < M; ++k) {
        double total = 0.0;
        int count = 0;
        for (std::size_t n = 0; n < N; ++n) {
            if (!mask.ul_on(k, n)) continue;
            seed(k, n) = std::max(0.0, relaxed.e_ul(k, n));
            total += seed(k, n);
            ++count;
        }
        if (count > 0 && total < 1e-3 * cfg.p_ul_budgets[k]) {
            for (std::size_t n = 0; n < N; ++n) {
                if (mask.ul_on(k, n)) seed(k, n) = cfg.p_ul_budgets[k] / count;
            }
        }
    }

    std::optional<RelaxedSolution> start;
    for (std::size_t round = 0;; ++round) {
        start = min_power_start(seed, tau, &mask, ch, cfg, settings);
        if (start) break;
        if (round >= L) {
            out.status = "qos_repair_exhausted";
            return out;
        }
        auto dl = solve_dl_program(Grid2(M, N), tau, ch, cfg, DlObjective::capped_sum_rate, &mask,
                                   settings.sca.solver);
        if (!usable_estimate(dl.report)) {
            out.degraded = true;
            out.status = "repair_solver_failure";
            return out;
        }
        if (!repair_dl_round(mask.dl, dl.solution, relaxed.r_dl, ch, cfg.gamma_min, modes_free ? &tau : nullptr)) {
            out.status = "qos_repair_stuck";
            return out;
        }
        ++out.repair_rounds;
    }

    auto sca = sca_solve_p21(tau, *start, settings.sca, ch, cfg, &mask);
    out.sca_iterations = sca.iterations;
    out.degraded = sca.degraded;
    RelaxedSolution cur = std::move(sca.solution);

    for (int round = 0; modes_free && round < settings.max_alternating_rounds; ++round) {
        const auto snapped = to_integral(cur, mask, tau, ch, cfg);
        auto next_tau = decodable_modes(snapped, ch, cfg);
        if (next_tau == tau) break;
        RelaxedSolution cand = cur;
        cand.e_ul = snapped.e_ul;
        cand.e_dl = snapped.e_dl;
        cand.r_dl = snapped.r_dl;
        cand.tau = next_tau;
        if (p21_violation(cand, next_tau, ch, cfg) > settings.sca.feasibility_tol) break;
        auto more = sca_solve_p21(next_tau, cand, settings.sca, ch, cfg, &mask);
        out.sca_iterations += more.iterations;
        if (!(more.solution.r_common > cur.r_common)) break;
        cur = std::move(more.solution);
        tau = std::move(next_tau);
    }

    for (const RelaxedSolution* cand : {&cur, &*start}) {
        auto sol = to_integral(*cand, mask, cand->tau, ch, cfg);
        if (check_p1_feasible(sol, ch, cfg, settings.validation_tol).feasible()) {
            out.feasible = true;
            out.solution = std::move(sol);
            out.status = "ok";
            return out;
        }
    }
    out.status = "validation_failed";
    return out;
}

} // namespace

RoundingResult round_and_resolve(const RelaxedSolution& relaxed, const ChannelRealization& ch,
                                 const NetworkConfig& cfg, const PipelineSettings& settings,
                                 std::optional<double> fixed_tau)
{
    relaxed.check_dimensions(cfg);
    const auto M = cfg.num_ul_users, L = cfg.num_dl_users;
    const Grid2 dl = owners_to_mask(column_owners(relaxed.a_dl, settings.allocation_zero_tol), L);
    const auto tau = binary_tau(relaxed.tau, settings.tau_threshold, fixed_tau);

    std::vector<Grid2> ul_masks;
    const Grid2 contribution = ul_rate_contribution(relaxed, ch, cfg);
    for (const Grid2* score : {&relaxed.a_ul, &contribution}) {
        Grid2 ul = owners_to_mask(column_owners(*score, settings.allocation_zero_tol), M);
        repair_ul_coverage(ul, *score, ch);
        if (std::find(ul_masks.begin(), ul_masks.end(), ul) == ul_masks.end()) ul_masks.push_back(std::move(ul));
    }

    RoundingResult best;
    for (auto& ul : ul_masks) {
        auto res = resolve_assignment(AllocationMask{std::move(ul), dl}, tau, relaxed, ch, cfg, settings,
                                      !fixed_tau.has_value());
        const int iterations = best.sca_iterations + res.sca_iterations;
        const int repairs = best.repair_rounds + res.repair_rounds;
        const bool degraded = best.degraded || res.degraded;
        if (best.status.empty() || (res.feasible && (!best.feasible || res.solution.achieved_common_throughput >
                                                                           best.solution.achieved_common_throughput))) {
            best = std::move(res);
        }
        best.sca_iterations = iterations;
        best.repair_rounds = repairs;
        best.degraded = degraded;
    }
    return best;
}

// =======================================================================
// Pipelines
// =======================================================================

namespace {

struct FixedRun
{
    PipelineResult result;
    std::optional<ScaResult> sca;
};

FixedRun run_fixed(SchemeKind scheme, const FeasibilityResult& feas, const ChannelRealization& ch,
                   const NetworkConfig& cfg, const PipelineSettings& settings)
{
    const auto start = Clock::now();
    const double mode = scheme == SchemeKind::fixed_sic ? 1.0 : 0.0;
    const std::vector<double> tau(cfg.num_subcarriers, mode);
    FixedRun run;
    auto& res = run.result;
    res.scheme = scheme;
    auto& d = res.diagnostics;
    d.feasibility = feas;
    d.degraded = feas.degraded;

    if (!feas.feasible) {
        d.status = "qos_infeasible";
    } else if (auto init = phase_one(tau, ch, cfg, settings); !init) {
        d.status = "phase_one_failed";
    } else {
        auto sca = sca_solve_p21(tau, *init, settings.sca, ch, cfg);
        d.sca_iterations = sca.iterations;
        d.relaxed_trace = sca.objective_trace;
        d.degraded = d.degraded || sca.degraded;
        auto rounded = round_and_resolve(sca.solution, ch, cfg, settings, mode);
        d.sca_iterations += rounded.sca_iterations;
        d.repair_rounds = rounded.repair_rounds;
        d.degraded = d.degraded || rounded.degraded;
        d.status = rounded.status;
        if (rounded.feasible && rounded.solution.achieved_common_throughput > sca.solution.r_common) {
            // A masked point is feasible for the relaxation too; continue the relaxed SCA from it.
            RelaxedSolution lifted = sca.solution;
            lifted.a_ul = rounded.solution.a_ul;
            lifted.a_dl = rounded.solution.a_dl;
            lifted.e_ul = rounded.solution.e_ul;
            lifted.e_dl = rounded.solution.e_dl;
            lifted.r_dl = rounded.solution.r_dl;
            auto again = sca_solve_p21(tau, lifted, settings.sca, ch, cfg);
            d.sca_iterations += again.iterations;
            if (again.solution.r_common > sca.solution.r_common) sca = std::move(again);
        }
        res.relaxed_bound = sca.solution.r_common;
        res.relaxed = sca.solution;
        if (rounded.feasible) {
            res.feasible = true;
            res.solution = std::move(rounded.solution);
            d.integral_source = to_string(scheme);
        }
        run.sca = std::move(sca);
    }
    d.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return run;
}

PipelineResult run_adaptive(const FeasibilityResult& feas, const FixedRun& sic, const FixedRun& tin,
                            const ChannelRealization& ch, const NetworkConfig& cfg, const PipelineSettings& settings)
{
    const auto start = Clock::now();
    PipelineResult res;
    res.scheme = SchemeKind::adaptive;
    auto& d = res.diagnostics;
    d.feasibility = feas;
    d.degraded = feas.degraded;
    d.fixed_sic_relaxed = sic.result.relaxed ? sic.result.relaxed_bound : 0.0;
    d.fixed_tin_relaxed = tin.result.relaxed ? tin.result.relaxed_bound : 0.0;

    const PipelineResult* seed = nullptr;
    for (const auto* r : {&sic.result, &tin.result}) {
        if (r->relaxed && (!seed || r->relaxed_bound > seed->relaxed_bound)) seed = r;
    }
    if (!feas.feasible) {
        d.status = "qos_infeasible";
    } else if (!seed) {
        d.status = "phase_one_failed";
    } else {
        auto alt = solve_p2_alternating(*seed->relaxed, ch, cfg, settings);
        d.relaxed_trace = alt.objective_trace;
        d.alternating_rounds = alt.rounds;
        d.alternating_converged = alt.converged;
        d.sca_iterations = alt.sca_iterations;
        d.degraded = d.degraded || alt.degraded;
        const double floor_bound = std::max(d.fixed_sic_relaxed, d.fixed_tin_relaxed);
        if (alt.solution.r_common < floor_bound - 1e-9)
            throw std::logic_error("adaptive relaxed objective fell below its fixed-mode seed");

        auto rounded = round_and_resolve(alt.solution, ch, cfg, settings);
        d.sca_iterations += rounded.sca_iterations;
        d.repair_rounds = rounded.repair_rounds;
        d.degraded = d.degraded || rounded.degraded;
        d.status = rounded.status;

        // Fixed-mode integral solutions are admissible adaptive decisions; keep the best of the three.
        std::optional<IntegralSolution> best;
        if (rounded.feasible) {
            best = std::move(rounded.solution);
            d.integral_source = "adaptive";
        }
        for (const auto* r : {&sic.result, &tin.result}) {
            if (r->solution && (!best || r->solution->achieved_common_throughput > best->achieved_common_throughput)) {
                best = r->solution;
                d.integral_source = to_string(r->scheme);
            }
        }
        if (best && best->achieved_common_throughput > alt.solution.r_common) {
            RelaxedSolution lifted = alt.solution;
            lifted.a_ul = best->a_ul;
            lifted.a_dl = best->a_dl;
            lifted.tau = best->tau;
            lifted.e_ul = best->e_ul;
            lifted.e_dl = best->e_dl;
            lifted.r_dl = best->r_dl;
            auto again = solve_p2_alternating(lifted, ch, cfg, settings);
            d.sca_iterations += again.sca_iterations;
            if (again.solution.r_common > alt.solution.r_common) alt.solution = std::move(again.solution);
        }
        res.relaxed_bound = alt.solution.r_common;
        res.relaxed = std::move(alt.solution);
        if (best) {
            res.feasible = true;
            res.solution = std::move(best);
            d.status = "ok";
        }
    }
    d.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count() + sic.result.diagnostics.wall_seconds +
                     tin.result.diagnostics.wall_seconds;
    return res;
}

void stamp(PipelineResult& r, const ChannelRealization& ch, std::uint64_t seed)
{
    r.diagnostics.seed = seed;
    r.diagnostics.channel_hash = channel_hash(ch);
}

} // namespace

std::array<PipelineResult, 3> solve_all_schemes(const ChannelRealization& ch, const NetworkConfig& cfg,
                                                const PipelineSettings& settings, std::uint64_t seed)
{
    const auto start = Clock::now();
    const auto feas = check_feasibility(ch, cfg, settings);
    const double check_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    auto sic = run_fixed(SchemeKind::fixed_sic, feas, ch, cfg, settings);
    auto tin = run_fixed(SchemeKind::fixed_tin, feas, ch, cfg, settings);
    auto adaptive = run_adaptive(feas, sic, tin, ch, cfg, settings);
    std::array<PipelineResult, 3> out{std::move(adaptive), std::move(sic.result), std::move(tin.result)};
    for (auto& r : out) {
        stamp(r, ch, seed);
        r.diagnostics.wall_seconds += check_seconds;
    }
    return out;
}

PipelineResult solve_pipeline(SchemeKind scheme, const ChannelRealization& ch, const NetworkConfig& cfg,
                              const PipelineSettings& settings, std::uint64_t seed)
{
    if (scheme == SchemeKind::adaptive) return std::move(solve_all_schemes(ch, cfg, settings, seed)[0]);
    const auto start = Clock::now();
    const auto feas = check_feasibility(ch, cfg, settings);
    const double check_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    auto run = run_fixed(scheme, feas, ch, cfg, settings);
    stamp(run.result, ch, seed);
    run.result.diagnostics.wall_seconds += check_seconds;
    return std::move(run.result);
}

} // namespace npn
