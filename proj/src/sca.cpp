#include <npn/sca.hpp>

#include <cmath>
#include <cstdio>

namespace npn {

namespace {

void emit(std::ostream* out, const ScaTraceEntry& e)
{
    if (!out) return;
    char line[256];
    std::snprintf(line, sizeof line,
                  "{\"iteration\":%d,\"objective\":%.17g,\"max_residual\":%.3e,\"status\":\"%s\",\"solver_iterations\":%d}\n",
                  e.iteration, e.objective, e.max_residual, to_string(e.status), e.solver_iterations);
    *out << line;
}

} // namespace

ScaResult sca_solve_p21(const std::vector<double>& tau, const RelaxedSolution& init, const ScaSettings& settings,
                        const ChannelRealization& ch, const NetworkConfig& cfg, const AllocationMask* mask,
                        std::ostream* trace_out)
{
    ScaResult out;
    RelaxedSolution cur = init;
    cur.tau = tau;
    cur.r_common = common_uplink_throughput(cur, ch, cfg);
    out.objective_trace.push_back(cur.r_common);
    ScaTraceEntry first{0, cur.r_common, p21_violation(cur, tau, ch, cfg), SolverStatus::optimal, 0};
    out.trace.push_back(first);
    emit(trace_out, first);

    for (int it = 1; it <= settings.max_outer_iterations; ++it) {
        out.iterations = it;
        auto sub = solve_p22(cur, tau, ch, cfg, mask, settings.solver);
        ScaTraceEntry entry{it, cur.r_common, 0.0, sub.report.status, sub.report.iterations};
        if (sub.report.status != SolverStatus::optimal && sub.report.status != SolverStatus::max_iterations) {
            out.degraded = true;
            out.trace.push_back(entry);
            emit(trace_out, entry);
            break;
        }
        auto cand = std::move(sub.solution);
        cand.r_common = common_uplink_throughput(cand, ch, cfg);
        entry.max_residual = p21_violation(cand, tau, ch, cfg);
        entry.objective = cand.r_common;
        out.trace.push_back(entry);
        emit(trace_out, entry);
        if (entry.max_residual > settings.feasibility_tol) {
            out.degraded = true;
            break;
        }
        if (cand.r_common < cur.r_common) {
            out.converged = true;
            break;
        }
        const double gain = cand.r_common - cur.r_common;
        cur = std::move(cand);
        out.objective_trace.push_back(cur.r_common);
        if (gain <= settings.objective_rel_tol * std::max(std::abs(cur.r_common), settings.objective_abs_floor)) {
            out.converged = true;
            break;
        }
    }
    out.solution = std::move(cur);
    return out;
}

} // namespace npn
