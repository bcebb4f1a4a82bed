#pragma once
#include <ostream>
#include <vector>

#include <npn/subproblems.hpp>

namespace npn {

struct ScaSettings
{
    double objective_rel_tol = 1e-6;
    int max_outer_iterations = 50;
    /// Denominator floor of the relative-change test, for starts near zero.
    double objective_abs_floor = 1e-9;
    /// Largest exact-constraint residual accepted for an iterate.
    double feasibility_tol = 1e-8;
    SolverSettings solver;
};

struct ScaTraceEntry
{
    int iteration = 0;
    double objective = 0.0;
    double max_residual = 0.0;
    SolverStatus status = SolverStatus::optimal;
    int solver_iterations = 0;
};

struct ScaResult
{
    RelaxedSolution solution;
    /// Objective of the initial point followed by every accepted iterate.
    std::vector<double> objective_trace;
    std::vector<ScaTraceEntry> trace;
    int iterations = 0;
    bool converged = false;
    bool degraded = false;
};

/*
 * SCA loop for fixed decoding modes. The objective of an iterate is its
 * common UL throughput evaluated with the exact rates, which is also
 * written back into r_common. A candidate that fails its subproblem,
 * breaks an exact constraint or lowers the objective is discarded and
 * the loop stops at the previous iterate. When `trace_out` is set, one
 * JSON record per iteration is written to it.
 */
ScaResult sca_solve_p21(const std::vector<double>& tau, const RelaxedSolution& init, const ScaSettings& settings,
                        const ChannelRealization& ch, const NetworkConfig& cfg, const AllocationMask* mask = nullptr,
                        std::ostream* trace_out = nullptr);

} // namespace npn
