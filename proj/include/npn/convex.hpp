#pragma once
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace npn {

// =======================================================================
// Solver report shared by the LP and convex solvers
// =======================================================================

enum class SolverStatus
{
    optimal,
    max_iterations,
    infeasible,
    unbounded,
    numerical_failure,
};

const char* to_string(SolverStatus status);

struct SolverSettings
{
    double feas_tol = 1e-8;
    double kkt_tol = 1e-6;
    /// Bound on the total complementarity s'y at termination.
    double gap_tol = 1e-10;
    int max_iterations = 500;
};

struct SolverReport
{
    SolverStatus status = SolverStatus::numerical_failure;
    double objective = 0.0;
    std::vector<double> primal;
    /// One multiplier per constraint row (>= 0 for inequality rows).
    std::vector<double> duals;
    double max_violation = 0.0;
    double kkt_residual = 0.0;
    double duality_gap = 0.0;
    /// max |dual_i * slack_i| over rows and active bounds.
    double complementarity_residual = 0.0;
    int iterations = 0;
    double wall_seconds = 0.0;

    bool ok() const { return status == SolverStatus::optimal; }
};

// =======================================================================
// Convex program with concave-log constraints
// =======================================================================

inline constexpr double infinity = std::numeric_limits<double>::infinity();

using SparseTerms = std::vector<std::pair<int, double>>;

/// weight * ln(constant + coeffs . x), weight > 0, constant > 0, coeffs >= 0.
struct LogTerm
{
    double weight = 1.0;
    double constant = 1.0;
    SparseTerms coeffs;
};

/// linear . x + sum(logs) >= lower; every row is concave in x.
struct ConvexConstraint
{
    SparseTerms linear;
    std::vector<LogTerm> logs;
    double lower = 0.0;
    std::string label;
    /// Keep as its own multiplier row in the Newton system instead of folding it
    /// into the Hessian block; set on rows that couple otherwise separate blocks.
    bool separate = false;
};

/*
 * maximize objective . x  subject to  lower <= x <= upper  and the rows
 * in `constraints`. Every variable touched by a log term must have a
 * non-negative lower bound, which keeps every log argument at least its
 * (positive) constant on the whole box.
 */
struct ConvexProgram
{
    std::vector<double> objective;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<ConvexConstraint> constraints;

    std::size_t num_vars() const { return objective.size(); }
    int add_variable(double lo, double hi, double obj = 0.0);

    void add_ge(SparseTerms linear, double rhs, std::string label = {});
    void add_le(SparseTerms linear, double rhs, std::string label = {});

    /// Throws std::invalid_argument if the program violates the structural rules above.
    void validate() const;

    double evaluate_row(std::size_t i, const std::vector<double>& x) const;
    double objective_value(const std::vector<double>& x) const;
    /// Largest violation over rows and bounds (0 if feasible).
    double max_violation(const std::vector<double>& x) const;
};

/*
 * Primal-dual interior-point method (Mehrotra predictor-corrector, slack
 * formulation, infeasible start). `start` may be empty or any point; it
 * is pushed into the interior of the bounds. Rows with few nonzeros are
 * folded into the Hessian block; long rows and rows marked `separate`
 * stay in an augmented system eliminated last, so the sparse LDL^T never
 * pivots on a constraint row before its variables. Steps use separate
 * primal and dual lengths, a nonmonotone residual test and a
 * second-order correction when a step increases the row violation.
 */
SolverReport solve_convex(const ConvexProgram& prog, const std::vector<double>& start = {},
                          const SolverSettings& settings = {});

} // namespace npn
