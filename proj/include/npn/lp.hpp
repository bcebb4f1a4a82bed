#pragma once
#include <string>
#include <vector>

#include <npn/convex.hpp>

namespace npn {

enum class RowSense
{
    le,
    ge,
    eq,
};

struct LpRow
{
    SparseTerms coeffs;
    RowSense sense = RowSense::le;
    double rhs = 0.0;
};

/// maximize objective . x  s.t. rows, lower <= x <= upper (either bound may be infinite).
struct LinearProgram
{
    std::vector<double> objective;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<LpRow> rows;

    std::size_t num_vars() const { return objective.size(); }
    int add_variable(double lo, double hi, double obj = 0.0);
    void add_row(SparseTerms coeffs, RowSense sense, double rhs);

    double objective_value(const std::vector<double>& x) const;
    double max_violation(const std::vector<double>& x) const;
};

/*
 * Two-phase dense tableau simplex with Bland's rule. On success the
 * report carries duals as shadow prices d(objective)/d(rhs) per row,
 * the primal-dual objective gap, the largest positive reduced cost
 * (kkt_residual) and the complementary-slackness residual.
 */
SolverReport solve_lp(const LinearProgram& lp);

/// The same LP as a ConvexProgram (no log terms), e.g. for cross-checking with solve_convex.
ConvexProgram to_convex(const LinearProgram& lp);

} // namespace npn
