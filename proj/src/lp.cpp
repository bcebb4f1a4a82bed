#include <npn/lp.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace npn {

int LinearProgram::add_variable(double lo, double hi, double obj)
{
    objective.push_back(obj);
    lower.push_back(lo);
    upper.push_back(hi);
    return static_cast<int>(objective.size()) - 1;
}

void LinearProgram::add_row(SparseTerms coeffs, RowSense sense, double rhs)
{
    rows.push_back({std::move(coeffs), sense, rhs});
}

double LinearProgram::objective_value(const std::vector<double>& x) const
{
    double v = 0.0;
    for (std::size_t j = 0; j < num_vars(); ++j) v += objective[j] * x[j];
    return v;
}

double LinearProgram::max_violation(const std::vector<double>& x) const
{
    double worst = 0.0;
    for (std::size_t j = 0; j < num_vars(); ++j) worst = std::max({worst, lower[j] - x[j], x[j] - upper[j]});
    for (const auto& row : rows) {
        double lhs = 0.0;
        for (const auto& [j, c] : row.coeffs) lhs += c * x[j];
        switch (row.sense) {
        case RowSense::le: worst = std::max(worst, lhs - row.rhs); break;
        case RowSense::ge: worst = std::max(worst, row.rhs - lhs); break;
        case RowSense::eq: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
        }
    }
    return worst;
}

ConvexProgram to_convex(const LinearProgram& lp)
{
    ConvexProgram prog;
    prog.objective = lp.objective;
    prog.lower = lp.lower;
    prog.upper = lp.upper;
    for (const auto& row : lp.rows) {
        switch (row.sense) {
        case RowSense::le: prog.add_le(row.coeffs, row.rhs); break;
        case RowSense::ge: prog.add_ge(row.coeffs, row.rhs); break;
        case RowSense::eq:
            prog.add_le(row.coeffs, row.rhs);
            prog.add_ge(row.coeffs, row.rhs);
            break;
        }
    }
    return prog;
}

namespace {

constexpr double pivot_tol = 1e-11;
constexpr double cost_tol = 1e-11;

// Original variable j = offset + sum sign * x'_col over its standard columns.
struct VarMap
{
    double offset = 0.0;
    std::vector<std::pair<int, double>> cols;
};

class Tableau
{
public:
    Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0) {}

    double& at(std::size_t i, std::size_t j) { return t_[i * (n_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, n_); }
    // Row m_ holds reduced costs (maximization: entering iff > 0) and -objective in the rhs slot.
    double& cost(std::size_t j) { return at(m_, j); }

    void pivot(std::size_t r, std::size_t c)
    {
        const double p = at(r, c);
        for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= p;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == r) continue;
            const double factor = at(i, c);
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= factor * at(r, j);
            at(i, c) = 0.0;
        }
    }

    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

private:
    std::size_t m_, n_;
    std::vector<double> t_;
};

enum class PhaseResult
{
    optimal,
    unbounded,
    iteration_limit,
};

// Bland's rule: lowest-index improving column, lowest-index basic variable among ratio ties.
PhaseResult run_simplex(Tableau& tab, std::vector<int>& basis, const std::vector<bool>& allowed, int& iterations)
{
    const std::size_t m = tab.rows(), n = tab.cols();
    const int limit = 50000;
    while (iterations < limit) {
        std::size_t enter = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (allowed[j] && tab.cost(j) > cost_tol) {
                enter = j;
                break;
            }
        }
        if (enter == n) return PhaseResult::optimal;
        std::size_t leave = m;
        double best = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double a = tab.at(i, enter);
            if (a <= pivot_tol) continue;
            const double ratio = tab.rhs(i) / a;
            if (leave == m || ratio < best - 1e-12 ||
                (std::abs(ratio - best) <= 1e-12 && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m) return PhaseResult::unbounded;
        tab.pivot(leave, enter);
        basis[leave] = static_cast<int>(enter);
        ++iterations;
    }
    return PhaseResult::iteration_limit;
}

} // namespace

SolverReport solve_lp(const LinearProgram& lp)
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t nv = lp.num_vars();
    if (lp.lower.size() != nv || lp.upper.size() != nv) throw std::invalid_argument("LinearProgram: bound vectors mismatch");
    for (std::size_t j = 0; j < nv; ++j) {
        if (!(lp.lower[j] <= lp.upper[j])) throw std::invalid_argument("LinearProgram: lower bound exceeds upper bound");
    }

    // Standard form: x' >= 0, rows with sense, later rhs >= 0.
    std::vector<VarMap> vmap(nv);
    std::size_t ncols = 0;
    struct StdRow
    {
        std::vector<std::pair<int, double>> coeffs;
        RowSense sense;
        double rhs;
        int source = -1; // original row, -1 for a bound row
        double flip = 1.0;
    };
    std::vector<StdRow> srows;
    for (std::size_t j = 0; j < nv; ++j) {
        const double lo = lp.lower[j], up = lp.upper[j];
        if (std::isfinite(lo)) {
            vmap[j].offset = lo;
            vmap[j].cols.emplace_back(static_cast<int>(ncols++), 1.0);
            if (std::isfinite(up)) srows.push_back({{{vmap[j].cols[0].first, 1.0}}, RowSense::le, up - lo});
        } else if (std::isfinite(up)) {
            vmap[j].offset = up;
            vmap[j].cols.emplace_back(static_cast<int>(ncols++), -1.0);
        } else {
            vmap[j].cols.emplace_back(static_cast<int>(ncols++), 1.0);
            vmap[j].cols.emplace_back(static_cast<int>(ncols++), -1.0);
        }
    }
    std::vector<double> cstd(ncols, 0.0);
    for (std::size_t j = 0; j < nv; ++j) {
        for (const auto& [c, sgn] : vmap[j].cols) cstd[c] += lp.objective[j] * sgn;
    }
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
        const auto& row = lp.rows[i];
        StdRow sr{{}, row.sense, row.rhs, static_cast<int>(i), 1.0};
        for (const auto& [j, a] : row.coeffs) {
            if (j < 0 || static_cast<std::size_t>(j) >= nv) throw std::invalid_argument("LinearProgram: index out of range");
            sr.rhs -= a * vmap[j].offset;
            for (const auto& [c, sgn] : vmap[j].cols) sr.coeffs.emplace_back(c, a * sgn);
        }
        srows.push_back(std::move(sr));
    }
    for (auto& sr : srows) {
        if (sr.rhs < 0.0) {
            sr.rhs = -sr.rhs;
            sr.flip = -1.0;
            for (auto& [c, a] : sr.coeffs) a = -a;
            if (sr.sense == RowSense::le) sr.sense = RowSense::ge;
            else if (sr.sense == RowSense::ge) sr.sense = RowSense::le;
        }
    }

    // Columns: structural | slack/surplus | artificial.
    const std::size_t m = srows.size();
    std::size_t nslack = 0, nart = 0;
    for (const auto& sr : srows) {
        if (sr.sense != RowSense::eq) ++nslack;
        if (sr.sense != RowSense::le) ++nart;
    }
    const std::size_t total = ncols + nslack + nart;
    Tableau tab(m, total);
    std::vector<int> basis(m, -1);
    std::vector<bool> is_art(total, false);
    std::vector<int> slack_col(m, -1);
    {
        std::size_t next_slack = ncols, next_art = ncols + nslack;
        for (std::size_t i = 0; i < m; ++i) {
            const auto& sr = srows[i];
            for (const auto& [c, a] : sr.coeffs) tab.at(i, c) += a;
            tab.rhs(i) = sr.rhs;
            if (sr.sense == RowSense::le) {
                tab.at(i, next_slack) = 1.0;
                slack_col[i] = static_cast<int>(next_slack);
                basis[i] = static_cast<int>(next_slack++);
            } else {
                if (sr.sense == RowSense::ge) {
                    tab.at(i, next_slack) = -1.0;
                    slack_col[i] = static_cast<int>(next_slack++);
                }
                tab.at(i, next_art) = 1.0;
                is_art[next_art] = true;
                basis[i] = static_cast<int>(next_art++);
            }
        }
    }
    // Keep a copy of the standard-form matrix for the dual recovery.
    Eigen::MatrixXd A(m, total);
    Eigen::VectorXd b(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < total; ++j) A(i, j) = tab.at(i, j);
        b[i] = tab.rhs(i);
    }

    SolverReport report;
    int iterations = 0;

    // Phase 1: maximize -sum(artificials).
    for (std::size_t j = 0; j <= total; ++j) tab.cost(j) = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (!is_art[basis[i]]) continue;
        for (std::size_t j = 0; j <= total; ++j) {
            if (!is_art[j]) tab.cost(j) += tab.at(i, j);
        }
    }
    std::vector<bool> allowed(total, true);
    auto phase1 = run_simplex(tab, basis, allowed, iterations);
    double infeas = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (is_art[basis[i]]) infeas += tab.rhs(i);
    }
    if (phase1 == PhaseResult::iteration_limit) {
        report.status = SolverStatus::max_iterations;
    } else if (infeas > 1e-9 * (1.0 + b.cwiseAbs().maxCoeff())) {
        report.status = SolverStatus::infeasible;
    }
    if (report.status == SolverStatus::max_iterations || report.status == SolverStatus::infeasible) {
        report.iterations = iterations;
        report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return report;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
        if (!is_art[basis[i]]) continue;
        for (std::size_t j = 0; j < total; ++j) {
            if (!is_art[j] && std::abs(tab.at(i, j)) > 1e-9) {
                tab.pivot(i, j);
                basis[i] = static_cast<int>(j);
                break;
            }
        }
    }
    for (std::size_t j = 0; j < total; ++j) allowed[j] = !is_art[j];

    // Phase 2.
    for (std::size_t j = 0; j <= total; ++j) tab.cost(j) = j < ncols ? cstd[j] : 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double cb = static_cast<std::size_t>(basis[i]) < ncols ? cstd[basis[i]] : 0.0;
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j <= total; ++j) tab.cost(j) -= cb * tab.at(i, j);
    }
    auto phase2 = run_simplex(tab, basis, allowed, iterations);
    report.iterations = iterations;
    if (phase2 == PhaseResult::unbounded) {
        report.status = SolverStatus::unbounded;
    } else if (phase2 == PhaseResult::iteration_limit) {
        report.status = SolverStatus::max_iterations;
    } else {
        report.status = SolverStatus::optimal;
    }

    std::vector<double> xstd(total, 0.0);
    for (std::size_t i = 0; i < m; ++i) xstd[basis[i]] = std::max(0.0, tab.rhs(i));
    report.primal.assign(nv, 0.0);
    for (std::size_t j = 0; j < nv; ++j) {
        double v = vmap[j].offset;
        for (const auto& [c, sgn] : vmap[j].cols) v += sgn * xstd[c];
        report.primal[j] = v;
    }
    report.objective = lp.objective_value(report.primal);
    report.max_violation = lp.max_violation(report.primal);

    if (report.status == SolverStatus::optimal && m > 0) {
        // y solves B' y = c_B on the standard-form matrix.
        Eigen::MatrixXd B(m, m);
        Eigen::VectorXd cb(m);
        for (std::size_t i = 0; i < m; ++i) {
            B.col(i) = A.col(basis[i]);
            cb[i] = static_cast<std::size_t>(basis[i]) < ncols ? cstd[basis[i]] : 0.0;
        }
        Eigen::VectorXd y = B.transpose().partialPivLu().solve(cb);
        double dual_infeas = 0.0, cs = 0.0;
        for (std::size_t j = 0; j < total; ++j) {
            if (is_art[j]) continue;
            const double cj = j < ncols ? cstd[j] : 0.0;
            const double reduced = cj - A.col(j).dot(y);
            dual_infeas = std::max(dual_infeas, reduced);
            cs = std::max(cs, std::abs(reduced * xstd[j]));
        }
        double primal_std = 0.0;
        for (std::size_t j = 0; j < ncols; ++j) primal_std += cstd[j] * xstd[j];
        report.duality_gap = std::abs(primal_std - b.dot(y));
        report.kkt_residual = dual_infeas;
        report.complementarity_residual = cs;
        report.duals.assign(lp.rows.size(), 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            if (srows[i].source >= 0) report.duals[srows[i].source] = srows[i].flip * y[i];
        }
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace npn
