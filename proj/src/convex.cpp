#include <npn/convex.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace npn {

const char* to_string(SolverStatus status)
{
    switch (status) {
    case SolverStatus::optimal: return "optimal";
    case SolverStatus::max_iterations: return "max-iterations";
    case SolverStatus::infeasible: return "infeasible";
    case SolverStatus::unbounded: return "unbounded";
    case SolverStatus::numerical_failure: return "numerical-failure";
    }
    return "unknown";
}

// =======================================================================
// ConvexProgram
// =======================================================================

int ConvexProgram::add_variable(double lo, double hi, double obj)
{
    objective.push_back(obj);
    lower.push_back(lo);
    upper.push_back(hi);
    return static_cast<int>(objective.size()) - 1;
}

void ConvexProgram::add_ge(SparseTerms linear, double rhs, std::string label)
{
    constraints.push_back({std::move(linear), {}, rhs, std::move(label)});
}

void ConvexProgram::add_le(SparseTerms linear, double rhs, std::string label)
{
    for (auto& [j, c] : linear) c = -c;
    constraints.push_back({std::move(linear), {}, -rhs, std::move(label)});
}

void ConvexProgram::validate() const
{
    const auto n = num_vars();
    if (lower.size() != n || upper.size() != n) throw std::invalid_argument("ConvexProgram: bound vectors mismatch");
    for (std::size_t j = 0; j < n; ++j) {
        if (!(lower[j] <= upper[j]) || std::isnan(lower[j]) || std::isnan(upper[j])) {
            throw std::invalid_argument("ConvexProgram: lower bound exceeds upper bound");
        }
        if (!std::isfinite(objective[j])) throw std::invalid_argument("ConvexProgram: non-finite objective");
    }
    auto check_index = [n](int j) {
        if (j < 0 || static_cast<std::size_t>(j) >= n) throw std::invalid_argument("ConvexProgram: variable index out of range");
    };
    for (const auto& row : constraints) {
        if (!std::isfinite(row.lower)) throw std::invalid_argument("ConvexProgram: non-finite row bound");
        for (const auto& [j, c] : row.linear) {
            check_index(j);
            if (!std::isfinite(c)) throw std::invalid_argument("ConvexProgram: non-finite coefficient");
        }
        for (const auto& t : row.logs) {
            if (!(t.weight > 0.0) || !(t.constant > 0.0) || !std::isfinite(t.weight) || !std::isfinite(t.constant)) {
                throw std::invalid_argument("ConvexProgram: log term needs positive weight and constant");
            }
            for (const auto& [j, c] : t.coeffs) {
                check_index(j);
                if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("ConvexProgram: log coefficients must be >= 0");
                if (!(lower[j] >= 0.0)) throw std::invalid_argument("ConvexProgram: log variables need a lower bound >= 0");
            }
        }
    }
}

double ConvexProgram::evaluate_row(std::size_t i, const std::vector<double>& x) const
{
    const auto& row = constraints[i];
    double v = -row.lower;
    for (const auto& [j, c] : row.linear) v += c * x[j];
    for (const auto& t : row.logs) {
        double arg = t.constant;
        for (const auto& [j, c] : t.coeffs) arg += c * x[j];
        v += t.weight * std::log(arg);
    }
    return v;
}

double ConvexProgram::objective_value(const std::vector<double>& x) const
{
    double v = 0.0;
    for (std::size_t j = 0; j < num_vars(); ++j) v += objective[j] * x[j];
    return v;
}

double ConvexProgram::max_violation(const std::vector<double>& x) const
{
    double worst = 0.0;
    for (std::size_t j = 0; j < num_vars(); ++j) {
        worst = std::max({worst, lower[j] - x[j], x[j] - upper[j]});
    }
    for (std::size_t i = 0; i < constraints.size(); ++i) worst = std::max(worst, -evaluate_row(i, x));
    return worst;
}

// =======================================================================
// Interior-point solver
// =======================================================================

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Ldlt = Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::NaturalOrdering<int>>;

inline std::size_t packed(std::size_t a, std::size_t b) { return a * (a + 1) / 2 + b; }

struct Term
{
    double weight = 1.0;
    double constant = 1.0;
    std::vector<int> vars;
    std::vector<double> beta;
    std::vector<int> row_pos;
    std::vector<int> hess_pos; // packed lower pairs
    double arg = 1.0;
};

struct Row
{
    std::vector<int> support;
    std::vector<std::pair<int, double>> lin;
    std::vector<int> terms;
    double lower = 0.0;
    bool dense = false;
    int dense_index = -1;
    std::vector<int> fold_pos; // local rows: packed pairs over support
    std::vector<int> aug_pos;  // dense rows: one per support entry
    int aug_diag_pos = -1;
    std::vector<double> jac;
    double value = 0.0;
};

struct Direction
{
    std::vector<double> dx, ds, dy, dzl, dzu;
};

class InteriorPoint
{
public:
    InteriorPoint(const ConvexProgram& prog, const SolverSettings& settings) : prog_(prog), settings_(settings)
    {
        n_ = prog.num_vars();
        m_ = prog.constraints.size();
        build_structure();
    }

    SolverReport run(const std::vector<double>& start);

private:
    void build_structure();
    bool evaluate(const std::vector<double>& x);
    void residuals();
    void assemble();
    bool factorize();
    Direction solve_direction(const std::vector<double>& rc_s, const std::vector<double>& rc_l,
                              const std::vector<double>& rc_u);
    Direction solve_reduced(const std::vector<double>& rd, const std::vector<double>& rp,
                            const std::vector<double>& rc_s, const std::vector<double>& rc_l,
                            const std::vector<double>& rc_u);
    double max_step(const Direction& d, bool primal) const;
    double complementarity() const;
    double merit(double target) const;
    /// Largest violation of the original rows, ignoring slacks.
    double true_violation() const;
    bool meets_contract() const;

    const ConvexProgram& prog_;
    SolverSettings settings_;
    std::size_t n_ = 0, m_ = 0, num_dense_ = 0, num_comp_ = 0;

    std::vector<Term> terms_;
    std::vector<Row> rows_;
    std::vector<int> new_of_old_;
    std::vector<int> xdiag_pos_;
    std::vector<bool> has_lo_, has_up_;

    SpMat kkt_;
    Eigen::VectorXd kkt_scale_;
    Ldlt ldlt_;
    bool analyzed_ = false;
    static constexpr double min_reg = 1e-11;
    static constexpr double noise_gap = 2e-12;
    double reg_primal_ = min_reg;
    double reg_dual_ = min_reg;

    // iterate
    std::vector<double> x_, s_, y_, zl_, zu_;
    std::vector<double> rd_, rp_;
};

void InteriorPoint::build_structure()
{
    has_lo_.resize(n_);
    has_up_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        has_lo_[j] = std::isfinite(prog_.lower[j]);
        has_up_[j] = std::isfinite(prog_.upper[j]);
        num_comp_ += has_lo_[j] + has_up_[j];
    }
    num_comp_ += m_;

    const std::size_t dense_threshold = std::max<std::size_t>(48, n_ / 16);
    rows_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
        const auto& src = prog_.constraints[i];
        Row& row = rows_[i];
        row.lower = src.lower;
        for (const auto& [j, c] : src.linear) row.support.push_back(j);
        for (const auto& t : src.logs) {
            for (const auto& [j, c] : t.coeffs) row.support.push_back(j);
        }
        std::sort(row.support.begin(), row.support.end());
        row.support.erase(std::unique(row.support.begin(), row.support.end()), row.support.end());
        auto pos_of = [&row](int j) {
            return static_cast<int>(std::lower_bound(row.support.begin(), row.support.end(), j) - row.support.begin());
        };
        for (const auto& [j, c] : src.linear) row.lin.emplace_back(pos_of(j), c);
        for (const auto& t : src.logs) {
            Term term;
            term.weight = t.weight;
            term.constant = t.constant;
            for (const auto& [j, c] : t.coeffs) {
                term.vars.push_back(j);
                term.beta.push_back(c);
                term.row_pos.push_back(pos_of(j));
            }
            row.terms.push_back(static_cast<int>(terms_.size()));
            terms_.push_back(std::move(term));
        }
        row.jac.assign(row.support.size(), 0.0);
        if (row.support.size() > dense_threshold || prog_.constraints[i].separate) {
            row.dense = true;
            row.dense_index = static_cast<int>(num_dense_++);
        }
    }

    // Fill-reducing order of the primal block (Hessian + folded rows).
    std::vector<Eigen::Triplet<double, int>> pattern;
    for (std::size_t j = 0; j < n_; ++j) pattern.emplace_back(j, j, 1.0);
    auto add_pairs = [&pattern](const std::vector<int>& vars) {
        for (std::size_t a = 0; a < vars.size(); ++a) {
            for (std::size_t b = 0; b < a; ++b) {
                pattern.emplace_back(vars[a], vars[b], 1.0);
                pattern.emplace_back(vars[b], vars[a], 1.0);
            }
        }
    };
    for (const auto& t : terms_) add_pairs(t.vars);
    for (const auto& row : rows_) {
        if (!row.dense) add_pairs(row.support);
    }
    SpMat primal_pattern(static_cast<int>(n_), static_cast<int>(n_));
    primal_pattern.setFromTriplets(pattern.begin(), pattern.end());
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
    Eigen::AMDOrdering<int> amd;
    amd(primal_pattern, perm);
    new_of_old_.assign(n_, 0);
    for (std::size_t k = 0; k < n_; ++k) new_of_old_[perm.indices()[k]] = static_cast<int>(k);

    // Lower-triangular KKT pattern in permuted coordinates; dense rows last.
    std::vector<Eigen::Triplet<double, int>> lower;
    auto add_lower = [&lower](int r, int c) { lower.emplace_back(std::max(r, c), std::min(r, c), 0.0); };
    for (std::size_t j = 0; j < n_; ++j) add_lower(new_of_old_[j], new_of_old_[j]);
    auto add_lower_pairs = [&](const std::vector<int>& vars) {
        for (std::size_t a = 0; a < vars.size(); ++a) {
            for (std::size_t b = 0; b <= a; ++b) add_lower(new_of_old_[vars[a]], new_of_old_[vars[b]]);
        }
    };
    for (const auto& t : terms_) add_lower_pairs(t.vars);
    for (const auto& row : rows_) {
        if (!row.dense) {
            add_lower_pairs(row.support);
        } else {
            const int r = static_cast<int>(n_) + row.dense_index;
            for (int j : row.support) add_lower(r, new_of_old_[j]);
            add_lower(r, r);
        }
    }
    const int dim = static_cast<int>(n_ + num_dense_);
    kkt_.resize(dim, dim);
    kkt_.setFromTriplets(lower.begin(), lower.end());
    kkt_.makeCompressed();

    auto position = [this](int r, int c) {
        const int rr = std::max(r, c), cc = std::min(r, c);
        const int* begin = kkt_.innerIndexPtr() + kkt_.outerIndexPtr()[cc];
        const int* end = kkt_.innerIndexPtr() + kkt_.outerIndexPtr()[cc + 1];
        const int* it = std::lower_bound(begin, end, rr);
        return static_cast<int>(it - kkt_.innerIndexPtr());
    };
    xdiag_pos_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) xdiag_pos_[j] = position(new_of_old_[j], new_of_old_[j]);
    for (auto& t : terms_) {
        for (std::size_t a = 0; a < t.vars.size(); ++a) {
            for (std::size_t b = 0; b <= a; ++b) t.hess_pos.push_back(position(new_of_old_[t.vars[a]], new_of_old_[t.vars[b]]));
        }
    }
    for (auto& row : rows_) {
        if (!row.dense) {
            for (std::size_t a = 0; a < row.support.size(); ++a) {
                for (std::size_t b = 0; b <= a; ++b) {
                    row.fold_pos.push_back(position(new_of_old_[row.support[a]], new_of_old_[row.support[b]]));
                }
            }
        } else {
            const int r = static_cast<int>(n_) + row.dense_index;
            for (int j : row.support) row.aug_pos.push_back(position(r, new_of_old_[j]));
            row.aug_diag_pos = position(r, r);
        }
    }
}

bool InteriorPoint::evaluate(const std::vector<double>& x)
{
    for (auto& t : terms_) {
        double arg = t.constant;
        for (std::size_t a = 0; a < t.vars.size(); ++a) arg += t.beta[a] * x[t.vars[a]];
        if (!(arg > 0.0) || !std::isfinite(arg)) return false;
        t.arg = arg;
    }
    for (auto& row : rows_) {
        double v = -row.lower;
        std::fill(row.jac.begin(), row.jac.end(), 0.0);
        for (const auto& [p, c] : row.lin) {
            v += c * x[row.support[p]];
            row.jac[p] += c;
        }
        for (int ti : row.terms) {
            const Term& t = terms_[ti];
            v += t.weight * std::log(t.arg);
            const double scale = t.weight / t.arg;
            for (std::size_t a = 0; a < t.vars.size(); ++a) row.jac[t.row_pos[a]] += scale * t.beta[a];
        }
        if (!std::isfinite(v)) return false;
        row.value = v;
    }
    return true;
}

void InteriorPoint::residuals()
{
    rd_.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) rd_[j] = -prog_.objective[j] - zl_[j] + zu_[j];
    rp_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
        const Row& row = rows_[i];
        for (std::size_t p = 0; p < row.support.size(); ++p) rd_[row.support[p]] -= y_[i] * row.jac[p];
        rp_[i] = row.value - s_[i];
    }
}

double InteriorPoint::true_violation() const
{
    double v = 0.0;
    for (const Row& row : rows_) v = std::max(v, -row.value);
    return v;
}

double InteriorPoint::complementarity() const
{
    double c = 0.0;
    for (std::size_t i = 0; i < m_; ++i) c += s_[i] * y_[i];
    for (std::size_t j = 0; j < n_; ++j) {
        if (has_lo_[j]) c += (x_[j] - prog_.lower[j]) * zl_[j];
        if (has_up_[j]) c += (prog_.upper[j] - x_[j]) * zu_[j];
    }
    return c;
}

bool InteriorPoint::meets_contract() const
{
    double viol = 0.0, slack = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
        viol = std::max(viol, -rows_[i].value);
        slack = std::max(slack, y_[i] * std::abs(rows_[i].value));
    }
    for (std::size_t j = 0; j < n_; ++j) {
        if (has_lo_[j]) {
            viol = std::max(viol, prog_.lower[j] - x_[j]);
            slack = std::max(slack, zl_[j] * std::abs(x_[j] - prog_.lower[j]));
        }
        if (has_up_[j]) {
            viol = std::max(viol, x_[j] - prog_.upper[j]);
            slack = std::max(slack, zu_[j] * std::abs(prog_.upper[j] - x_[j]));
        }
    }
    return viol <= settings_.feas_tol && slack <= settings_.kkt_tol;
}

double InteriorPoint::merit(double target) const
{
    double acc = 0.0;
    for (double v : rd_) acc += v * v;
    for (double v : rp_) acc += v * v;
    for (std::size_t i = 0; i < m_; ++i) {
        const double c = s_[i] * y_[i] - target;
        acc += c * c;
    }
    for (std::size_t j = 0; j < n_; ++j) {
        if (has_lo_[j]) {
            const double c = (x_[j] - prog_.lower[j]) * zl_[j] - target;
            acc += c * c;
        }
        if (has_up_[j]) {
            const double c = (prog_.upper[j] - x_[j]) * zu_[j] - target;
            acc += c * c;
        }
    }
    return std::sqrt(acc);
}

void InteriorPoint::assemble()
{
    double* val = kkt_.valuePtr();
    std::fill(val, val + kkt_.nonZeros(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
        double d = 0.0;
        if (has_lo_[j]) d += zl_[j] / (x_[j] - prog_.lower[j]);
        if (has_up_[j]) d += zu_[j] / (prog_.upper[j] - x_[j]);
        val[xdiag_pos_[j]] += d;
    }
    for (std::size_t i = 0; i < m_; ++i) {
        const Row& row = rows_[i];
        for (int ti : row.terms) {
            const Term& t = terms_[ti];
            const double coef = y_[i] * t.weight / (t.arg * t.arg);
            std::size_t k = 0;
            for (std::size_t a = 0; a < t.vars.size(); ++a) {
                const double ca = coef * t.beta[a];
                for (std::size_t b = 0; b <= a; ++b) val[t.hess_pos[k++]] += ca * t.beta[b];
            }
        }
        if (!row.dense) {
            const double w = y_[i] / s_[i];
            std::size_t k = 0;
            for (std::size_t a = 0; a < row.support.size(); ++a) {
                const double wa = w * row.jac[a];
                for (std::size_t b = 0; b <= a; ++b) val[row.fold_pos[k++]] += wa * row.jac[b];
            }
        } else {
            for (std::size_t p = 0; p < row.support.size(); ++p) val[row.aug_pos[p]] += row.jac[p];
            val[row.aug_diag_pos] += -s_[i] / y_[i];
        }
    }
}

bool InteriorPoint::factorize()
{
    if (!analyzed_) {
        ldlt_.analyzePattern(kkt_);
        analyzed_ = true;
    }
    // One pass of symmetric row-norm equilibration; barrier terms span
    // many orders of magnitude near the boundary.
    const int dim = static_cast<int>(kkt_.rows());
    kkt_scale_.setZero(dim);
    for (int c = 0; c < dim; ++c) {
        for (SpMat::InnerIterator it(kkt_, c); it; ++it) {
            const double a = std::abs(it.value());
            kkt_scale_[it.row()] = std::max(kkt_scale_[it.row()], a);
            kkt_scale_[c] = std::max(kkt_scale_[c], a);
        }
    }
    for (int k = 0; k < dim; ++k) kkt_scale_[k] = kkt_scale_[k] > 0.0 ? 1.0 / std::sqrt(kkt_scale_[k]) : 1.0;
    for (int c = 0; c < dim; ++c) {
        for (SpMat::InnerIterator it(kkt_, c); it; ++it) it.valueRef() *= kkt_scale_[it.row()] * kkt_scale_[c];
    }
    double* val = kkt_.valuePtr();
    for (int pos : xdiag_pos_) val[pos] += reg_primal_;
    for (const Row& row : rows_) {
        if (row.dense) val[row.aug_diag_pos] -= reg_dual_;
    }
    ldlt_.factorize(kkt_);
    if (ldlt_.info() != Eigen::Success) return false;
    const auto& d = ldlt_.vectorD();
    for (std::size_t k = 0; k < n_; ++k) {
        if (!(d[static_cast<int>(k)] > 0.0)) return false;
    }
    for (std::size_t k = n_; k < n_ + num_dense_; ++k) {
        if (!(d[static_cast<int>(k)] < 0.0)) return false;
    }
    return true;
}

/*
 * Newton system (rows g(x) - s = 0, bounds lo <= x <= up):
 *   H dx - J'dy - dzl + dzu = -rd      J dx - ds = -rp      S dy + Y ds = rc_s
 *   Zl dx + (x - lo) dzl = rc_l        -Zu dx + (up - x) dzu = rc_u
 * solved through the reduced factorization, followed by iterative
 * refinement against the unreduced equations.
 */
Direction InteriorPoint::solve_direction(const std::vector<double>& rc_s, const std::vector<double>& rc_l,
                                         const std::vector<double>& rc_u)
{
    Direction d = solve_reduced(rd_, rp_, rc_s, rc_l, rc_u);
    std::vector<double> e_d(n_), e_p(m_), e_s(m_), e_l(n_, 0.0), e_u(n_, 0.0);
    double base = 0.0;
    for (double v : rd_) base = std::max(base, std::abs(v));
    for (double v : rp_) base = std::max(base, std::abs(v));
    for (double v : rc_s) base = std::max(base, std::abs(v));
    for (int pass = 0; pass < 3; ++pass) {
        // Residual of the unreduced system, e = L(d) - b, written in the
        // same (rd, rp, rc) convention so solve_reduced(e) is the correction.
        std::vector<double> hdx(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            for (int ti : rows_[i].terms) {
                const Term& t = terms_[ti];
                double bdx = 0.0;
                for (std::size_t a = 0; a < t.vars.size(); ++a) bdx += t.beta[a] * d.dx[t.vars[a]];
                const double coef = y_[i] * t.weight / (t.arg * t.arg) * bdx;
                for (std::size_t a = 0; a < t.vars.size(); ++a) hdx[t.vars[a]] += coef * t.beta[a];
            }
        }
        double worst = 0.0;
        for (std::size_t j = 0; j < n_; ++j) e_d[j] = hdx[j] - d.dzl[j] + d.dzu[j] + rd_[j];
        for (std::size_t i = 0; i < m_; ++i) {
            const Row& row = rows_[i];
            double jdx = 0.0;
            for (std::size_t p = 0; p < row.support.size(); ++p) {
                jdx += row.jac[p] * d.dx[row.support[p]];
                e_d[row.support[p]] -= row.jac[p] * d.dy[i];
            }
            e_p[i] = jdx - d.ds[i] + rp_[i];
            e_s[i] = -(s_[i] * d.dy[i] + y_[i] * d.ds[i] - rc_s[i]);
            worst = std::max({worst, std::abs(e_p[i]), std::abs(e_s[i])});
        }
        for (std::size_t j = 0; j < n_; ++j) {
            worst = std::max(worst, std::abs(e_d[j]));
            if (has_lo_[j]) e_l[j] = -(zl_[j] * d.dx[j] + (x_[j] - prog_.lower[j]) * d.dzl[j] - rc_l[j]);
            if (has_up_[j]) e_u[j] = -(-zu_[j] * d.dx[j] + (prog_.upper[j] - x_[j]) * d.dzu[j] - rc_u[j]);
        }
        if (worst <= 1e-14 * std::max(1.0, base)) break;
        const Direction c = solve_reduced(e_d, e_p, e_s, e_l, e_u);
        for (std::size_t j = 0; j < n_; ++j) {
            d.dx[j] += c.dx[j];
            d.dzl[j] += c.dzl[j];
            d.dzu[j] += c.dzu[j];
        }
        for (std::size_t i = 0; i < m_; ++i) {
            d.dy[i] += c.dy[i];
            d.ds[i] += c.ds[i];
        }
    }
    return d;
}

Direction InteriorPoint::solve_reduced(const std::vector<double>& rd, const std::vector<double>& rp,
                                       const std::vector<double>& rc_s, const std::vector<double>& rc_l,
                                       const std::vector<double>& rc_u)
{
    const int dim = static_cast<int>(n_ + num_dense_);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    std::vector<double> b(m_);
    for (std::size_t j = 0; j < n_; ++j) {
        double r = -rd[j];
        if (has_lo_[j]) r += rc_l[j] / (x_[j] - prog_.lower[j]);
        if (has_up_[j]) r -= rc_u[j] / (prog_.upper[j] - x_[j]);
        rhs[new_of_old_[j]] += r;
    }
    for (std::size_t i = 0; i < m_; ++i) {
        const Row& row = rows_[i];
        b[i] = rc_s[i] / y_[i] - rp[i];
        if (!row.dense) {
            const double w = y_[i] / s_[i] * b[i];
            for (std::size_t p = 0; p < row.support.size(); ++p) rhs[new_of_old_[row.support[p]]] += w * row.jac[p];
        } else {
            rhs[static_cast<int>(n_) + row.dense_index] = b[i];
        }
    }
    Eigen::VectorXd sol = kkt_scale_.cwiseProduct(ldlt_.solve(kkt_scale_.cwiseProduct(rhs)));

    Direction d;
    d.dx.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) d.dx[j] = sol[new_of_old_[j]];
    d.dy.resize(m_);
    d.ds.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
        const Row& row = rows_[i];
        double jdx = 0.0;
        for (std::size_t p = 0; p < row.support.size(); ++p) jdx += row.jac[p] * d.dx[row.support[p]];
        const double v = row.dense ? sol[static_cast<int>(n_) + row.dense_index] : y_[i] / s_[i] * (jdx - b[i]);
        d.dy[i] = -v;
        d.ds[i] = jdx + rp[i];
    }
    d.dzl.assign(n_, 0.0);
    d.dzu.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
        if (has_lo_[j]) d.dzl[j] = (rc_l[j] - zl_[j] * d.dx[j]) / (x_[j] - prog_.lower[j]);
        if (has_up_[j]) d.dzu[j] = (rc_u[j] + zu_[j] * d.dx[j]) / (prog_.upper[j] - x_[j]);
    }
    return d;
}

double InteriorPoint::max_step(const Direction& d, bool primal) const
{
    double alpha = 1.0;
    auto limit = [&alpha](double v, double dv) {
        if (dv < 0.0) alpha = std::min(alpha, -v / dv);
    };
    if (primal) {
        // Slack moves at rounding level do not limit the step (the update
        // keeps those slacks positive); otherwise cancellation in a row
        // value can jam the primal step.
        for (std::size_t i = 0; i < m_; ++i) {
            if (d.ds[i] < -noise_gap * std::max(1.0, std::abs(rows_[i].value))) limit(s_[i], d.ds[i]);
        }
        for (std::size_t j = 0; j < n_; ++j) {
            if (has_lo_[j]) limit(x_[j] - prog_.lower[j], d.dx[j]);
            if (has_up_[j]) limit(prog_.upper[j] - x_[j], -d.dx[j]);
        }
    } else {
        for (std::size_t i = 0; i < m_; ++i) limit(y_[i], d.dy[i]);
        for (std::size_t j = 0; j < n_; ++j) {
            if (has_lo_[j]) limit(zl_[j], d.dzl[j]);
            if (has_up_[j]) limit(zu_[j], d.dzu[j]);
        }
    }
    return alpha;
}

SolverReport InteriorPoint::run(const std::vector<double>& start)
{
    const auto t0 = std::chrono::steady_clock::now();
    SolverReport report;

    // Interior starting point.
    x_.assign(n_, 0.0);
    if (start.size() == n_) x_ = start;
    const double push = 1e-2;
    for (std::size_t j = 0; j < n_; ++j) {
        const double lo = prog_.lower[j], up = prog_.upper[j];
        if (!std::isfinite(x_[j])) x_[j] = 0.0;
        if (has_lo_[j] && has_up_[j]) {
            const double margin = std::min(push * std::max(1.0, up - lo), 0.5 * (up - lo));
            x_[j] = std::clamp(x_[j], lo + margin, up - margin);
        } else if (has_lo_[j]) {
            x_[j] = std::max(x_[j], lo + push);
        } else if (has_up_[j]) {
            x_[j] = std::min(x_[j], up - push);
        }
    }
    if (!evaluate(x_)) {
        report.status = SolverStatus::numerical_failure;
        report.primal = x_;
        return report;
    }
    const double mu0 = 1.0;
    s_.resize(m_);
    y_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
        s_[i] = std::max(rows_[i].value, 1e-2);
        y_[i] = mu0 / s_[i];
    }
    zl_.assign(n_, 0.0);
    zu_.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
        if (has_lo_[j]) zl_[j] = mu0 / (x_[j] - prog_.lower[j]);
        if (has_up_[j]) zu_[j] = mu0 / (prog_.upper[j] - x_[j]);
    }

    const double obj_scale = 1.0 + std::accumulate(prog_.objective.begin(), prog_.objective.end(), 0.0,
                                                   [](double a, double c) { return std::max(a, std::abs(c)); });
    report.status = SolverStatus::max_iterations;
    struct Snapshot
    {
        std::vector<double> x, s, y, zl, zu;
    };
    std::optional<Snapshot> saved;
    double best_progress = infinity;
    int stalled = 0;
    int iter = 0;
    for (; iter < settings_.max_iterations; ++iter) {
        residuals();
        double pinf = 0.0, dinf = 0.0, dual_scale = obj_scale;
        for (double v : rp_) pinf = std::max(pinf, std::abs(v));
        for (double v : rd_) dinf = std::max(dinf, std::abs(v));
        for (double v : y_) dual_scale = std::max(dual_scale, std::abs(v));
        const double comp = complementarity();
        report.kkt_residual = dinf / dual_scale;
        report.duality_gap = comp;
        const bool dual_ok = dinf <= settings_.kkt_tol * dual_scale;
        if (dual_ok && comp <= settings_.gap_tol && (pinf <= settings_.feas_tol || meets_contract())) {
            report.status = SolverStatus::optimal;
            break;
        }
        // Near the optimum the KKT system can be too ill-conditioned to
        // make progress; a stalled iterate is still optimal if it meets the
        // tolerances on the original (slack-free) conditions.
        const bool acceptable = dual_ok && meets_contract();
        if (acceptable) saved = Snapshot{x_, s_, y_, zl_, zu_};
        // Slack residuals of strictly satisfied rows do not count as lack of progress.
        const double true_viol = true_violation();
        const double progress = true_viol + dinf / dual_scale + comp;
        if (progress < best_progress * (1.0 - 1e-6)) {
            best_progress = progress;
            stalled = 0;
        } else if (++stalled >= 10) {
            report.status = acceptable ? SolverStatus::optimal : SolverStatus::numerical_failure;
            break;
        }
        double ynorm = 0.0;
        for (double v : y_) ynorm = std::max(ynorm, v);
        if (ynorm > 1e14) {
            report.status = SolverStatus::infeasible;
            break;
        }
        const double mu = comp / static_cast<double>(std::max<std::size_t>(num_comp_, 1));

        bool factored = false;
        for (int attempt = 0; attempt < 8 && !factored; ++attempt) {
            assemble();
            factored = factorize();
            if (!factored) {
                reg_primal_ *= 100.0;
                reg_dual_ *= 100.0;
            }
        }
        if (!factored) {
            report.status = acceptable ? SolverStatus::optimal : SolverStatus::numerical_failure;
            break;
        }
        reg_primal_ = std::max(min_reg, reg_primal_ * 0.1);
        reg_dual_ = std::max(min_reg, reg_dual_ * 0.1);

        // Predictor.
        std::vector<double> rc_s(m_), rc_l(n_, 0.0), rc_u(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) rc_s[i] = -s_[i] * y_[i];
        for (std::size_t j = 0; j < n_; ++j) {
            if (has_lo_[j]) rc_l[j] = -(x_[j] - prog_.lower[j]) * zl_[j];
            if (has_up_[j]) rc_u[j] = -(prog_.upper[j] - x_[j]) * zu_[j];
        }
        const Direction aff = solve_direction(rc_s, rc_l, rc_u);
        const double ap = max_step(aff, true), ad = max_step(aff, false);
        double comp_aff = 0.0;
        for (std::size_t i = 0; i < m_; ++i) comp_aff += (s_[i] + ap * aff.ds[i]) * (y_[i] + ad * aff.dy[i]);
        for (std::size_t j = 0; j < n_; ++j) {
            if (has_lo_[j]) comp_aff += (x_[j] - prog_.lower[j] + ap * aff.dx[j]) * (zl_[j] + ad * aff.dzl[j]);
            if (has_up_[j]) comp_aff += (prog_.upper[j] - x_[j] - ap * aff.dx[j]) * (zu_[j] + ad * aff.dzu[j]);
        }
        const double mu_aff = comp_aff / static_cast<double>(std::max<std::size_t>(num_comp_, 1));
        const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);
        const double target = sigma * mu;

        // Corrector.
        for (std::size_t i = 0; i < m_; ++i) rc_s[i] = target - s_[i] * y_[i] - aff.ds[i] * aff.dy[i];
        for (std::size_t j = 0; j < n_; ++j) {
            if (has_lo_[j]) rc_l[j] = target - (x_[j] - prog_.lower[j]) * zl_[j] - aff.dx[j] * aff.dzl[j];
            if (has_up_[j]) rc_u[j] = target - (prog_.upper[j] - x_[j]) * zu_[j] + aff.dx[j] * aff.dzu[j];
        }
        Direction dir = solve_direction(rc_s, rc_l, rc_u);

        const double merit0 = merit(target);
        // Nonmonotone: the log rows' curvature makes a strict decrease test cut
        // good steps to a few percent; the stall counter bounds any cycling.
        const double merit_growth = 10.0;
        const auto x0 = x_, s0 = s_, y0 = y_, zl0 = zl_, zu0 = zu_;
        const auto rd0 = rd_, rp0 = rp_;
        const double viol0 = true_viol;
        auto apply = [&](const Direction& d, double ap, double ad) {
            for (std::size_t j = 0; j < n_; ++j) {
                x_[j] = x0[j] + ap * d.dx[j];
                zl_[j] = zl0[j] + ad * d.dzl[j];
                zu_[j] = zu0[j] + ad * d.dzu[j];
            }
            for (std::size_t i = 0; i < m_; ++i) {
                s_[i] = std::max(s0[i] + ap * d.ds[i], 0.01 * s0[i]);
                y_[i] = y0[i] + ad * d.dy[i];
            }
            if (!evaluate(x_)) return false;
            residuals();
            return true;
        };
        auto try_direction = [&](const Direction& d) {
            const double eta = std::clamp(1.0 - mu, 0.99, 1.0 - 1e-8);
            double alpha_p = eta * max_step(d, true), alpha_d = eta * max_step(d, false);
            for (int bt = 0; bt < 40; ++bt, alpha_p *= 0.5, alpha_d *= 0.5) {
                if (!apply(d, alpha_p, alpha_d)) continue;
                const double viol1 = true_violation();
                if (bt == 0 && viol1 > std::max(viol0, settings_.feas_tol)) {
                    // Second-order correction: re-solve with the constraint
                    // values seen at the trial point.
                    std::vector<double> rp_soc(m_);
                    for (std::size_t i = 0; i < m_; ++i) rp_soc[i] = alpha_p * rp0[i] + rp_[i];
                    x_ = x0, s_ = s0, y_ = y0, zl_ = zl0, zu_ = zu0;
                    evaluate(x_);
                    rd_ = rd0, rp_ = rp_soc;
                    const Direction soc = solve_direction(rc_s, rc_l, rc_u);
                    rp_ = rp0;
                    const double sp = eta * max_step(soc, true), sd = eta * max_step(soc, false);
                    if (apply(soc, sp, sd) && true_violation() < viol1 &&
                        merit(target) <= merit_growth * merit0) {
                        return true;
                    }
                    if (!apply(d, alpha_p, alpha_d)) continue;
                }
                if (merit(target) <= merit_growth * merit0) {
                    return true;
                }
            }
            return false;
        };
        bool accepted = try_direction(dir);
        if (!accepted) {
            // Plain centred Newton direction; a descent direction for the merit.
            x_ = x0, s_ = s0, y_ = y0, zl_ = zl0, zu_ = zu0;
            evaluate(x_);
            rd_ = rd0, rp_ = rp0;
            for (std::size_t i = 0; i < m_; ++i) rc_s[i] = target - s_[i] * y_[i];
            for (std::size_t j = 0; j < n_; ++j) {
                if (has_lo_[j]) rc_l[j] = target - (x_[j] - prog_.lower[j]) * zl_[j];
                if (has_up_[j]) rc_u[j] = target - (prog_.upper[j] - x_[j]) * zu_[j];
            }
            dir = solve_direction(rc_s, rc_l, rc_u);
            accepted = try_direction(dir);
        }
        if (!accepted) {
            x_ = x0, s_ = s0, y_ = y0, zl_ = zl0, zu_ = zu0;
            evaluate(x_);
            report.status = acceptable ? SolverStatus::optimal : SolverStatus::numerical_failure;
            break;
        }
    }

    if (report.status == SolverStatus::numerical_failure && !saved) {
        // Diverging multipliers with a persistent violation: a dual ray.
        const double viol = true_violation();
        double ynorm = 0.0;
        for (double v : y_) ynorm = std::max(ynorm, v);
        if (viol > 1e3 * settings_.feas_tol && ynorm > 1e6 * obj_scale) report.status = SolverStatus::infeasible;
    }
    if (report.status != SolverStatus::optimal && report.status != SolverStatus::infeasible && saved) {
        x_ = saved->x, s_ = saved->s, y_ = saved->y, zl_ = saved->zl, zu_ = saved->zu;
        report.status = SolverStatus::optimal;
    }
    evaluate(x_);
    residuals();
    double dinf = 0.0, dual_scale = obj_scale;
    for (double v : rd_) dinf = std::max(dinf, std::abs(v));
    for (double v : y_) dual_scale = std::max(dual_scale, std::abs(v));
    report.kkt_residual = dinf / dual_scale;
    if (report.status == SolverStatus::max_iterations && dinf <= settings_.kkt_tol * dual_scale && meets_contract()) {
        report.status = SolverStatus::optimal;
    }
    report.iterations = iter;
    report.primal = x_;
    report.duals = y_;
    report.objective = prog_.objective_value(x_);
    report.max_violation = prog_.max_violation(x_);
    report.duality_gap = complementarity();
    double cs = 0.0;
    for (std::size_t i = 0; i < m_; ++i) cs = std::max(cs, std::abs(y_[i] * rows_[i].value));
    for (std::size_t j = 0; j < n_; ++j) {
        if (has_lo_[j]) cs = std::max(cs, std::abs(zl_[j] * (x_[j] - prog_.lower[j])));
        if (has_up_[j]) cs = std::max(cs, std::abs(zu_[j] * (prog_.upper[j] - x_[j])));
    }
    report.complementarity_residual = cs;
    if (report.status == SolverStatus::optimal && report.max_violation > settings_.feas_tol) {
        report.status = SolverStatus::numerical_failure;
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace

SolverReport solve_convex(const ConvexProgram& prog, const std::vector<double>& start, const SolverSettings& settings)
{
    prog.validate();
    InteriorPoint ipm(prog, settings);
    return ipm.run(start);
}

} // namespace npn
