#pragma once
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace npn {

// =======================================================================
// Containers
// =======================================================================

/*
 * Row-major dense 2-D array. Used for per-(user, subcarrier) quantities.
 */
class Grid2
{
public:
    Grid2() = default;
    Grid2(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Grid2&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/*
 * Row-major dense 3-D array, indexed (i, j, k).
 */
class Grid3
{
public:
    Grid3() = default;
    Grid3(std::size_t d0, std::size_t d1, std::size_t d2, double fill = 0.0)
        : d0_(d0), d1_(d1), d2_(d2), data_(d0 * d1 * d2, fill) {}

    double& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[(i * d1_ + j) * d2_ + k]; }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const { return data_[(i * d1_ + j) * d2_ + k]; }

    std::size_t dim0() const { return d0_; }
    std::size_t dim1() const { return d1_; }
    std::size_t dim2() const { return d2_; }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Grid3&) const = default;

private:
    std::size_t d0_ = 0;
    std::size_t d1_ = 0;
    std::size_t d2_ = 0;
    std::vector<double> data_;
};

// =======================================================================
// Domain types
// =======================================================================

/// Thrown when a solution or channel does not match the configuration it is used with.
class contract_error : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);
double db_to_linear(double db);

/*
 * Network geometry, user counts and power budgets. Powers are linear
 * milliwatts, rates are bits/s/Hz per unit-bandwidth subcarrier.
 */
struct NetworkConfig
{
    std::size_t num_ul_users = 1;
    std::size_t num_dl_users = 1;
    std::size_t num_subcarriers = 1;
    double p_dl_budget = 1.0;
    std::vector<double> p_ul_budgets{1.0};
    double noise_power = 1.0;
    double gamma_min = 0.0;
    double pathloss_ref_gain = 1e-6;
    double pathloss_ref_dist = 10.0;
    double pathloss_exponent = 3.0;
    double cell_radius = 100.0;
    double bs_separation = 100.0;

    /// Throws std::invalid_argument on a violated invariant.
    void validate() const;

    /// M^UL = M^DL = 20, N = 100, 40 dBm DL, 30 dBm UL, -50 dBm noise.
    static NetworkConfig paper_default();
    /// Same radio parameters at N = 32, M^UL = M^DL = 8.
    static NetworkConfig desk_default();
    /// Paper radio parameters with arbitrary dimensions.
    static NetworkConfig with_dimensions(std::size_t ul_users, std::size_t dl_users, std::size_t subcarriers);

    void set_uniform_ul_budget(double mw);
};

/*
 * Channel power gains of one realization:
 *   f(k, n)    UL user k -> non-public BS
 *   phi[n]     public BS -> non-public BS
 *   h(l, n)    public BS -> public user l
 *   g(k, l, n) UL user k -> public user l
 */
struct ChannelRealization
{
    Grid2 f;
    std::vector<double> phi;
    Grid2 h;
    Grid3 g;

    static ChannelRealization uniform(const NetworkConfig& cfg, double gain);
    /// Gains must be finite and positive; phi may also be 0 (no cross-BS link).
    void validate(const NetworkConfig& cfg) const;
    bool operator==(const ChannelRealization&) const = default;
};

/// 64-bit FNV-1a over the IEEE bit patterns of every gain.
std::uint64_t channel_hash(const ChannelRealization& ch);

/*
 * Continuous solution of the relaxed problem. e_ul / e_dl are the
 * products allocation x power, so no division appears in any rate.
 */
struct RelaxedSolution
{
    Grid2 a_ul;
    Grid2 a_dl;
    std::vector<double> tau;
    Grid2 e_ul;
    Grid2 e_dl;
    Grid2 r_dl;
    double r_common = 0.0;

    static RelaxedSolution zeros(const NetworkConfig& cfg);
    void check_dimensions(const NetworkConfig& cfg) const;
};

struct IntegralSolution
{
    Grid2 a_ul;
    Grid2 a_dl;
    std::vector<double> tau;
    Grid2 e_ul;
    Grid2 e_dl;
    Grid2 r_dl;
    double r_common = 0.0;
    double achieved_common_throughput = 0.0;
    std::vector<double> per_ul_user_throughput;
    std::vector<double> per_dl_user_throughput;

    static IntegralSolution zeros(const NetworkConfig& cfg);
    void check_dimensions(const NetworkConfig& cfg) const;
    /// Recompute the throughput fields from powers, modes and rates.
    void refresh_throughput(const ChannelRealization& ch, const NetworkConfig& cfg);
};

// =======================================================================
// Rate functions
// =======================================================================

// All rates are log2 expressions evaluated through log1p. Non-finite or
// negative arguments, or a non-positive noise power, raise std::domain_error.

double rate_ul_sic(double e_ul, double f, double sigma2);
double rate_ul_tin(double e_ul, double f, double dl_interference, double sigma2);
double rate_bs(double sum_e_dl_phi, double sum_e_ul_f, double sigma2);
double rate_dl(double e_dl, double h, double ul_interference, double sigma2);

/// Sum_l e_dl(l, n) * phi[n]
double dl_interference_at_bs(const Grid2& e_dl, const ChannelRealization& ch, std::size_t n);
/// Sum_k e_ul(k, n) * f(k, n)
double ul_signal_at_bs(const Grid2& e_ul, const ChannelRealization& ch, std::size_t n);
/// Sum_k e_ul(k, n) * g(k, l, n)
double ul_interference_at_user(const Grid2& e_ul, const ChannelRealization& ch, std::size_t l, std::size_t n);

/// Per-UL-user throughput Sum_n (1 - tau_n) R^TIN + tau_n R^SIC.
std::vector<double> ul_user_throughputs(const Grid2& e_ul, const Grid2& e_dl, const std::vector<double>& tau,
                                        const ChannelRealization& ch, const NetworkConfig& cfg);

double common_uplink_throughput(const RelaxedSolution& sol, const ChannelRealization& ch, const NetworkConfig& cfg);
double common_uplink_throughput(const IntegralSolution& sol, const ChannelRealization& ch, const NetworkConfig& cfg);

// =======================================================================
// Independent feasibility checker for the mixed-integer problem
// =======================================================================

struct ConstraintCheck
{
    std::string name;
    bool passed = true;
    double worst_violation = 0.0;
    std::string location;
};

struct FeasibilityReport
{
    std::vector<ConstraintCheck> checks;

    bool feasible() const;
    const ConstraintCheck& find(const std::string& name) const;
    std::string summary() const;
};

/*
 * Checks binary allocation/mode entries, one user per subcarrier in each
 * cell, zero power on unallocated entries, both power budgets, the SIC
 * decodability bound, the DL rate bound, the public-user QoS threshold
 * and consistency of the reported throughput. Each constraint passes
 * iff its worst violation is at most tol.
 */
FeasibilityReport check_p1_feasible(const IntegralSolution& sol, const ChannelRealization& ch,
                                    const NetworkConfig& cfg, double tol);

} // namespace npn
