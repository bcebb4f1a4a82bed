#pragma once
#include <cstddef>
#include <vector>

#include <npn/convex.hpp>
#include <npn/lp.hpp>
#include <npn/model.hpp>
#include <npn/taylor.hpp>

namespace npn {

/*
 * Fixed subcarrier assignment used after rounding: entries equal to 0
 * remove the corresponding power and rate variables, entries equal to 1
 * keep them with the allocation variable pinned to 1.
 */
struct AllocationMask
{
    Grid2 ul;
    Grid2 dl;

    static AllocationMask from_solution(const IntegralSolution& sol);
    bool ul_on(std::size_t k, std::size_t n) const { return ul(k, n) > 0.5; }
    bool dl_on(std::size_t l, std::size_t n) const { return dl(l, n) > 0.5; }
};

/*
 * Position of each solution entry in the flat decision vector; -1 when
 * the entry is not a variable of the program (masked out, or pinned).
 * Powers are normalized by their budgets: x = e_ul / P_k, y = e_dl / P^DL.
 */
struct SubproblemLayout
{
    std::size_t num_ul = 0;
    std::size_t num_dl = 0;
    std::size_t num_subcarriers = 0;
    std::vector<int> e_ul;
    std::vector<int> e_dl;
    std::vector<int> a_dl;
    std::vector<int> r_dl;
    int r_common = -1;

    int ul_index(std::size_t k, std::size_t n) const { return e_ul[k * num_subcarriers + n]; }
    int dl_index(std::size_t l, std::size_t n) const { return e_dl[l * num_subcarriers + n]; }
    int a_index(std::size_t l, std::size_t n) const { return a_dl[l * num_subcarriers + n]; }
    int r_index(std::size_t l, std::size_t n) const { return r_dl[l * num_subcarriers + n]; }
};

struct Subproblem
{
    ConvexProgram program;
    SubproblemLayout layout;
    std::vector<double> tau;
    bool masked = false;
    AllocationMask mask;
    std::vector<double> fixed_e_ul;
};

struct SubproblemResult
{
    SolverReport report;
    RelaxedSolution solution;
};

/*
 * Convexified resource-allocation program for fixed decoding modes: the
 * concave interference terms are replaced by their tangent planes at
 * `local`. Besides the budgets, rate and QoS rows it carries
 *   sum_k e_ul(k,n) / P_k <= 1                       (e_ul <= a_ul * P_k)
 *   r(l,n) <= a_dl(l,n) log2(1 + P^DL h(l,n) / s2),  e_dl(l,n) <= a_dl(l,n) P^DL
 * which every binary allocation satisfies. Decision variables are
 * normalized by the power budgets and log arguments by the noise power.
 */
Subproblem build_p22(const RelaxedSolution& local, const std::vector<double>& tau, const ChannelRealization& ch,
                     const NetworkConfig& cfg, const AllocationMask* mask = nullptr);

std::vector<double> encode_point(const Subproblem& sp, const RelaxedSolution& sol, const NetworkConfig& cfg);
RelaxedSolution decode_point(const Subproblem& sp, const std::vector<double>& x, const NetworkConfig& cfg);

SubproblemResult solve_p22(const RelaxedSolution& local, const std::vector<double>& tau, const ChannelRealization& ch,
                           const NetworkConfig& cfg, const AllocationMask* mask = nullptr,
                           const SolverSettings& settings = {});

/*
 * Largest residual of the relaxed resource-allocation constraints at
 * `sol` for modes `tau`, using the exact (non-linearized) rates. The
 * allocation rows above are not included.
 */
double p21_violation(const RelaxedSolution& sol, const std::vector<double>& tau, const ChannelRealization& ch,
                     const NetworkConfig& cfg);

/*
 * Decoding-mode LP with resources fixed. Primal layout: tau[0..N-1], R.
 */
struct ModeProgram
{
    LinearProgram lp;
    std::vector<double> tin;
    std::vector<double> sic;
    std::vector<double> bs_rate;
    std::vector<double> dl_load;
};

ModeProgram build_p23(const RelaxedSolution& resources, const ChannelRealization& ch, const NetworkConfig& cfg);
/// Mode LP from precomputed constants; tin and sic are indexed k * N + n.
ModeProgram make_mode_program(std::vector<double> tin, std::vector<double> sic, std::vector<double> bs_rate,
                              std::vector<double> dl_load, std::size_t num_ul);
SolverReport solve_p23(const RelaxedSolution& resources, const ChannelRealization& ch, const NetworkConfig& cfg);

/*
 * DL-only program with e_ul and tau held fixed, which makes every rate
 * row concave without linearization.
 */
enum class DlObjective
{
    max_min_rate,
    min_power,
    /// maximize sum_l min(sum_n r(l,n), Gamma_min); no QoS rows.
    capped_sum_rate,
};

Subproblem build_dl_program(const Grid2& e_ul, const std::vector<double>& tau, const ChannelRealization& ch,
                            const NetworkConfig& cfg, DlObjective objective, const AllocationMask* mask = nullptr);

/*
 * For max_min_rate the solution's r_common holds the common DL throughput;
 * for min_power it holds the common UL throughput of the returned point;
 * for capped_sum_rate it holds the capped sum.
 */
SubproblemResult solve_dl_program(const Grid2& e_ul, const std::vector<double>& tau, const ChannelRealization& ch,
                                  const NetworkConfig& cfg, DlObjective objective,
                                  const AllocationMask* mask = nullptr, const SolverSettings& settings = {});

} // namespace npn
