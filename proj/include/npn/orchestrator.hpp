#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <npn/channel.hpp>
#include <npn/model.hpp>
#include <npn/sca.hpp>
#include <npn/subproblems.hpp>

namespace npn {

enum class SchemeKind
{
    adaptive,
    fixed_sic,
    fixed_tin,
};

inline constexpr std::array<SchemeKind, 3> all_schemes{SchemeKind::adaptive, SchemeKind::fixed_sic,
                                                        SchemeKind::fixed_tin};

const char* to_string(SchemeKind scheme);
/// Accepts "adaptive", "fixed_sic"/"fixed-sic"/"sic", "fixed_tin"/"fixed-tin"/"tin".
SchemeKind parse_scheme(const std::string& name);

struct PipelineSettings
{
    ScaSettings sca;
    double alternating_rel_tol = 1e-5;
    int max_alternating_rounds = 20;
    double tau_threshold = 0.5;
    /// Fractional allocations at or below this count as zero when rounding.
    double allocation_zero_tol = 1e-6;
    double validation_tol = 1e-6;
    /// UL power start is tried at 1, 0.1, ... (this many times), then at zero.
    int phase_one_steps = 6;
};

struct FeasibilityResult
{
    bool feasible = false;
    /// Common DL throughput of the best integral assignment found with UL silent.
    double l_star = 0.0;
    /// Relaxed (fractional-allocation) value, an upper bound on l_star.
    double l_star_relaxed = 0.0;
    int repair_rounds = 0;
    bool degraded = false;
};

/*
 * Max-min common DL throughput with every UL power at zero and all
 * subcarriers in TIN mode. The relaxed optimum is rounded per subcarrier
 * and re-solved with the assignment fixed; subcarriers are moved to the
 * worst user while that helps, up to M^DL rounds. A solver failure
 * marks the result degraded and infeasible.
 */
FeasibilityResult check_feasibility(const ChannelRealization& ch, const NetworkConfig& cfg,
                                    const PipelineSettings& settings = {});

/*
 * Relaxed start for modes `tau`: uniform UL power, shrunk until the
 * minimum-power DL program meets the QoS rows. Empty if even a silent
 * uplink cannot meet them.
 */
std::optional<RelaxedSolution> phase_one(const std::vector<double>& tau, const ChannelRealization& ch,
                                         const NetworkConfig& cfg, const PipelineSettings& settings = {});

struct AlternatingResult
{
    RelaxedSolution solution;
    /// R of the start, then R after every SCA block and every mode LP.
    std::vector<double> objective_trace;
    int rounds = 0;
    int sca_iterations = 0;
    bool converged = false;
    bool degraded = false;
};

AlternatingResult solve_p2_alternating(const RelaxedSolution& init, const ChannelRealization& ch,
                                       const NetworkConfig& cfg, const PipelineSettings& settings = {});

struct RoundingResult
{
    bool feasible = false;
    IntegralSolution solution;
    int repair_rounds = 0;
    int sca_iterations = 0;
    bool degraded = false;
    std::string status;
};

/*
 * Argmax rounding of both allocations (ties to the lower index, columns
 * at zero left unassigned), tau_n = 1 iff tau_n >= tau_threshold unless
 * `fixed_tau` is given, followed by a masked SCA re-solve. UL users left
 * without a subcarrier take their best one from a user holding two or
 * more. QoS failures trigger the subcarrier repair loop.
 */
RoundingResult round_and_resolve(const RelaxedSolution& relaxed, const ChannelRealization& ch,
                                 const NetworkConfig& cfg, const PipelineSettings& settings = {},
                                 std::optional<double> fixed_tau = std::nullopt);

struct PipelineDiagnostics
{
    std::string status;
    std::uint64_t seed = 0;
    std::uint64_t channel_hash = 0;
    FeasibilityResult feasibility;
    std::vector<double> relaxed_trace;
    int sca_iterations = 0;
    int alternating_rounds = 0;
    bool alternating_converged = false;
    int repair_rounds = 0;
    /// Scheme whose integral solution was returned (adaptive may keep a fixed-mode one).
    std::string integral_source;
    double fixed_sic_relaxed = 0.0;
    double fixed_tin_relaxed = 0.0;
    bool degraded = false;
    double wall_seconds = 0.0;
};

struct PipelineResult
{
    SchemeKind scheme = SchemeKind::adaptive;
    bool feasible = false;
    std::optional<IntegralSolution> solution;
    double relaxed_bound = 0.0;
    std::optional<RelaxedSolution> relaxed;
    PipelineDiagnostics diagnostics;

    double achieved() const { return solution ? solution->achieved_common_throughput : 0.0; }
};

PipelineResult solve_pipeline(SchemeKind scheme, const ChannelRealization& ch, const NetworkConfig& cfg,
                              const PipelineSettings& settings = {}, std::uint64_t seed = 0);

/// All three schemes on one instance, sharing the feasibility check and the fixed-mode runs.
std::array<PipelineResult, 3> solve_all_schemes(const ChannelRealization& ch, const NetworkConfig& cfg,
                                                const PipelineSettings& settings = {}, std::uint64_t seed = 0);

} // namespace npn
