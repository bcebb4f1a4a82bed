#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include <npn/model.hpp>

namespace npn {

struct GridSpec
{
    /// Power levels per allocated entry, including 0 and the full budget.
    int levels_per_variable = 4;
    double max_enumeration = 1e7;
    /// Span of the non-zero levels below the budget, in decades.
    double decades = 2.0;
};

/// {0} followed by budget * 10^(-decades * j / (levels - 2)), j = levels-2 .. 0; {0, budget} for two levels.
std::vector<double> power_levels(double budget, const GridSpec& grid);

/// (1 + M^UL * levels)^N * (1 + M^DL * levels)^N * 2^N.
double enumeration_size(const NetworkConfig& cfg, const GridSpec& grid);

struct OracleResult
{
    bool feasible = false;
    double r_best = 0.0;
    std::optional<IntegralSolution> argmax;
    std::uint64_t evaluated = 0;
};

/*
 * Exhaustive search over both allocations (including "unassigned"),
 * decoding modes and gridded powers. A user's gridded powers are scaled
 * down together when they exceed its budget, and likewise the DL powers.
 * DL rates are set to their capacity, cut back on SIC subcarriers to the
 * BS decoding rate. Throws std::length_error when the search exceeds
 * grid.max_enumeration.
 */
OracleResult brute_force_common_throughput(const ChannelRealization& ch, const NetworkConfig& cfg,
                                           const GridSpec& grid = {});

} // namespace npn
