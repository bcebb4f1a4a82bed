#pragma once
#include <string>

#include <json.hpp>

#include <npn/convex.hpp>
#include <npn/model.hpp>
#include <npn/orchestrator.hpp>
#include <npn/subproblems.hpp>

namespace npn {

using Json = nlohmann::ordered_json;

Json to_json(const Grid2& g);
Json to_json(const NetworkConfig& cfg);
/// Applies the keys present in `j` on top of `base`; unknown keys are an error.
NetworkConfig config_from_json(const Json& j, NetworkConfig base);

Json to_json(const ChannelRealization& ch);
/// Throws std::invalid_argument on shape mismatch with the embedded dimensions.
ChannelRealization channel_from_json(const Json& j);

Json to_json(const RelaxedSolution& sol);
Json to_json(const IntegralSolution& sol);
Json to_json(const FeasibilityResult& f);
Json to_json(const PipelineResult& r);

/*
 * A ConvexProgram as plain data: bounds (null for infinite), objective,
 * and every row with its linear part and log terms as [index, coeff]
 * pairs. Used to hand a subproblem to an external solver.
 */
Json to_json(const ConvexProgram& prog);

std::string read_text_file(const std::string& path);
/// Truncates and rewrites `path`; throws with the path on failure.
void write_text_file(const std::string& path, const std::string& text);

} // namespace npn
