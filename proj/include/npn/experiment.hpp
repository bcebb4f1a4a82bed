#pragma once
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <npn/channel.hpp>
#include <npn/io.hpp>
#include <npn/orchestrator.hpp>

namespace npn {

enum class SweepVariable
{
    gamma_min,
    p_max,
};

const char* to_string(SweepVariable v);
/// Accepts "gamma-min"/"gamma_min" and "p-max"/"p_max".
SweepVariable parse_sweep_variable(const std::string& name);

/*
 * One Monte Carlo sweep. p_max values are in dBm and replace every UL
 * budget; gamma_min values are in bits/s/Hz.
 */
struct SweepSpec
{
    SweepVariable sweep_variable = SweepVariable::gamma_min;
    std::vector<double> sweep_values;
    std::size_t num_trials = 1;
    NetworkConfig base_config;
    RngSeed master_seed;
    std::vector<SchemeKind> schemes{all_schemes.begin(), all_schemes.end()};
    std::size_t workers = 1;
    PipelineSettings settings;

    /// Throws std::invalid_argument on empty or non-increasing values, zero trials or no schemes.
    void validate() const;
    NetworkConfig config_at(double sweep_value) const;
};

struct TrialRecord
{
    std::size_t trial = 0;
    std::size_t value_index = 0;
    SchemeKind scheme = SchemeKind::adaptive;
    bool feasible = false;
    double achieved = 0.0;
    double relaxed_bound = 0.0;
    bool degraded = false;
    std::string status;
    std::uint64_t channel_hash = 0;
    double wall_seconds = 0.0;
};

struct SweepPoint
{
    SchemeKind scheme = SchemeKind::adaptive;
    double sweep_value = 0.0;
    /// NaN when no trial is feasible.
    double mean_common_throughput = 0.0;
    double std_error = 0.0;
    std::size_t n_feasible = 0;
    std::size_t n_trials = 0;
    std::size_t n_degraded = 0;
    double mean_wall_seconds = 0.0;
};

struct SweepResult
{
    SweepVariable sweep_variable = SweepVariable::gamma_min;
    std::vector<SweepPoint> points;
    /// Ordered by (trial, value, scheme).
    std::vector<TrialRecord> trials;

    const SweepPoint& point(SchemeKind scheme, double sweep_value) const;
};

/*
 * Trial t draws its instance from derive_seed(master_seed, t) with the
 * base configuration; every scheme and sweep value reuses it. Trials are
 * spread over `workers` threads and written back by index. A pipeline
 * that throws is recorded as an infeasible, degraded trial whose status
 * starts with "exception:". `trace`, when set, receives one JSON line per
 * record.
 */
SweepResult run_sweep(const SweepSpec& spec, std::ostream* trace = nullptr);

/// Mean and standard error (sample deviation / sqrt(n)) over the feasible records of each point.
std::vector<SweepPoint> summarize(SweepVariable variable, const std::vector<double>& values,
                                  const std::vector<SchemeKind>& schemes, const std::vector<TrialRecord>& trials);

enum class OutputFormat
{
    csv,
    json,
};

OutputFormat parse_output_format(const std::string& name);

std::string format_decimal(double v);
std::string format_csv(const SweepResult& result);
Json format_json(const SweepResult& result);
void emit_results(const SweepResult& result, OutputFormat format, const std::string& path);

} // namespace npn
