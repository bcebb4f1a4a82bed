#include <npn/experiment.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace npn {

const char* to_string(SweepVariable v)
{
    return v == SweepVariable::gamma_min ? "gamma_min" : "p_max";
}

SweepVariable parse_sweep_variable(const std::string& name)
{
    if (name == "gamma-min" || name == "gamma_min") return SweepVariable::gamma_min;
    if (name == "p-max" || name == "p_max") return SweepVariable::p_max;
    throw std::invalid_argument("unknown sweep variable '" + name + "' (expected gamma-min or p-max)");
}

OutputFormat parse_output_format(const std::string& name)
{
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw std::invalid_argument("unknown format '" + name + "' (expected csv or json)");
}

void SweepSpec::validate() const
{
    if (sweep_values.empty()) throw std::invalid_argument("SweepSpec: sweep_values is empty");
    for (std::size_t i = 1; i < sweep_values.size(); ++i) {
        if (!(sweep_values[i] > sweep_values[i - 1]))
            throw std::invalid_argument("SweepSpec: sweep_values must be strictly increasing");
    }
    if (num_trials < 1) throw std::invalid_argument("SweepSpec: num_trials must be >= 1");
    if (schemes.empty()) throw std::invalid_argument("SweepSpec: no schemes selected");
    if (workers < 1) throw std::invalid_argument("SweepSpec: workers must be >= 1");
    base_config.validate();
}

NetworkConfig SweepSpec::config_at(double sweep_value) const
{
    NetworkConfig cfg = base_config;
    if (sweep_variable == SweepVariable::gamma_min) cfg.gamma_min = sweep_value;
    else cfg.set_uniform_ul_budget(dbm_to_mw(sweep_value));
    cfg.validate();
    return cfg;
}

const SweepPoint& SweepResult::point(SchemeKind scheme, double sweep_value) const
{
    for (const auto& p : points) {
        if (p.scheme == scheme && p.sweep_value == sweep_value) return p;
    }
    throw std::out_of_range("SweepResult: no such point");
}

namespace {

TrialRecord make_record(std::size_t trial, std::size_t vi, const PipelineResult& r)
{
    TrialRecord rec;
    rec.trial = trial;
    rec.value_index = vi;
    rec.scheme = r.scheme;
    rec.feasible = r.feasible;
    rec.achieved = r.achieved();
    rec.relaxed_bound = r.relaxed_bound;
    rec.degraded = r.diagnostics.degraded;
    rec.status = r.diagnostics.status;
    rec.channel_hash = r.diagnostics.channel_hash;
    rec.wall_seconds = r.diagnostics.wall_seconds;
    return rec;
}

std::vector<PipelineResult> run_point(const SweepSpec& spec, const ChannelRealization& ch, const NetworkConfig& cfg,
                                      std::uint64_t seed)
{
    std::vector<PipelineResult> out;
    const bool want_adaptive = std::find(spec.schemes.begin(), spec.schemes.end(), SchemeKind::adaptive) != spec.schemes.end();
    if (want_adaptive) {
        auto all = solve_all_schemes(ch, cfg, spec.settings, seed);
        for (auto s : spec.schemes) out.push_back(all[static_cast<std::size_t>(s)]);
        return out;
    }
    for (auto s : spec.schemes) out.push_back(solve_pipeline(s, ch, cfg, spec.settings, seed));
    return out;
}

} // namespace

std::vector<SweepPoint> summarize(SweepVariable, const std::vector<double>& values,
                                  const std::vector<SchemeKind>& schemes, const std::vector<TrialRecord>& trials)
{
    std::vector<SweepPoint> points;
    for (auto scheme : schemes) {
        for (std::size_t vi = 0; vi < values.size(); ++vi) {
            SweepPoint p;
            p.scheme = scheme;
            p.sweep_value = values[vi];
            double sum = 0.0, wall = 0.0;
            for (const auto& r : trials) {
                if (r.scheme != scheme || r.value_index != vi) continue;
                ++p.n_trials;
                wall += r.wall_seconds;
                if (r.degraded) ++p.n_degraded;
                if (!r.feasible) continue;
                ++p.n_feasible;
                sum += r.achieved;
            }
            const double n = static_cast<double>(p.n_feasible);
            p.mean_common_throughput = p.n_feasible ? sum / n : std::nan("");
            if (p.n_feasible > 1) {
                double ss = 0.0;
                for (const auto& r : trials) {
                    if (r.scheme == scheme && r.value_index == vi && r.feasible)
                        ss += (r.achieved - p.mean_common_throughput) * (r.achieved - p.mean_common_throughput);
                }
                p.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
            }
            p.mean_wall_seconds = p.n_trials ? wall / static_cast<double>(p.n_trials) : 0.0;
            points.push_back(p);
        }
    }
    return points;
}

SweepResult run_sweep(const SweepSpec& spec, std::ostream* trace)
{
    spec.validate();
    const std::size_t T = spec.num_trials, V = spec.sweep_values.size(), S = spec.schemes.size();
    std::vector<NetworkConfig> configs;
    for (double v : spec.sweep_values) configs.push_back(spec.config_at(v));

    std::vector<std::vector<TrialRecord>> per_trial(T);
    std::atomic<std::size_t> next_trial{0};
    std::mutex trace_mutex;
    std::exception_ptr hard_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (std::size_t t = next_trial++; t < T; t = next_trial++) {
            try {
                const RngSeed seed = derive_seed(spec.master_seed, t);
                const auto ch = draw_instance(spec.base_config, seed);
                const auto hash = channel_hash(ch);
                auto& recs = per_trial[t];
                for (std::size_t vi = 0; vi < V; ++vi) {
                    std::vector<PipelineResult> results;
                    try {
                        results = run_point(spec, ch, configs[vi], seed.value);
                    } catch (const std::exception& e) {
                        for (auto s : spec.schemes) {
                            TrialRecord rec;
                            rec.trial = t;
                            rec.value_index = vi;
                            rec.scheme = s;
                            rec.degraded = true;
                            rec.status = std::string("exception: ") + e.what();
                            rec.channel_hash = hash;
                            recs.push_back(rec);
                        }
                        continue;
                    }
                    for (const auto& r : results) {
                        if (r.diagnostics.channel_hash != hash)
                            throw std::logic_error("paired-seed discipline broken: channel hash mismatch");
                        recs.push_back(make_record(t, vi, r));
                        if (trace) {
                            Json line;
                            line["trial"] = t;
                            line["sweep_value"] = spec.sweep_values[vi];
                            line["scheme"] = to_string(r.scheme);
                            line["feasible"] = r.feasible;
                            line["achieved"] = r.achieved();
                            line["relaxed_bound"] = r.relaxed_bound;
                            line["status"] = r.diagnostics.status;
                            line["degraded"] = r.diagnostics.degraded;
                            line["l_star"] = r.diagnostics.feasibility.l_star;
                            line["relaxed_trace"] = r.diagnostics.relaxed_trace;
                            line["sca_iterations"] = r.diagnostics.sca_iterations;
                            line["alternating_rounds"] = r.diagnostics.alternating_rounds;
                            std::lock_guard lock(trace_mutex);
                            *trace << line.dump() << '\n';
                        }
                    }
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!hard_error) hard_error = std::current_exception();
            }
        }
    };

    const std::size_t n_workers = std::min(spec.workers, T);
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (hard_error) std::rethrow_exception(hard_error);

    SweepResult out;
    out.sweep_variable = spec.sweep_variable;
    out.trials.reserve(T * V * S);
    for (auto& recs : per_trial) {
        for (auto& r : recs) out.trials.push_back(std::move(r));
    }
    out.points = summarize(spec.sweep_variable, spec.sweep_values, spec.schemes, out.trials);
    return out;
}

std::string format_decimal(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string format_csv(const SweepResult& result)
{
    std::string out = "scheme,sweep_value,mean_common_throughput,stderr,n_feasible,n_trials\n";
    for (const auto& p : result.points) {
        out += to_string(p.scheme);
        out += ',' + format_decimal(p.sweep_value);
        out += ',' + format_decimal(p.mean_common_throughput);
        out += ',' + format_decimal(p.std_error);
        out += ',' + std::to_string(p.n_feasible);
        out += ',' + std::to_string(p.n_trials);
        out += '\n';
    }
    return out;
}

namespace {

/// Numbers go through format_decimal so the JSON shares the CSV's fixed precision.
Json decimal(double v)
{
    if (!std::isfinite(v)) return nullptr;
    return Json::parse(format_decimal(v));
}

} // namespace

Json format_json(const SweepResult& result)
{
    Json j;
    j["sweep_variable"] = to_string(result.sweep_variable);
    Json points = Json::array();
    for (const auto& p : result.points) {
        Json q;
        q["scheme"] = to_string(p.scheme);
        q["sweep_value"] = decimal(p.sweep_value);
        q["mean_common_throughput"] = decimal(p.mean_common_throughput);
        q["stderr"] = decimal(p.std_error);
        q["n_feasible"] = p.n_feasible;
        q["n_trials"] = p.n_trials;
        q["n_degraded"] = p.n_degraded;
        q["mean_wall_seconds"] = decimal(p.mean_wall_seconds);
        points.push_back(std::move(q));
    }
    j["points"] = std::move(points);
    Json trials = Json::array();
    for (const auto& r : result.trials) {
        Json t;
        t["trial"] = r.trial;
        t["value_index"] = r.value_index;
        t["scheme"] = to_string(r.scheme);
        t["feasible"] = r.feasible;
        t["achieved_common_throughput"] = r.achieved;
        t["relaxed_bound"] = r.relaxed_bound;
        t["degraded"] = r.degraded;
        t["status"] = r.status;
        t["channel_hash"] = r.channel_hash;
        t["wall_seconds"] = decimal(r.wall_seconds);
        trials.push_back(std::move(t));
    }
    j["trials"] = std::move(trials);
    return j;
}

void emit_results(const SweepResult& result, OutputFormat format, const std::string& path)
{
    const std::string text = format == OutputFormat::csv ? format_csv(result) : format_json(result).dump(2) + "\n";
    write_text_file(path, text);
}

} // namespace npn
