#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <npn/experiment.hpp>
#include <npn/io.hpp>

namespace {

struct Options
{
    std::string sweep = "gamma-min";
    std::vector<double> values;
    std::optional<std::size_t> trials;
    std::string preset = "desk";
    std::vector<std::string> schemes{"adaptive", "fixed_sic", "fixed_tin"};
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    std::size_t workers = 1;
    bool trace = false;
    std::optional<double> gamma_min;
    std::optional<double> p_max_dbm;
    npn::Json network = npn::Json::object();
};

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_values(const std::string& s)
{
    std::vector<double> out;
    for (const auto& item : split_list(s)) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad number in --values: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

void apply_file(Options& o, const npn::Json& j)
{
    for (const auto& [key, v] : j.items()) {
        if (key == "sweep") o.sweep = v.get<std::string>();
        else if (key == "values") o.values = v.get<std::vector<double>>();
        else if (key == "trials") o.trials = v.get<std::size_t>();
        else if (key == "preset") o.preset = v.get<std::string>();
        else if (key == "schemes") o.schemes = v.get<std::vector<std::string>>();
        else if (key == "seed") o.seed = v.get<std::uint64_t>();
        else if (key == "out") o.out = v.get<std::string>();
        else if (key == "format") o.format = v.get<std::string>();
        else if (key == "workers") o.workers = v.get<std::size_t>();
        else if (key == "trace") o.trace = v.get<bool>();
        else if (key == "gamma_min") o.gamma_min = v.get<double>();
        else if (key == "p_max_dbm") o.p_max_dbm = v.get<double>();
        else if (key == "network") o.network = v;
        else throw std::invalid_argument("config file: unknown key '" + key + "'");
    }
}

npn::SweepSpec build_spec(const Options& o)
{
    npn::SweepSpec spec;
    spec.sweep_variable = npn::parse_sweep_variable(o.sweep);
    std::size_t default_trials = 50;
    if (o.preset == "paper") {
        spec.base_config = npn::NetworkConfig::paper_default();
        default_trials = 200;
    } else if (o.preset == "desk") {
        spec.base_config = npn::NetworkConfig::desk_default();
    } else {
        throw std::invalid_argument("unknown preset '" + o.preset + "' (expected paper or desk)");
    }
    if (spec.sweep_variable == npn::SweepVariable::p_max) spec.base_config.gamma_min = 4.0;
    if (o.gamma_min) spec.base_config.gamma_min = *o.gamma_min;
    if (o.p_max_dbm) spec.base_config.set_uniform_ul_budget(npn::dbm_to_mw(*o.p_max_dbm));
    spec.base_config = npn::config_from_json(o.network, spec.base_config);

    spec.sweep_values = o.values;
    if (spec.sweep_values.empty()) {
        spec.sweep_values = spec.sweep_variable == npn::SweepVariable::gamma_min ? std::vector<double>{0.5, 1, 2, 3, 4}
                                                                                  : std::vector<double>{20, 25, 30, 35};
    }
    spec.num_trials = o.trials.value_or(default_trials);
    spec.schemes.clear();
    for (const auto& s : o.schemes) spec.schemes.push_back(npn::parse_scheme(s));
    spec.master_seed = npn::RngSeed{o.seed};
    spec.workers = o.workers;
    spec.validate();
    return spec;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Monte Carlo sweep of common UL throughput for the adaptive, fixed-SIC and fixed-TIN schemes"};
    Options flags;
    std::string values_text, schemes_text, config_path;
    std::uint64_t trials = 0;

    app.add_option("--config", config_path, "JSON file with any of the options below plus a \"network\" object");
    app.add_option("--sweep", flags.sweep, "Sweep variable")->check(CLI::IsMember({"gamma-min", "p-max"}));
    app.add_option("--values", values_text, "Comma-separated sweep values (bits/s/Hz or dBm)");
    app.add_option("--trials", trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);
    app.add_option("--preset", flags.preset, "Network preset")->check(CLI::IsMember({"paper", "desk"}));
    app.add_option("--schemes", schemes_text, "Comma-separated subset of adaptive,fixed_sic,fixed_tin");
    app.add_option("--seed", flags.seed, "Master seed");
    app.add_option("--out", flags.out, "Output path (stdout when omitted)");
    app.add_option("--format", flags.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--workers", flags.workers, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--trace", flags.trace, "Write one JSON line per pipeline run to stderr");
    double gamma = 0.0, pmax = 0.0;
    app.add_option("--gamma-min", gamma, "QoS threshold for p-max sweeps (bits/s/Hz)");
    app.add_option("--p-max", pmax, "UL power budget for gamma-min sweeps (dBm)");

    CLI11_PARSE(app, argc, argv);

    try {
        Options o;
        if (!config_path.empty()) apply_file(o, npn::Json::parse(npn::read_text_file(config_path)));
        if (app.count("--sweep")) o.sweep = flags.sweep;
        if (app.count("--values")) o.values = parse_values(values_text);
        if (app.count("--trials")) o.trials = static_cast<std::size_t>(trials);
        if (app.count("--preset")) o.preset = flags.preset;
        if (app.count("--schemes")) o.schemes = split_list(schemes_text);
        if (app.count("--seed")) o.seed = flags.seed;
        if (app.count("--out")) o.out = flags.out;
        if (app.count("--format")) o.format = flags.format;
        if (app.count("--workers")) o.workers = flags.workers;
        if (app.count("--trace")) o.trace = flags.trace;
        if (app.count("--gamma-min")) o.gamma_min = gamma;
        if (app.count("--p-max")) o.p_max_dbm = pmax;

        const auto spec = build_spec(o);
        const auto format = npn::parse_output_format(o.format);
        const auto result = npn::run_sweep(spec, o.trace ? &std::cerr : nullptr);
        if (o.out.empty()) {
            std::cout << (format == npn::OutputFormat::csv ? npn::format_csv(result)
                                                           : npn::format_json(result).dump(2) + "\n");
            std::cout.flush();
            if (!std::cout) throw std::runtime_error("write to stdout failed");
        } else {
            npn::emit_results(result, format, o.out);
        }
    } catch (const std::exception& e) {
        std::cerr << "npn_experiment: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
