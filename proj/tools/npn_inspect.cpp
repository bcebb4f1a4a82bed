#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <npn/channel.hpp>
#include <npn/io.hpp>
#include <npn/orchestrator.hpp>
#include <npn/subproblems.hpp>

// Writes one instance, one convexified subproblem or one pipeline result as JSON.
int main(int argc, char** argv)
{
    CLI::App app{"Inspect single instances: channels, subproblems and pipeline results as JSON"};
    app.require_subcommand(1);

    std::string preset = "desk", channel_in, out;
    std::uint64_t seed = 1;
    double gamma = 0.5, tau_value = 0.0;
    std::size_t ul_users = 0, dl_users = 0, subcarriers = 0;
    std::string scheme = "adaptive";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--preset", preset)->check(CLI::IsMember({"paper", "desk"}));
        sub->add_option("--seed", seed, "Instance seed (ignored with --channel)");
        sub->add_option("--channel", channel_in, "Read the channel from this JSON file");
        sub->add_option("--gamma-min", gamma);
        sub->add_option("--out", out, "Output path (stdout when omitted)");
        sub->add_option("--ul-users", ul_users, "Override the preset's UL user count");
        sub->add_option("--dl-users", dl_users, "Override the preset's DL user count");
        sub->add_option("--subcarriers", subcarriers, "Override the preset's subcarrier count");
    };
    auto* channel = app.add_subcommand("channel", "Draw an instance and print it");
    add_common(channel);
    auto* subproblem = app.add_subcommand("subproblem", "Print the first convexified subproblem for fixed modes and its solution");
    add_common(subproblem);
    subproblem->add_option("--tau", tau_value, "Mode on every subcarrier (0 = TIN, 1 = SIC)")
        ->check(CLI::Range(0.0, 1.0));
    auto* pipeline = app.add_subcommand("pipeline", "Run one scheme on one instance");
    add_common(pipeline);
    pipeline->add_option("--scheme", scheme);

    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = preset == "paper" ? npn::NetworkConfig::paper_default() : npn::NetworkConfig::desk_default();
        cfg.gamma_min = gamma;
        if (ul_users) cfg.num_ul_users = ul_users;
        if (dl_users) cfg.num_dl_users = dl_users;
        if (subcarriers) cfg.num_subcarriers = subcarriers;
        cfg.set_uniform_ul_budget(cfg.p_ul_budgets.front());
        npn::ChannelRealization ch;
        if (!channel_in.empty()) {
            ch = npn::channel_from_json(npn::Json::parse(npn::read_text_file(channel_in)));
            cfg.num_ul_users = ch.f.rows();
            cfg.num_dl_users = ch.h.rows();
            cfg.num_subcarriers = ch.phi.size();
            cfg.set_uniform_ul_budget(cfg.p_ul_budgets.front());
        } else {
            ch = npn::draw_instance(cfg, npn::RngSeed{seed});
        }

        npn::Json j;
        if (channel->parsed()) {
            j = npn::to_json(ch);
        } else if (subproblem->parsed()) {
            const std::vector<double> tau(cfg.num_subcarriers, tau_value);
            auto init = npn::phase_one(tau, ch, cfg);
            if (!init) throw std::runtime_error("no feasible starting point for these modes");
            auto sp = npn::build_p22(*init, tau, ch, cfg);
            j["config"] = npn::to_json(cfg);
            j["start"] = npn::encode_point(sp, *init, cfg);
            j["program"] = npn::to_json(sp.program);
            const auto rep = npn::solve_convex(sp.program, j["start"].get<std::vector<double>>());
            j["solution"] = {{"status", npn::to_string(rep.status)},
                             {"objective", rep.objective},
                             {"max_violation", rep.max_violation},
                             {"primal", rep.primal}};
        } else {
            j = npn::to_json(npn::solve_pipeline(npn::parse_scheme(scheme), ch, cfg, {}, seed));
        }
        const std::string text = j.dump(2) + "\n";
        if (out.empty()) std::cout << text;
        else npn::write_text_file(out, text);
    } catch (const std::exception& e) {
        std::cerr << "npn_inspect: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
