#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <npn/experiment.hpp>
#include <npn/io.hpp>

using namespace npn;

namespace {

SweepSpec small_spec()
{
    SweepSpec spec;
    spec.base_config = NetworkConfig::with_dimensions(3, 3, 8);
    spec.sweep_values = {0.25, 0.5};
    spec.num_trials = 2;
    spec.master_seed = RngSeed{2024};
    return spec;
}

std::size_t count_lines(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

} // namespace

TEST_CASE("spec validation")
{
    auto spec = small_spec();
    CHECK_NOTHROW(spec.validate());
    spec.sweep_values = {0.5, 0.5};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.sweep_values = {};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = small_spec();
    spec.num_trials = 0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = small_spec();
    spec.schemes.clear();
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("p_max sweep values replace every UL budget")
{
    auto spec = small_spec();
    spec.sweep_variable = SweepVariable::p_max;
    const auto cfg = spec.config_at(20.0);
    for (double p : cfg.p_ul_budgets) CHECK(p == doctest::Approx(100.0));
}

TEST_CASE("empty result is a header-only CSV, one point gives two lines")
{
    SweepResult empty;
    const auto header = format_csv(empty);
    CHECK(header == "scheme,sweep_value,mean_common_throughput,stderr,n_feasible,n_trials\n");

    auto spec = small_spec();
    spec.num_trials = 1;
    spec.sweep_values = {0.5};
    spec.schemes = {SchemeKind::fixed_tin};
    const auto result = run_sweep(spec);
    REQUIRE(result.trials.size() == 1);
    REQUIRE(result.points.size() == 1);
    const auto csv = format_csv(result);
    CHECK(count_lines(csv) == 2);
    CHECK(csv.back() == '\n');
    CHECK(csv.find("fixed_tin,0.5,") != std::string::npos);
}

TEST_CASE("means are recomputable from the per-trial records")
{
    auto spec = small_spec();
    spec.num_trials = 3;
    const auto result = run_sweep(spec);
    CHECK(result.trials.size() == 3 * 2 * 3);
    for (const auto& p : result.points) {
        double sum = 0.0;
        std::size_t n = 0, total = 0;
        for (std::size_t vi = 0; vi < spec.sweep_values.size(); ++vi) {
            if (spec.sweep_values[vi] != p.sweep_value) continue;
            for (const auto& r : result.trials) {
                if (r.scheme != p.scheme || r.value_index != vi) continue;
                ++total;
                if (r.feasible) sum += r.achieved, ++n;
            }
        }
        CHECK(p.n_trials == total);
        CHECK(p.n_feasible == n);
        if (n) CHECK(p.mean_common_throughput == sum / static_cast<double>(n));
        else CHECK(std::isnan(p.mean_common_throughput));
    }
}

TEST_CASE("all schemes see the same channel in a trial")
{
    const auto result = run_sweep(small_spec());
    for (const auto& a : result.trials) {
        for (const auto& b : result.trials) {
            if (a.trial == b.trial) CHECK(a.channel_hash == b.channel_hash);
        }
    }
}

TEST_CASE("output does not depend on the worker count")
{
    auto spec = small_spec();
    spec.num_trials = 4;
    const auto one = format_csv(run_sweep(spec));
    spec.workers = 3;
    const auto three = format_csv(run_sweep(spec));
    CHECK(one == three);
    CHECK(format_csv(run_sweep(spec)) == three);
}

TEST_CASE("golden fixture")
{
    const auto expected = read_text_file(NPN_TEST_DATA_DIR "/golden_sweep.csv");
    CHECK(format_csv(run_sweep(small_spec())) == expected);
}

TEST_CASE("fixed decimal formatting")
{
    CHECK(format_decimal(0.1) == "0.1");
    CHECK(format_decimal(1.0 / 3.0) == "0.333333333");
    CHECK(format_decimal(std::nan("")) == "nan");
    CHECK(format_decimal(12345678901.0) == "1.23456789e+10");
}

TEST_CASE("JSON output mirrors the result")
{
    auto spec = small_spec();
    spec.num_trials = 1;
    const auto result = run_sweep(spec);
    const auto j = format_json(result);
    CHECK(j["sweep_variable"] == "gamma_min");
    CHECK(j["points"].size() == result.points.size());
    CHECK(j["trials"].size() == result.trials.size());
    CHECK(j["points"][0].contains("n_degraded"));
}

TEST_CASE("channel JSON round-trip is exact")
{
    const auto cfg = NetworkConfig::with_dimensions(2, 3, 4);
    const auto ch = draw_instance(cfg, RngSeed{77});
    const auto back = channel_from_json(Json::parse(to_json(ch).dump()));
    CHECK(back == ch);
    CHECK(channel_hash(back) == channel_hash(ch));
}

TEST_CASE("config overrides")
{
    const auto cfg = config_from_json(Json::parse(R"({"num_ul_users": 2, "p_max_dbm": 20})"),
                                      NetworkConfig::desk_default());
    CHECK(cfg.num_ul_users == 2);
    CHECK(cfg.p_ul_budgets.size() == 2);
    CHECK(cfg.p_ul_budgets[1] == doctest::Approx(100.0));
    CHECK_THROWS_AS(config_from_json(Json::parse(R"({"bogus": 1})"), NetworkConfig::desk_default()),
                    std::invalid_argument);
}

TEST_CASE("write failure names the path")
{
    const std::string path = "/nonexistent-dir/out.csv";
    try {
        emit_results(SweepResult{}, OutputFormat::csv, path);
        FAIL("expected an error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find(path) != std::string::npos);
    }
}

TEST_CASE("emitted file ends with a newline")
{
    const auto path = (std::filesystem::temp_directory_path() / "npn_emit_test.json").string();
    emit_results(SweepResult{}, OutputFormat::json, path);
    const auto text = read_text_file(path);
    CHECK(text.back() == '\n');
    CHECK(Json::parse(text)["points"].empty());
    std::filesystem::remove(path);
}
