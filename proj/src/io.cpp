#include <npn/io.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace npn {

namespace {

Json number_or_null(double v)
{
    if (std::isfinite(v)) return v;
    return nullptr;
}

Json terms(const SparseTerms& t)
{
    Json out = Json::array();
    for (const auto& [i, c] : t) out.push_back(Json::array({i, c}));
    return out;
}

Grid2 grid_from_json(const Json& j, std::size_t rows, std::size_t cols, const char* name)
{
    if (!j.is_array() || j.size() != rows) throw std::invalid_argument(std::string("channel: bad row count for ") + name);
    Grid2 g(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw std::invalid_argument(std::string("channel: bad column count for ") + name);
        for (std::size_t n = 0; n < cols; ++n) g(i, n) = j[i][n].get<double>();
    }
    return g;
}

} // namespace

Json to_json(const Grid2& g)
{
    Json out = Json::array();
    for (std::size_t i = 0; i < g.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < g.cols(); ++j) row.push_back(g(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

Json to_json(const NetworkConfig& cfg)
{
    Json j;
    j["num_ul_users"] = cfg.num_ul_users;
    j["num_dl_users"] = cfg.num_dl_users;
    j["num_subcarriers"] = cfg.num_subcarriers;
    j["p_dl_budget_mw"] = cfg.p_dl_budget;
    j["p_ul_budgets_mw"] = cfg.p_ul_budgets;
    j["noise_power_mw"] = cfg.noise_power;
    j["gamma_min"] = cfg.gamma_min;
    j["pathloss_ref_gain"] = cfg.pathloss_ref_gain;
    j["pathloss_ref_dist_m"] = cfg.pathloss_ref_dist;
    j["pathloss_exponent"] = cfg.pathloss_exponent;
    j["cell_radius_m"] = cfg.cell_radius;
    j["bs_separation_m"] = cfg.bs_separation;
    return j;
}

NetworkConfig config_from_json(const Json& j, NetworkConfig cfg)
{
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
    bool dims_changed = false;
    for (const auto& [key, v] : j.items()) {
        if (key == "num_ul_users") {
            cfg.num_ul_users = v.get<std::size_t>();
            dims_changed = true;
        } else if (key == "num_dl_users") cfg.num_dl_users = v.get<std::size_t>();
        else if (key == "num_subcarriers") cfg.num_subcarriers = v.get<std::size_t>();
        else if (key == "p_dl_budget_mw") cfg.p_dl_budget = v.get<double>();
        else if (key == "p_dl_dbm") cfg.p_dl_budget = dbm_to_mw(v.get<double>());
        else if (key == "p_ul_budgets_mw") cfg.p_ul_budgets = v.get<std::vector<double>>();
        else if (key == "p_max_dbm") cfg.set_uniform_ul_budget(dbm_to_mw(v.get<double>()));
        else if (key == "noise_power_mw") cfg.noise_power = v.get<double>();
        else if (key == "noise_dbm") cfg.noise_power = dbm_to_mw(v.get<double>());
        else if (key == "gamma_min") cfg.gamma_min = v.get<double>();
        else if (key == "pathloss_ref_gain") cfg.pathloss_ref_gain = v.get<double>();
        else if (key == "pathloss_ref_gain_db") cfg.pathloss_ref_gain = db_to_linear(v.get<double>());
        else if (key == "pathloss_ref_dist_m") cfg.pathloss_ref_dist = v.get<double>();
        else if (key == "pathloss_exponent") cfg.pathloss_exponent = v.get<double>();
        else if (key == "cell_radius_m") cfg.cell_radius = v.get<double>();
        else if (key == "bs_separation_m") cfg.bs_separation = v.get<double>();
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    // A new UL user count without explicit budgets reuses the first budget for everyone.
    if (dims_changed && !j.contains("p_ul_budgets_mw") && cfg.p_ul_budgets.size() != cfg.num_ul_users)
        cfg.set_uniform_ul_budget(cfg.p_ul_budgets.empty() ? 1.0 : cfg.p_ul_budgets.front());
    cfg.validate();
    return cfg;
}

Json to_json(const ChannelRealization& ch)
{
    Json j;
    j["num_ul_users"] = ch.f.rows();
    j["num_dl_users"] = ch.h.rows();
    j["num_subcarriers"] = ch.phi.size();
    j["f"] = to_json(ch.f);
    j["phi"] = ch.phi;
    j["h"] = to_json(ch.h);
    Json g = Json::array();
    for (std::size_t k = 0; k < ch.g.dim0(); ++k) {
        Json per_user = Json::array();
        for (std::size_t l = 0; l < ch.g.dim1(); ++l) {
            Json row = Json::array();
            for (std::size_t n = 0; n < ch.g.dim2(); ++n) row.push_back(ch.g(k, l, n));
            per_user.push_back(std::move(row));
        }
        g.push_back(std::move(per_user));
    }
    j["g"] = std::move(g);
    return j;
}

ChannelRealization channel_from_json(const Json& j)
{
    const auto M = j.at("num_ul_users").get<std::size_t>();
    const auto L = j.at("num_dl_users").get<std::size_t>();
    const auto N = j.at("num_subcarriers").get<std::size_t>();
    ChannelRealization ch;
    ch.f = grid_from_json(j.at("f"), M, N, "f");
    ch.h = grid_from_json(j.at("h"), L, N, "h");
    ch.phi = j.at("phi").get<std::vector<double>>();
    if (ch.phi.size() != N) throw std::invalid_argument("channel: bad length for phi");
    const auto& g = j.at("g");
    if (!g.is_array() || g.size() != M) throw std::invalid_argument("channel: bad shape for g");
    ch.g = Grid3(M, L, N);
    for (std::size_t k = 0; k < M; ++k) {
        const Grid2 slice = grid_from_json(g[k], L, N, "g");
        for (std::size_t l = 0; l < L; ++l) {
            for (std::size_t n = 0; n < N; ++n) ch.g(k, l, n) = slice(l, n);
        }
    }
    return ch;
}

Json to_json(const RelaxedSolution& sol)
{
    Json j;
    j["a_ul"] = to_json(sol.a_ul);
    j["a_dl"] = to_json(sol.a_dl);
    j["tau"] = sol.tau;
    j["e_ul"] = to_json(sol.e_ul);
    j["e_dl"] = to_json(sol.e_dl);
    j["r_dl"] = to_json(sol.r_dl);
    j["r_common"] = sol.r_common;
    return j;
}

Json to_json(const IntegralSolution& sol)
{
    Json j;
    j["a_ul"] = to_json(sol.a_ul);
    j["a_dl"] = to_json(sol.a_dl);
    j["tau"] = sol.tau;
    j["e_ul"] = to_json(sol.e_ul);
    j["e_dl"] = to_json(sol.e_dl);
    j["r_dl"] = to_json(sol.r_dl);
    j["r_common"] = sol.r_common;
    j["achieved_common_throughput"] = sol.achieved_common_throughput;
    j["per_ul_user_throughput"] = sol.per_ul_user_throughput;
    j["per_dl_user_throughput"] = sol.per_dl_user_throughput;
    return j;
}

Json to_json(const FeasibilityResult& f)
{
    Json j;
    j["feasible"] = f.feasible;
    j["l_star"] = f.l_star;
    j["l_star_relaxed"] = f.l_star_relaxed;
    j["repair_rounds"] = f.repair_rounds;
    j["degraded"] = f.degraded;
    return j;
}

Json to_json(const PipelineResult& r)
{
    const auto& d = r.diagnostics;
    Json diag;
    diag["status"] = d.status;
    diag["seed"] = d.seed;
    diag["channel_hash"] = d.channel_hash;
    diag["feasibility"] = to_json(d.feasibility);
    diag["relaxed_trace"] = d.relaxed_trace;
    diag["sca_iterations"] = d.sca_iterations;
    diag["alternating_rounds"] = d.alternating_rounds;
    diag["alternating_converged"] = d.alternating_converged;
    diag["repair_rounds"] = d.repair_rounds;
    diag["integral_source"] = d.integral_source;
    diag["fixed_sic_relaxed"] = d.fixed_sic_relaxed;
    diag["fixed_tin_relaxed"] = d.fixed_tin_relaxed;
    diag["degraded"] = d.degraded;
    diag["wall_seconds"] = d.wall_seconds;

    Json j;
    j["scheme"] = to_string(r.scheme);
    j["feasible"] = r.feasible;
    j["solution"] = r.solution ? to_json(*r.solution) : Json(nullptr);
    j["relaxed_bound"] = r.relaxed_bound;
    j["relaxed"] = r.relaxed ? to_json(*r.relaxed) : Json(nullptr);
    j["diagnostics"] = std::move(diag);
    return j;
}

Json to_json(const ConvexProgram& prog)
{
    Json j;
    j["num_vars"] = prog.num_vars();
    j["objective"] = prog.objective;
    Json lo = Json::array(), hi = Json::array();
    for (double v : prog.lower) lo.push_back(number_or_null(v));
    for (double v : prog.upper) hi.push_back(number_or_null(v));
    j["lower"] = std::move(lo);
    j["upper"] = std::move(hi);
    Json rows = Json::array();
    for (const auto& c : prog.constraints) {
        Json row;
        row["label"] = c.label;
        row["lower"] = c.lower;
        row["linear"] = terms(c.linear);
        Json logs = Json::array();
        for (const auto& t : c.logs) {
            Json lt;
            lt["weight"] = t.weight;
            lt["constant"] = t.constant;
            lt["coeffs"] = terms(t.coeffs);
            logs.push_back(std::move(lt));
        }
        row["logs"] = std::move(logs);
        rows.push_back(std::move(row));
    }
    j["constraints"] = std::move(rows);
    return j;
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace npn
