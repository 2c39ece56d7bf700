#pragma once

// JSON configuration parsing (strict: unknown fields rejected) and report
// emission for the CLI and the experiment harness.

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "radial/classify.hpp"
#include "radial/experiments.hpp"

namespace radial {

using json = nlohmann::ordered_json;

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void expect_fields(const json& j, const std::set<std::string>& allowed, const char* what)
{
    if (!j.is_object()) throw config_error(std::string(what) + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw config_error(std::string(what) + ": unknown field '" + it.key() + "'");
}

inline double need_num(const json& j, const char* key, const char* what)
{
    if (!j.contains(key) || !j.at(key).is_number())
        throw config_error(std::string(what) + ": missing numeric field '" + key + "'");
    return j.at(key).get<double>();
}

inline double opt_num(const json& j, const char* key, double fallback)
{
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

} // namespace detail

inline CoreModel core_model_from_json(const json& j);

inline NonlinearityModel model_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("model") || !j.at("model").is_string())
        throw config_error("model: expected an object with a 'model' tag");
    std::string tag = j.at("model").get<std::string>();
    if (tag == "power-diff") {
        detail::expect_fields(j, {"model", "p"}, "power-diff");
        return PowerDifference{detail::need_num(j, "p", "power-diff")};
    }
    if (tag == "pure-power") {
        detail::expect_fields(j, {"model", "p"}, "pure-power");
        return PurePower{detail::need_num(j, "p", "pure-power")};
    }
    if (tag == "shifted-power") {
        detail::expect_fields(j, {"model", "p", "a"}, "shifted-power");
        return ShiftedPower{detail::need_num(j, "p", "shifted-power"),
                            detail::need_num(j, "a", "shifted-power")};
    }
    if (tag == "scaled") {
        detail::expect_fields(j, {"model", "base", "lambda", "mu"}, "scaled");
        return ScaledModel{core_model_from_json(j.at("base")), detail::opt_num(j, "lambda", 1.0),
                           detail::opt_num(j, "mu", 1.0)};
    }
    if (tag == "piecewise-mu") {
        detail::expect_fields(j, {"model", "inner", "outer", "alpha1", "eps", "lambda", "mu"},
                              "piecewise-mu");
        return PiecewiseMu{core_model_from_json(j.at("inner")), core_model_from_json(j.at("outer")),
                           detail::need_num(j, "alpha1", "piecewise-mu"),
                           detail::need_num(j, "eps", "piecewise-mu"),
                           detail::need_num(j, "lambda", "piecewise-mu"),
                           detail::need_num(j, "mu", "piecewise-mu")};
    }
    if (tag == "piecewise-a") {
        detail::expect_fields(j, {"model", "inner", "alpha1", "eps", "lambda", "a", "p"},
                              "piecewise-a");
        return PiecewiseA{core_model_from_json(j.at("inner")),
                          detail::need_num(j, "alpha1", "piecewise-a"),
                          detail::need_num(j, "eps", "piecewise-a"),
                          detail::need_num(j, "lambda", "piecewise-a"),
                          detail::need_num(j, "a", "piecewise-a"),
                          detail::need_num(j, "p", "piecewise-a")};
    }
    throw config_error("model: unknown tag '" + tag + "'");
}

inline CoreModel core_model_from_json(const json& j)
{
    NonlinearityModel m = model_from_json(j);
    if (auto* pd = std::get_if<PowerDifference>(&m)) return *pd;
    if (auto* pp = std::get_if<PurePower>(&m)) return *pp;
    if (auto* sp = std::get_if<ShiftedPower>(&m)) return *sp;
    throw config_error("model: piecewise models cannot nest here");
}

inline json core_model_to_json(const CoreModel& m)
{
    json j;
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, PowerDifference>) {
                j["model"] = "power-diff";
                j["p"] = c.p;
            } else if constexpr (std::is_same_v<T, PurePower>) {
                j["model"] = "pure-power";
                j["p"] = c.p;
            } else {
                j["model"] = "shifted-power";
                j["p"] = c.p;
                j["a"] = c.a;
            }
        },
        m);
    return j;
}

inline json model_to_json(const NonlinearityModel& m)
{
    json j;
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ScaledModel>) {
                j["model"] = "scaled";
                j["base"] = core_model_to_json(c.base);
                j["lambda"] = c.lam;
                j["mu"] = c.mu;
            } else if constexpr (std::is_same_v<T, PiecewiseMu>) {
                j["model"] = "piecewise-mu";
                j["inner"] = core_model_to_json(c.inner);
                j["outer"] = core_model_to_json(c.outer);
                j["alpha1"] = c.alpha1;
                j["eps"] = c.eps;
                j["lambda"] = c.lam;
                j["mu"] = c.mu;
            } else if constexpr (std::is_same_v<T, PiecewiseA>) {
                j["model"] = "piecewise-a";
                j["inner"] = core_model_to_json(c.inner);
                j["alpha1"] = c.alpha1;
                j["eps"] = c.eps;
                j["lambda"] = c.lam;
                j["a"] = c.a;
                j["p"] = c.p;
            } else {
                j = core_model_to_json(CoreModel{c});
            }
        },
        m);
    return j;
}

inline ProblemParams params_from_json(const json& j)
{
    detail::expect_fields(j, {"N", "r_max", "abs_tol", "rel_tol", "tol_u", "tol_du", "r0_boot"},
                          "params");
    ProblemParams p;
    p.N = detail::opt_num(j, "N", p.N);
    p.r_max = detail::opt_num(j, "r_max", p.r_max);
    p.abs_tol = detail::opt_num(j, "abs_tol", p.abs_tol);
    p.rel_tol = detail::opt_num(j, "rel_tol", p.rel_tol);
    p.tol_u = detail::opt_num(j, "tol_u", p.tol_u);
    p.tol_du = detail::opt_num(j, "tol_du", p.tol_du);
    p.r0_boot = detail::opt_num(j, "r0_boot", p.r0_boot);
    return p;
}

inline json params_to_json(const ProblemParams& p)
{
    json j;
    j["N"] = p.N;
    j["r_max"] = p.r_max;
    j["abs_tol"] = p.abs_tol;
    j["rel_tol"] = p.rel_tol;
    j["tol_u"] = p.tol_u;
    j["tol_du"] = p.tol_du;
    j["r0_boot"] = p.r0_boot;
    return j;
}

inline json events_to_json(const Trajectory& t)
{
    json arr = json::array();
    for (const auto& e : t.events) {
        json je;
        je["kind"] = to_string(e.kind);
        je["r"] = e.r;
        je["u"] = e.u;
        je["du"] = e.du;
        arr.push_back(je);
    }
    return arr;
}

inline json bound_state_to_json(const BoundStateRecord& r)
{
    json j;
    j["alpha_star"] = r.alpha_star;
    j["bracket"] = json::array({r.bracket_lo, r.bracket_hi});
    j["k"] = r.k;
    j["final_u"] = r.final_u;
    j["final_du"] = r.final_du;
    j["final_r"] = r.final_r;
    j["iterations"] = r.iterations;
    return j;
}

inline json inventory_to_json(const Inventory& inv)
{
    json j;
    json states;
    for (const auto& [k, v] : inv.states) states[std::to_string(k)] = v;
    j["states"] = states;
    j["failed_brackets"] = inv.failed_brackets;
    return j;
}

// ---- experiment configs ---------------------------------------------------

struct ExperimentFile {
    std::string kind; // "a" or "b"
    TheoremAConfig a;
    TheoremBConfig b;
    ProblemParams params;
    json resolved; // echo of the parsed config
};

inline ExperimentFile experiment_from_json(const json& j)
{
    detail::expect_fields(j,
                          {"experiment", "params", "f1", "f2", "k", "eps", "alpha_hat", "mu_grid",
                           "lambda_grid", "alpha_scan", "alpha_star_k", "alpha_star_k1", "p",
                           "tol_alpha", "jobs", "K1_alpha_grid", "alpha_tilde_step"},
                          "experiment");
    ExperimentFile ef;
    if (!j.contains("experiment")) throw config_error("experiment: missing 'experiment' tag");
    ef.kind = j.at("experiment").get<std::string>();
    if (ef.kind != "a" && ef.kind != "b") throw config_error("experiment: tag must be 'a' or 'b'");
    ef.params = j.contains("params") ? params_from_json(j.at("params")) : ProblemParams{};

    auto scan = [&](double& from, double& to, int& n) {
        if (!j.contains("alpha_scan")) return;
        const json& s = j.at("alpha_scan");
        detail::expect_fields(s, {"from", "to", "n"}, "alpha_scan");
        from = detail::opt_num(s, "from", from);
        to = detail::opt_num(s, "to", to);
        if (s.contains("n")) n = s.at("n").get<int>();
    };

    if (ef.kind == "a") {
        TheoremAConfig& c = ef.a;
        if (j.contains("f1")) c.f1 = core_model_from_json(j.at("f1"));
        if (j.contains("f2")) c.f2 = core_model_from_json(j.at("f2"));
        if (j.contains("k")) c.k = j.at("k").get<int>();
        c.eps = detail::need_num(j, "eps", "experiment a");
        c.alpha_hat = detail::need_num(j, "alpha_hat", "experiment a");
        if (j.contains("mu_grid")) c.mu_grid = j.at("mu_grid").get<std::vector<double>>();
        if (j.contains("lambda_grid")) c.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
        c.alpha_star_k = detail::opt_num(j, "alpha_star_k", c.alpha_star_k);
        c.tol_alpha = detail::opt_num(j, "tol_alpha", c.tol_alpha);
        if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
        scan(c.scan_from, c.scan_to, c.scan_n);
    } else {
        TheoremBConfig& c = ef.b;
        if (j.contains("f1")) c.f1 = core_model_from_json(j.at("f1"));
        if (j.contains("k")) c.k = j.at("k").get<int>();
        c.eps = detail::need_num(j, "eps", "experiment b");
        c.p = detail::need_num(j, "p", "experiment b");
        if (j.contains("lambda_grid")) c.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
        c.alpha_star_k = detail::opt_num(j, "alpha_star_k", c.alpha_star_k);
        c.alpha_star_k1 = detail::opt_num(j, "alpha_star_k1", c.alpha_star_k1);
        c.alpha_tilde_step = detail::opt_num(j, "alpha_tilde_step", c.alpha_tilde_step);
        if (j.contains("K1_alpha_grid"))
            c.K1_alpha_grid = j.at("K1_alpha_grid").get<std::vector<double>>();
        c.tol_alpha = detail::opt_num(j, "tol_alpha", c.tol_alpha);
        if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
        scan(c.scan_from, c.scan_to, c.scan_n);
    }
    ef.resolved = j;
    return ef;
}

inline json round_trips_to_json(const std::vector<RoundTrip>& rts)
{
    json arr = json::array();
    for (const auto& rt : rts) {
        json j;
        j["alpha"] = rt.alpha;
        j["zeros"] = rt.zeros;
        j["closest_approach"] = rt.closest;
        j["double_zero"] = rt.double_zero;
        arr.push_back(j);
    }
    return arr;
}

inline json theorem_a_report_to_json(const TheoremAReport& r)
{
    json j;
    j["experiment"] = "a";
    j["alpha_star_k"] = r.alpha_star_k;
    j["alpha1"] = r.alpha1;
    j["beta"] = r.beta;
    j["K_m"] = r.K_m;
    j["h5_ok"] = r.h5_ok;
    json cells = json::array();
    for (const auto& c : r.cells) {
        json jc;
        jc["mu"] = c.mu;
        jc["lambda"] = c.lambda;
        jc["inventory"] = inventory_to_json(c.inventory);
        json inh;
        for (const auto& [k, v] : c.inherited_counts) inh[std::to_string(k)] = v;
        jc["inherited_counts"] = inh;
        jc["jr2_mu_scaled"] = c.jr2_mu_scaled;
        jc["jr2_growth_ok"] = c.jr2_growth_ok;
        jc["statement_range_pass"] = c.statement_range_pass;
        jc["proof_range_pass"] = c.proof_range_pass;
        jc["ground_states"] = c.ground_states;
        jc["round_trips"] = round_trips_to_json(c.round_trips);
        cells.push_back(jc);
    }
    j["cells"] = cells;
    j["wall_s"] = r.wall_s;
    return j;
}

inline json theorem_b_report_to_json(const TheoremBReport& r)
{
    json j;
    j["experiment"] = "b";
    j["alpha_star_k"] = r.alpha_star_k;
    j["alpha_star_k1"] = r.alpha_star_k1;
    j["alpha_tilde"] = r.alpha_tilde;
    j["K1"] = r.K1;
    j["K1_argmax"] = r.K1_argmax;
    j["K1_limit"] = r.K1_limit;
    j["d"] = r.d;
    j["s_bar"] = r.s_bar;
    j["a"] = r.a;
    j["alpha1"] = r.alpha1;
    j["beta"] = r.beta;
    json cells = json::array();
    for (const auto& c : r.cells) {
        json jc;
        jc["lambda"] = c.lambda;
        jc["inventory"] = inventory_to_json(c.inventory);
        jc["k_sign_change_states"] = c.k_sign_change_states;
        jc["exclusion_violations"] = c.exclusion_violations;
        jc["excluded_g_brackets"] = c.excluded_g_brackets;
        jc["exclusion_pass"] = c.exclusion_pass;
        jc["g1_brackets_below"] = c.g1_brackets_below;
        jc["round_trips"] = round_trips_to_json(c.round_trips);
        cells.push_back(jc);
    }
    j["cells"] = cells;
    j["wall_s"] = r.wall_s;
    return j;
}

inline json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw config_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

} // namespace radial
