// Command-line front end: solve, classify, scan, find, verify, experiment.
// Exit codes: 0 ok, 2 config error, 3 integration failure, 4 non-convergence,
// 5 suite/internal failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "radial/config.hpp"
#include "radial/io.hpp"
#include "radial/verify.hpp"

namespace {

using namespace radial;

struct ModelFlags {
    std::string model = "power-diff";
    double p = 3.0;
    double a = 0.0;
    std::string model_json; // inline JSON or @file path; overrides the flags
};

void add_model_flags(CLI::App* cmd, ModelFlags& mf)
{
    cmd->add_option("--model", mf.model, "model tag: power-diff | pure-power | shifted-power");
    cmd->add_option("--p", mf.p, "exponent");
    cmd->add_option("--a", mf.a, "shift (shifted-power)");
    cmd->add_option("--model-json", mf.model_json,
                    "model as inline JSON, or @path to a JSON file (overrides --model/--p/--a)");
}

Nonlinearity make_model(const ModelFlags& mf)
{
    if (!mf.model_json.empty()) {
        json j;
        if (mf.model_json.front() == '@')
            j = load_json_file(mf.model_json.substr(1));
        else
            j = json::parse(mf.model_json);
        return Nonlinearity{model_from_json(j)};
    }
    if (mf.model == "power-diff") return Nonlinearity{PowerDifference{mf.p}};
    if (mf.model == "pure-power") return Nonlinearity{PurePower{mf.p}};
    if (mf.model == "shifted-power") return Nonlinearity{ShiftedPower{mf.p, mf.a}};
    throw config_error("unknown --model tag: " + mf.model);
}

void add_param_flags(CLI::App* cmd, ProblemParams& P)
{
    cmd->add_option("--N", P.N, "space dimension (N > 2)");
    cmd->add_option("--r-max", P.r_max, "integration horizon");
    cmd->add_option("--abs-tol", P.abs_tol, "stepper absolute tolerance");
    cmd->add_option("--rel-tol", P.rel_tol, "stepper relative tolerance");
    cmd->add_option("--tol-u", P.tol_u, "double-zero threshold on |u|");
    cmd->add_option("--tol-du", P.tol_du, "double-zero threshold on |u'|");
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream f(path);
    if (!f) throw config_error("cannot open output file: " + path);
    return f;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"radial-shooter: shooting-method laboratory for radial bound states"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand
    int jobs = 0;
    app.add_option("--jobs", jobs, "worker threads for scans/sweeps (env RADIAL_SHOOTER_JOBS)");

    // ---- solve ----
    auto* solve = app.add_subcommand("solve", "integrate one trajectory");
    ModelFlags solve_mf;
    ProblemParams solve_P;
    double solve_alpha = 0.0, solve_r0 = 0.0, solve_du0 = 0.0;
    int solve_stride = 1, solve_arc = 1;
    std::string solve_out, solve_phase, solve_functionals;
    add_model_flags(solve, solve_mf);
    add_param_flags(solve, solve_P);
    solve->add_option("--alpha", solve_alpha, "initial value u(r0)")->required();
    solve->add_option("--r0", solve_r0, "start radius (0 = regular origin)");
    solve->add_option("--du0", solve_du0, "u'(r0) for interior starts");
    solve->add_option("--out", solve_out, "trajectory CSV (r,u,du,I)");
    solve->add_option("--phase", solve_phase, "phase-curve CSV (u,J,r)");
    solve->add_option("--functionals", solve_functionals,
                      "functional-samples CSV (s,r,J,I,H,P,W,psi1,psi2r)");
    solve->add_option("--arc", solve_arc, "1-based arc index for --functionals");
    solve->add_option("--stride", solve_stride, "row stride for the trajectory CSV");

    // ---- classify ----
    auto* classify = app.add_subcommand("classify", "verdict for one initial value");
    ModelFlags cls_mf;
    ProblemParams cls_P;
    double cls_alpha = 0.0;
    bool cls_json = false;
    add_model_flags(classify, cls_mf);
    add_param_flags(classify, cls_P);
    classify->add_option("--alpha", cls_alpha, "initial value")->required();
    classify->add_flag("--json", cls_json, "emit the full classification as JSON");

    // ---- scan ----
    auto* scan = app.add_subcommand("scan", "classify a grid of initial values");
    ModelFlags scan_mf;
    ProblemParams scan_P;
    double scan_from = 0.0, scan_to = 0.0;
    int scan_n = 0;
    std::string scan_out;
    add_model_flags(scan, scan_mf);
    add_param_flags(scan, scan_P);
    scan->add_option("--from", scan_from, "grid start")->required();
    scan->add_option("--to", scan_to, "grid end")->required();
    scan->add_option("--n", scan_n, "grid size")->required();
    scan->add_option("--out", scan_out, "CSV path (default stdout)");

    // ---- find ----
    auto* find = app.add_subcommand("find", "bisect a nodal-class boundary");
    ModelFlags find_mf;
    ProblemParams find_P;
    int find_k = 1;
    std::vector<double> find_bracket;
    double find_tol = 1e-10;
    add_model_flags(find, find_mf);
    add_param_flags(find, find_P);
    find->add_option("--k", find_k, "crossing level");
    find->add_option("--bracket", find_bracket, "two seed values (either order)")
        ->expected(2)
        ->required();
    find->add_option("--tol", find_tol, "bracket width target");

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "run a named property suite");
    std::string verify_suite;
    verify->add_option("--suite", verify_suite,
                       "functionals | comparison | lemma-epsilon | scaling | shape")
        ->required();

    // ---- experiment ----
    auto* experiment = app.add_subcommand("experiment", "run a multiplicity experiment");
    std::string exp_kind, exp_config, exp_out, exp_freeze;
    experiment->add_option("kind", exp_kind, "a | b")->required();
    experiment->add_option("--config", exp_config, "experiment config JSON")->required();
    experiment->add_option("--out", exp_out, "report path (default stdout); also writes <out>.cells.csv");
    experiment->add_option("--freeze-golden", exp_freeze,
                           "write a witness config pinned to the first passing cell");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0; // --help
        std::cerr << e.what() << "\n";
        std::cerr << app.help() << "\n";
        return 2;
    }

    try {
        if (*solve) {
            Nonlinearity nl = make_model(solve_mf);
            InitialCondition ic{solve_r0, solve_alpha, solve_r0 == 0.0 ? 0.0 : solve_du0};
            Trajectory t = integrate(nl, solve_P, ic);
            if (!solve_out.empty()) {
                auto f = open_out(solve_out);
                write_trajectory_csv(f, t, nl, solve_stride);
            }
            if (!solve_phase.empty()) {
                auto f = open_out(solve_phase);
                write_phase_csv(f, phase_curve(t, nl));
            }
            if (!solve_functionals.empty()) {
                auto arcs = extract_arcs(t, nl);
                if (solve_arc < 1 || static_cast<std::size_t>(solve_arc) > arcs.arcs.size())
                    throw config_error("--arc out of range: trajectory has " +
                                       std::to_string(arcs.arcs.size()) + " arc(s)");
                auto f = open_out(solve_functionals);
                write_functionals_csv(f, arcs.arcs[static_cast<std::size_t>(solve_arc - 1)], nl,
                                      solve_P.N);
            }
            std::cout << events_to_json(t).dump(2) << "\n";
            bool constant = std::abs(nl.f(solve_alpha)) < 1e-14 && solve_r0 == 0.0;
            std::cerr << "termination: " << to_string(t.termination) << " at r=" << fmt17(t.r_final)
                      << " u=" << fmt17(t.y_final[0]) << " du=" << fmt17(t.y_final[1])
                      << (constant ? " (constant solution)" : "") << "\n";
            return t.termination == Termination::StepFailure ? 3 : 0;
        }

        if (*classify) {
            Nonlinearity nl = make_model(cls_mf);
            Classification c = classify_alpha(nl, cls_P, cls_alpha);
            std::cout << to_string(c.verdict) << " " << c.k << "\n";
            if (cls_json) {
                json j;
                j["alpha"] = c.alpha;
                j["verdict"] = to_string(c.verdict);
                j["k"] = c.k;
                j["zeros"] = c.zeros;
                j["final_u"] = c.final_u;
                j["final_du"] = c.final_du;
                j["final_r"] = c.final_r;
                json rho = json::array();
                for (auto [r, m] : c.rho) rho.push_back(json::array({r, m}));
                j["rho"] = rho;
                j["z"] = c.z;
                if (c.trap) j["trap"] = json::array({c.trap->first, c.trap->second});
                std::cout << j.dump(2) << "\n";
            }
            return c.termination == Termination::StepFailure ? 3 : 0;
        }

        if (*scan) {
            Nonlinearity nl = make_model(scan_mf);
            auto rows = scan_range(nl, scan_P, scan_from, scan_to, scan_n, resolve_jobs(jobs));
            if (scan_out.empty()) {
                write_scan_csv(std::cout, rows);
            } else {
                auto f = open_out(scan_out);
                write_scan_csv(f, rows);
            }
            return 0;
        }

        if (*find) {
            Nonlinearity nl = make_model(find_mf);
            double a = find_bracket[0], b = find_bracket[1];
            Classification ca = classify_alpha(nl, find_P, a);
            double a_in = a, a_co = b;
            if (ca.membership_N(find_k) != std::optional<bool>(true)) std::swap(a_in, a_co);
            BoundStateRecord rec;
            try {
                rec = find_boundary(nl, find_P, a_in, a_co, find_k, find_tol);
            } catch (const non_convergence& e) {
                std::cerr << "non-convergence: " << e.what()
                          << " (alpha=" << fmt17(e.offending_alpha) << ")\n";
                return 4;
            } catch (const bracket_invalid& e) {
                std::cerr << "invalid bracket: " << e.what() << "\n";
                return 4;
            }
            std::cout << bound_state_to_json(rec).dump(2) << "\n";
            return 0;
        }

        if (*verify) {
            VerifyResult res;
            try {
                res = run_verify_suite(verify_suite);
            } catch (const std::invalid_argument& e) {
                std::cerr << e.what() << "\n";
                return 2;
            }
            json out = json::array();
            for (const auto& f : res) {
                json jf;
                jf["check"] = f.check;
                jf["detail"] = f.detail;
                out.push_back(jf);
            }
            std::cout << out.dump(2) << "\n";
            return res.empty() ? 0 : 5;
        }

        if (*experiment) {
            json cfg = load_json_file(exp_config);
            ExperimentFile ef = experiment_from_json(cfg);
            if (exp_kind != ef.kind)
                throw config_error("experiment kind '" + exp_kind + "' does not match config '" +
                                   ef.kind + "'");
            json report;
            json freeze = ef.resolved;
            bool freeze_found = false;
            if (ef.kind == "a") {
                auto rep = run_theorem_a(ef.a, ef.params);
                report = theorem_a_report_to_json(rep);
                for (const auto& c : rep.cells) {
                    bool pass = c.statement_range_pass && (ef.a.k > 1 || c.ground_states >= 2);
                    if (pass && !freeze_found) {
                        freeze_found = true;
                        freeze["mu_grid"] = json::array({c.mu});
                        freeze["lambda_grid"] = json::array({c.lambda});
                        freeze["alpha_star_k"] = rep.alpha_star_k;
                    }
                }
            } else {
                auto rep = run_theorem_b(ef.b, ef.params);
                report = theorem_b_report_to_json(rep);
                for (const auto& c : rep.cells) {
                    if (c.exclusion_pass && c.k_sign_change_states >= 2 && !freeze_found) {
                        freeze_found = true;
                        freeze["lambda_grid"] = json::array({c.lambda});
                        freeze["alpha_star_k"] = rep.alpha_star_k;
                        freeze["alpha_star_k1"] = rep.alpha_star_k1;
                    }
                }
            }
            report["config"] = ef.resolved;
            if (exp_out.empty()) {
                std::cout << report.dump(2) << "\n";
            } else {
                auto f = open_out(exp_out);
                f << report.dump(2) << "\n";
                auto csv = open_out(exp_out + ".cells.csv");
                csv << "mu,lambda,j,alpha_star\n";
                for (const auto& jc : report["cells"]) {
                    std::string mu = jc.contains("mu") ? fmt17(jc["mu"].get<double>()) : std::string{};
                    double lam = jc["lambda"].get<double>();
                    for (auto it = jc["inventory"]["states"].begin();
                         it != jc["inventory"]["states"].end(); ++it)
                        for (const auto& a : it.value())
                            csv << mu << ',' << fmt17(lam) << ',' << it.key() << ','
                                << fmt17(a.get<double>()) << '\n';
                }
            }
            if (!exp_freeze.empty()) {
                if (!freeze_found) {
                    std::cerr << "freeze-golden: no passing cell to pin\n";
                } else {
                    auto f = open_out(exp_freeze);
                    f << freeze.dump(2) << "\n";
                    std::cerr << "freeze-golden: wrote " << exp_freeze << "\n";
                }
            }
            return 0;
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const invalid_breakpoint& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fixture_invalid& e) {
        std::cerr << "fixture error: " << e.what() << "\n";
        return 2;
    } catch (const precondition_failed& e) {
        std::cerr << "precondition failed: " << e.what() << "\n";
        return 2;
    } catch (const step_failure& e) {
        std::cerr << "integration failure: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 5;
    }
    return 2;
}
