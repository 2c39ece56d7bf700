#include <catch2/catch.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>


namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args)
{
    static int counter = 0;
    std::string base = "/tmp/radial_cli_test_" + std::to_string(counter++);
    std::string cmd = std::string(RADIAL_CLI_PATH) + " " + args + " > " + base + ".out 2> " + base + ".err";
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(status);
    r.out = slurp(base + ".out");
    r.err = slurp(base + ".err");
    std::remove((base + ".out").c_str());
    std::remove((base + ".err").c_str());
    return r;
}

int count_lines(const std::string& s)
{
    int n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

} // namespace

TEST_CASE("solve writes trajectory and phase files", "[cli]") {
    auto r = run_cli("solve --model power-diff --p 3 --N 3 --alpha 2 --r-max 50 "
                     "--out /tmp/radial_traj.csv --phase /tmp/radial_phase.csv");
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("termination:") != std::string::npos);
    auto traj = slurp("/tmp/radial_traj.csv");
    CHECK(traj.rfind("r,u,du,I\n", 0) == 0);
    CHECK(count_lines(traj) > 10);
    auto phase = slurp("/tmp/radial_phase.csv");
    CHECK(phase.rfind("u,J,r\n", 0) == 0);
    auto events = nlohmann::json::parse(r.out);
    CHECK(events.is_array());
    CHECK(!events.empty());
}

TEST_CASE("solve reports the constant solution", "[cli]") {
    auto r = run_cli("solve --model power-diff --p 3 --N 3 --alpha 1 --r-max 20");
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("constant solution") != std::string::npos);
}

TEST_CASE("missing required flag exits 2", "[cli]") {
    auto r = run_cli("solve --model power-diff --p 3");
    CHECK(r.exit_code == 2);
}

TEST_CASE("classify prints a verdict line", "[cli]") {
    auto r = run_cli("classify --model power-diff --p 3 --N 3 --alpha 10");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("N ", 0) == 0);
    auto r2 = run_cli("classify --model power-diff --p 3 --N 3 --alpha 2");
    CHECK(r2.out.rfind("P 1", 0) == 0);
}

TEST_CASE("scan emits the requested number of rows", "[cli]") {
    auto r = run_cli("scan --model power-diff --p 3 --N 3 --from 1.5 --to 12 --n 50 --jobs 2");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("alpha,verdict,k,m1,runtime_ms\n", 0) == 0);
    CHECK(count_lines(r.out) == 51); // header + 50 rows
}

TEST_CASE("scan output is reproducible apart from timing", "[cli]") {
    auto strip_timing = [](const std::string& csv) {
        std::istringstream in(csv);
        std::string line, out;
        while (std::getline(in, line)) {
            auto pos = line.rfind(',');
            out += line.substr(0, pos) + "\n";
        }
        return out;
    };
    auto a = run_cli("scan --model power-diff --p 3 --N 3 --from 2 --to 6 --n 9");
    auto b = run_cli("scan --model power-diff --p 3 --N 3 --from 2 --to 6 --n 9 --jobs 2");
    CHECK(strip_timing(a.out) == strip_timing(b.out));
}

TEST_CASE("find converges the seed bracket", "[cli]") {
    auto r = run_cli("find --model power-diff --p 3 --N 3 --k 1 --bracket 3 8 --tol 1e-10");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    double lo = j["bracket"][0].get<double>();
    double hi = j["bracket"][1].get<double>();
    CHECK(hi - lo < 1e-10);
    CHECK(j["alpha_star"].get<double>() == Approx(4.33738768).epsilon(1e-7));
    auto bad = run_cli("find --model power-diff --p 3 --N 3 --k 1 --bracket 2 3 --tol 1e-10");
    CHECK(bad.exit_code == 4);
}

TEST_CASE("verify runs named suites", "[cli]") {
    auto r = run_cli("verify --suite lemma-epsilon");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j.is_array());
    CHECK(j.empty());
    auto unknown = run_cli("verify --suite nope");
    CHECK(unknown.exit_code == 2);
}

TEST_CASE("experiment drives the golden configs", "[cli]") {
    auto r = run_cli(std::string("experiment a --config ") + RADIAL_CONFIG_DIR + "/golden_a.json");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["experiment"] == "a");
    REQUIRE(j["cells"].size() == 1);
    CHECK(j["cells"][0]["ground_states"].get<int>() >= 2);
    CHECK(j["config"]["eps"].get<double>() == 0.25); // resolved config embedded

    auto mismatch = run_cli(std::string("experiment b --config ") + RADIAL_CONFIG_DIR + "/golden_a.json");
    CHECK(mismatch.exit_code == 2);
}

TEST_CASE("malformed config exits 2", "[cli]") {
    std::ofstream bad("/tmp/radial_bad_config.json");
    bad << "{ not json";
    bad.close();
    auto r = run_cli("experiment a --config /tmp/radial_bad_config.json");
    CHECK(r.exit_code == 2);
    std::ofstream unknown_field("/tmp/radial_unknown_field.json");
    unknown_field << R"({"experiment":"a","eps":0.25,"alpha_hat":5.0,"surprise":1})";
    unknown_field.close();
    auto r2 = run_cli("experiment a --config /tmp/radial_unknown_field.json");
    CHECK(r2.exit_code == 2);
}

TEST_CASE("experiment reports embed a re-runnable config", "[cli]") {
    auto first = run_cli(std::string("experiment b --config ") + RADIAL_CONFIG_DIR +
                         "/golden_b.json --out /tmp/radial_rep1.json");
    REQUIRE(first.exit_code == 0);
    auto rep1 = nlohmann::json::parse(slurp("/tmp/radial_rep1.json"));
    std::ofstream cfg2("/tmp/radial_embedded.json");
    cfg2 << rep1["config"].dump();
    cfg2.close();
    auto second = run_cli("experiment b --config /tmp/radial_embedded.json --out /tmp/radial_rep2.json");
    REQUIRE(second.exit_code == 0);
    auto rep2 = nlohmann::json::parse(slurp("/tmp/radial_rep2.json"));
    rep1.erase("wall_s");
    rep2.erase("wall_s");
    rep1.erase("config");
    rep2.erase("config");
    CHECK(rep1 == rep2);
    // per-cell inventory CSV alongside the report
    auto cells = slurp("/tmp/radial_rep1.json.cells.csv");
    CHECK(cells.rfind("mu,lambda,j,alpha_star\n", 0) == 0);
    CHECK(count_lines(cells) >= 3);
}

TEST_CASE("freeze-golden pins the passing cell", "[cli]") {
    auto r = run_cli(std::string("experiment a --config ") + RADIAL_CONFIG_DIR +
                     "/golden_a.json --freeze-golden /tmp/radial_frozen_a.json");
    REQUIRE(r.exit_code == 0);
    auto frozen = nlohmann::json::parse(slurp("/tmp/radial_frozen_a.json"));
    CHECK(frozen["mu_grid"].size() == 1);
    CHECK(frozen["lambda_grid"].size() == 1);
    CHECK(frozen["alpha_star_k"].get<double>() == Approx(4.33738768).epsilon(1e-7));
    // the frozen config is itself runnable
    auto rerun = run_cli("experiment a --config /tmp/radial_frozen_a.json");
    CHECK(rerun.exit_code == 0);
}

TEST_CASE("model json round trip through the cli", "[cli]") {
    auto r = run_cli(R"(classify --model-json '{"model":"piecewise-mu","inner":{"model":"power-diff","p":3.0},"outer":{"model":"pure-power","p":3.0},"alpha1":4.5874,"eps":0.25,"lambda":100.0,"mu":10.0}' --N 3 --alpha 5.0)");
    CHECK(r.exit_code == 0);
    CHECK((r.out.rfind("N ", 0) == 0 || r.out.rfind("P ", 0) == 0));
}
