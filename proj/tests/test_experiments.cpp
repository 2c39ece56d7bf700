#include <catch2/catch.hpp>

#include <cmath>

#include "radial/experiments.hpp"
#include "radial/verify.hpp"

using namespace radial;

namespace {
constexpr double kAlphaStar1 = 4.3373876800717559; // ground state of the default model
}

TEST_CASE("band-crossing bounds", "[experiments]") {
    Nonlinearity nl{PowerDifference{3.0}};
    ProblemParams P;

    SECTION("reference fixture and the N = 3 closed form") {
        LemmaEpsilonFixture fx; // band [1.7, 1.8], zeta 0.4, launch 2.5
        auto rep = lemma_epsilon_check(nl, P, fx);
        CHECK(rep.B == Approx(4.0 / 3.0).margin(1e-12));
        CHECK(rep.B == Approx(rep.B_closed_form).margin(1e-12));
        CHECK(rep.ok_radius);
        CHECK(rep.ok_lower);
        CHECK(rep.ok_upper);
        CHECK(rep.rv_delta > fx.zeta);
    }
    SECTION("thin band collapses the bounds") {
        LemmaEpsilonFixture fx;
        fx.band_lo = 1.75;
        fx.delta = 1e-4;
        auto rep = lemma_epsilon_check(nl, P, fx);
        CHECK(rep.B - 1.0 < 1e-3);
        CHECK(std::abs(rep.r_bar - rep.r_delta) < 1e-3);
        CHECK(rep.ok_radius);
    }
    SECTION("fixture preconditions are enforced") {
        LemmaEpsilonFixture fx;
        fx.zeta = 0.05; // violates delta < zeta/(N-2)
        CHECK_THROWS_AS(lemma_epsilon_check(nl, P, fx), fixture_invalid);
        LemmaEpsilonFixture fx2;
        fx2.band_lo = 0.4; // f < 0 on the band
        CHECK_THROWS_AS(lemma_epsilon_check(nl, P, fx2), fixture_invalid);
    }
}

TEST_CASE("lambda independence at the outer joint", "[experiments]") {
    ProblemParams P;
    SweepConfig cfg;
    cfg.f1 = PowerDifference{3.0};
    cfg.f2 = PurePower{3.0};
    cfg.eps = 0.25;
    cfg.alpha1 = kAlphaStar1 + cfg.eps;
    cfg.mu = 10.0;
    cfg.alpha_x = 6.0;
    cfg.lambda_grid = {10.0, 100.0, 1000.0};

    auto rep = paso_e_check(cfg, P);
    CHECK(rep.zeta < rep.nf_over_fp);
    CHECK(rep.max_jr2_alpha1e_dev < 1e-6);
    CHECK(rep.all_rows_above_limit);
    // identity configuration: the assembled model equals the comparison model
    // above the bridge, so the joint value matches the direct integration
    SweepConfig id = cfg;
    id.f1 = PurePower{3.0};
    id.mu = 1.0;
    id.lambda_grid = {1.0};
    Nonlinearity plain{PurePower{3.0}};
    ProblemParams probe = P;
    probe.r_max = 50.0;
    Trajectory tv = integrate(plain, probe, {0.0, id.alpha_x, 0.0});
    auto rep_id = paso_e_check(id, P);
    CHECK(rep_id.rows.front().jr2_alpha1e ==
          Approx(jr2_at_level(tv, id.alpha1 + id.eps)).epsilon(1e-6));
}

TEST_CASE("J/f minimum trends", "[experiments]") {
    ProblemParams P;
    SweepConfig cfg;
    cfg.f1 = PowerDifference{3.0};
    cfg.f2 = PurePower{3.0};
    cfg.eps = 0.25;
    cfg.alpha1 = kAlphaStar1 + cfg.eps;
    cfg.mu = 10.0;
    cfg.alpha_x = 6.0;
    for (int i = 0; i < 13; ++i) cfg.lambda_grid.push_back(std::pow(10.0, 1.0 + 3.0 * i / 12.0));

    auto rep = s_lambda_sweep(cfg, P);
    int found = 0;
    for (const auto& row : rep.rows) found += row.minimum_found ? 1 : 0;
    CHECK(found >= 8);
    CHECK(rep.s_monotone_top_decade);
    CHECK(rep.jf_monotone_top_decade);
    CHECK(rep.r_decreasing);
    CHECK(rep.jf_final_dev < 0.15);
    CHECK(rep.s_limit > Nonlinearity{PowerDifference{3.0}}.beta());
    CHECK(rep.s_limit == Approx(cfg.alpha1 - rep.eta_minus).epsilon(1e-12)); // N - 2 = 1
}

TEST_CASE("pure-power scaling identities", "[experiments]") {
    ProblemParams P;
    P.r_max = 2000.0;

    SECTION("map between launches at the critical exponent") {
        auto rep = scaling_checks(5.0, 3.0, {2.0, 10.0, 100.0}, P);
        CHECK(rep.identity_pass);
        CHECK(rep.C == Approx(std::pow(0.25, 0.25)).margin(1e-12));
        CHECK_FALSE(rep.trend_asserted); // p = 5 is critical at N = 3
        for (const auto& row : rep.rows) CHECK(row.jr2_pullback_dev < 1e-6);
    }
    SECTION("supercritical profile trend") {
        auto rep = scaling_checks(7.0, 3.0, {2.0, 10.0}, P);
        CHECK(rep.identity_pass);
        CHECK(rep.trend_asserted);
        CHECK(rep.trend_pass);
        CHECK(rep.C == Approx(std::pow(2.0 / 9.0, 1.0 / 6.0)).margin(1e-12));
    }
}

TEST_CASE("fixed-slope launches stay positive", "[experiments]") {
    Nonlinearity nl{PowerDifference{3.0}};
    ProblemParams P;
    double alpha1 = 4.8;

    SECTION("window and threshold") {
        auto rep = anti_serrin_check(nl, P, alpha1, 1.2, kAlphaStar1,
                                     {0.5, 0.2, 0.1, 0.05, 0.02, 0.01});
        CHECK(rep.lower_bound == Approx(alpha1 - kAlphaStar1));
        CHECK(rep.upper_bound == Approx(3.0 * nl.f(alpha1) / nl.df(alpha1)));
        CHECK(rep.all_pass_below_threshold);
        CHECK(rep.threshold_delta <= 0.1);
        for (const auto& row : rep.rows)
            if (row.delta <= rep.threshold_delta) CHECK(row.positive_forever);
    }
    SECTION("out-of-window K is refused") {
        CHECK_THROWS_AS(anti_serrin_check(nl, P, alpha1, 0.1, kAlphaStar1, {0.1}),
                        precondition_failed);
        CHECK_THROWS_AS(anti_serrin_check(nl, P, alpha1, 10.0, kAlphaStar1, {0.1}),
                        precondition_failed);
    }
}

TEST_CASE("multiplicity construction with a dilated outer branch", "[experiments]") {
    ProblemParams P;
    TheoremAConfig cfg;
    cfg.f1 = PowerDifference{3.0};
    cfg.f2 = PurePower{3.0};
    cfg.k = 1;
    cfg.eps = 0.25;
    cfg.alpha_hat = 5.0;
    cfg.mu_grid = {10.0};
    cfg.lambda_grid = {100.0};
    cfg.scan_to = 60.0;
    cfg.scan_n = 100;
    cfg.jobs = 2;

    auto rep = run_theorem_a(cfg, P);
    CHECK(rep.alpha_star_k == Approx(kAlphaStar1).margin(1e-9));
    CHECK(rep.h5_ok);
    CHECK(rep.K_m > 0.0);
    REQUIRE(rep.cells.size() == 1);
    const auto& cell = rep.cells.front();
    CHECK(cell.jr2_growth_ok);
    CHECK(cell.ground_states >= 2);
    CHECK(cell.proof_range_pass);
    CHECK(cell.statement_range_pass); // vacuous at k = 1
    for (const auto& rt : cell.round_trips) {
        CHECK(rt.closest < 1e-4);
        bool consistent = false;
        for (const auto& [j, v] : cell.inventory.states)
            for (double a : v)
                if (a == rt.alpha && (rt.zeros == j || rt.zeros == j + 1)) consistent = true;
        CHECK(consistent);
    }

    SECTION("epsilon bound is enforced") {
        TheoremAConfig bad = cfg;
        bad.eps = 0.5; // exceeds beta/4
        CHECK_THROWS_AS(run_theorem_a(bad, P), fixture_invalid);
    }
}

TEST_CASE("identity configuration reproduces the plain inventory", "[experiments]") {
    ProblemParams P;
    auto rep = theorem_a_identity_check(PowerDifference{3.0}, kAlphaStar1, 0.25,
                                        kAlphaStar1 + 0.55, 16.0, 60, P, 1e-12, 2);
    CHECK(rep.counts_match);
    CHECK(rep.max_alpha_shift < 1e-2);
}

TEST_CASE("supercritical outer branch limits the inventory", "[experiments]") {
    ProblemParams P;
    TheoremBConfig cfg;
    cfg.f1 = PowerDifference{3.0};
    cfg.k = 1;
    cfg.eps = 0.25;
    cfg.p = 7.0;
    cfg.lambda_grid = {100.0};
    cfg.jobs = 2;

    auto rep = run_theorem_b(cfg, P);
    CHECK(rep.alpha_star_k == Approx(kAlphaStar1).margin(1e-9));
    CHECK(rep.alpha_star_k1 == Approx(14.1035844).epsilon(1e-6));
    CHECK(rep.alpha_tilde > rep.alpha_star_k);
    CHECK(rep.K1 >= rep.K1_limit);
    CHECK(rep.K1_limit == Approx(1.0 / 3.0));
    REQUIRE(rep.cells.size() == 1);
    const auto& cell = rep.cells.front();
    CHECK(cell.k_sign_change_states >= 2);
    CHECK(cell.exclusion_violations == 0);
    CHECK(cell.excluded_g_brackets == 0);
    CHECK(cell.exclusion_pass);
    CHECK(cell.g1_brackets_below <= 1); // unique ground state below alpha1
    for (const auto& rt : cell.round_trips) CHECK(rt.closest < 1e-4);

    SECTION("subcritical outer exponent is rejected") {
        TheoremBConfig bad = cfg;
        bad.p = 3.0;
        CHECK_THROWS_AS(run_theorem_b(bad, P), fixture_invalid);
    }
}

TEST_CASE("verify suites pass on the golden fixtures", "[experiments][suite]") {
    for (const char* name : {"comparison", "lemma-epsilon", "scaling", "shape"}) {
        auto failures = run_verify_suite(name);
        for (const auto& f : failures) INFO(name << " " << f.check << ": " << f.detail);
        CHECK(failures.empty());
    }
    CHECK_THROWS_AS(run_verify_suite("nope"), std::invalid_argument);
}
