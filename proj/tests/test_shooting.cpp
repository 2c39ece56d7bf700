#include <catch2/catch.hpp>

#include <cmath>

#include "radial/shooting.hpp"

using namespace radial;

namespace {
const Nonlinearity& default_model()
{
    static Nonlinearity nl{PowerDifference{3.0}};
    return nl;
}
ProblemParams probe_params(double r_max = 50.0)
{
    ProblemParams P;
    P.r_max = r_max;
    return P;
}
} // namespace

TEST_CASE("taylor bootstrap", "[shooting]") {
    const auto& nl = default_model();
    ProblemParams P;

    SECTION("stationary branch at alpha = b") {
        auto [rb, u, du] = taylor_bootstrap(nl, P, 1.0);
        CHECK(u == 1.0);
        CHECK(du == 0.0);
        CHECK(rb > 0.0);
    }
    SECTION("leading term at alpha = 2") {
        ProblemParams Pp = probe_params(5.0);
        Trajectory t = integrate(nl, Pp, {0.0, 2.0, 0.0});
        auto y = t.at(1e-3);
        CHECK(std::abs(y[0] - (2.0 - 1e-6)) < 1e-11);
    }
    SECTION("J limit at the bootstrap radius") {
        for (double alpha : {1.6, 2.0, 3.0, 5.0}) {
            ProblemParams Pp = probe_params(5.0);
            Trajectory t = integrate(nl, Pp, {0.0, alpha, 0.0});
            auto [rb, u, du] = taylor_bootstrap(nl, Pp, alpha);
            auto y = t.at(rb);
            double J = -y[1] / rb;
            CHECK(J == Approx(nl.f(alpha) / 3.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("constant solution at alpha = b", "[shooting]") {
    Trajectory t = integrate(default_model(), probe_params(20.0), {0.0, 1.0, 0.0});
    CHECK(t.termination == Termination::ReachedRmax);
    CHECK(t.events.empty());
    auto y = t.at(10.0);
    CHECK(y[0] == Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(y[1]) < 1e-12);
}

TEST_CASE("event structure of small and large launches", "[shooting]") {
    const auto& nl = default_model();

    SECTION("alpha = 1.45 turns without crossing") {
        Trajectory t = integrate(nl, probe_params(), {0.0, 1.45, 0.0});
        int n_du = 0, n_u = 0;
        for (const auto& e : t.events) {
            if (e.kind == EventKind::ZeroOfDu) ++n_du;
            if (e.kind == EventKind::ZeroOfU) ++n_u;
        }
        CHECK(n_du >= 1);
        CHECK(n_u == 0);
    }
    SECTION("alpha = 10 crosses with negative slope before any turn") {
        Trajectory t = integrate(nl, probe_params(), {0.0, 10.0, 0.0});
        double first_u = -1.0, first_du_event = 1e300;
        double slope = 0.0;
        for (const auto& e : t.events) {
            if (e.kind == EventKind::ZeroOfU && first_u < 0.0) {
                first_u = e.r;
                slope = e.du;
            }
            if (e.kind == EventKind::ZeroOfDu) first_du_event = std::min(first_du_event, e.r);
        }
        REQUIRE(first_u > 0.0);
        CHECK(slope < 0.0);
        CHECK(first_u < first_du_event);
    }
}

TEST_CASE("dense output evaluation", "[shooting]") {
    const auto& nl = default_model();
    Trajectory t = integrate(nl, probe_params(), {0.0, 2.0, 0.0});

    SECTION("exact at step endpoints") {
        const auto& seg = t.segments[t.segments.size() / 2];
        auto y = t.at(seg.r0);
        CHECK(y[0] == Trajectory::eval_rcont(seg.rcont[0], 0.0));
    }
    SECTION("consistent at event locations") {
        REQUIRE_FALSE(t.events.empty());
        for (std::size_t i = 0; i < t.events.size(); i += 7) {
            const auto& e = t.events[i];
            auto y = t.at(e.r);
            CHECK(y[0] == Approx(e.u).margin(1e-10));
            CHECK(y[1] == Approx(e.du).margin(1e-10));
        }
    }
    SECTION("out-of-range queries throw") {
        CHECK_THROWS_AS(t.at(t.r_hi() + 1.0), std::out_of_range);
        CHECK_THROWS_AS(t.at(-1.0), std::out_of_range);
    }
}

TEST_CASE("residual of the radial equation along dense output", "[shooting][property]") {
    const auto& nl = default_model();
    ProblemParams P = probe_params(40.0);
    Trajectory t = integrate(nl, P, {0.0, 2.0, 0.0});
    double worst = 0.0;
    int n = 1000;
    for (int i = 1; i <= n; ++i) {
        double r = t.r_lo() + (t.r_hi() - t.r_lo() - 1e-9) * double(i) / double(n);
        if (r < 0.01) continue;
        auto y = t.at(r);
        double upp = t.derivative_at(r, 1);
        double res = std::abs(upp + (P.N - 1.0) / r * y[1] + nl.f(y[0]));
        worst = std::max(worst, res / std::max(1.0, std::abs(nl.f(y[0]))));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("energy is non-increasing along trajectories", "[shooting][property]") {
    const auto& nl = default_model();
    ProblemParams P = probe_params(40.0);
    for (double alpha : {1.45, 2.0, 6.0}) {
        Trajectory t = integrate(nl, P, {0.0, alpha, 0.0});
        double I_scale = std::abs(energy_at(nl, alpha, 0.0)) + 1.0;
        double prev_r = t.r_lo();
        double prev_I = energy_at(nl, t.at(prev_r)[0], t.at(prev_r)[1]);
        int n = 2000;
        for (int i = 1; i <= n; ++i) {
            double r = t.r_lo() + (t.r_hi() - t.r_lo() - 1e-9) * double(i) / double(n);
            auto y = t.at(r);
            double I = energy_at(nl, y[0], y[1]);
            CHECK(I - prev_I <= 10.0 * P.rel_tol * I_scale * (r - prev_r) + 1e-13);
            prev_I = I;
            prev_r = r;
        }
    }
}

TEST_CASE("default tolerances track a tight-tolerance reference", "[shooting][property]") {
    const auto& nl = default_model();
    ProblemParams loose = probe_params();
    ProblemParams tight = loose;
    tight.abs_tol = 1e-13;
    tight.rel_tol = 1e-12;
    for (double alpha : {2.0, 6.0}) {
        Trajectory a = integrate(nl, loose, {0.0, alpha, 0.0});
        Trajectory b = integrate(nl, tight, {0.0, alpha, 0.0});
        double hi = std::min(a.r_hi(), b.r_hi()) - 0.02;
        double worst = 0.0;
        for (int i = 1; i < 300; ++i) {
            double r = 0.01 + hi * double(i) / 300.0;
            worst = std::max(worst, std::abs(a.at(r)[0] - b.at(r)[0]));
        }
        CHECK(worst < 1e-7);
    }
}

TEST_CASE("identical inputs give bit-identical trajectories", "[shooting][property]") {
    const auto& nl = default_model();
    ProblemParams P = probe_params();
    Trajectory a = integrate(nl, P, {0.0, 3.7, 0.0});
    Trajectory b = integrate(nl, P, {0.0, 3.7, 0.0});
    REQUIRE(a.segments.size() == b.segments.size());
    REQUIRE(a.events.size() == b.events.size());
    CHECK(a.r_final == b.r_final);
    CHECK(a.y_final[0] == b.y_final[0]);
    CHECK(a.y_final[1] == b.y_final[1]);
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].r == b.events[i].r);
        CHECK(a.events[i].u == b.events[i].u);
    }
}

TEST_CASE("events are ordered and u is monotone between turning points", "[shooting][property]") {
    const auto& nl = default_model();
    Trajectory t = integrate(nl, probe_params(), {0.0, 2.0, 0.0});
    std::vector<double> rho;
    double prev = -1.0;
    for (const auto& e : t.events) {
        CHECK(e.r >= prev - 1e-12);
        prev = std::max(prev, e.r);
        if (e.kind == EventKind::ZeroOfDu) rho.push_back(e.r);
    }
    REQUIRE(rho.size() >= 2);
    for (std::size_t i = 0; i + 1 < rho.size(); ++i) {
        double ra = rho[i] + 1e-9, rb = rho[i + 1] - 1e-9;
        int dir = 0;
        double prev_u = t.at(ra)[0];
        for (int j = 1; j <= 50; ++j) {
            double r = ra + (rb - ra) * double(j) / 50.0;
            double u = t.at(r)[0];
            int d = u > prev_u ? 1 : -1;
            if (dir == 0) dir = d;
            CHECK(d == dir);
            prev_u = u;
        }
    }
}

TEST_CASE("dense state is continuous across segment joins", "[shooting][property]") {
    Nonlinearity fmu = build_fmu(PowerDifference{3.0}, PurePower{3.0}, 2.0, 0.1, 10.0, 2.0);
    Trajectory t = integrate(fmu, probe_params(), {0.0, 3.0, 0.0}); // includes kink restarts
    for (std::size_t i = 0; i + 1 < t.segments.size(); ++i) {
        const auto& left = t.segments[i];
        const auto& right = t.segments[i + 1];
        REQUIRE(right.r0 == Approx(left.r_end).margin(1e-14));
        double theta = (left.r_end - left.r0) / left.h;
        for (int comp = 0; comp < 2; ++comp) {
            double lv = Trajectory::eval_rcont(left.rcont[static_cast<std::size_t>(comp)], theta);
            double rv = right.rcont[static_cast<std::size_t>(comp)][0];
            CHECK(lv == Approx(rv).margin(1e-11 * (1.0 + std::abs(rv))));
        }
    }
}

TEST_CASE("interior starts integrate without bootstrap", "[shooting]") {
    const auto& nl = default_model();
    Trajectory t = integrate(nl, probe_params(), {0.5, 2.0, -1.0});
    CHECK(t.r_lo() == 0.5);
    auto y = t.at(0.5);
    CHECK(y[0] == Approx(2.0).margin(1e-13));
    CHECK(y[1] == Approx(-1.0).margin(1e-13));
    CHECK_THROWS_AS(integrate(nl, probe_params(), {0.0, 2.0, -1.0}), std::invalid_argument);
}

TEST_CASE("level crossings of b and beta are recorded", "[shooting]") {
    const auto& nl = default_model();
    Trajectory t = integrate(nl, probe_params(), {0.0, 2.0, 0.0});
    int n_beta = 0, n_b = 0;
    for (const auto& e : t.events) {
        if (e.kind == EventKind::CrossBeta) {
            ++n_beta;
            CHECK(std::abs(std::abs(e.u) - nl.beta()) < 1e-9);
        }
        if (e.kind == EventKind::CrossB) {
            ++n_b;
            CHECK(std::abs(std::abs(e.u) - 1.0) < 1e-9);
        }
    }
    CHECK(n_beta >= 1); // the descent from 2 passes beta once
    CHECK(n_b >= 2);    // and then oscillates around b
}

TEST_CASE("kink crossings restart the integration exactly", "[shooting]") {
    Nonlinearity fmu = build_fmu(PowerDifference{3.0}, PurePower{3.0}, 2.0, 0.1, 10.0, 2.0);
    Trajectory t = integrate(fmu, probe_params(), {0.0, 3.0, 0.0});
    int kink_events = 0;
    for (const auto& e : t.events) {
        if (e.kind != EventKind::CrossKink) continue;
        ++kink_events;
        // a segment boundary sits at the crossing
        bool boundary = false;
        for (const auto& seg : t.segments)
            if (std::abs(seg.r_end - e.r) < 1e-9 || std::abs(seg.r0 - e.r) < 1e-9) boundary = true;
        CHECK(boundary);
        CHECK(std::abs(std::abs(e.u) - e.level) < 1e-7);
    }
    CHECK(kink_events >= 2); // down through 2.1 and 2.0 at least
}

TEST_CASE("negative-energy trap event", "[shooting]") {
    const auto& nl = default_model();
    ProblemParams P = probe_params(1000.0);

    SECTION("trap recorded when crossing I = 0 without stopping") {
        Trajectory t = integrate(nl, P, {0.0, 2.0, 0.0});
        int traps = 0;
        for (const auto& e : t.events)
            if (e.kind == EventKind::NegativeEnergyTrap) {
                ++traps;
                CHECK(std::abs(e.u) < nl.beta());
                CHECK(energy_at(nl, e.u, e.du) == Approx(0.0).margin(1e-9));
            }
        CHECK(traps == 1);
        CHECK(t.termination == Termination::ReachedRmax);
    }
    SECTION("trap stop terminates at the crossing") {
        Trajectory t = integrate(nl, P, {0.0, 2.0, 0.0}, {.trap_stop = true});
        CHECK(t.termination == Termination::Trapped);
        CHECK(t.r_final < P.r_max);
    }
    SECTION("alpha below beta traps immediately under trap stop") {
        Trajectory t = integrate(nl, P, {0.0, 1.2, 0.0}, {.trap_stop = true});
        CHECK(t.termination == Termination::Trapped);
        CHECK(t.r_final == t.r_lo());
    }
}
