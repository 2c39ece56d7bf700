#pragma once

// Named property suites over golden fixtures, driven by `verify --suite`.
// Each suite returns its failures; empty means pass.

#include <cmath>
#include <string>
#include <vector>

#include "radial/experiments.hpp"
#include "radial/functionals.hpp"
#include "radial/io.hpp"

namespace radial {

struct VerifyFailure {
    std::string check;
    std::string detail;
};

using VerifyResult = std::vector<VerifyFailure>;

namespace detail {

inline void expect(VerifyResult& out, bool ok, const std::string& check, const std::string& detail)
{
    if (!ok) out.push_back({check, detail});
}

inline ProblemParams probe_params()
{
    ProblemParams P;
    P.r_max = 50.0;
    return P;
}

} // namespace detail

/// Identity residuals and sign lemmas on the default-model probe arcs.
inline VerifyResult verify_functionals()
{
    VerifyResult out;
    ProblemParams P = detail::probe_params();
    Nonlinearity nl{PowerDifference{3.0}};
    double beta = nl.beta();

    for (double alpha : {2.0, 4.0}) {
        Trajectory t = integrate(nl, P, {0.0, alpha, 0.0});
        auto arcs = extract_arcs(t, nl);
        detail::expect(out, !arcs.arcs.empty(), "functionals.arcs",
                       "no arcs for alpha=" + fmt17(alpha));
        if (arcs.arcs.empty()) continue;
        const MonotoneArc& arc = arcs.arcs.front();
        double s_from = beta + 0.05, s_to = alpha - 0.05;

        auto rj = check_J_ode(arc, nl, P.N, s_from, s_to);
        detail::expect(out, rj.n_probes > 0 && rj.max_rel < 1e-5, "functionals.J_ode",
                       "alpha=" + fmt17(alpha) + " max_rel=" + fmt17(rj.max_rel));
        auto rj2 = check_jr2_ode(arc, nl, P.N, s_from, s_to);
        detail::expect(out, rj2.n_probes > 0 && rj2.max_rel < 1e-5, "functionals.jr2_ode",
                       "alpha=" + fmt17(alpha) + " max_rel=" + fmt17(rj2.max_rel));
        auto ri = check_I_ode(arc, nl, P.N, s_from, s_to);
        detail::expect(out, ri.n_probes > 0 && ri.max_rel < 1e-5, "functionals.I_ode",
                       "alpha=" + fmt17(alpha) + " max_rel=" + fmt17(ri.max_rel));

        // W cross-check through W^2 = 2 r^2 I, which stays smooth at the arc
        // top: d(W^2)/ds against 2 W W' with the closed-form W'
        {
            const auto& smp = arc.samples;
            std::vector<double> xs, w2s, is;
            double I_max = 0.0;
            for (const auto& a : smp) {
                double I = 0.5 * a.r * a.r * a.J * a.J + nl.F(a.s);
                xs.push_back(a.s);
                is.push_back(I);
                I_max = std::max(I_max, I);
                w2s.push_back(2.0 * a.r * a.r * I);
            }
            double span = arc.s_hi - arc.s_lo;
            double worst = 0.0;
            int n_probes = 0;
            for (std::size_t i = 4; i + 4 < smp.size(); ++i) {
                if (smp[i].s < s_from || smp[i].s > s_to) continue;
                if (smp[i].s - arc.s_lo < 1e-3 * span || arc.s_hi - smp[i].s < 1e-3 * span) continue;
                bool ok = true;
                // keep clear of the I = 0 domain boundary
                for (std::size_t k = i - 4; k <= i + 4; ++k)
                    if (is[k] < 1e-3 * I_max) ok = false;
                if (!ok) continue;
                auto W = peletier_serrin_W(arc, nl, smp[i].s);
                auto wp = peletier_serrin_W_prime(arc, nl, P.N, smp[i].s);
                if (!W || !wp) continue;
                double rhs = 2.0 * *W * *wp;
                if (std::abs(rhs) < 1e-6) continue;
                double fd = fd_derivative(xs, w2s, i, 5);
                worst = std::max(worst, std::abs(fd - rhs) / std::abs(rhs));
                ++n_probes;
                // recomputation: W^2 = 2 r^2 I exactly on stored samples
                detail::expect(out, std::abs(*W * *W - w2s[i]) <= 1e-12 * (1.0 + std::abs(w2s[i])),
                               "functionals.W_recompute", "s=" + fmt17(smp[i].s));
            }
            detail::expect(out, n_probes > 0 && worst < 1e-5, "functionals.W_prime",
                           "alpha=" + fmt17(alpha) + " max_rel=" + fmt17(worst));
        }

        // H = r^(2(N-1)) I increasing where F < 0 and J > 0
        {
            const auto& smp = arc.samples;
            std::vector<double> xs, hs;
            for (const auto& a : smp) {
                double I = 0.5 * a.r * a.r * a.J * a.J + nl.F(a.s);
                xs.push_back(a.s);
                hs.push_back(std::pow(a.r, 2.0 * (P.N - 1.0)) * I);
            }
            int n_probes = 0;
            for (std::size_t i = 2; i + 2 < smp.size(); ++i) {
                if (!(nl.F(smp[i].s) < -1e-10) || !(smp[i].J > 1e-8)) continue;
                double span = arc.s_hi - arc.s_lo;
                if (smp[i].s - arc.s_lo < 1e-2 * span || arc.s_hi - smp[i].s < 1e-2 * span) continue;
                double fd = fd_derivative(xs, hs, i, 5);
                ++n_probes;
                detail::expect(out, fd > 0.0, "functionals.H_increasing",
                               "alpha=" + fmt17(alpha) + " s=" + fmt17(smp[i].s) + " H'=" + fmt17(fd));
            }
            detail::expect(out, n_probes > 0, "functionals.H_probes",
                           "no F<0 probes on alpha=" + fmt17(alpha));
        }

        // sign identities: J' vs J - f/N and r'' vs J - f/(N-1)
        {
            const auto& smp = arc.samples;
            std::vector<double> xs, js, rs;
            for (const auto& a : smp) {
                xs.push_back(a.s);
                js.push_back(a.J);
                rs.push_back(a.r);
            }
            double span = arc.s_hi - arc.s_lo;
            for (std::size_t i = 2; i + 2 < smp.size(); ++i) {
                if (smp[i].s - arc.s_lo < 1e-2 * span || arc.s_hi - smp[i].s < 1e-2 * span) continue;
                if (std::abs(smp[i].J) < 1e-6) continue;
                double jp = fd_derivative(xs, js, i, 5);
                double gap_n = smp[i].J - nl.f(smp[i].s) / P.N;
                if (std::abs(jp) > 1e-6 && std::abs(gap_n) > 1e-6)
                    detail::expect(out, (jp > 0) == (gap_n > 0), "functionals.sign_J_prime",
                                   "s=" + fmt17(smp[i].s));
                // r'' by second-difference of r(s); on decreasing arcs
                // r'' = |r'|^3 ((N-1)J - f), so r'' and J - f/(N-1) share sign
                std::size_t lo = i - 2;
                auto w2 = fd_weights(xs[i], xs.data() + lo, 5, 2);
                double rpp = 0.0;
                for (int k = 0; k < 5; ++k) rpp += w2[static_cast<std::size_t>(k)] * rs[lo + static_cast<std::size_t>(k)];
                double gap_n1 = smp[i].J - nl.f(smp[i].s) / (P.N - 1.0);
                if (std::abs(rpp) > 1e-4 && std::abs(gap_n1) > 1e-6)
                    detail::expect(out, (rpp > 0) == (gap_n1 > 0), "functionals.sign_r_pp",
                                   "s=" + fmt17(smp[i].s));
            }
        }

        // Pohozaev sign under the subcritical margin
        auto ps = pohozaev_sign(arc, nl, P.N, beta + 0.01, alpha - 0.01);
        detail::expect(out, ps.n_probes > 0 && ps.all_positive_deriv, "functionals.P_prime_sign",
                       "alpha=" + fmt17(alpha) + " min_fd=" + fmt17(ps.min_fd));
    }
    return out;
}

/// Ordering of J across launches that both cross zero.
inline VerifyResult verify_comparison()
{
    VerifyResult out;
    ProblemParams P = detail::probe_params();
    Nonlinearity nl{PowerDifference{3.0}};
    const std::pair<double, double> pairs[] = {{6.0, 5.0}, {8.0, 6.0}, {10.0, 5.0}, {12.0, 9.0}};
    for (auto [au, av] : pairs) {
        Trajectory tu = integrate(nl, P, {0.0, au, 0.0});
        Trajectory tv = integrate(nl, P, {0.0, av, 0.0});
        auto rep = compare_solutions(tu, tv, nl, P.N);
        detail::expect(out, rep.ordered, "comparison.ordered",
                       "pair (" + fmt17(au) + "," + fmt17(av) + ") first_violation_s=" +
                           fmt17(rep.first_violation_s));
        detail::expect(out, rep.anchor_r_ok && rep.anchor_J_ok && rep.anchor_P_ok,
                       "comparison.anchor_triple", "pair (" + fmt17(au) + "," + fmt17(av) + ")");
    }
    return out;
}

/// Band-crossing bounds and the closed-form B at N = 3.
inline VerifyResult verify_lemma_epsilon()
{
    VerifyResult out;
    ProblemParams P = detail::probe_params();
    Nonlinearity nl{PowerDifference{3.0}};
    LemmaEpsilonFixture fx; // alpha_launch 2.5, band [1.7, 1.8], zeta 0.4
    auto rep = lemma_epsilon_check(nl, P, fx);
    detail::expect(out, rep.ok_radius, "lemma_epsilon.radius",
                   "r_bar=" + fmt17(rep.r_bar) + " B*r_delta=" + fmt17(rep.B * rep.r_delta));
    detail::expect(out, rep.ok_lower, "lemma_epsilon.lower", "lower=" + fmt17(rep.lower_bound));
    detail::expect(out, rep.ok_upper, "lemma_epsilon.upper", "upper=" + fmt17(rep.upper_bound));
    detail::expect(out, std::abs(rep.B - rep.B_closed_form) < 1e-12, "lemma_epsilon.closed_form",
                   "B=" + fmt17(rep.B) + " closed=" + fmt17(rep.B_closed_form));
    detail::expect(out, std::abs(rep.B - 4.0 / 3.0) < 1e-12, "lemma_epsilon.N3_value",
                   "B=" + fmt17(rep.B));

    // thin band: B -> 1 and r_bar -> r_delta
    LemmaEpsilonFixture thin;
    thin.band_lo = 1.75;
    thin.delta = 1e-4;
    auto rep2 = lemma_epsilon_check(nl, P, thin);
    detail::expect(out, rep2.B - 1.0 < 1e-3, "lemma_epsilon.thin_B", "B=" + fmt17(rep2.B));
    detail::expect(out, std::abs(rep2.r_bar - rep2.r_delta) < 1e-3, "lemma_epsilon.thin_radius",
                   "gap=" + fmt17(rep2.r_bar - rep2.r_delta));
    return out;
}

/// Pure-power scaling identity and the singular-profile constant.
inline VerifyResult verify_scaling()
{
    VerifyResult out;
    ProblemParams P;
    P.r_max = 2000.0;
    auto rep = scaling_checks(5.0, 3.0, {2.0, 10.0}, P);
    detail::expect(out, rep.identity_pass, "scaling.identity",
                   "max_dev see report; tol=" + fmt17(rep.tol));
    detail::expect(out, std::abs(rep.C - std::pow(0.25, 0.25)) < 1e-12, "scaling.C35",
                   "C=" + fmt17(rep.C));
    for (const auto& row : rep.rows)
        detail::expect(out, row.jr2_pullback_dev < 1e-6, "scaling.jr2_pullback",
                       "alpha=" + fmt17(row.alpha) + " dev=" + fmt17(row.jr2_pullback_dev));
    return out;
}

/// Spiral shape: no self-intersections, positive winding, alternating signs.
inline VerifyResult verify_shape()
{
    VerifyResult out;
    ProblemParams P = detail::probe_params();
    P.r_max = 100.0;
    Nonlinearity nl{PowerDifference{3.0}};
    for (double alpha : {2.0, 8.0}) {
        Trajectory t = integrate(nl, P, {0.0, alpha, 0.0});
        PhaseCurve pc = phase_curve(t, nl);
        auto xr = self_intersection_check(pc);
        detail::expect(out, xr.crossings == 0, "shape.self_intersections",
                       "alpha=" + fmt17(alpha) + " crossings=" + std::to_string(xr.crossings));
        auto wr = winding_check(pc);
        detail::expect(out, wr.all_positive, "shape.winding_positive", "alpha=" + fmt17(alpha));
        detail::expect(out, wr.signs_alternate, "shape.signs_alternate", "alpha=" + fmt17(alpha));
    }
    // detector sanity on a synthetic figure eight
    PhaseCurve bow;
    bow.points = {{0.0, 0.0, 0.0}, {2.0, 2.0, 1.0}, {2.0, 0.0, 2.0}, {0.0, 2.0, 3.0}, {0.1, 0.1, 4.0}};
    auto xr = self_intersection_check(bow);
    detail::expect(out, xr.crossings >= 1, "shape.detector_sanity",
                   "crossings=" + std::to_string(xr.crossings));
    return out;
}

inline VerifyResult run_verify_suite(const std::string& name)
{
    if (name == "functionals") return verify_functionals();
    if (name == "comparison") return verify_comparison();
    if (name == "lemma-epsilon") return verify_lemma_epsilon();
    if (name == "scaling") return verify_scaling();
    if (name == "shape") return verify_shape();
    throw std::invalid_argument("unknown verify suite: " + name);
}

} // namespace radial
