#pragma once

// The J diagnostics on trajectories. A trajectory splits into monotone arcs
// at the zeros of u'; on each arc the inverse r(s) exists and J(s) = -u'/r
// is sampled on Chebyshev-spaced s-nodes (signed: positive on decreasing
// arcs, negative on increasing ones, so the governing identities
//   J' = (1/r^2)(N - f/J),   (J r^2)' = (N-2) - f/J,   I'(s) = (N-1) J
// hold with one formula on every arc). Derived functionals:
//   I = r^2 J^2/2 + F,  H = r^(2(N-1)) I,
//   P = r^N (2N (F/f) J - r^2 J^2 - 2F),
//   W = r sqrt(2I) (on I > 0),
// and the stationarity roots psi of (J/f)' from f' r^2 x^2 - N x + 1 = 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "radial/interp.hpp"
#include "radial/shooting.hpp"

namespace radial {

struct out_of_range_error : std::out_of_range {
    using std::out_of_range::out_of_range;
};
struct no_overlap : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ArcSample {
    double s, r, J;
};

/// One monotone piece of u, carrying r(s) and J(s) samples ascending in s.
struct MonotoneArc {
    int index = 0;   // 1-based along the trajectory
    bool down = true;
    double s_lo = 0.0, s_hi = 0.0;
    double r_at_s_lo = 0.0, r_at_s_hi = 0.0;
    bool starts_at_origin = false; // arc 1 of an origin trajectory: J(s_hi) = f(s_hi)/N
    std::vector<ArcSample> samples;

    Pchip j_interp;
    Pchip r_interp;

    double J(double s) const
    {
        if (s < s_lo - 1e-12 * (1.0 + std::abs(s_lo)) || s > s_hi + 1e-12 * (1.0 + std::abs(s_hi)))
            throw out_of_range_error("arc J(s): s outside arc range");
        return j_interp(std::clamp(s, s_lo, s_hi));
    }
    double r(double s) const
    {
        if (s < s_lo - 1e-12 * (1.0 + std::abs(s_lo)) || s > s_hi + 1e-12 * (1.0 + std::abs(s_hi)))
            throw out_of_range_error("arc r(s): s outside arc range");
        return r_interp(std::clamp(s, s_lo, s_hi));
    }
};

struct ArcSet {
    std::vector<MonotoneArc> arcs;
    int dropped_degenerate = 0;
};

namespace detail {

/// Radius where u(r) = target on [ra, rb]; u strictly monotone there.
inline double invert_u(const Trajectory& t, double ra, double rb, double target)
{
    auto g = [&](double r) { return t.at(r)[0] - target; };
    double ga = g(ra), gb = g(rb);
    if (ga == 0.0) return ra;
    if (gb == 0.0) return rb;
    if (ga * gb > 0.0) {
        // target equals an endpoint value up to roundoff
        return std::abs(ga) < std::abs(gb) ? ra : rb;
    }
    return bisect(g, ra, rb, 120, 1e-14 * std::max(1.0, rb));
}

} // namespace detail

/// Split a trajectory into monotone arcs at the zeros of u' and resample each
/// on n_nodes Chebyshev-Lobatto s-nodes. Arcs spanning fewer than 4 accepted
/// steps are dropped (counted in the report).
inline ArcSet extract_arcs(const Trajectory& traj, const Nonlinearity& nl, int n_nodes = 256)
{
    ArcSet out;
    if (traj.segments.empty()) return out;

    std::vector<double> bounds;
    bounds.push_back(traj.r_lo());
    for (const auto& e : traj.events)
        if (e.kind == EventKind::ZeroOfDu && e.r > bounds.back() + 1e-13 && e.r < traj.r_final - 1e-13)
            bounds.push_back(e.r);
    if (traj.r_final > bounds.back() + 1e-13) bounds.push_back(traj.r_final);

    int idx = 0;
    for (std::size_t bi = 0; bi + 1 < bounds.size(); ++bi) {
        double ra = bounds[bi], rb = bounds[bi + 1];
        auto ya = traj.at(ra), yb = traj.at(rb);
        double sa = ya[0], sb = yb[0];
        if (std::abs(sb - sa) < 1e-12 * (1.0 + std::abs(sa))) continue; // constant stretch, no arc
        int steps_inside = 0;
        for (const auto& seg : traj.segments)
            if (seg.r0 >= ra - 1e-15 && seg.r_end <= rb + 1e-15) ++steps_inside;
        if (steps_inside < 4) {
            ++out.dropped_degenerate;
            continue;
        }

        MonotoneArc arc;
        arc.index = ++idx;
        arc.down = sb < sa;
        arc.s_lo = std::min(sa, sb);
        arc.s_hi = std::max(sa, sb);
        arc.r_at_s_lo = arc.down ? rb : ra;
        arc.r_at_s_hi = arc.down ? ra : rb;
        arc.starts_at_origin = (bi == 0) && traj.from_origin && arc.down;

        auto nodes = chebyshev_lobatto(arc.s_lo, arc.s_hi, n_nodes);
        arc.samples.reserve(nodes.size());
        for (double s : nodes) {
            double r, J;
            if (arc.starts_at_origin && s == arc.s_hi) {
                r = 0.0;
                J = nl.f(traj.alpha0) / traj.params.N;
            } else if (s == sa) {
                r = ra;
                J = -ya[1] / ra;
            } else if (s == sb) {
                r = rb;
                J = -yb[1] / rb;
            } else {
                r = detail::invert_u(traj, ra, rb, s);
                auto y = traj.at(r);
                J = -y[1] / r;
            }
            arc.samples.push_back({s, r, J});
        }
        std::vector<double> xs, js, rs;
        xs.reserve(arc.samples.size());
        for (const auto& smp : arc.samples) {
            xs.push_back(smp.s);
            js.push_back(smp.J);
            rs.push_back(smp.r);
        }
        arc.j_interp = Pchip(xs, js);
        arc.r_interp = Pchip(xs, rs);
        out.arcs.push_back(std::move(arc));
    }
    return out;
}

inline double J_of_s(const MonotoneArc& arc, double s) { return arc.J(s); }
inline double r_of_s(const MonotoneArc& arc, double s) { return arc.r(s); }

/// I in s-form, r^2 J^2 / 2 + F; identical to u'^2/2 + F(u) since rJ = -u'.
inline double energy_I(const MonotoneArc& arc, const Nonlinearity& nl, double s)
{
    double r = arc.r(s), J = arc.J(s);
    return 0.5 * r * r * J * J + nl.F(s);
}

inline double energy_I(const Trajectory& traj, const Nonlinearity& nl, double r)
{
    auto y = traj.at(r);
    return energy_at(nl, y[0], y[1]);
}

// -------------------------------------------------------------------------
// Residual reports: finite differences of sampled functionals against the
// closed-form right-hand sides.

struct ResidualReport {
    int n_probes = 0;
    double max_rel = 0.0;
    double worst_s = std::numeric_limits<double>::quiet_NaN();
};

struct ProbeFilter {
    double f_floor = 1e-8;
    double j_floor = 1e-8;
    double edge_frac = 1e-3; // excluded fraction of the s-span at each arc end
    double rhs_floor = 1e-6; // relative guard against vanishing right-hand sides
};

namespace detail {

template <class Value, class Rhs>
inline ResidualReport fd_residual(const MonotoneArc& arc, const Nonlinearity& nl, double s_from,
                                  double s_to, Value&& value, Rhs&& rhs_fn, const ProbeFilter& pf)
{
    ResidualReport rep;
    const auto& smp = arc.samples;
    std::size_t n = smp.size();
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = smp[i].s;
        ys[i] = value(smp[i]);
    }
    double span = arc.s_hi - arc.s_lo;
    double rhs_scale = 0.0;
    std::vector<std::pair<std::size_t, double>> probes;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        double s = xs[i];
        if (s < s_from || s > s_to) continue;
        if (s - arc.s_lo < pf.edge_frac * span || arc.s_hi - s < pf.edge_frac * span) continue;
        if (std::abs(nl.f(s)) < pf.f_floor) continue;
        if (std::abs(smp[i].J) < pf.j_floor) continue;
        double rhs = rhs_fn(smp[i]);
        probes.push_back({i, rhs});
        rhs_scale = std::max(rhs_scale, std::abs(rhs));
    }
    for (auto [i, rhs] : probes) {
        if (std::abs(rhs) < pf.rhs_floor * rhs_scale) continue;
        double fd = fd_derivative(xs, ys, i, 5);
        double rel = std::abs(fd - rhs) / std::abs(rhs);
        ++rep.n_probes;
        if (rel > rep.max_rel) {
            rep.max_rel = rel;
            rep.worst_s = xs[i];
        }
    }
    return rep;
}

} // namespace detail

/// dJ/ds against (1/r^2)(N - f/J).
inline ResidualReport check_J_ode(const MonotoneArc& arc, const Nonlinearity& nl, double N,
                                  double s_from, double s_to, ProbeFilter pf = {})
{
    return detail::fd_residual(
        arc, nl, s_from, s_to, [](const ArcSample& a) { return a.J; },
        [&](const ArcSample& a) { return (N - nl.f(a.s) / a.J) / (a.r * a.r); }, pf);
}

/// d(J r^2)/ds against (N-2) - f/J.
inline ResidualReport check_jr2_ode(const MonotoneArc& arc, const Nonlinearity& nl, double N,
                                    double s_from, double s_to, ProbeFilter pf = {})
{
    return detail::fd_residual(
        arc, nl, s_from, s_to, [](const ArcSample& a) { return a.J * a.r * a.r; },
        [&](const ArcSample& a) { return (N - 2.0) - nl.f(a.s) / a.J; }, pf);
}

/// dI/ds against (N-1) J.
inline ResidualReport check_I_ode(const MonotoneArc& arc, const Nonlinearity& nl, double N,
                                  double s_from, double s_to, ProbeFilter pf = {})
{
    return detail::fd_residual(
        arc, nl, s_from, s_to,
        [&](const ArcSample& a) { return 0.5 * a.r * a.r * a.J * a.J + nl.F(a.s); },
        [&](const ArcSample& a) { return (N - 1.0) * a.J; }, pf);
}

inline double jr2(const MonotoneArc& arc, double s)
{
    double r = arc.r(s);
    return arc.J(s) * r * r;
}

// -------------------------------------------------------------------------
// Pohozaev functional P and its sign.

struct near_singular_f : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double pohozaev_P(const MonotoneArc& arc, const Nonlinearity& nl, double N, double s)
{
    double f = nl.f(s);
    if (std::abs(f) < 1e-8) throw near_singular_f("pohozaev_P: |f(s)| < 1e-8");
    double r = arc.r(s), J = arc.J(s), F = nl.F(s);
    return std::pow(r, N) * (2.0 * N * (F / f) * J - r * r * J * J - 2.0 * F);
}

struct PohozaevSignReport {
    int n_probes = 0;
    int n_skipped_singular = 0;
    bool all_positive_deriv = true; // P' > 0 wherever the H2 margin and J are positive
    double min_fd = std::numeric_limits<double>::infinity();
    double max_rel_closed_form = 0.0; // FD(P) vs (2N (F/f)' - (N-2)) r^N J
};

inline PohozaevSignReport pohozaev_sign(const MonotoneArc& arc, const Nonlinearity& nl, double N,
                                        double s_from, double s_to, ProbeFilter pf = {})
{
    PohozaevSignReport rep;
    const auto& smp = arc.samples;
    std::size_t n = smp.size();
    std::vector<double> xs(n), ps(n);
    double h2_bound = (N - 2.0) / (2.0 * N);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = smp[i].s;
        double f = nl.f(smp[i].s);
        if (std::abs(f) < pf.f_floor) {
            ps[i] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        double r = smp[i].r, J = smp[i].J, F = nl.F(smp[i].s);
        ps[i] = std::pow(r, N) * (2.0 * N * (F / f) * J - r * r * J * J - 2.0 * F);
    }
    double span = arc.s_hi - arc.s_lo;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        double s = xs[i];
        if (s < s_from || s > s_to) continue;
        if (s - arc.s_lo < pf.edge_frac * span || arc.s_hi - s < pf.edge_frac * span) continue;
        bool ok = true;
        for (std::size_t k = i - 2; k <= i + 2; ++k)
            if (std::isnan(ps[k])) ok = false;
        if (!ok) {
            ++rep.n_skipped_singular;
            continue;
        }
        if (std::abs(smp[i].J) < pf.j_floor) continue;
        double margin = Ff_prime(nl, s) - h2_bound;
        if (!(margin > 0.0) || !(smp[i].J > 0.0)) continue;
        double fd = fd_derivative(xs, ps, i, 5);
        double closed = (2.0 * N * Ff_prime(nl, s) - (N - 2.0)) * std::pow(smp[i].r, N) * smp[i].J;
        ++rep.n_probes;
        rep.min_fd = std::min(rep.min_fd, fd);
        if (fd <= 0.0) rep.all_positive_deriv = false;
        if (std::abs(closed) > 1e-12)
            rep.max_rel_closed_form = std::max(rep.max_rel_closed_form, std::abs(fd - closed) / std::abs(closed));
    }
    return rep;
}

// -------------------------------------------------------------------------
// Peletier-Serrin functional W = r sqrt(2I), defined where I > 0.

inline std::optional<double> peletier_serrin_W(const MonotoneArc& arc, const Nonlinearity& nl, double s)
{
    double I = energy_I(arc, nl, s);
    if (!(I > 0.0)) return std::nullopt; // nonpositive energy
    return arc.r(s) * std::sqrt(2.0 * I);
}

/// Closed-form W'(s) = ((N-2) r^2 J^2 - 2F) / (r J sqrt(r^2 J^2 + 2F)).
inline std::optional<double> peletier_serrin_W_prime(const MonotoneArc& arc, const Nonlinearity& nl,
                                                     double N, double s)
{
    double r = arc.r(s), J = arc.J(s), F = nl.F(s);
    double rad = r * r * J * J + 2.0 * F;
    if (!(rad > 0.0) || std::abs(J) < 1e-14) return std::nullopt;
    return ((N - 2.0) * r * r * J * J - 2.0 * F) / (r * J * std::sqrt(rad));
}

// -------------------------------------------------------------------------
// Stationarity bounds of J/f: roots of f' r^2 x^2 - N x + 1 = 0, returned
// sorted ascending, with psi2 carried as its reciprocal so the r -> 0 limit
// stays finite (psi1 -> 1/N, 1/psi2 -> 0).

struct PsiPair {
    double psi1;
    double inv_psi2;
};

/// Roots of a x^2 - N x + 1 = 0 with a = f' r^2, sorted ascending; psi2 is
/// carried as a reciprocal so a -> 0 (r -> 0) stays finite: psi1 -> 1/N,
/// 1/psi2 -> 0.
inline std::optional<PsiPair> psi_roots(double fprime_r2, double N)
{
    double a = fprime_r2;
    double disc = N * N - 4.0 * a;
    if (disc < 0.0) return std::nullopt; // no real roots
    double q = 0.5 * (N + std::sqrt(disc));
    double root_small = 1.0 / q; // c/q with c = 1
    if (a == 0.0) return PsiPair{root_small, 0.0};
    double root_big = q / a;
    if (a > 0.0) return PsiPair{root_small, a / q}; // psi1 = 1/q <= psi2 = q/a
    return PsiPair{root_big, q};                    // a < 0: q/a < 0 < 1/q
}

inline std::optional<PsiPair> psi_bounds(const MonotoneArc& arc, const Nonlinearity& nl, double N, double s)
{
    double r = arc.r(s);
    return psi_roots(nl.df(s) * r * r, N);
}

// -------------------------------------------------------------------------
// Phase curve (u(r), -u'(r)/r) and its shape checks.

struct PhaseCurve {
    struct Point {
        double u, J, r;
    };
    std::vector<Point> points;
    std::vector<double> rho_r; // zeros of u' (arc joins)
};

inline PhaseCurve phase_curve(const Trajectory& traj, const Nonlinearity& nl, int per_segment = 4)
{
    PhaseCurve pc;
    if (traj.segments.empty()) return pc;
    if (traj.from_origin)
        pc.points.push_back({traj.alpha0, nl.f(traj.alpha0) / traj.params.N, 0.0});
    for (const auto& seg : traj.segments) {
        double width = seg.r_end - seg.r0;
        if (width <= 0.0) continue;
        int m = std::max(1, per_segment);
        for (int j = (seg.r0 == traj.r_lo() && !traj.from_origin) ? 0 : 1; j <= m; ++j) {
            double r = seg.r0 + width * double(j) / double(m);
            if (r <= 0.0) continue;
            double theta = (r - seg.r0) / seg.h;
            double u = Trajectory::eval_rcont(seg.rcont[0], theta);
            double du = Trajectory::eval_rcont(seg.rcont[1], theta);
            pc.points.push_back({u, -du / r, r});
        }
    }
    for (const auto& e : traj.events)
        if (e.kind == EventKind::ZeroOfDu) pc.rho_r.push_back(e.r);
    return pc;
}

struct IntersectionReport {
    int crossings = 0;
    std::size_t n_points = 0;
};

/// Transversal self-crossings of the phase polyline (adjacent segments exempt).
inline IntersectionReport self_intersection_check(const PhaseCurve& pc)
{
    IntersectionReport rep;
    const auto& p = pc.points;
    rep.n_points = p.size();
    if (p.size() < 4) return rep;
    auto cross = [](double ax, double ay, double bx, double by) { return ax * by - ay * bx; };
    auto seg_intersect = [&](std::size_t i, std::size_t j) {
        double p0x = p[i].u, p0y = p[i].J, p1x = p[i + 1].u, p1y = p[i + 1].J;
        double q0x = p[j].u, q0y = p[j].J, q1x = p[j + 1].u, q1y = p[j + 1].J;
        double d1 = cross(p1x - p0x, p1y - p0y, q0x - p0x, q0y - p0y);
        double d2 = cross(p1x - p0x, p1y - p0y, q1x - p0x, q1y - p0y);
        double d3 = cross(q1x - q0x, q1y - q0y, p0x - q0x, p0y - q0y);
        double d4 = cross(q1x - q0x, q1y - q0y, p1x - q0x, p1y - q0y);
        return d1 * d2 < 0.0 && d3 * d4 < 0.0;
    };
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        for (std::size_t j = i + 2; j + 1 < p.size(); ++j)
            if (seg_intersect(i, j)) ++rep.crossings;
    return rep;
}

struct WindingReport {
    std::vector<double> increments; // signed swept angle per half-turn stretch
    bool all_positive = true;
    bool signs_alternate = true; // sign of J constant per stretch, alternating
};

/// Counterclockwise rotation check: between consecutive zeros of J the curve
/// stays in one half-plane with alternating sign, and the angle swept about
/// the midpoint of the bounding axis intersections is positive.
inline WindingReport winding_check(const PhaseCurve& pc)
{
    WindingReport rep;
    const auto& p = pc.points;
    if (p.size() < 3) return rep;

    // stretch boundaries: indices nearest the rho radii
    std::vector<std::size_t> cuts;
    cuts.push_back(0);
    std::size_t k = 0;
    for (double rr : pc.rho_r) {
        while (k + 1 < p.size() && p[k].r < rr) ++k;
        if (k > cuts.back()) cuts.push_back(k);
    }
    if (p.size() - 1 > cuts.back()) cuts.push_back(p.size() - 1);

    int prev_sign = 0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        std::size_t i0 = cuts[c], i1 = cuts[c + 1];
        if (i1 <= i0 + 1) continue;
        // interior J sign
        int sign = 0;
        double peak = 0.0;
        for (std::size_t i = i0 + 1; i < i1; ++i)
            if (std::abs(p[i].J) > peak) {
                peak = std::abs(p[i].J);
                sign = p[i].J > 0.0 ? +1 : -1;
            }
        for (std::size_t i = i0 + 1; i < i1; ++i)
            if (p[i].J * sign < -1e-9 * peak) rep.signs_alternate = false;
        if (prev_sign != 0 && sign == prev_sign) rep.signs_alternate = false;
        prev_sign = sign;

        double cx = 0.5 * (p[i0].u + p[i1].u);
        double sweep = 0.0;
        for (std::size_t i = i0; i < i1; ++i) {
            double ax = p[i].u - cx, ay = p[i].J;
            double bx = p[i + 1].u - cx, by = p[i + 1].J;
            double cr = ax * by - ay * bx;
            double dt = ax * bx + ay * by;
            sweep += std::atan2(cr, dt);
        }
        rep.increments.push_back(sweep);
        if (!(sweep > 0.0)) rep.all_positive = false;
    }
    return rep;
}

// -------------------------------------------------------------------------
// Two-solution comparison on the first decreasing arcs.

struct ComparisonReport {
    bool degenerate = false;
    bool ordered = true;        // J_u > J_v at every probe down to the stop point
    double first_violation_s = std::numeric_limits<double>::quiet_NaN();
    double stop_s = 0.0;        // first probe where I_v < 0, else 0
    int n_probes = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    double anchor_s = 0.0;
    bool anchor_r_ok = false;   // r_u > r_v at the anchor
    bool anchor_J_ok = false;   // J_u > J_v at the anchor
    bool anchor_P_ok = false;   // P_u < 0 <= P_v at the anchor
};

inline ComparisonReport compare_solutions(const Trajectory& tu, const Trajectory& tv,
                                          const Nonlinearity& nl, double N,
                                          std::optional<double> anchor = std::nullopt,
                                          int n_probes = 200)
{
    ComparisonReport rep;
    if (tu.model_signature == tv.model_signature && tu.ic.alpha == tv.ic.alpha &&
        tu.ic.r0 == tv.ic.r0 && tu.ic.dalpha == tv.ic.dalpha) {
        rep.degenerate = true;
        return rep;
    }
    auto au_set = extract_arcs(tu, nl);
    auto av_set = extract_arcs(tv, nl);
    if (au_set.arcs.empty() || av_set.arcs.empty()) throw no_overlap("compare: missing first arcs");
    const MonotoneArc& au = au_set.arcs.front();
    const MonotoneArc& av = av_set.arcs.front();
    if (!au.down || !av.down) throw no_overlap("compare: first arcs are not decreasing");

    double hi = std::min(au.s_hi, av.s_hi);
    double lo = std::max({au.s_lo, av.s_lo, 0.0});
    if (!(hi > lo)) throw no_overlap("compare: empty common s-range");

    rep.anchor_s = anchor.value_or(av.s_hi);
    if (rep.anchor_s <= au.s_hi + 1e-12 && rep.anchor_s >= au.s_lo) {
        double sa = std::min(rep.anchor_s, std::min(au.s_hi, av.s_hi));
        double ru = au.r(sa), rv = av.r(sa);
        rep.anchor_r_ok = ru > rv;
        rep.anchor_J_ok = au.J(sa) > av.J(sa);
        try {
            double Pu = pohozaev_P(au, nl, N, sa);
            double Pv = pohozaev_P(av, nl, N, sa);
            rep.anchor_P_ok = (Pu < 0.0) && (Pv >= -1e-10);
        } catch (const near_singular_f&) {
            rep.anchor_P_ok = false;
        }
    }

    double span = hi - lo;
    rep.stop_s = lo;
    for (int i = 1; i <= n_probes; ++i) {
        double s = hi - span * double(i) / double(n_probes + 1);
        double Iv = energy_I(av, nl, s);
        if (Iv < 0.0) {
            rep.stop_s = s;
            break;
        }
        double gap = au.J(s) - av.J(s);
        ++rep.n_probes;
        rep.min_gap = std::min(rep.min_gap, gap);
        if (!(gap > 0.0) && rep.ordered) {
            rep.ordered = false;
            rep.first_violation_s = s;
        }
    }
    return rep;
}

} // namespace radial
