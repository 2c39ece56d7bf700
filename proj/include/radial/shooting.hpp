#pragma once

// Radial IVP integrator: u'' + (N-1)/r u' + f(u) = 0, u(r0) = alpha,
// u'(r0) = dalpha. Dormand-Prince 5(4) with FSAL and the standard quartic
// dense-output interpolant; origin starts are bootstrapped with the
// second-order Taylor expansion, since the (N-1)/r term is singular at 0.
//
// Events (zeros of u and u', level crossings of b, beta and the model kinks,
// and the first zero of the energy I = u'^2/2 + F(u)) are located by
// bisection on the dense polynomial of each accepted step. Integration
// restarts exactly at kink crossings so f' is never sampled across a kink.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "radial/nonlinearity.hpp"

namespace radial {

struct ProblemParams {
    double N = 3.0;
    double r_max = 1000.0;
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    double tol_u = 1e-8;
    double tol_du = 1e-8;
    double r0_boot = 1e-3;
};

struct InitialCondition {
    double r0 = 0.0;
    double alpha = 0.0;
    double dalpha = 0.0;
};

enum class EventKind { ZeroOfU, ZeroOfDu, CrossB, CrossBeta, CrossKink, NegativeEnergyTrap };

struct Event {
    EventKind kind;
    int sign = 0;       // +1: u increasing through the level, -1: decreasing
    double level = 0.0; // signed u-level for Cross* kinds
    double r = 0.0;
    double u = 0.0;
    double du = 0.0;
};

enum class Termination { ReachedRmax, DoubleZero, Trapped, StepFailure };

inline const char* to_string(Termination t)
{
    switch (t) {
        case Termination::ReachedRmax: return "reached-rmax";
        case Termination::DoubleZero: return "double-zero";
        case Termination::Trapped: return "trapped";
        case Termination::StepFailure: return "step-failure";
    }
    return "?";
}

inline const char* to_string(EventKind k)
{
    switch (k) {
        case EventKind::ZeroOfU: return "zero-of-u";
        case EventKind::ZeroOfDu: return "zero-of-du";
        case EventKind::CrossB: return "cross-b";
        case EventKind::CrossBeta: return "cross-beta";
        case EventKind::CrossKink: return "cross-kink";
        case EventKind::NegativeEnergyTrap: return "negative-energy-trap";
    }
    return "?";
}

/// One accepted step's dense polynomial: y(theta) with theta = (r - r0)/h,
/// valid on [r0, r_end] (r_end < r0 + h when the step was cut at an event).
struct DenseSegment {
    double r0 = 0.0;
    double h = 0.0;
    double r_end = 0.0;
    std::array<std::array<double, 5>, 2> rcont{}; // per component
};

struct Trajectory {
    std::vector<DenseSegment> segments;
    std::vector<Event> events;
    Termination termination = Termination::ReachedRmax;
    double r_final = 0.0;
    std::array<double, 2> y_final{};
    ProblemParams params;
    InitialCondition ic;
    std::uint64_t model_signature = 0;
    bool from_origin = false;
    double alpha0 = 0.0; // u at the trajectory start

    double r_lo() const { return segments.empty() ? ic.r0 : segments.front().r0; }
    double r_hi() const { return r_final; }

    /// Interpolated state; exact at step endpoints.
    std::array<double, 2> at(double r) const
    {
        const DenseSegment& seg = locate(r);
        double theta = seg.h > 0.0 ? (r - seg.r0) / seg.h : 0.0;
        return {eval_rcont(seg.rcont[0], theta), eval_rcont(seg.rcont[1], theta)};
    }

    /// d/dr of a dense component (used by the residual checks).
    double derivative_at(double r, int comp) const
    {
        const DenseSegment& seg = locate(r);
        double theta = seg.h > 0.0 ? (r - seg.r0) / seg.h : 0.0;
        return eval_rcont_deriv(seg.rcont[static_cast<std::size_t>(comp)], theta) / seg.h;
    }

    static double eval_rcont(const std::array<double, 5>& rc, double theta)
    {
        double t1 = 1.0 - theta;
        return rc[0] + theta * (rc[1] + t1 * (rc[2] + theta * (rc[3] + t1 * rc[4])));
    }

    static double eval_rcont_deriv(const std::array<double, 5>& rc, double theta)
    {
        double t = theta;
        return rc[1] + rc[2] * (1.0 - 2.0 * t) + rc[3] * (2.0 * t - 3.0 * t * t) +
               rc[4] * (2.0 * t - 6.0 * t * t + 4.0 * t * t * t);
    }

private:
    const DenseSegment& locate(double r) const
    {
        if (segments.empty()) throw std::out_of_range("trajectory has no dense output");
        double lo = segments.front().r0, hi = r_final;
        double slack = 1e-12 * (1.0 + std::abs(hi));
        if (r < lo - slack || r > hi + slack) throw std::out_of_range("dense_eval: r outside trajectory range");
        std::size_t a = 0, b = segments.size() - 1;
        while (a < b) {
            std::size_t m = (a + b + 1) / 2;
            if (segments[m].r0 <= r)
                a = m;
            else
                b = m - 1;
        }
        // r may sit on the boundary between a and a+1; either evaluates exactly
        return segments[a];
    }
};

/// Interpolated (u, u') at radius r.
inline std::pair<double, double> dense_eval(const Trajectory& t, double r)
{
    auto y = t.at(r);
    return {y[0], y[1]};
}

/// Energy I(r) = u'^2/2 + F(u); non-increasing along trajectories.
inline double energy_at(const Nonlinearity& nl, double u, double du)
{
    return 0.5 * du * du + nl.F(u);
}

/// Second-order origin expansion: u(r) = alpha - f r^2/(2N) + f f' r^4/(8N(N+2)).
/// Returns (r0_boot, u(r0_boot), u'(r0_boot)); the bootstrap radius shrinks
/// with |f'(alpha)| so the truncation error stays below the stepper tolerance.
inline std::array<double, 3> taylor_bootstrap(const Nonlinearity& nl, const ProblemParams& P, double alpha)
{
    double fa = nl.f(alpha);
    double dfa = nl.df_minus(alpha);
    double rb = P.r0_boot * std::min(1.0, 1.0 / std::sqrt(1.0 + std::abs(dfa)));
    double c2 = fa / (2.0 * P.N);
    double c4 = fa * dfa / (8.0 * P.N * (P.N + 2.0));
    double u = alpha - c2 * rb * rb + c4 * rb * rb * rb * rb;
    double du = -2.0 * c2 * rb + 4.0 * c4 * rb * rb * rb;
    return {rb, u, du};
}

struct IntegrateOptions {
    bool trap_stop = false; // stop at the first I < 0 point with |u| < beta
};

struct step_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// power-basis quartic -> rcont representation
inline std::array<double, 5> power_to_rcont(const std::array<double, 5>& p)
{
    std::array<double, 5> rc{};
    rc[4] = p[4];
    rc[3] = -p[3] - 2.0 * p[4];
    rc[2] = -p[2] - p[3] - p[4];
    rc[1] = p[1] + p[2] + p[3] + p[4];
    rc[0] = p[0];
    return rc;
}

struct Rhs {
    const Nonlinearity* nl;
    double N;
    std::array<double, 2> operator()(double r, const std::array<double, 2>& y) const
    {
        return {y[1], -(N - 1.0) / r * y[1] - nl->f(y[0])};
    }
};

// deterministic starting step (Hairer's hinit, specialized to 2 components)
inline double initial_step(const Rhs& rhs, double r, const std::array<double, 2>& y,
                           const std::array<double, 2>& f0, double atol, double rtol, double hmax)
{
    auto scnorm = [&](const std::array<double, 2>& v, const std::array<double, 2>& ref) {
        double s = 0.0;
        for (int i = 0; i < 2; ++i) {
            double sc = atol + rtol * std::abs(ref[i]);
            double q = v[i] / sc;
            s += q * q;
        }
        return std::sqrt(0.5 * s);
    };
    double d0 = scnorm(y, y), d1 = scnorm(f0, y);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, hmax);
    std::array<double, 2> y1{y[0] + h0 * f0[0], y[1] + h0 * f0[1]};
    auto f1 = rhs(r + h0, y1);
    double d2 = scnorm({f1[0] - f0[0], f1[1] - f0[1]}, y) / h0;
    double dm = std::max(d1, d2);
    double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, hmax});
}

struct Trigger {
    EventKind kind;
    double level;       // threshold in the monitored quantity
    int comp;           // 0: u-level, 1: du zero, 2: energy zero
};

} // namespace detail

/// Integrate the radial IVP. Origin starts (r0 = 0) are Taylor-bootstrapped.
/// Dense output, located events, kink-aware restarts; terminates at r_max, at
/// a double zero (|u| < tol_u and |u'| < tol_du), at the negative-energy trap
/// when enabled, or on step-size underflow.
inline Trajectory integrate(const Nonlinearity& nl, const ProblemParams& P, InitialCondition ic,
                            IntegrateOptions opt = {})
{
    if (!(P.N > 2.0)) throw std::invalid_argument("params: N must exceed 2");
    if (!(P.r_max > P.r0_boot) || !(P.r0_boot > 0.0)) throw std::invalid_argument("params: need r_max > r0_boot > 0");
    if (!(P.abs_tol > 0.0 && P.rel_tol > 0.0 && P.tol_u > 0.0 && P.tol_du > 0.0))
        throw std::invalid_argument("params: tolerances must be positive");
    if (ic.r0 < 0.0) throw std::invalid_argument("initial condition: r0 < 0");
    if (ic.r0 == 0.0 && ic.dalpha != 0.0)
        throw std::invalid_argument("initial condition: r0 = 0 forces u'(0) = 0");

    Trajectory T;
    T.params = P;
    T.ic = ic;
    T.model_signature = nl.signature();
    T.from_origin = (ic.r0 == 0.0);
    T.alpha0 = ic.alpha;

    const detail::Rhs rhs{&nl, P.N};
    const double b = nl.b(), beta = nl.beta();

    // trigger set
    std::vector<detail::Trigger> trig;
    trig.push_back({EventKind::ZeroOfU, 0.0, 0});
    trig.push_back({EventKind::ZeroOfDu, 0.0, 1});
    if (b > 0.0) {
        trig.push_back({EventKind::CrossB, b, 0});
        trig.push_back({EventKind::CrossB, -b, 0});
    }
    if (beta > 0.0 && std::abs(beta - b) > 1e-14 * (1.0 + b)) {
        trig.push_back({EventKind::CrossBeta, beta, 0});
        trig.push_back({EventKind::CrossBeta, -beta, 0});
    }
    for (double k : nl.kinks()) {
        trig.push_back({EventKind::CrossKink, k, 0});
        trig.push_back({EventKind::CrossKink, -k, 0});
    }
    trig.push_back({EventKind::NegativeEnergyTrap, 0.0, 2});

    double r;
    std::array<double, 2> y;

    // trap already satisfied at the very start: no crossing will ever occur
    const double I_start = energy_at(nl, ic.alpha, ic.dalpha);
    if (opt.trap_stop && I_start < 0.0 && std::abs(ic.alpha) < beta) {
        T.events.push_back({EventKind::NegativeEnergyTrap, 0, 0.0, ic.r0, ic.alpha, ic.dalpha});
        T.termination = Termination::Trapped;
        T.r_final = ic.r0;
        T.y_final = {ic.alpha, ic.dalpha};
        return T;
    }

    if (T.from_origin) {
        auto boot = taylor_bootstrap(nl, P, ic.alpha);
        double rb = boot[0];
        double fa = nl.f(ic.alpha), dfa = nl.df_minus(ic.alpha);
        double c2 = fa / (2.0 * P.N);
        double c4 = fa * dfa / (8.0 * P.N * (P.N + 2.0));
        DenseSegment seg;
        seg.r0 = 0.0;
        seg.h = rb;
        seg.r_end = rb;
        seg.rcont[0] = detail::power_to_rcont({ic.alpha, 0.0, -c2 * rb * rb, 0.0, c4 * rb * rb * rb * rb});
        seg.rcont[1] = detail::power_to_rcont({0.0, -2.0 * c2 * rb, 0.0, 4.0 * c4 * rb * rb * rb, 0.0});
        T.segments.push_back(seg);
        r = rb;
        y = {boot[1], boot[2]};
    } else {
        r = ic.r0;
        y = {ic.alpha, ic.dalpha};
    }

    auto finish = [&](Termination t, double rf, const std::array<double, 2>& yf) {
        T.termination = t;
        T.r_final = rf;
        T.y_final = yf;
        return T;
    };

    auto k1 = rhs(r, y);
    double h = detail::initial_step(rhs, r, y, k1, P.abs_tol, P.rel_tol, 1.0);
    bool trap_seen = false;
    long nsteps = 0;
    double last_err = 1.0;

    // Dormand-Prince 5(4) tableau
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;
    constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                     d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                     d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    while (true) {
        if (++nsteps > 20'000'000) return finish(Termination::StepFailure, r, y);
        bool rejected_in_cycle = false;

        if (r + h > P.r_max) h = P.r_max - r;

        std::array<double, 2> k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, y1{}, yt{};
        double err;
        while (true) {
            auto stage = [&](double frac, const std::array<double, 2>& yy) { return rhs(r + frac * h, yy); };
            for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * a21 * k1[i];
            k2 = stage(c2, yt);
            for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            k3 = stage(c3, yt);
            for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            k4 = stage(c4, yt);
            for (int i = 0; i < 2; ++i)
                yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            k5 = stage(c5, yt);
            for (int i = 0; i < 2; ++i)
                yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            k6 = stage(1.0, yt);
            for (int i = 0; i < 2; ++i)
                y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            k7 = rhs(r + h, y1);

            err = 0.0;
            for (int i = 0; i < 2; ++i) {
                double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                 e7 * k7[i]);
                double sc = P.abs_tol + P.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
                err += (ei / sc) * (ei / sc);
            }
            err = std::sqrt(0.5 * err);
            if (err <= 1.0) break;
            rejected_in_cycle = true;
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
            if (h < 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(r), 1e-3))
                return finish(Termination::StepFailure, r, y);
            if (++nsteps > 20'000'000) return finish(Termination::StepFailure, r, y);
        }
        last_err = std::max(err, 1e-10);

        DenseSegment seg;
        seg.r0 = r;
        seg.h = h;
        seg.r_end = r + h;
        for (int i = 0; i < 2; ++i) {
            double dy = y1[i] - y[i];
            double bspl = h * k1[i] - dy;
            seg.rcont[i][0] = y[i];
            seg.rcont[i][1] = dy;
            seg.rcont[i][2] = bspl;
            seg.rcont[i][3] = dy - h * k7[i] - bspl;
            seg.rcont[i][4] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                                   d7 * k7[i]);
        }
        T.segments.push_back(seg);

        // --- event scan on [r, r+h] ------------------------------------
        auto seg_state = [&](double rr) {
            double theta = (rr - seg.r0) / seg.h;
            return std::array<double, 2>{Trajectory::eval_rcont(seg.rcont[0], theta),
                                         Trajectory::eval_rcont(seg.rcont[1], theta)};
        };
        auto gval = [&](const detail::Trigger& t, double rr) {
            auto s = seg_state(rr);
            if (t.comp == 0) return s[0] - t.level;
            if (t.comp == 1) return s[1];
            return energy_at(nl, s[0], s[1]);
        };

        struct Found {
            double r;
            detail::Trigger trig;
            int sign;
        };
        std::vector<Found> found;
        const int nscan = 8;
        for (const auto& t : trig) {
            if (t.comp == 2 && trap_seen) continue;
            double prev_r = seg.r0;
            double prev_g = gval(t, prev_r);
            if (std::abs(prev_g) == 0.0) prev_g = gval(t, seg.r0 + seg.h / 256.0);
            for (int j = 1; j <= nscan; ++j) {
                double rr = seg.r0 + seg.h * double(j) / double(nscan);
                double g = gval(t, rr);
                if (prev_g != 0.0 && g != 0.0 && prev_g * g < 0.0) {
                    double re = bisect([&](double x) { return gval(t, x); }, prev_r, rr, 120, 1e-13);
                    found.push_back({re, t, g > prev_g ? +1 : -1});
                } else if (g == 0.0 && prev_g != 0.0 && j == nscan) {
                    // crossing landed exactly on the segment end
                    found.push_back({rr, t, prev_g < 0.0 ? +1 : -1});
                }
                prev_r = rr;
                prev_g = g;
            }
        }
        std::sort(found.begin(), found.end(), [](const Found& a, const Found& b) { return a.r < b.r; });

        double cut_r = -1.0;
        Termination cut_term = Termination::ReachedRmax;
        bool restart = false;
        for (const auto& fe : found) {
            auto s = seg_state(fe.r);
            // dedupe: same kind+level within locating tolerance of the last record
            bool dup = false;
            for (auto it = T.events.rbegin(); it != T.events.rend(); ++it) {
                if (it->r < fe.r - 1e-10 * (1.0 + std::abs(fe.r))) break;
                if (it->kind == fe.trig.kind && std::abs(it->level - fe.trig.level) < 1e-14 &&
                    std::abs(it->r - fe.r) < 1e-10 * (1.0 + std::abs(fe.r)))
                    dup = true;
            }
            if (dup) continue;
            if (fe.trig.comp == 2) {
                if (trap_seen) continue;
                // only downward I-crossings matter; I = 0 forces |u| <= beta
                if (!(std::abs(s[0]) < beta + 1e-9 * (1.0 + beta)) || fe.sign > 0) continue;
                trap_seen = true;
                T.events.push_back({EventKind::NegativeEnergyTrap, fe.sign, 0.0, fe.r, s[0], s[1]});
                if (opt.trap_stop) {
                    cut_r = fe.r;
                    cut_term = Termination::Trapped;
                    break;
                }
                continue;
            }
            T.events.push_back({fe.trig.kind, fe.sign, fe.trig.level, fe.r, s[0], s[1]});
            if (std::abs(s[0]) < P.tol_u && std::abs(s[1]) < P.tol_du) {
                cut_r = fe.r;
                cut_term = Termination::DoubleZero;
                break;
            }
            if (fe.trig.kind == EventKind::CrossKink) {
                cut_r = fe.r;
                restart = true;
                break;
            }
        }

        if (cut_r >= 0.0) {
            T.segments.back().r_end = cut_r;
            auto s = seg_state(cut_r);
            if (!restart) return finish(cut_term, cut_r, s);
            r = cut_r;
            y = s;
            k1 = rhs(r, y);
        } else {
            r = seg.r_end;
            y = y1;
            k1 = k7;
        }

        if (std::abs(y[0]) < P.tol_u && std::abs(y[1]) < P.tol_du)
            return finish(Termination::DoubleZero, r, y);
        // net for a trap crossing the scan missed (tangency at |u| ~ beta);
        // irrelevant when the energy started negative (equilibrium branches)
        if (I_start >= 0.0 && !trap_seen && energy_at(nl, y[0], y[1]) < 0.0 && std::abs(y[0]) < beta) {
            trap_seen = true;
            T.events.push_back({EventKind::NegativeEnergyTrap, -1, 0.0, r, y[0], y[1]});
            if (opt.trap_stop) {
                T.segments.back().r_end = r;
                return finish(Termination::Trapped, r, y);
            }
        }
        if (r >= P.r_max - 1e-14 * P.r_max) return finish(Termination::ReachedRmax, r, y);

        double fac = std::clamp(0.9 * std::pow(last_err, -0.2), 0.2, rejected_in_cycle ? 1.0 : 5.0);
        h = std::min(h * fac, 1.0);
    }
}

} // namespace radial
