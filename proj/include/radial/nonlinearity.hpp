#pragma once

// Nonlinearity models for the radial problem u'' + (N-1)/r u' + f(u) = 0.
//
// Core analytic families (closed-form f, f', F):
//   PowerDifference(p):  f(s) = s^p - s          (b = 1)
//   PurePower(p):        f(s) = s^p              (b = 0)
//   ShiftedPower(p, a):  f(s) = (s+a)^p
// plus a dilated wrapper lam^2 * core(s/mu) and the two piecewise
// constructions used by the magnitude-change experiments:
//   PiecewiseMu: core f1 below alpha1, a linear bridge on [alpha1, alpha1+eps],
//                lam^2 f2(s/mu) above.
//   PiecewiseA:  same with outer branch lam^2 (s+a)^p.
//
// All models are evaluated for s >= 0 and extended to the line oddly,
// f(-s) = -f(s); the primitive F(s) = int_0^s f is then even.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "radial/interp.hpp"

namespace radial {

struct no_positive_part : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct invalid_breakpoint : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PowerDifference {
    double p;
};
struct PurePower {
    double p;
};
struct ShiftedPower {
    double p;
    double a;
};

using CoreModel = std::variant<PowerDifference, PurePower, ShiftedPower>;

/// lam^2 * core(s/mu); the unit dilations of the piecewise outer branches.
struct ScaledModel {
    CoreModel base;
    double lam = 1.0;
    double mu = 1.0;
};

struct PiecewiseMu {
    CoreModel inner;
    CoreModel outer;
    double alpha1, eps, lam, mu;
};

struct PiecewiseA {
    CoreModel inner;
    double alpha1, eps, lam, a, p;
};

using NonlinearityModel =
    std::variant<PowerDifference, PurePower, ShiftedPower, ScaledModel, PiecewiseMu, PiecewiseA>;

namespace detail {

inline double core_f(const CoreModel& m, double s)
{
    return std::visit(
        [s](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, PowerDifference>) return std::pow(s, c.p) - s;
            if constexpr (std::is_same_v<T, PurePower>) return std::pow(s, c.p);
            if constexpr (std::is_same_v<T, ShiftedPower>) return std::pow(s + c.a, c.p);
        },
        m);
}

inline double core_df(const CoreModel& m, double s)
{
    return std::visit(
        [s](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, PowerDifference>) return c.p * std::pow(s, c.p - 1.0) - 1.0;
            if constexpr (std::is_same_v<T, PurePower>) return c.p * std::pow(s, c.p - 1.0);
            if constexpr (std::is_same_v<T, ShiftedPower>) return c.p * std::pow(s + c.a, c.p - 1.0);
        },
        m);
}

inline double core_F(const CoreModel& m, double s)
{
    return std::visit(
        [s](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, PowerDifference>)
                return std::pow(s, c.p + 1.0) / (c.p + 1.0) - 0.5 * s * s;
            if constexpr (std::is_same_v<T, PurePower>) return std::pow(s, c.p + 1.0) / (c.p + 1.0);
            if constexpr (std::is_same_v<T, ShiftedPower>)
                return (std::pow(s + c.a, c.p + 1.0) - std::pow(c.a, c.p + 1.0)) / (c.p + 1.0);
        },
        m);
}

inline double core_b(const CoreModel& m)
{
    return std::visit(
        [](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, PowerDifference>) return 1.0;
            (void)c;
            return 0.0;
        },
        m);
}

inline void require_positive(double v, const char* what)
{
    if (!(v > 0.0)) throw invalid_breakpoint(std::string(what) + " must be > 0");
}

} // namespace detail

/// Immutable evaluable bundle (f, f', F) with the structural constants b and
/// beta and the kink locations of piecewise models.
class Nonlinearity {
public:
    explicit Nonlinearity(NonlinearityModel model) : model_(std::move(model))
    {
        validate();
        b_ = compute_b();
        beta_ = compute_beta();
        kinks_ = compute_kinks();
    }

    /// Odd-extended nonlinearity. At a kink the branch selection is: left
    /// branch at alpha1, right branch at alpha1+eps (the values agree).
    double f(double s) const
    {
        if (s < 0.0) return -raw_f(-s);
        return raw_f(s);
    }

    /// Primitive with F(0) = 0; even by the odd extension of f.
    double F(double s) const { return raw_F(std::abs(s)); }

    /// Derivative following the same branch-selection rule as f. One-sided
    /// values at kinks are available via df_minus / df_plus.
    double df(double s) const
    {
        double a = std::abs(s);
        return raw_df(a, /*prefer_left=*/true);
    }

    double df_minus(double s) const { return raw_df(std::abs(s), true); }
    double df_plus(double s) const { return raw_df(std::abs(s), false); }

    double b() const { return b_; }
    double beta() const { return beta_; }
    const std::vector<double>& kinks() const { return kinks_; }
    const NonlinearityModel& model() const { return model_; }

    bool has_kink_at(double s) const
    {
        double a = std::abs(s);
        for (double k : kinks_)
            if (std::abs(a - k) < 1e-12 * (1.0 + k)) return true;
        return false;
    }

    /// FNV-1a over the model's defining constants; trajectory provenance.
    std::uint64_t signature() const;

private:
    void validate() const
    {
        if (const auto* pm = std::get_if<PiecewiseMu>(&model_)) {
            if (!(pm->alpha1 > 0.0) || !(pm->eps > 0.0))
                throw invalid_breakpoint("piecewise-mu: alpha1 and eps must be > 0");
            detail::require_positive(pm->lam, "lambda");
            detail::require_positive(pm->mu, "mu");
        } else if (const auto* pa = std::get_if<PiecewiseA>(&model_)) {
            if (!(pa->alpha1 > 0.0) || !(pa->eps > 0.0))
                throw invalid_breakpoint("piecewise-a: alpha1 and eps must be > 0");
            detail::require_positive(pa->lam, "lambda");
            if (!(pa->alpha1 + pa->eps + pa->a > 0.0))
                throw invalid_breakpoint("piecewise-a: outer branch needs s + a > 0");
        } else if (const auto* sm = std::get_if<ScaledModel>(&model_)) {
            detail::require_positive(sm->lam, "lambda");
            detail::require_positive(sm->mu, "mu");
        }
    }

    double raw_f(double s) const
    {
        return std::visit(
            [&, s](const auto& m) -> double {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, ScaledModel>)
                    return m.lam * m.lam * detail::core_f(m.base, s / m.mu);
                else if constexpr (std::is_same_v<T, PiecewiseMu>) {
                    if (s <= m.alpha1) return detail::core_f(m.inner, s);
                    if (s < m.alpha1 + m.eps) return bridge_mu(m, s);
                    return m.lam * m.lam * detail::core_f(m.outer, s / m.mu);
                } else if constexpr (std::is_same_v<T, PiecewiseA>) {
                    if (s <= m.alpha1) return detail::core_f(m.inner, s);
                    if (s < m.alpha1 + m.eps) return bridge_a(m, s);
                    return m.lam * m.lam * std::pow(s + m.a, m.p);
                } else {
                    return detail::core_f(CoreModel{m}, s);
                }
            },
            model_);
    }

    double raw_df(double s, bool prefer_left) const
    {
        return std::visit(
            [&, s, prefer_left](const auto& m) -> double {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, ScaledModel>)
                    return m.lam * m.lam / m.mu * detail::core_df(m.base, s / m.mu);
                else if constexpr (std::is_same_v<T, PiecewiseMu>) {
                    bool left_of_a1 = prefer_left ? (s <= m.alpha1) : (s < m.alpha1);
                    bool left_of_a1e = prefer_left ? (s <= m.alpha1 + m.eps) : (s < m.alpha1 + m.eps);
                    if (left_of_a1) return detail::core_df(m.inner, s);
                    if (left_of_a1e) return bridge_mu_slope(m);
                    return m.lam * m.lam / m.mu * detail::core_df(m.outer, s / m.mu);
                } else if constexpr (std::is_same_v<T, PiecewiseA>) {
                    bool left_of_a1 = prefer_left ? (s <= m.alpha1) : (s < m.alpha1);
                    bool left_of_a1e = prefer_left ? (s <= m.alpha1 + m.eps) : (s < m.alpha1 + m.eps);
                    if (left_of_a1) return detail::core_df(m.inner, s);
                    if (left_of_a1e) return bridge_a_slope(m);
                    return m.lam * m.lam * m.p * std::pow(s + m.a, m.p - 1.0);
                } else {
                    return detail::core_df(CoreModel{m}, s);
                }
            },
            model_);
    }

    double raw_F(double s) const
    {
        return std::visit(
            [&, s](const auto& m) -> double {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, ScaledModel>)
                    return m.lam * m.lam * m.mu * detail::core_F(m.base, s / m.mu);
                else if constexpr (std::is_same_v<T, PiecewiseMu>) {
                    if (s <= m.alpha1) return detail::core_F(m.inner, s);
                    double F_a1 = detail::core_F(m.inner, m.alpha1);
                    double f_a1 = detail::core_f(m.inner, m.alpha1);
                    if (s < m.alpha1 + m.eps)
                        return F_a1 + (s - m.alpha1) * 0.5 * (f_a1 + bridge_mu(m, s));
                    double f_rt = m.lam * m.lam * detail::core_f(m.outer, (m.alpha1 + m.eps) / m.mu);
                    double F_a1e = F_a1 + m.eps * 0.5 * (f_a1 + f_rt);
                    double Fo = m.lam * m.lam * m.mu * detail::core_F(m.outer, s / m.mu);
                    double Fo0 = m.lam * m.lam * m.mu * detail::core_F(m.outer, (m.alpha1 + m.eps) / m.mu);
                    return F_a1e + Fo - Fo0;
                } else if constexpr (std::is_same_v<T, PiecewiseA>) {
                    if (s <= m.alpha1) return detail::core_F(m.inner, s);
                    double F_a1 = detail::core_F(m.inner, m.alpha1);
                    double f_a1 = detail::core_f(m.inner, m.alpha1);
                    if (s < m.alpha1 + m.eps)
                        return F_a1 + (s - m.alpha1) * 0.5 * (f_a1 + bridge_a(m, s));
                    double f_rt = m.lam * m.lam * std::pow(m.alpha1 + m.eps + m.a, m.p);
                    double F_a1e = F_a1 + m.eps * 0.5 * (f_a1 + f_rt);
                    double c = m.lam * m.lam / (m.p + 1.0);
                    return F_a1e + c * (std::pow(s + m.a, m.p + 1.0) - std::pow(m.alpha1 + m.eps + m.a, m.p + 1.0));
                } else {
                    return detail::core_F(CoreModel{m}, s);
                }
            },
            model_);
    }

    static double bridge_mu(const PiecewiseMu& m, double s)
    {
        double f_l = detail::core_f(m.inner, m.alpha1);
        return f_l + bridge_mu_slope(m) * (s - m.alpha1);
    }
    static double bridge_mu_slope(const PiecewiseMu& m)
    {
        double f_l = detail::core_f(m.inner, m.alpha1);
        double f_r = m.lam * m.lam * detail::core_f(m.outer, (m.alpha1 + m.eps) / m.mu);
        return (f_r - f_l) / m.eps;
    }
    static double bridge_a(const PiecewiseA& m, double s)
    {
        double f_l = detail::core_f(m.inner, m.alpha1);
        return f_l + bridge_a_slope(m) * (s - m.alpha1);
    }
    static double bridge_a_slope(const PiecewiseA& m)
    {
        double f_l = detail::core_f(m.inner, m.alpha1);
        double f_r = m.lam * m.lam * std::pow(m.alpha1 + m.eps + m.a, m.p);
        return (f_r - f_l) / m.eps;
    }

    double compute_b() const
    {
        return std::visit(
            [](const auto& m) -> double {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, ScaledModel>) return m.mu * detail::core_b(m.base);
                else if constexpr (std::is_same_v<T, PiecewiseMu>) return detail::core_b(m.inner);
                else if constexpr (std::is_same_v<T, PiecewiseA>) return detail::core_b(m.inner);
                else return detail::core_b(CoreModel{m});
            },
            model_);
    }

    double compute_beta() const
    {
        if (b_ == 0.0) return 0.0; // F >= 0 everywhere; degenerate beta = b = 0
        double lo = b_;
        if (!(raw_F(lo) < 0.0)) return lo;
        double hi = 2.0 * b_;
        const double cap = 1e9 * (1.0 + b_);
        while (raw_F(hi) <= 0.0) {
            hi *= 2.0;
            if (hi > cap) throw no_positive_part("F never becomes positive");
        }
        auto g = [this](double s) { return raw_F(s); };
        double lo2 = hi / 2.0;
        if (raw_F(lo2) > 0.0) lo2 = lo;
        return bisect(g, lo2, hi, 200, 0.0);
    }

    std::vector<double> compute_kinks() const
    {
        if (const auto* pm = std::get_if<PiecewiseMu>(&model_))
            return {pm->alpha1, pm->alpha1 + pm->eps};
        if (const auto* pa = std::get_if<PiecewiseA>(&model_))
            return {pa->alpha1, pa->alpha1 + pa->eps};
        return {};
    }

    NonlinearityModel model_;
    double b_ = 0.0;
    double beta_ = 0.0;
    std::vector<double> kinks_;
};

namespace detail {

inline void hash_mix(std::uint64_t& h, double v)
{
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    h ^= bits;
    h *= 0x100000001b3ULL;
}

inline void hash_core(std::uint64_t& h, const CoreModel& m)
{
    std::visit(
        [&h](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, PowerDifference>) {
                hash_mix(h, 1.0);
                hash_mix(h, c.p);
            } else if constexpr (std::is_same_v<T, PurePower>) {
                hash_mix(h, 2.0);
                hash_mix(h, c.p);
            } else {
                hash_mix(h, 3.0);
                hash_mix(h, c.p);
                hash_mix(h, c.a);
            }
        },
        m);
}

} // namespace detail

inline std::uint64_t Nonlinearity::signature() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::visit(
        [&h](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ScaledModel>) {
                detail::hash_mix(h, 4.0);
                detail::hash_core(h, m.base);
                detail::hash_mix(h, m.lam);
                detail::hash_mix(h, m.mu);
            } else if constexpr (std::is_same_v<T, PiecewiseMu>) {
                detail::hash_mix(h, 5.0);
                detail::hash_core(h, m.inner);
                detail::hash_core(h, m.outer);
                detail::hash_mix(h, m.alpha1);
                detail::hash_mix(h, m.eps);
                detail::hash_mix(h, m.lam);
                detail::hash_mix(h, m.mu);
            } else if constexpr (std::is_same_v<T, PiecewiseA>) {
                detail::hash_mix(h, 6.0);
                detail::hash_core(h, m.inner);
                detail::hash_mix(h, m.alpha1);
                detail::hash_mix(h, m.eps);
                detail::hash_mix(h, m.lam);
                detail::hash_mix(h, m.a);
                detail::hash_mix(h, m.p);
            } else {
                detail::hash_core(h, CoreModel{m});
            }
        },
        model_);
    return h;
}

/// Numeric beta from the public contract: bracket on [b, s_hi], doubling s_hi
/// until F > 0, then bisect. Matches the closed form ((p+1)/2)^(1/(p-1)) for
/// PowerDifference.
inline double find_beta(const Nonlinearity& nl)
{
    double b = nl.b();
    if (b == 0.0) return 0.0;
    if (!(nl.F(b) < 0.0)) return b;
    double hi = 2.0 * b;
    const double cap = 1e9 * (1.0 + b);
    while (nl.F(hi) <= 0.0) {
        hi *= 2.0;
        if (hi > cap) throw no_positive_part("find_beta: F never becomes positive");
    }
    return bisect([&](double s) { return nl.F(s); }, b, hi, 200, 0.0);
}

/// Piecewise assembly per the magnitude-change construction; the bridge runs
/// from (alpha1, f1(alpha1)) to (alpha1+eps, lam^2 f2((alpha1+eps)/mu)) so the
/// assembled function is continuous.
inline Nonlinearity build_fmu(const CoreModel& f1, const CoreModel& f2, double alpha1, double eps,
                              double lam, double mu)
{
    if (!(alpha1 > 0.0) || !(eps > 0.0)) throw invalid_breakpoint("build_fmu: alpha1, eps must be > 0");
    Nonlinearity inner{std::visit([](auto c) { return NonlinearityModel{c}; }, f1)};
    if (!(alpha1 > inner.beta()))
        throw invalid_breakpoint("build_fmu: alpha1 must exceed beta(f1)");
    return Nonlinearity{PiecewiseMu{f1, f2, alpha1, eps, lam, mu}};
}

inline Nonlinearity build_fa(const CoreModel& f1, double alpha1, double eps, double lam, double a,
                             double p)
{
    if (!(alpha1 > 0.0) || !(eps > 0.0)) throw invalid_breakpoint("build_fa: alpha1, eps must be > 0");
    Nonlinearity inner{std::visit([](auto c) { return NonlinearityModel{c}; }, f1)};
    if (!(alpha1 > inner.beta()))
        throw invalid_breakpoint("build_fa: alpha1 must exceed beta(f1)");
    return Nonlinearity{PiecewiseA{f1, alpha1, eps, lam, a, p}};
}

// -------------------------------------------------------------------------
// Advisory hypothesis checks. Failures never block downstream runs.

struct GridSpec {
    double s_max = 10.0;
    int n = 400;
};

struct HypothesisReport {
    bool h1_pass = false;
    std::string h1_witness;
    bool h2_pass = false;
    double h2_worst_margin = 0.0; // min over grid of (F/f)' - (N-2)/(2N), s > beta
    bool h3_monotone_pass = false;
    double h3_value = std::numeric_limits<double>::quiet_NaN(); // (s f'/f)(beta)
    bool h3_value_pass = false;
    bool h3_value_evaluable = false;
    std::string notes;
};

/// (F/f)'(s) by the quotient rule with exact f, f', F.
inline double Ff_prime(const Nonlinearity& nl, double s)
{
    double f = nl.f(s);
    return 1.0 - nl.F(s) * nl.df(s) / (f * f);
}

inline HypothesisReport check_hypotheses(const Nonlinearity& nl, double N, GridSpec grid = {})
{
    HypothesisReport rep;
    double b = nl.b(), beta = nl.beta();

    // H1: sign pattern around b and beta.
    rep.h1_pass = true;
    if (std::abs(nl.f(0.0)) > 1e-12) {
        rep.h1_pass = false;
        rep.h1_witness = "f(0) != 0";
    }
    if (b > 0.0) {
        for (double s : {0.25 * b, 0.5 * b, 0.75 * b})
            if (!(nl.f(s) < 0.0)) {
                rep.h1_pass = false;
                rep.h1_witness = "f not negative on (0,b)";
            }
        if (!(nl.f(b + 1e-6 * (1.0 + b)) > 0.0)) {
            rep.h1_pass = false;
            rep.h1_witness = "f not positive just above b";
        }
        if (!(beta >= b)) {
            rep.h1_pass = false;
            rep.h1_witness = "beta < b";
        }
    } else {
        if (!(nl.f(0.5) > 0.0)) {
            rep.h1_pass = false;
            rep.h1_witness = "f not positive for s > 0 with b = 0";
        }
        rep.notes += "b = 0: (H1) negativity clause near 0 is vacuous/unsatisfied; ";
    }

    // Grid on (b, s_max], skipping kinks and zeros of f. The H2 clause only
    // samples the part above beta.
    double span = grid.s_max - b;
    std::vector<double> pts;
    for (int i = 1; i <= grid.n; ++i) {
        double s = b + span * double(i) / double(grid.n);
        if (nl.has_kink_at(s)) continue;
        if (std::abs(nl.f(s)) < 1e-10) continue;
        pts.push_back(s);
    }

    // H2: (F/f)'(s) > (N-2)/(2N) for s > beta.
    double bound = (N - 2.0) / (2.0 * N);
    double worst = std::numeric_limits<double>::infinity();
    int n_h2 = 0;
    for (double s : pts) {
        if (s <= beta) continue;
        worst = std::min(worst, Ff_prime(nl, s) - bound);
        ++n_h2;
    }
    rep.h2_worst_margin = worst;
    rep.h2_pass = n_h2 > 0 && worst > 0.0;

    // H3 monotone clause: s f'/f non-increasing on (b, s_max].
    auto q = [&](double s) { return s * nl.df(s) / nl.f(s); };
    bool mono = true;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (double s : pts) {
        double v = q(s);
        if (!std::isnan(prev) && v > prev + 1e-9 * (1.0 + std::abs(prev))) mono = false;
        prev = v;
    }
    rep.h3_monotone_pass = mono && !pts.empty();

    // H3 value clause: (s f'/f)(beta) < N/(N-2).
    if (beta > 0.0 && std::abs(nl.f(beta)) > 1e-12) {
        rep.h3_value = q(beta);
        rep.h3_value_evaluable = true;
        rep.h3_value_pass = rep.h3_value < N / (N - 2.0);
    } else {
        rep.notes += "H3 value clause not evaluable (beta = 0 or f(beta) = 0); ";
    }
    return rep;
}

} // namespace radial
