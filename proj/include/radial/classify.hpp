#pragma once

// Verdict assignment for initial values. A trajectory's transversal zeros of
// u decide its deepest confirmed nodal class; the negative-energy trap
// (I < 0 while |u| < beta) is the rigorous early stop: once it fires the
// solution can never vanish again, since I is non-increasing and I >= 0 at
// any zero of u. Verdicts:
//   G(z+1)  double zero after z transversal crossings (bound state),
//   P(1)    trap or asymptote-to-b with no crossing,
//   N(z)    z >= 1 crossings (the later trap/asymptote fate is recorded
//           separately in `fate`),
//   Undetermined  r_max reached with the fate still open, or step failure.

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "radial/parallel.hpp"
#include "radial/shooting.hpp"

namespace radial {

enum class VerdictKind { N, G, P, Undetermined };

inline const char* to_string(VerdictKind v)
{
    switch (v) {
        case VerdictKind::N: return "N";
        case VerdictKind::G: return "G";
        case VerdictKind::P: return "P";
        case VerdictKind::Undetermined: return "U";
    }
    return "?";
}

enum class Fate { Open, Trapped, AsymptoteToB, DoubleZero };

struct Classification {
    VerdictKind verdict = VerdictKind::Undetermined;
    int k = 0;     // level reported with the verdict letter
    int zeros = 0; // transversal zeros of u
    double alpha = 0.0;
    Fate fate = Fate::Open;
    std::vector<std::pair<double, double>> rho; // (rho_i, m_i)
    std::vector<double> z;                      // crossing radii
    std::vector<double> j_at_zero;              // |u'|/r at each crossing
    std::optional<std::pair<double, double>> trap; // (r, I) at the trap
    Termination termination = Termination::ReachedRmax;
    double final_r = 0.0, final_u = 0.0, final_du = 0.0;

    /// Decided membership in the k-th crossing class; nullopt when the
    /// trajectory's fate leaves it open.
    std::optional<bool> membership_N(int level) const
    {
        if (zeros >= level) return true;
        if (fate == Fate::Trapped || fate == Fate::AsymptoteToB || fate == Fate::DoubleZero)
            return false;
        return std::nullopt;
    }
};

namespace detail {

inline Classification fold_events(const Trajectory& t, const Nonlinearity& nl, const ProblemParams& P,
                                  double alpha)
{
    Classification c;
    c.alpha = alpha;
    c.termination = t.termination;
    c.final_r = t.r_final;
    c.final_u = t.y_final[0];
    c.final_du = t.y_final[1];
    for (const auto& e : t.events) {
        if (e.kind == EventKind::ZeroOfU && std::abs(e.du) > P.tol_du) {
            ++c.zeros;
            c.z.push_back(e.r);
            c.j_at_zero.push_back(std::abs(e.du) / e.r);
        } else if (e.kind == EventKind::ZeroOfDu) {
            c.rho.push_back({e.r, e.u});
        } else if (e.kind == EventKind::NegativeEnergyTrap && !c.trap) {
            c.trap = {{e.r, energy_at(nl, e.u, e.du)}};
        }
    }

    switch (t.termination) {
        case Termination::DoubleZero:
            c.fate = Fate::DoubleZero;
            c.verdict = VerdictKind::G;
            c.k = c.zeros + 1;
            return c;
        case Termination::Trapped:
            c.fate = Fate::Trapped;
            break;
        case Termination::ReachedRmax: {
            double b = nl.b();
            if (b > 0.0) {
                double target = (c.zeros % 2 == 0 ? b : -b);
                if (std::abs(c.final_u - target) < 1e-6 && std::abs(c.final_du) < 1e-8)
                    c.fate = Fate::AsymptoteToB;
            }
            break;
        }
        case Termination::StepFailure:
            c.verdict = VerdictKind::Undetermined;
            c.k = c.zeros;
            return c;
    }

    if (c.zeros >= 1) {
        c.verdict = VerdictKind::N;
        c.k = c.zeros;
    } else if (c.fate == Fate::Trapped || c.fate == Fate::AsymptoteToB) {
        c.verdict = VerdictKind::P;
        c.k = 1;
    } else {
        c.verdict = VerdictKind::Undetermined;
        c.k = 0;
    }
    return c;
}

} // namespace detail

inline Classification classify_alpha(const Nonlinearity& nl, const ProblemParams& P, double alpha)
{
    if (!(alpha > 0.0)) throw std::invalid_argument("classify_alpha: alpha must be > 0");
    Trajectory t = integrate(nl, P, {0.0, alpha, 0.0}, {.trap_stop = true});
    return detail::fold_events(t, nl, P, alpha);
}

/// Classification of an interior-start solution (used by the fixed-slope
/// launches of the corollary experiments).
inline Classification classify_ic(const Nonlinearity& nl, const ProblemParams& P,
                                  const InitialCondition& ic)
{
    Trajectory t = integrate(nl, P, ic, {.trap_stop = true});
    return detail::fold_events(t, nl, P, ic.alpha);
}

struct ScanRow {
    double alpha = 0.0;
    VerdictKind verdict = VerdictKind::Undetermined;
    int k = 0;
    int zeros = 0;
    Fate fate = Fate::Open;
    double m1 = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> j_at_zero;
    double runtime_ms = 0.0;

    std::optional<bool> membership_N(int level) const
    {
        if (zeros >= level) return true;
        if (fate == Fate::Trapped || fate == Fate::AsymptoteToB || fate == Fate::DoubleZero)
            return false;
        return std::nullopt;
    }
};

inline std::vector<ScanRow> scan_range(const Nonlinearity& nl, const ProblemParams& P,
                                       double alpha_lo, double alpha_hi, int n, int jobs = 1)
{
    if (!(alpha_lo < alpha_hi) || n < 2) throw std::invalid_argument("scan_range: need alpha_lo < alpha_hi, n >= 2");
    std::vector<ScanRow> rows(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t i) {
        double a = alpha_lo + (alpha_hi - alpha_lo) * double(i) / double(n - 1);
        auto t0 = std::chrono::steady_clock::now();
        Classification c = classify_alpha(nl, P, a);
        auto t1 = std::chrono::steady_clock::now();
        ScanRow row;
        row.alpha = a;
        row.verdict = c.verdict;
        row.k = c.k;
        row.zeros = c.zeros;
        row.fate = c.fate;
        row.j_at_zero = c.j_at_zero;
        if (!c.rho.empty()) row.m1 = c.rho.front().second;
        row.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        rows[i] = row;
    });
    return rows;
}

struct bracket_invalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct non_convergence : std::runtime_error {
    double offending_alpha;
    non_convergence(const std::string& msg, double a) : std::runtime_error(msg), offending_alpha(a) {}
};

struct BoundStateRecord {
    double alpha_star = 0.0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    int k = 1;
    int iterations = 0;
    Classification witness;          // classification at alpha_star
    double final_u = 0.0, final_du = 0.0, final_r = 0.0;
};

/// Bisect the boundary of the k-th crossing class between an inside point and
/// a decided outside point. tol_alpha <= 0 bisects to ULP resolution.
/// Levels above 8 are out of the supported desk scale.
inline BoundStateRecord find_boundary(const Nonlinearity& nl, const ProblemParams& P,
                                      double alpha_in_N, double alpha_co_N, int k,
                                      double tol_alpha = 1e-10)
{
    if (k < 1 || k > 8) throw std::invalid_argument("find_boundary: level must be in 1..8");
    auto cls = [&](double a) { return classify_alpha(nl, P, a); };
    Classification cn = cls(alpha_in_N);
    Classification cc = cls(alpha_co_N);
    if (cn.membership_N(k) != std::optional<bool>(true))
        throw bracket_invalid("find_boundary: first argument does not classify inside N(k)");
    if (cc.membership_N(k) != std::optional<bool>(false))
        throw bracket_invalid("find_boundary: second argument does not classify outside N(k)");

    double an = alpha_in_N, ac = alpha_co_N;
    int iters = 0;
    auto width = [&]() { return std::abs(an - ac); };
    Classification best = std::abs(std::max(std::abs(cn.final_u), std::abs(cn.final_du))) <
                                  std::abs(std::max(std::abs(cc.final_u), std::abs(cc.final_du)))
                              ? cn
                              : cc;
    while (width() > std::max(tol_alpha, 0.0)) {
        double mid = 0.5 * (an + ac);
        if (mid == an || mid == ac) break; // ULP floor
        Classification cm = cls(mid);
        auto m = cm.membership_N(k);
        if (!m.has_value())
            throw non_convergence("find_boundary: undetermined verdict inside bracket", mid);
        if (*m)
            an = mid;
        else
            ac = mid;
        double score = std::max(std::abs(cm.final_u), std::abs(cm.final_du));
        if (score < std::max(std::abs(best.final_u), std::abs(best.final_du))) best = cm;
        ++iters;
        if (iters > 200) throw non_convergence("find_boundary: too many iterations", mid);
    }

    BoundStateRecord rec;
    rec.bracket_lo = std::min(an, ac);
    rec.bracket_hi = std::max(an, ac);
    rec.alpha_star = 0.5 * (an + ac);
    rec.k = k;
    rec.iterations = iters;
    rec.witness = cls(rec.alpha_star);
    double wscore = std::max(std::abs(rec.witness.final_u), std::abs(rec.witness.final_du));
    if (std::max(std::abs(best.final_u), std::abs(best.final_du)) < wscore) rec.witness = best;
    rec.final_u = rec.witness.final_u;
    rec.final_du = rec.witness.final_du;
    rec.final_r = rec.witness.final_r;
    return rec;
}

/// rho/Z markers of a classified trajectory.
struct Markers {
    std::vector<std::pair<double, double>> rho; // (rho_i, m_i)
    std::vector<double> z;
};

inline Markers markers(const Trajectory& t)
{
    Markers m;
    for (const auto& e : t.events) {
        if (e.kind == EventKind::ZeroOfDu) m.rho.push_back({e.r, e.u});
        if (e.kind == EventKind::ZeroOfU) m.z.push_back(e.r);
    }
    return m;
}

} // namespace radial
