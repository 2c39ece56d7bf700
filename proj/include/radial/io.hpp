#pragma once

// CSV emission. Numbers print with 17 significant digits ('.' decimal,
// C locale) so goldens survive a round trip bit-stably.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "radial/classify.hpp"
#include "radial/functionals.hpp"

namespace radial {

inline std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_opt(std::optional<double> v)
{
    return v ? fmt17(*v) : std::string{};
}

/// `r,u,du,I` rows at the given stride over accepted-step endpoints.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& t, const Nonlinearity& nl,
                                 int stride = 1)
{
    os << "r,u,du,I\n";
    if (stride < 1) stride = 1;
    auto row = [&](double r, double u, double du) {
        os << fmt17(r) << ',' << fmt17(u) << ',' << fmt17(du) << ','
           << fmt17(energy_at(nl, u, du)) << '\n';
    };
    int i = 0;
    for (const auto& seg : t.segments) {
        if (i++ % stride == 0) {
            double theta = 0.0;
            row(seg.r0, Trajectory::eval_rcont(seg.rcont[0], theta),
                Trajectory::eval_rcont(seg.rcont[1], theta));
        }
    }
    row(t.r_final, t.y_final[0], t.y_final[1]);
}

/// `u,J,r` phase-curve rows.
inline void write_phase_csv(std::ostream& os, const PhaseCurve& pc)
{
    os << "u,J,r\n";
    for (const auto& p : pc.points)
        os << fmt17(p.u) << ',' << fmt17(p.J) << ',' << fmt17(p.r) << '\n';
}

/// `alpha,verdict,k,m1,runtime_ms` scan rows (m1 empty when absent).
inline void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows)
{
    os << "alpha,verdict,k,m1,runtime_ms\n";
    for (const auto& r : rows) {
        os << fmt17(r.alpha) << ',' << to_string(r.verdict) << ',' << r.k << ','
           << (std::isnan(r.m1) ? std::string{} : fmt17(r.m1)) << ',' << fmt17(r.runtime_ms)
           << '\n';
    }
}

/// `s,r,J,I,H,P,W,psi1,psi2r` functional samples over one arc; empty fields
/// outside the partial domains.
inline void write_functionals_csv(std::ostream& os, const MonotoneArc& arc, const Nonlinearity& nl,
                                  double N)
{
    os << "s,r,J,I,H,P,W,psi1,psi2r\n";
    for (const auto& smp : arc.samples) {
        double I = 0.5 * smp.r * smp.r * smp.J * smp.J + nl.F(smp.s);
        double H = std::pow(smp.r, 2.0 * (N - 1.0)) * I;
        std::optional<double> Pv;
        if (std::abs(nl.f(smp.s)) >= 1e-8) {
            double f = nl.f(smp.s), F = nl.F(smp.s);
            Pv = std::pow(smp.r, N) * (2.0 * N * (F / f) * smp.J - smp.r * smp.r * smp.J * smp.J - 2.0 * F);
        }
        std::optional<double> Wv;
        if (I > 0.0) Wv = smp.r * std::sqrt(2.0 * I);
        std::optional<double> p1, p2r;
        if (auto psi = psi_roots(nl.df(smp.s) * smp.r * smp.r, N)) {
            p1 = psi->psi1;
            p2r = psi->inv_psi2;
        }
        os << fmt17(smp.s) << ',' << fmt17(smp.r) << ',' << fmt17(smp.J) << ',' << fmt17(I) << ','
           << fmt17(H) << ',' << fmt_opt(Pv) << ',' << fmt_opt(Wv) << ',' << fmt_opt(p1) << ','
           << fmt_opt(p2r) << '\n';
    }
}

} // namespace radial
