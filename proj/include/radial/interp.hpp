#pragma once

// Small interpolation and finite-difference toolbox: Chebyshev-Lobatto nodes,
// monotone (Fritsch-Carlson) cubic interpolation, Fornberg FD weights on
// arbitrary nodes, and a deterministic scalar bisection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace radial {

/// Chebyshev-Lobatto nodes on [a, b], ascending, endpoints included.
inline std::vector<double> chebyshev_lobatto(double a, double b, int n)
{
    if (n < 2) throw std::invalid_argument("chebyshev_lobatto: n < 2");
    std::vector<double> x(static_cast<std::size_t>(n));
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < n; ++i) {
        double t = std::cos(pi * double(n - 1 - i) / double(n - 1)); // -1..1 ascending
        x[static_cast<std::size_t>(i)] = 0.5 * (a + b) + 0.5 * (b - a) * t;
    }
    x.front() = a;
    x.back() = b;
    return x;
}

/// Monotonicity-preserving piecewise cubic (Fritsch-Carlson slopes).
class Pchip {
public:
    Pchip() = default;

    Pchip(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y))
    {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw std::invalid_argument("Pchip: need >= 2 nodes");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1])) throw std::invalid_argument("Pchip: x not strictly increasing");
        m_.resize(n);
        if (n == 2) {
            m_[0] = m_[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
            return;
        }
        std::vector<double> h(n - 1), d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            d[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                double w1 = 2.0 * h[i] + h[i - 1];
                double w2 = h[i] + 2.0 * h[i - 1];
                m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        m_[0] = edge_slope(h[0], h[1], d[0], d[1]);
        m_[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    }

    double operator()(double xq) const { return eval(xq, false); }
    double derivative(double xq) const { return eval(xq, true); }

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }

private:
    static double edge_slope(double h0, double h1, double d0, double d1)
    {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
        return m;
    }

    double eval(double xq, bool deriv) const
    {
        if (xq < x_.front() - 1e-12 * (1.0 + std::abs(x_.front())) ||
            xq > x_.back() + 1e-12 * (1.0 + std::abs(x_.back())))
            throw std::out_of_range("Pchip: query outside data range");
        xq = std::clamp(xq, x_.front(), x_.back());
        auto it = std::upper_bound(x_.begin(), x_.end(), xq);
        std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        if (i >= x_.size() - 1) i = x_.size() - 2;
        double h = x_[i + 1] - x_[i];
        double t = (xq - x_[i]) / h;
        double t2 = t * t, t3 = t2 * t;
        double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        if (!deriv)
            return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
        double g00 = (6 * t2 - 6 * t) / h, g10 = 3 * t2 - 4 * t + 1;
        double g01 = (-6 * t2 + 6 * t) / h, g11 = 3 * t2 - 2 * t;
        return g00 * y_[i] + g10 * m_[i] + g01 * y_[i + 1] + g11 * m_[i + 1];
    }

    std::vector<double> x_, y_, m_;
};

/// Fornberg weights for the m-th derivative at x0 over the given nodes.
inline std::vector<double> fd_weights(double x0, const double* x, int n, int m)
{
    std::vector<double> c(static_cast<std::size_t>(n) * static_cast<std::size_t>(m + 1), 0.0);
    auto C = [&](int i, int j) -> double& { return c[static_cast<std::size_t>(i) * static_cast<std::size_t>(m + 1) + static_cast<std::size_t>(j)]; };
    double c1 = 1.0, c4 = x[0] - x0;
    C(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0, c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
                C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
            C(j, 0) = c4 * C(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = C(i, m);
    return w;
}

/// First derivative of sampled data at index i (5-point Fornberg stencil).
inline double fd_derivative(const std::vector<double>& x, const std::vector<double>& y, std::size_t i, int width = 5)
{
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("fd_derivative: need >= 2 samples");
    std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(width), n);
    std::size_t lo = (i >= w / 2) ? i - w / 2 : 0;
    if (lo + w > n) lo = n - w;
    auto ws = fd_weights(x[i], x.data() + lo, static_cast<int>(w), 1);
    double d = 0.0;
    for (std::size_t k = 0; k < w; ++k) d += ws[k] * y[lo + k];
    return d;
}

/// Bisection on a bracketing interval; f(lo) and f(hi) must differ in sign.
template <class F>
double bisect(F&& f, double lo, double hi, int iters = 200, double xtol = 0.0)
{
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) throw std::invalid_argument("bisect: no sign change on bracket");
    for (int it = 0; it < iters; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        if (xtol > 0.0 && hi - lo < xtol) break;
    }
    return 0.5 * (lo + hi);
}

/// Golden-section minimizer for a unimodal scalar function.
template <class F>
double golden_min(F&& f, double lo, double hi, double xtol = 1e-10)
{
    const double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace radial
