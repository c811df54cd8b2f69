#pragma once

// Brute-force reference integrators for the tests.  They share no code with
// the library: Gauss-Legendre nodes come from Newton's method on the
// Legendre recurrence, and panels are fixed, not adaptive.

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

struct Rule {
    std::vector<double> x, w;  // on [-1, 1]
};

inline Rule gauss_legendre(int n) {
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

inline const Rule& rule20() {
    static const Rule r = gauss_legendre(20);
    return r;
}

// Composite Gauss-Legendre on equal panels.
template <class F>
auto composite(F&& f, double a, double b, int panels, const Rule& r = rule20()) {
    using T = decltype(f(a));
    T sum{};
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
        const double c = a + (k + 0.5) * h;
        for (std::size_t i = 0; i < r.x.size(); ++i) sum += r.w[i] * f(c + 0.5 * h * r.x[i]);
    }
    return sum * (0.5 * h);
}

// Geometrically graded panels on [a, b] with a > 0 or a = 0: the integral
// over [lo, b] with lo = b * ratio^panels, panels shrinking towards a.
// Handles integrable algebraic singularities at a = 0.
template <class F>
auto graded(F&& f, double b, int panels, double ratio = 0.5, const Rule& r = rule20()) {
    using T = decltype(f(b));
    T sum{};
    double hi = b;
    for (int k = 0; k < panels; ++k) {
        const double lo = hi * ratio;
        sum += composite(f, lo, hi, 1, r);
        hi = lo;
    }
    return sum;
}

// ∫_0^∞ f by trapezoid in u = ln p: ∫ f(e^u) e^u du over [u_lo, u_hi].
// Exponentially accurate for integrands with algebraic ends.
template <class F>
double log_trapezoid(F&& f, double u_lo, double u_hi, double h) {
    const int n = static_cast<int>(std::ceil((u_hi - u_lo) / h));
    const double step = (u_hi - u_lo) / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double u = u_lo + i * step;
        const double p = std::exp(u);
        sum += (i == 0 || i == n ? 0.5 : 1.0) * f(p) * p;
    }
    return sum * step;
}

// ∫_a^∞ f on log-spaced panels up to a * 10^decades (Gauss-Legendre in ln p),
// with a > 0.
template <class F>
auto log_panels(F&& f, double a, double decades, int panels_per_decade, const Rule& r = rule20()) {
    using T = decltype(f(a));
    const double u0 = std::log(a), u1 = u0 + decades * std::numbers::ln10;
    const int n = static_cast<int>(decades * panels_per_decade);
    return composite([&](double u) -> T { const double p = std::exp(u); return f(p) * p; }, u0, u1, n, r);
}

// Same, on [0, ∞) with decades below and above 1.
template <class F>
auto log_panels_full(F&& f, double decades_below, double decades_above, int panels_per_decade,
                     const Rule& r = rule20()) {
    return log_panels(f, std::pow(10.0, -decades_below), decades_below + decades_above, panels_per_decade, r);
}

}  // namespace oracle
