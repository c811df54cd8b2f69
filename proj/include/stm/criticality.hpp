#pragma once

// Roots of F_l: m_l(s) at fixed s, and the inverse s(m) in the l = 1 sector.
// F is increasing in m and decreasing in s, so bisection is certifiable.

#include <cmath>
#include <functional>
#include <string>

#include "stm/errors.hpp"
#include "stm/ffunc.hpp"

namespace stm {

struct RootReport {
    double value = 0.0;
    double residual = 0.0;  // |F| at the returned point
    int iterations = 0;
};

struct CriticalPair {
    SectorIndex sector;
    MassParam m_star;       // m_l(0)
    MassParam m_star_star;  // m_l(1)
    double residual_star = 0.0;
    double residual_star_star = 0.0;
};

inline constexpr double kRootWidth = 1e-12;
inline constexpr double kMassFloor = 1e-6;
inline constexpr double kMassCeiling = 1e3;

namespace detail {

// Bisection for an increasing function with g(lo) < 0 < g(hi).
inline RootReport bisect_increasing(const std::function<double(double)>& g, double lo, double hi, double width) {
    RootReport r;
    while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const double v = g(mid);
        ++r.iterations;
        if (v == 0.0) {
            lo = hi = mid;
            break;
        }
        (v < 0 ? lo : hi) = mid;
    }
    r.value = 0.5 * (lo + hi);
    r.residual = std::abs(g(r.value));
    return r;
}

}  // namespace detail

inline RootReport m_of_s(SectorIndex sec, double s, const quad::QuadSpec& spec = {}) {
    require_odd(sec, "m_of_s");
    detail::check_s(s, "m_of_s");
    auto g = [&](double m) { return f_total(sec, MassParam(m), s, spec); };
    if (g(kMassFloor) >= 0.0)
        throw ConvergenceError("m_of_s: F is not negative at m = 1e-6; no bracket for the root");
    double lo = kMassFloor, hi = 1e-4;
    while (g(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > kMassCeiling) throw ConvergenceError("m_of_s: no sign change of F below m = 1e3");
    }
    return detail::bisect_increasing(g, lo, hi, kRootWidth);
}

inline CriticalPair critical_pair(SectorIndex sec, const quad::QuadSpec& spec = {}) {
    require_odd(sec, "critical_pair");
    const auto lo = m_of_s(sec, 0.0, spec);
    const auto hi = m_of_s(sec, 1.0, spec);
    return {sec, MassParam(lo.value), MassParam(hi.value), lo.residual, hi.residual};
}

// s(m) for l = 1.  Outside (m*, m**) this is a RegimeError naming the bound;
// within the root tolerance of an endpoint it returns 0 or 1 exactly.
inline RootReport s_of_m(MassParam m, const quad::QuadSpec& spec = {}) {
    const SectorIndex one{1, 0};
    auto g = [&](double s) { return f_total(one, m, s, spec); };
    const double f0 = g(0.0);
    if (f0 < 0.0) {
        const auto star = m_of_s(one, 0.0, spec);
        if (star.value - m.m <= kRootWidth) return {0.0, std::abs(f0), 0};
        throw RegimeError("s_of_m: m = " + std::to_string(m.m) + " is below m* = " + std::to_string(star.value) +
                          " (lower critical mass); no resonance exponent");
    }
    const double f1 = g(1.0);
    if (f1 > 0.0) {
        const auto star2 = m_of_s(one, 1.0, spec);
        if (m.m - star2.value <= kRootWidth) return {1.0, std::abs(f1), 0};
        throw RegimeError("s_of_m: m = " + std::to_string(m.m) + " is above m** = " + std::to_string(star2.value) +
                          " (upper critical mass); no resonance exponent");
    }
    // g is decreasing in s; bisect -g.
    auto r = detail::bisect_increasing([&](double s) { return -g(s); }, 0.0, 1.0, kRootWidth);
    // Near an end, snap when m is within the root tolerance of the critical mass;
    // ds/dm is large there, so a root-width miss in m shows up as s ~ 1e-6.
    if (r.value < 1e-4 && std::abs(m.m - m_of_s(one, 0.0, spec).value) <= kRootWidth) return {0.0, std::abs(f0), r.iterations};
    if (r.value > 1.0 - 1e-4 && std::abs(m.m - m_of_s(one, 1.0, spec).value) <= kRootWidth)
        return {1.0, std::abs(f1), r.iterations};
    return r;
}

}  // namespace stm
