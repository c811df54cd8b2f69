#pragma once

// F_l(m, s) = F_{l,1}(m) + F_{l,2}(m, s): the function whose zero in s
// defines the resonance exponent.  Three independent ways to get F_{l,2}.

#include <cmath>
#include <numbers>
#include <string>

#include "stm/errors.hpp"
#include "stm/quad.hpp"
#include "stm/specfun.hpp"

namespace stm {

struct MassParam {
    double m;
    explicit MassParam(double v) : m(v) {
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("mass ratio must be finite and > 0");
    }
    double c() const { return m + 1.0; }
    // sqrt(m(m+2))/(m+1), written to stay finite for huge m
    double root() const { return std::sqrt(m / (m + 1.0) * ((m + 2.0) / (m + 1.0))); }
};

enum class FRep { DirectIntegral, Antisymmetrized, Series };

inline const char* to_string(FRep r) {
    switch (r) {
        case FRep::DirectIntegral: return "direct";
        case FRep::Antisymmetrized: return "antisymmetrized";
        case FRep::Series: return "series";
    }
    return "?";
}

inline constexpr int kSeriesTermBudget = 200;

inline double f_diag(MassParam m) { return std::numbers::pi * m.root(); }

namespace detail {

inline void check_s(double s, const char* what) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError(std::string(what) + ": s must lie in [0, 1]");
}

struct SeriesSum {
    double value = 0.0;
    int terms = 0;
    bool converged = false;
};

// -2^{-l} sum_k x^{2k+l} C(2k+l, l) beta_half(k, l) B((s+n+1)/2, (n+1-s)/2)/2,
// n = 2k+l, x = 2/(m+1).  Converged once a geometric bound on the remainder
// is below rel_tol (the ratio limit 1/(m+1)^2 is used when it is the larger);
// terms are cheap, so summing goes on within the budget down to rel_tol/1000,
// which brings the series level with the quadrature representations.
inline SeriesSum offdiag_series(int ell, MassParam m, double s, double rel_tol, int budget) {
    const double lx = std::log(2.0 / m.c());
    const double r_lim = 1.0 / (m.c() * m.c());
    const double target = std::max(rel_tol * 1e-3, 1e-16);
    SeriesSum out;
    double prev = 0.0;
    for (int k = 0; k < budget; ++k) {
        const int n = 2 * k + ell;
        const double lt = n * lx + log_binomial(n, ell) + std::log(beta_half(k, ell)) +
                          std::lgamma(0.5 * (s + n + 1)) + std::lgamma(0.5 * (n + 1 - s)) - std::lgamma(n + 1.0) -
                          (ell + 1) * std::numbers::ln2;
        const double term = std::exp(lt);
        out.value += term;
        out.terms = k + 1;
        if (k > 0) {
            const double r = std::max(term / prev, r_lim);
            if (r < 1.0) {
                const double rest = term * r / (1.0 - r);
                out.converged = out.converged || rest < rel_tol * out.value;
                if (rest < target * out.value) break;
            }
        }
        prev = term;
    }
    out.value = -out.value;
    return out;
}

inline double offdiag_direct(int ell, MassParam m, double s, const quad::QuadSpec& spec) {
    if (s >= 1.0) throw DomainError("direct representation needs s < 1 (the inner integral diverges at s = 1)");
    const double c = m.c();
    auto f = [&](double t) { return legendre(ell, t) * inner_radial(t / c, s); };
    return quad::require(quad::integrate_finite(f, -1.0, 1.0, spec.without_hints()), "F direct");
}

// -(4/c) ∫_0^1 t P_l(t) ∫_0^∞ p^{s+1}/((p^2+1)^2 - 4 t^2 p^2/c^2) dp dt
inline double offdiag_antisym(int ell, MassParam m, double s, const quad::QuadSpec& spec) {
    const double c = m.c();
    const quad::QuadSpec in = spec.inner().with_hints({{1.0, 0.0}}).with_tail(s - 3.0);
    auto radial = [&](double t) {
        const double b2 = 4.0 * t * t / (c * c);
        auto g = [&](double p) {
            const double a = p * p + 1.0;
            return std::pow(p, s + 1.0) / (a * a - b2 * p * p);
        };
        return quad::require(quad::integrate_semi_infinite(g, 0.0, in), "F antisymmetrized (p)");
    };
    auto f = [&](double t) { return t * legendre(ell, t) * radial(t); };
    return -4.0 / c * quad::require(quad::integrate_finite(f, 0.0, 1.0, spec.without_hints()), "F antisymmetrized (t)");
}

}  // namespace detail

inline double f_offdiag(SectorIndex sec, MassParam m, double s, FRep rep, const quad::QuadSpec& spec = {}) {
    require_odd(sec, "f_offdiag");
    detail::check_s(s, "f_offdiag");
    switch (rep) {
        case FRep::DirectIntegral: return detail::offdiag_direct(sec.ell, m, s, spec);
        case FRep::Antisymmetrized: return detail::offdiag_antisym(sec.ell, m, s, spec);
        case FRep::Series: {
            auto r = detail::offdiag_series(sec.ell, m, s, spec.rel_tol, kSeriesTermBudget);
            if (!r.converged)
                throw ConvergenceError("series for F did not converge in " + std::to_string(kSeriesTermBudget) +
                                       " terms at m = " + std::to_string(m.m) +
                                       "; use the antisymmetrized representation");
            return r.value;
        }
    }
    throw DomainError("f_offdiag: unknown representation");
}

// Representation used when the caller does not choose: the series when it
// converges inside its budget, otherwise a quadrature form.
inline FRep preferred_rep(SectorIndex sec, MassParam m, double s, const quad::QuadSpec& spec = {}) {
    if (detail::offdiag_series(sec.ell, m, s, spec.rel_tol, kSeriesTermBudget).converged) return FRep::Series;
    return s <= 0.95 ? FRep::DirectIntegral : FRep::Antisymmetrized;
}

inline double f_offdiag(SectorIndex sec, MassParam m, double s, const quad::QuadSpec& spec = {}) {
    require_odd(sec, "f_offdiag");
    detail::check_s(s, "f_offdiag");
    auto r = detail::offdiag_series(sec.ell, m, s, spec.rel_tol, kSeriesTermBudget);
    if (r.converged) return r.value;
    return f_offdiag(sec, m, s, s <= 0.95 ? FRep::DirectIntegral : FRep::Antisymmetrized, spec);
}

inline double f_total(SectorIndex sec, MassParam m, double s, FRep rep, const quad::QuadSpec& spec = {}) {
    return f_diag(m) + f_offdiag(sec, m, s, rep, spec);
}

inline double f_total(SectorIndex sec, MassParam m, double s, const quad::QuadSpec& spec = {}) {
    return f_diag(m) + f_offdiag(sec, m, s, spec);
}

}  // namespace stm
