#pragma once

// Sector quadratic forms, the potential norm and its equivalence constants,
// and the explicit lower bound on the energy.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "stm/charge.hpp"
#include "stm/criticality.hpp"
#include "stm/ffunc.hpp"
#include "stm/gamma0.hpp"
#include "stm/quad.hpp"
#include "stm/specfun.hpp"

namespace stm {

struct SectorCharge {
    SectorIndex sector{1, 0};
    Charge profile;
    std::string label;
};

struct ExtensionParams {
    std::array<double, 3> beta{0.0, 0.0, 0.0};  // n = -1, 0, +1; +inf pins q_n = 0
};

// A form split into its diagonal (local) and cross (Legendre-weighted) terms.
struct FormParts {
    double diag = 0.0;
    double cross = 0.0;
    double total() const { return diag + cross; }
};

namespace detail {

// Hints for ∫_0^∞ dk of something ~ k^{head_power} at 0 and ~ k^{tail_power}
// at infinity, plus the charge breakpoints.
inline quad::QuadSpec radial_spec(const quad::QuadSpec& base, const Charge& xi, double head_power,
                                  double tail_power, double lo = 0.0) {
    quad::QuadSpec s = base.without_hints();
    add_feature_hints(s, xi, lo, kInf, 0.0);
    if (lo == 0.0 && std::isfinite(head_power))
        for (auto h : head_hint(head_power)) s.singularity_hints.push_back(h);
    if (std::isfinite(tail_power)) {
        s.tail_exponent = tail_power;
        s.check_decay = false;
    }
    return s;
}

inline void check_homogeneous_half(const Charge& xi, const char* what) {
    if (!(xi.head() > -2.0))
        throw DomainError(std::string(what) + ": diagonal term ∫p^3|xi|^2 diverges at 0 (head exponent <= -2)");
    if (!(xi.tail() < -2.0))
        throw DomainError(std::string(what) + ": diagonal term ∫p^3|xi|^2 diverges at infinity (tail exponent >= -2)");
}

}  // namespace detail

// Phi_0 = 2 pi^2 (sqrt(m(m+2))/(m+1)) ∫ p^3 |xi|^2
//       + 2 pi ∫∫ p^2 q^2 conj(xi(p)) xi(q) ∫ P_l(t) dt / (p^2 + q^2 + 2pqt/(m+1))
inline FormParts phi0_parts(MassParam m, const SectorCharge& sc, const quad::QuadSpec& spec = {}) {
    require_odd(sc.sector, "phi0");
    const Charge& xi = sc.profile;
    if (xi.empty()) return {};
    detail::check_homogeneous_half(xi, "phi0");
    const int ell = sc.sector.ell;
    const double c = m.c();
    const double h = xi.head(), t = xi.tail();

    auto fd = [&](double p) { return p * p * p * std::norm(xi(p)); };
    const double diag = diag_coeff(m) * quad::require(quad::integrate_semi_infinite(
                                                          fd, 0.0, detail::radial_spec(spec, xi, 3 + 2 * h, 3 + 2 * t)),
                                                      "phi0 diagonal");

    const quad::QuadSpec in = spec.inner();
    auto fc = [&](double p) {
        const cplx xp = xi(p);
        if (xp == cplx(0.0)) return 0.0;
        auto g = [&](double q) { return q * q * xi(q) * angular_kernel(ell, 1, p * p + q * q, 2.0 * p * q / c); };
        quad::QuadSpec s = detail::radial_spec(in, xi, 3 + h, t - 1);
        detail::add_feature_hints(s, xi, 0.0, kInf, p);
        const cplx v = quad::require(quad::integrate_semi_infinite(g, 0.0, s), "phi0 cross (q)");
        return p * p * (std::conj(xp) * v).real();
    };
    const double cross = quad::require(
        quad::integrate_semi_infinite(fc, 0.0, detail::radial_spec(spec, xi, 3 + 2 * h, 3 + 2 * t)), "phi0 cross (p)");
    return {diag, 2.0 * std::numbers::pi * cross};
}

inline double phi0(MassParam m, const SectorCharge& sc, const quad::QuadSpec& spec = {}) {
    return phi0_parts(m, sc, spec).total();
}

// Phi_lambda: diagonal weight p^2 sqrt(p^2 + lambda), denominators shifted by
// lambda.  Deliberately a separate code path from phi0.
inline FormParts phi_lambda_parts(MassParam m, double lambda, const SectorCharge& sc,
                                  const quad::QuadSpec& spec = {}) {
    require_odd(sc.sector, "phi_lambda");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("phi_lambda: need lambda >= 0");
    const Charge& xi = sc.profile;
    if (xi.empty()) return {};
    detail::check_homogeneous_half(xi, "phi_lambda");
    const int ell = sc.sector.ell;
    const double c = m.c();
    const double pref = 2.0 * std::numbers::pi * std::numbers::pi * m.root();
    const double h = xi.head(), t = xi.tail();

    auto fd = [&](double k) {
        const cplx v = xi(k);
        return k * k * std::sqrt(k * k + lambda) * (v.real() * v.real() + v.imag() * v.imag());
    };
    const double diag =
        pref * quad::require(quad::integrate_semi_infinite(fd, 0.0, detail::radial_spec(spec, xi, 3 + 2 * h, 3 + 2 * t)),
                             "phi_lambda diagonal");

    const quad::QuadSpec in = spec.inner();
    auto fc = [&](double k1) {
        const cplx x1 = xi(k1);
        if (x1 == cplx(0.0)) return 0.0;
        auto g = [&](double k2) {
            const double a = k1 * k1 + k2 * k2 + lambda;
            return xi(k2) * (k2 * k2 * angular_kernel(ell, 1, a, 2.0 * k1 * k2 / c));
        };
        quad::QuadSpec s = detail::radial_spec(in, xi, 3 + h, t - 1);
        detail::add_feature_hints(s, xi, 0.0, kInf, k1);
        const cplx v = quad::require(quad::integrate_semi_infinite(g, 0.0, s), "phi_lambda cross (q)");
        return k1 * k1 * (x1.real() * v.real() + x1.imag() * v.imag());
    };
    const double cross = quad::require(
        quad::integrate_semi_infinite(fc, 0.0, detail::radial_spec(spec, xi, 3 + 2 * h, 3 + 2 * t)),
        "phi_lambda cross (p)");
    return {diag, 2.0 * std::numbers::pi * cross};
}

inline double phi_lambda(MassParam m, double lambda, const SectorCharge& sc, const quad::QuadSpec& spec = {}) {
    return phi_lambda_parts(m, lambda, sc, spec).total();
}

// ||eta||^2 in H^{-1/2}_lambda, radially: ∫_eps^∞ k^2 |eta|^2 / sqrt(k^2 + lambda)
inline double h_minus_half_norm_sq(double lambda, const SectorCharge& sc, double eps = 0.0,
                                   const quad::QuadSpec& spec = {}) {
    if (!(lambda >= 0.0) || !(eps >= 0.0)) throw DomainError("h_minus_half_norm_sq: need lambda, eps >= 0");
    const Charge& xi = sc.profile;
    if (xi.empty()) return 0.0;
    const double h = xi.head(), t = xi.tail();
    if (!(t < -1.0)) throw DomainError("h_minus_half_norm_sq: diverges at infinity (tail exponent >= -1)");
    if (eps == 0.0 && !(h > (lambda > 0 ? -1.5 : -1.0)))
        throw DomainError("h_minus_half_norm_sq: diverges at 0 for this head exponent");
    auto f = [&](double k) { return k * k * std::norm(xi(k)) / std::sqrt(k * k + lambda); };
    const double head_pow = lambda > 0 ? 2 + 2 * h : 1 + 2 * h;
    return quad::require(quad::integrate_semi_infinite(f, eps, detail::radial_spec(spec, xi, head_pow, 1 + 2 * t, eps)),
                         "H^-1/2 norm");
}

// ||Xi^-||^2 for Xi^- = k^{-2+s} cut at sqrt(lambda): numerically, and the
// closed form lambda^{s-1} / (2 (1 - s)).
inline double xi_minus_norm_sq(double lambda, double s, const quad::QuadSpec& spec = {}) {
    if (!(lambda > 0.0) || !(s >= 0.0 && s < 1.0)) throw DomainError("xi_minus_norm_sq: need lambda > 0, 0 <= s < 1");
    auto f = [&](double k) { return std::pow(k, -3.0 + 2.0 * s); };
    return quad::require(quad::integrate_semi_infinite(f, std::sqrt(lambda), spec.with_tail(-3.0 + 2.0 * s)),
                         "Xi^- norm");
}

inline double xi_minus_norm_sq_closed(double lambda, double s) {
    if (!(lambda > 0.0) || !(s >= 0.0 && s < 1.0)) throw DomainError("xi_minus_norm_sq: need lambda > 0, 0 <= s < 1");
    return std::pow(lambda, s - 1.0) / (2.0 * (1.0 - s));
}

// ||G_lambda eta||^2 over {k1, k2 >= eps} for eta = eta(k) Y_l^n:
//   2 pi ∫∫ k1^2 k2^2 [2 |eta(k1)|^2 W_0 - 2 Re(conj eta(k1) eta(k2)) W_l],
//   W_j = ∫ P_j(t) dt / (k1^2 + k2^2 + lambda + 2 k1 k2 t/(m+1))^2.
inline double potential_norm(MassParam m, double lambda, double eps, const SectorCharge& sc,
                             const quad::QuadSpec& spec = {}) {
    require_odd(sc.sector, "potential_norm");
    if (!(lambda >= 0.0) || !(eps >= 0.0) || !std::isfinite(lambda) || !std::isfinite(eps))
        throw DomainError("potential_norm: need lambda, eps >= 0");
    const Charge& xi = sc.profile;
    if (xi.empty()) return 0.0;
    const double h = xi.head(), t = xi.tail();
    if (!(t < -1.0)) throw DomainError("potential_norm: ultraviolet divergence (tail exponent >= -1)");
    if (eps == 0.0 && lambda == 0.0 && !(h > -1.0))
        throw DomainError("potential_norm: infrared divergence at lambda = 0, eps = 0 (head exponent <= -1)");
    if (eps == 0.0 && !(h > -1.5)) throw DomainError("potential_norm: infrared divergence (head exponent <= -3/2)");
    const int ell = sc.sector.ell;
    const double c = m.c();
    const quad::QuadSpec in = spec.inner();

    auto outer = [&](double k1) {
        const cplx x1 = xi(k1);
        const double n1 = std::norm(x1);
        if (n1 == 0.0) return 0.0;
        auto g = [&](double k2) {
            const double a = k1 * k1 + k2 * k2 + lambda, b = 2.0 * k1 * k2 / c;
            const cplx x2 = xi(k2);
            const double cross = x1.real() * x2.real() + x1.imag() * x2.imag();
            return k2 * k2 * (2.0 * n1 * angular_kernel(0, 2, a, b) - 2.0 * cross * angular_kernel(ell, 2, a, b));
        };
        quad::QuadSpec s = detail::radial_spec(in, xi, 2.0, -2.0, eps);
        detail::add_feature_hints(s, xi, eps, kInf, k1);
        return k1 * k1 * quad::require(quad::integrate_semi_infinite(g, eps, s), "potential norm (k2)");
    };
    const double head_pow = lambda > 0 ? 2 + 2 * h : 1 + 2 * h;
    const double v = quad::require(
        quad::integrate_semi_infinite(outer, eps, detail::radial_spec(spec, xi, head_pow, 1 + 2 * t, eps)),
        "potential norm (k1)");
    return 2.0 * std::numbers::pi * v;
}

struct SchurConstants {
    double c0, c1s, c2s, c1t, c2t;
};

inline SchurConstants schur_constants(MassParam m, double a, const quad::QuadSpec& spec = {}) {
    if (!(a > 1.0) || !std::isfinite(a)) throw DomainError("schur_constants: need a > 1");
    const double u = 2.0 / m.c();
    const double four_pi = 4.0 * std::numbers::pi;
    auto plus = [&](double q) { const double d = 1 + q * q + u * q; return d * d; };
    auto minus = [&](double q) { const double d = 1 + q * q - u * q; return d * d; };
    const quad::QuadSpec s = spec.without_hints();
    auto tail = [&](auto f, double e) {
        return four_pi * quad::require(quad::integrate_semi_infinite(f, a, s.with_tail(e)), "Schur constant");
    };
    auto head = [&](auto f) {
        return four_pi * quad::require(quad::integrate_finite(f, 0.0, 1.0 / a, s), "Schur constant");
    };
    SchurConstants r;
    r.c0 = tail([&](double q) { return q * q / plus(q); }, -2.0);
    r.c1s = tail([&](double q) { return std::pow(q, 2.5) / minus(q); }, -1.5);
    r.c2s = head([&](double q) { return std::pow(q, 2.5) / minus(q); });
    r.c1t = tail([&](double q) { return std::pow(q, 2.5) * std::pow(1 + 1 / (q * q), 0.25) / minus(q); }, -1.5);
    r.c2t = head([&](double q) { return q * q * std::pow(q * q + 1, 0.25) / minus(q); });
    return r;
}

struct LowerConstant {
    double c1_lower;
    double a_star;
};

namespace detail {

template <class G>
LowerConstant golden_max(G&& g, double lo, double hi) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = g(x1), f2 = g(x2);
    while (hi - lo > 1e-7) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = g(x1);
        }
    }
    const double x = 0.5 * (lo + hi);
    return {g(x), std::exp(x)};
}

inline constexpr double kSchurLogMin = 0.01;  // a from e^0.01
inline constexpr double kSchurLogMax = 9.21;  // to about 1e4

}  // namespace detail

// sup_a c0(a) - 2 sqrt(c1(a) c2(a)) by golden section in log a.
inline double lower_objective(MassParam m, double a, const quad::QuadSpec& spec = {}) {
    const auto k = schur_constants(m, a, spec);
    return k.c0 - 2.0 * std::sqrt(k.c1s * k.c2s);
}

inline double lower_objective_tilde(MassParam m, double a, const quad::QuadSpec& spec = {}) {
    const auto k = schur_constants(m, a, spec);
    return k.c0 - 2.0 * std::sqrt(k.c1t * k.c2t);
}

inline LowerConstant lower_constant(MassParam m, const quad::QuadSpec& spec = {}) {
    auto r = detail::golden_max([&](double x) { return lower_objective(m, std::exp(x), spec); }, detail::kSchurLogMin,
                                detail::kSchurLogMax);
    if (!(r.c1_lower > 0.0))
        throw ConvergenceError("lower_constant: supremum is not positive (" + std::to_string(r.c1_lower) + ")");
    return r;
}

inline LowerConstant lower_constant_tilde(MassParam m, const quad::QuadSpec& spec = {}) {
    auto r = detail::golden_max([&](double x) { return lower_objective_tilde(m, std::exp(x), spec); },
                                detail::kSchurLogMin, detail::kSchurLogMax);
    if (!(r.c1_lower > 0.0))
        throw ConvergenceError("lower_constant_tilde: supremum is not positive (" + std::to_string(r.c1_lower) + ")");
    return r;
}

// 16 pi ∫_0^∞ q^2 / (1 + q^2 - 2q/(m+1))^2 dq
inline double upper_constant(MassParam m, const quad::QuadSpec& spec = {}) {
    const double u = 2.0 / m.c();
    auto f = [&](double q) {
        const double d = 1 + q * q - u * q;
        return q * q / (d * d);
    };
    quad::QuadSpec s = spec.without_hints();
    s.singularity_hints.push_back({1.0 / m.c(), 0.0});
    s.tail_exponent = -2.0;
    return 16.0 * std::numbers::pi * quad::require(quad::integrate_semi_infinite(f, 0.0, s), "upper constant");
}

// Surrogate: -F_{1,2}(m, 0) / F_{1,1}(m).  Equals 1 exactly at m*.
inline double lambda1(MassParam m, const quad::QuadSpec& spec = {}) {
    return -f_offdiag({1, 0}, m, 0.0, spec) / f_diag(m);
}

struct BoundReport {
    double m = 0.0;
    double s = 0.0;
    double D1 = 0.0;
    double D2 = 0.0;
    double Lambda1 = 0.0;  // surrogate
    double c1_lower = 0.0;
    double a_star = 0.0;
    double c2_upper = 0.0;
    double beta_max = 0.0;  // max |beta_n| over finite entries
    double E0 = 0.0;
    double log10_abs_E0 = -std::numeric_limits<double>::infinity();
    bool positive_form = true;  // all finite beta_n >= 0
};

// E0 = -[2 (1-s) (D1 c1 + D2 (D1 + 1)) / (D1 D2 c1) max|beta_n|]^{1/s}, or 0
// when every finite beta_n is non-negative.
// `s` must be s(m); the overload without it solves for it.
inline BoundReport e0_bound(MassParam m, const ExtensionParams& params, double s, const quad::QuadSpec& spec = {}) {
    if (!(s >= 0.0 && s <= 1.0)) throw RegimeError("e0_bound: needs s(m) in [0, 1], i.e. m in [m*, m**]");
    for (double b : params.beta)
        if (std::isnan(b) || b == -std::numeric_limits<double>::infinity())
            throw DomainError("e0_bound: beta entries must be real or +inf");
    BoundReport r;
    r.m = m.m;
    r.s = s;
    r.D1 = m.m / m.c();
    r.Lambda1 = lambda1(m, spec);
    r.D2 = 4.0 * std::numbers::pi * std::numbers::pi * m.root() * (1.0 - r.Lambda1);
    const auto lc = lower_constant(m, spec);
    r.c1_lower = lc.c1_lower;
    r.a_star = lc.a_star;
    r.c2_upper = upper_constant(m, spec);
    for (double b : params.beta) {
        if (std::isinf(b)) continue;
        r.beta_max = std::max(r.beta_max, std::abs(b));
        if (b < 0) r.positive_form = false;
    }
    if (r.positive_form) return r;
    const double x =
        2.0 * (1.0 - r.s) * (r.D1 * r.c1_lower + r.D2 * (r.D1 + 1.0)) / (r.D1 * r.D2 * r.c1_lower) * r.beta_max;
    r.log10_abs_E0 = std::log10(x) / r.s;
    r.E0 = -std::pow(x, 1.0 / r.s);
    return r;
}

inline BoundReport e0_bound(MassParam m, const ExtensionParams& params, const quad::QuadSpec& spec = {}) {
    return e0_bound(m, params, s_of_m(m, spec).value, spec);
}

}  // namespace stm
