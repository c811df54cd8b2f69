#pragma once

// The reduced operator Gamma_0 in the l = 1 sector,
//   (Gamma_0 xi)(p) = d(m) p xi(p) + 2 pi ∫_0^∞ q^2 xi(q) K(p, q) dq,
//   K(p, q) = ∫_{-1}^{1} t dt / (p^2 + q^2 + 2pqt/(m+1)),
// its action on power laws, the constant nu(m), and boundary pairings.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "stm/charge.hpp"
#include "stm/criticality.hpp"
#include "stm/ffunc.hpp"
#include "stm/quad.hpp"
#include "stm/specfun.hpp"

namespace stm {

inline double diag_coeff(MassParam m) { return 2.0 * std::numbers::pi * std::numbers::pi * m.root(); }

inline double gamma0_kernel(double p, double q, double c) {
    return angular_kernel(1, 1, p * p + q * q, 2.0 * p * q / c);
}

// Gamma_0 k^{-2+s} = (2 pi / p^{1-s}) F_1(m, s)
inline double apply_power(MassParam m, double s, double p, const quad::QuadSpec& spec = {}) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("apply_power: need 0 < s < 1");
    if (!(p > 0.0)) throw DomainError("apply_power: need p > 0");
    return 2.0 * std::numbers::pi * std::pow(p, s - 1.0) * f_total({1, 0}, m, s, spec);
}

namespace detail {

inline bool nonneg_integer(double x) { return x >= 0 && x == std::floor(x); }

// Hint for an integrand ~ q^e at q = 0: tanh-sinh unless it is a polynomial start.
inline std::vector<quad::Singularity> head_hint(double e) {
    if (nonneg_integer(e)) return {};
    return {{0.0, e}};
}

// Split points for a radial integral over (lo, hi) whose integrand has
// structure at the charge features and at `p`: those points, plus every
// power of ten between them, so no single panel spans many decades.
inline void add_feature_hints(quad::QuadSpec& s, const Charge& xi, double lo, double hi, double p) {
    std::vector<double> pts = xi.features();
    if (p > 0) pts.push_back(p);
    if (pts.empty()) return;
    const auto [mn, mx] = std::minmax_element(pts.begin(), pts.end());
    const int k0 = static_cast<int>(std::ceil(std::log10(*mn))), k1 = static_cast<int>(std::floor(std::log10(*mx)));
    for (int k = k0; k <= k1; ++k) pts.push_back(std::pow(10.0, k));
    for (double x : pts)
        if (x > lo && x < hi) s.singularity_hints.push_back({x, 0.0});
}

}  // namespace detail

// Gamma_0 applied to a fixed charge, with per-component set-up done once.
// With `resonance` = s(m), the kernel identity Gamma_0 k^{-2 -+ s} = 0 is
// used exactly instead of through the (tiny, nonzero) residual of F.
class Gamma0Image {
public:
    Gamma0Image(MassParam m, Charge xi, quad::QuadSpec spec = {}, std::optional<double> resonance = std::nullopt)
        : m_(m), c_(m.c()), d_(diag_coeff(m)), spec_(std::move(spec)), res_(resonance) {
        for (const auto& part : xi.parts) {
            if (const auto* pw = std::get_if<PowerLawCharge>(&part)) {
                if (pw->support == Support::Between) {
                    if (!(pw->R > 0.0 && pw->R2 > pw->R && std::isfinite(pw->R2)))
                        throw DomainError("power charge: a window needs 0 < R < R2 < inf");
                    smooth_.push_back({Charge(*pw), pw->R, pw->R2});
                } else {
                    add_power(*pw);
                }
            } else if (const auto* g = std::get_if<GaussianCharge>(&part)) {
                smooth_.push_back({Charge(*g), 0.0, kInf});
            } else {
                const auto& grid = std::get<RadialGridCharge>(part);
                const double k0 = grid.nodes().front(), kn = grid.nodes().back();
                // power-law extensions at both ends, interior handled numerically
                add_power({grid.samples().front() * std::pow(k0, -grid.head()), -grid.head(), Support::BelowR, k0});
                add_power({grid.samples().back() * std::pow(kn, -grid.tail()), -grid.tail(), Support::AboveR, kn});
                smooth_.push_back({Charge(grid), k0, kn});
            }
        }
    }

    cplx operator()(double p) const {
        if (!(p > 0.0)) throw DomainError("Gamma_0: need p > 0");
        cplx v = 0.0;
        for (const auto& pw : powers_) v += pw.amp * power_part(pw, p);
        for (const auto& sm : smooth_) v += smooth_part(sm, p);
        return v;
    }

private:
    struct Power {
        cplx amp;
        double gamma;
        Support support;
        double R;
        double full_coeff;  // 2 pi F_1(m, 2 - gamma) when 1 < gamma < 3, else unused
        bool has_full;
    };
    struct Smooth {
        Charge xi;
        double lo, hi;  // support of the numerically handled piece
    };

    void add_power(const PowerLawCharge& pw) {
        if (pw.support != Support::All && !(pw.R > 0.0)) throw DomainError("power charge: need R > 0");
        const double g = pw.gamma;
        Power out{pw.amplitude, g, pw.support, pw.R, 0.0, g > 1.0 && g < 3.0};
        if (pw.support == Support::All && !out.has_full)
            throw DomainError("Gamma_0 of k^-" + std::to_string(g) + " diverges: the " +
                              (g <= 1.0 ? "tail" : "head") + " of the cross term needs 1 < gamma < 3");
        if (pw.support == Support::AboveR && !(g > 0.0))
            throw DomainError("Gamma_0: cross term diverges at infinity for a tail k^-gamma with gamma <= 0");
        if (pw.support == Support::BelowR && !(g < 4.0))
            throw DomainError("Gamma_0: cross term diverges at 0 for a head k^-gamma with gamma >= 4");
        if (out.has_full) {
            const double s = std::abs(2.0 - g);
            if (res_ && std::abs(s - *res_) <= 1e-15)
                out.full_coeff = 0.0;
            else
                out.full_coeff = 2.0 * std::numbers::pi * f_total({1, 0}, m_, s, spec_.without_hints());
        }
        powers_.push_back(out);
    }

    // 2 pi ∫_lo^hi q^{2-gamma} K(p, q) dq, hi may be infinite
    double power_cross(double gamma, double p, double lo, double hi) const {
        auto f = [&](double q) { return std::pow(q, 2.0 - gamma) * gamma0_kernel(p, q, c_); };
        quad::QuadSpec s = spec_.without_hints();
        s.check_decay = false;
        detail::add_feature_hints(s, Charge(PowerLawCharge{1.0, gamma, Support::AboveR, lo > 0 ? lo : hi}), lo, hi, p);
        if (std::isinf(hi)) {
            s.tail_exponent = -1.0 - gamma;
            return 2.0 * std::numbers::pi * quad::require(quad::integrate_semi_infinite(f, lo, s), "Gamma_0 cross");
        }
        if (lo == 0.0)
            for (auto h : detail::head_hint(3.0 - gamma)) s.singularity_hints.push_back(h);
        return 2.0 * std::numbers::pi * quad::require(quad::integrate_finite(f, lo, hi, s), "Gamma_0 cross");
    }

    double power_part(const Power& pw, double p) const {
        const double g = pw.gamma;
        switch (pw.support) {
            case Support::All: return pw.full_coeff * std::pow(p, 1.0 - g);
            case Support::BelowR:
                return (p < pw.R ? d_ * std::pow(p, 1.0 - g) : 0.0) + power_cross(g, p, 0.0, pw.R);
            case Support::Between: break;  // handled as a smooth piece
            case Support::AboveR:
                if (p < pw.R) return power_cross(g, p, pw.R, kInf);
                // complement: whole line minus the part below R, which avoids
                // cancelling diagonal and cross terms at large p
                if (pw.has_full) return pw.full_coeff * std::pow(p, 1.0 - g) - power_cross(g, p, 0.0, pw.R);
                return d_ * std::pow(p, 1.0 - g) + power_cross(g, p, pw.R, kInf);
        }
        return 0.0;
    }

    cplx smooth_part(const Smooth& sm, double p) const {
        const double head = sm.xi.head(), tail = sm.xi.tail();
        const bool whole = sm.lo == 0.0 && std::isinf(sm.hi);
        if (whole && !(head > -4.0)) throw DomainError("Gamma_0: cross term diverges at 0 (head exponent <= -4)");
        if (whole && !(tail < 0.0)) throw DomainError("Gamma_0: cross term diverges at infinity (tail exponent >= 0)");
        auto f = [&](double q) { return q * q * sm.xi(q) * gamma0_kernel(p, q, c_); };
        quad::QuadSpec s = spec_.without_hints();
        s.check_decay = false;
        detail::add_feature_hints(s, sm.xi, sm.lo, sm.hi, p);
        cplx cross;
        if (std::isinf(sm.hi)) {
            if (std::isfinite(tail)) s.tail_exponent = tail - 1.0;
            if (sm.lo == 0.0)
                for (auto h : detail::head_hint(3.0 + head)) s.singularity_hints.push_back(h);
            cross = quad::require(quad::integrate_semi_infinite(f, sm.lo, s), "Gamma_0 cross");
        } else {
            cross = quad::require(quad::integrate_finite(f, sm.lo, sm.hi, s), "Gamma_0 cross");
        }
        const cplx diag = (p >= sm.lo && p < sm.hi) ? d_ * p * sm.xi(p) : cplx(0.0);
        return diag + 2.0 * std::numbers::pi * cross;
    }

    MassParam m_;
    double c_, d_;
    quad::QuadSpec spec_;
    std::optional<double> res_;
    std::vector<Power> powers_;
    std::vector<Smooth> smooth_;
};

inline cplx apply_charge(MassParam m, const Charge& xi, double p, const quad::QuadSpec& spec = {}) {
    return Gamma0Image(m, xi, spec)(p);
}

inline cplx apply_grid(MassParam m, const RadialGridCharge& xi, double p, const quad::QuadSpec& spec = {}) {
    return apply_charge(m, Charge(xi), p, spec);
}

struct NuReport {
    double value = 0.0;           // the signed representation
    double signed_value = 0.0;
    double positive_value = 0.0;  // independent positive representation
    double rel_gap = 0.0;
    double s = 0.0;
    double outer_only = 0.0;  // the pairing restricted to p >= R (omits the p < R piece)
};

// nu(m) = lim (Xi^-, Gamma_0 1_{k>=R} k^{-2-s}) for R = 1, in two forms:
//   signed:   -2 pi ∫_1^∞ dp/p ∫_0^{1/p} (q^{-s} - q^{s}) K(1, q) dq
//   positive: (8 pi/c) ∫_0^1 dt t^2 ∫_0^1 (-ln q)(q^{1-s} - q^{1+s}) / ((q^2+1)^2 - 4 t^2 q^2/c^2) dq
// `s` must be s(m); the overload without it solves for it.
inline NuReport nu(MassParam m, double s, const quad::QuadSpec& spec = {}) {
    if (!(s > 0.0 && s < 1.0)) throw RegimeError("nu: needs 0 < s(m) < 1, i.e. m strictly inside (m*, m**)");
    const double c = m.c();
    const double two_pi = 2.0 * std::numbers::pi;
    const quad::QuadSpec in = spec.inner();

    auto outer = [&](double sign_plus) {
        auto fp = [&](double p) {
            auto g = [&](double q) {
                return (std::pow(q, -s) - sign_plus * std::pow(q, s)) * gamma0_kernel(1.0, q, c);
            };
            return quad::require(quad::integrate_finite(g, 0.0, 1.0 / p, in), "nu (q)") / p;
        };
        quad::QuadSpec o = spec.without_hints();
        o.tail_exponent = s - 3.0;
        o.check_decay = false;
        return -two_pi * quad::require(quad::integrate_semi_infinite(fp, 1.0, o), "nu (p)");
    };

    NuReport r;
    r.s = s;
    r.signed_value = outer(1.0);
    r.outer_only = outer(0.0);

    auto ft = [&](double t) {
        const double b2 = 4.0 * t * t / (c * c);
        auto g = [&](double q) {
            const double a = q * q + 1.0;
            return -std::log(q) * (std::pow(q, 1.0 - s) - std::pow(q, 1.0 + s)) / (a * a - b2 * q * q);
        };
        return t * t * quad::require(quad::integrate_finite(g, 0.0, 1.0, in), "nu positive (q)");
    };
    r.positive_value =
        8.0 * std::numbers::pi / c * quad::require(quad::integrate_finite(ft, 0.0, 1.0, spec.without_hints()), "nu (t)");
    r.value = r.signed_value;
    r.rel_gap = std::abs(r.signed_value - r.positive_value) / std::abs(r.signed_value);
    if (!(r.rel_gap <= 1e-6))
        throw ConvergenceError("nu: the two representations disagree (relative gap " + std::to_string(r.rel_gap) + ")");
    return r;
}

inline NuReport nu(MassParam m, const quad::QuadSpec& spec = {}) { return nu(m, s_of_m(m, spec).value, spec); }

// Coefficient A of the k^{-2-s} tail forced by beta: A = beta q / nu.
inline cplx tail_coeff(double beta, cplx q, double nu_value) {
    if (!(nu_value > 0.0)) throw DomainError("tail_coeff: nu must be positive");
    return beta * q / nu_value;
}

inline cplx tail_coeff(double beta, cplx q, MassParam m, const quad::QuadSpec& spec = {}) {
    if (beta == 0.0) return 0.0;
    return tail_coeff(beta, q, nu(m, spec).value);
}

// (Xi^-, Gamma_0 xi) restricted to k >= eps, Xi^- = k^{-2+s}:
//   ∫_eps^∞ p^s (Gamma_0 xi)(p) dp.
// `s` must be s(m): components k^{-2 -+ s} are then annihilated exactly.
inline cplx boundary_pairing(MassParam m, double s, const Charge& xi, double eps, const quad::QuadSpec& spec = {}) {
    if (!(eps > 0.0)) throw DomainError("boundary_pairing: need eps > 0");
    const Gamma0Image image(m, xi, spec.inner(), s);
    auto f = [&](double p) { return std::pow(p, s) * image(p); };
    quad::QuadSpec o = spec.without_hints();
    detail::add_feature_hints(o, xi, eps, kInf, 0.0);
    return quad::require(quad::integrate_semi_infinite(f, eps, o), "boundary pairing");
}

struct PairingLimit {
    cplx value;  // extrapolated to eps -> 0
    std::array<double, 3> eps{1e-2, 1e-3, 1e-4};
    std::array<cplx, 3> samples{};
    double s = 0.0;
};

// eps -> 0 by quadratic extrapolation in x = eps^{2s} through three cut-offs.
inline PairingLimit boundary_limit(MassParam m, double s, const Charge& xi, const quad::QuadSpec& spec = {}) {
    PairingLimit out;
    out.s = s;
    std::array<double, 3> x{};
    for (int i = 0; i < 3; ++i) {
        out.samples[i] = boundary_pairing(m, s, xi, out.eps[i], spec);
        x[i] = std::pow(out.eps[i], 2.0 * s);
    }
    // Lagrange form of the quadratic through (x_i, v_i), evaluated at 0.
    cplx v = 0.0;
    for (int i = 0; i < 3; ++i) {
        double w = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != i) w *= x[j] / (x[j] - x[i]);
        v += w * out.samples[i];
    }
    out.value = v;
    return out;
}

inline PairingLimit boundary_limit(MassParam m, const Charge& xi, const quad::QuadSpec& spec = {}) {
    return boundary_limit(m, s_of_m(m, spec).value, xi, spec);
}

}  // namespace stm
