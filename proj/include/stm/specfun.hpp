#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "stm/errors.hpp"

namespace stm {

struct SectorIndex {
    int ell = 1;
    int n = 0;  // azimuthal label; never enters a reduced value
};

inline void require_odd(const SectorIndex& sec, const char* what) {
    if (sec.ell < 0 || std::abs(sec.n) > sec.ell)
        throw DomainError(std::string(what) + ": need ell >= 0 and |n| <= ell");
    if (sec.ell % 2 == 0)
        throw DomainError(std::string(what) + ": ell must be odd (for even ell the off-diagonal part is positive "
                                              "and the resonance equation has no solutions)");
}

inline double legendre(int ell, double t) {
    if (ell < 0) throw DomainError("legendre: ell must be >= 0");
    if (!(std::abs(t) <= 1.0)) throw DomainError("legendre: |t| must be <= 1");
    if (ell == 0) return 1.0;
    double p0 = 1.0, p1 = t;
    for (int k = 1; k < ell; ++k) {
        const double p2 = ((2 * k + 1) * t * p1 - k * p0) / (k + 1);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

// ∫_{-1}^{1} t^{2j} (1-t^2)^ell dt = B(j+1/2, ell+1)
inline double beta_half(int j, int ell) {
    if (j < 0 || ell < 0) throw DomainError("beta_half: need j, ell >= 0");
    return std::exp(std::lgamma(j + 0.5) + std::lgamma(ell + 1.0) - std::lgamma(j + ell + 1.5));
}

inline double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// ∫_{-1}^{1} t^j P_ell(t) dt for any j, ell >= 0.
inline double legendre_moment(int ell, int j) {
    if (ell < 0 || j < 0) throw DomainError("legendre_moment: need ell, j >= 0");
    if (j < ell || (j - ell) % 2 != 0) return 0.0;
    return std::exp(-ell * std::numbers::ln2 + log_binomial(j, ell)) * beta_half((j - ell) / 2, ell);
}

inline double odd_moment(int ell, int n) {
    if (ell < 0 || ell % 2 == 0) throw DomainError("odd_moment: ell must be odd");
    if (n < 0) throw DomainError("odd_moment: n must be >= 0");
    return legendre_moment(ell, 2 * n + 1);
}

// ∫_0^∞ p^s/(p^2 + 2bp + 1) dp
inline double inner_radial(double b, double s) {
    if (!(std::abs(b) < 1.0)) throw DomainError("inner_radial: need |b| < 1");
    if (!(s >= 0.0)) throw DomainError("inner_radial: need s >= 0");
    if (!(s < 1.0)) throw DomainError("inner_radial: s >= 1 diverges");
    const double theta = std::acos(b);
    const double sin_theta = std::sqrt((1.0 - b) * (1.0 + b));
    if (s == 0.0) return theta / sin_theta;
    return std::numbers::pi * std::sin(s * theta) / (std::sin(std::numbers::pi * s) * sin_theta);
}

struct LegendreQPair {
    double q;       // Q_ell(z)
    double q_prev;  // Q_{ell-1}(z), unused for ell = 0
};

// Second-kind Legendre functions for z > 1.  Upward recurrence is unstable
// once Q_ell has decayed a lot relative to Q_0; there the ratio
// Q_k/Q_{k-1} comes from the backward continued fraction.
inline LegendreQPair legendre_q_pair(int ell, double z, double z_minus_1) {
    const double q0 = 0.5 * std::log1p(2.0 / z_minus_1);
    if (ell == 0) return {q0, 0.0};
    const double root = std::sqrt(z_minus_1 * (z + 1.0));
    const double growth = std::log(z + root);
    if ((2 * ell + 1) * growth < 6.9) {
        double qm = q0, q = z * q0 - 1.0;
        for (int k = 1; k < ell; ++k) {
            const double qn = ((2 * k + 1) * z * q - k * qm) / (k + 1);
            qm = q;
            q = qn;
        }
        return {q, qm};
    }
    const int extra = static_cast<int>(std::ceil(20.0 / growth)) + 8;
    double h = 1.0 / (z + root);  // asymptotic ratio
    for (int k = ell + extra; k > ell; --k) h = k / ((2 * k + 1) * z - (k + 1) * h);
    const double h_ell = ell / ((2 * ell + 1) * z - (ell + 1) * h);
    // Q_ell = Q_0 * prod_{k=1..ell} h_k; continue the fraction downwards.
    double prod = h_ell, hk = h_ell;
    for (int k = ell - 1; k >= 1; --k) {
        hk = k / ((2 * k + 1) * z - (k + 1) * hk);
        prod *= hk;
    }
    const double q = q0 * prod;
    return {q, q / h_ell};
}

inline double legendre_q(int ell, double z) {
    if (ell < 0 || !(z > 1.0)) throw DomainError("legendre_q: need ell >= 0 and z > 1");
    return legendre_q_pair(ell, z, z - 1.0).q;
}

// W(A, B) = ∫_{-1}^{1} P_ell(t) (A + B t)^{-power} dt, power in {1, 2},
// A > |B|.  Taylor series in B/A for small ratios, Legendre Q otherwise.
inline double angular_kernel(int ell, int power, double A, double B) {
    if (ell < 0 || (power != 1 && power != 2)) throw DomainError("angular_kernel: need ell >= 0, power 1 or 2");
    const double aB = std::abs(B);
    if (!(A > aB)) throw DomainError("angular_kernel: need A > |B|");
    const double r = B / A;
    if (std::abs(r) <= 0.5) {
        // sum over j = ell, ell+2, ...: (power-dependent coefficient) (-r)^j M(ell, j)
        double moment = 2.0;
        for (int k = 1; k <= ell; ++k) moment *= static_cast<double>(k) / (2 * k + 1);
        double rj = std::pow(-r, ell);
        const double r2 = r * r;
        double sum = 0.0;
        for (int j = ell; j < ell + 400; j += 2) {
            const double term = (power == 1 ? 1.0 : j + 1.0) * rj * moment;
            sum += term;
            if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
            moment *= (j + 2.0) * (j + 1.0) / ((j + 2.0 - ell) * (j + ell + 3.0));
            rj *= r2;
        }
        return power == 1 ? sum / A : sum / (A * A);
    }
    const double z = A / aB;
    const double zm1 = (A - aB) / aB;
    const double sign = (B > 0 && ell % 2 == 1) ? -1.0 : 1.0;
    const auto qp = legendre_q_pair(ell, z, zm1);
    if (power == 1) return sign * 2.0 * qp.q / aB;
    const double zz1 = zm1 * (z + 1.0);
    const double dq = ell == 0 ? -1.0 / zz1 : ell * (z * qp.q - qp.q_prev) / zz1;
    // power 2 is -d/dA of power 1
    return -sign * 2.0 * dq / (aB * aB);
}

}  // namespace stm
