#pragma once

// Six-dimensional Monte Carlo for ||G_lambda eta||^2 straight from
//   ∫∫ d^3k1 d^3k2 |eta(k1) - eta(k2)|^2 / (k1^2 + k2^2 + 2 k1.k2/(m+1) + lambda)^2,
// eta(k) = eta(|k|) Y_l^n(k/|k|).  Used as an oracle for the reduced formula.
//
// Random numbers come from a counter-based stream (SplitMix64 of seed and
// sample index), so results depend only on (seed, samples): not on thread
// count or scheduling.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <thread>
#include <vector>

#include "stm/errors.hpp"
#include "stm/ffunc.hpp"
#include "stm/forms.hpp"
#include "stm/specfun.hpp"

namespace stm::mc {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Uniform in (0, 1) for stream position `counter` under `seed`.
inline double uniform(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t z = splitmix64(splitmix64(seed) ^ (counter * 0xD1B54A32D192ED03ULL));
    return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

// Y_l^n on the unit sphere; n = 0 for any l, n = +-1 for l = 1.
inline cplx spherical_harmonic(int ell, int n, double cos_theta, double phi) {
    const double pi = std::numbers::pi;
    if (n == 0) return std::sqrt((2 * ell + 1) / (4 * pi)) * legendre(ell, std::clamp(cos_theta, -1.0, 1.0));
    if (ell == 1 && (n == 1 || n == -1)) {
        const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
        return -n * std::sqrt(3.0 / (8.0 * pi)) * sin_theta * std::polar(1.0, n * phi);
    }
    throw DomainError("spherical_harmonic: only n = 0, or l = 1 with n = +-1, is supported");
}

namespace detail {

// Radial proposal: equal mixture of sigma/(sigma+k)^2 for three scales, a
// heavy tail alpha (1+k)^{-1-alpha} and (1/4) k^{-3/4} on (0, 1).  The last
// two keep the weight variance finite for power-law charges k^{-gamma}:
// near k1 ~ k2 -> inf that needs alpha < 2 gamma - 2, near 0 gamma < 1.43.
inline constexpr std::array<double, 3> kScales = {0.25, 1.0, 4.0};
inline constexpr double kTailAlpha = 0.25;
inline constexpr int kComponents = 5;

inline double radial_density(double k) {
    double h = 0.0;
    for (double s : kScales) h += s / ((s + k) * (s + k));
    h += kTailAlpha * std::pow(1.0 + k, -1.0 - kTailAlpha);
    if (k < 1.0) h += 0.25 * std::pow(k, -0.75);
    return h / kComponents;
}

inline double radial_draw(double u_pick, double u) {
    const int j = std::min(kComponents - 1, static_cast<int>(u_pick * kComponents));
    if (j < 3) return kScales[j] * u / (1.0 - u);
    if (j == 3) return std::pow(1.0 - u, -1.0 / kTailAlpha) - 1.0;
    const double u2 = u * u;
    return u2 * u2;
}

struct Moments {
    double n = 0.0, mean = 0.0, m2 = 0.0;
    void add(double x) {
        n += 1.0;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    void merge(const Moments& o) {
        if (o.n == 0) return;
        const double tot = n + o.n;
        const double d = o.mean - mean;
        mean += d * o.n / tot;
        m2 += o.m2 + d * d * n * o.n / tot;
        n = tot;
    }
};

inline constexpr std::uint64_t kBlock = 1 << 15;

}  // namespace detail

inline Estimate potential_norm_mc(MassParam m, double lambda, double eps, const SectorCharge& sc,
                                  std::uint64_t samples, std::uint64_t seed, unsigned threads = 1) {
    require_odd(sc.sector, "potential_norm_mc");
    if (!(lambda >= 0.0) || !(eps >= 0.0)) throw DomainError("potential_norm_mc: need lambda, eps >= 0");
    if (samples < 2) throw DomainError("potential_norm_mc: need at least two samples");
    const int ell = sc.sector.ell, n = sc.sector.n;
    spherical_harmonic(ell, n, 0.0, 0.0);  // reject unsupported (l, n) up front
    const double c = m.c();
    const double pi = std::numbers::pi;

    auto one = [&](std::uint64_t i) {
        const std::uint64_t base = 8 * i;
        std::array<double, 3> v1{}, v2{};
        double k[2];
        cplx eta[2];
        double jac = 1.0;
        for (int w = 0; w < 2; ++w) {
            const std::uint64_t b = base + 4 * w;
            const double kk = detail::radial_draw(uniform(seed, b), uniform(seed, b + 1));
            const double ct = 2.0 * uniform(seed, b + 2) - 1.0;
            const double ph = 2.0 * pi * uniform(seed, b + 3);
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            auto& v = w == 0 ? v1 : v2;
            v = {kk * st * std::cos(ph), kk * st * std::sin(ph), kk * ct};
            k[w] = kk;
            // density in R^3 is h(k) / (4 pi k^2)
            jac *= 4.0 * pi * kk * kk / detail::radial_density(kk);
            eta[w] = kk >= eps ? sc.profile(kk) * spherical_harmonic(ell, n, ct, ph) : cplx(0.0);
        }
        if (k[0] < eps || k[1] < eps) return 0.0;
        const double dot = v1[0] * v2[0] + v1[1] * v2[1] + v1[2] * v2[2];
        const double d = k[0] * k[0] + k[1] * k[1] + 2.0 * dot / c + lambda;
        return std::norm(eta[0] - eta[1]) / (d * d) * jac;
    };

    const std::uint64_t nblocks = (samples + detail::kBlock - 1) / detail::kBlock;
    std::vector<detail::Moments> blocks(nblocks);
    auto work = [&](unsigned tid, unsigned nt) {
        for (std::uint64_t b = tid; b < nblocks; b += nt) {
            detail::Moments mo;
            const std::uint64_t end = std::min(samples, (b + 1) * detail::kBlock);
            for (std::uint64_t i = b * detail::kBlock; i < end; ++i) mo.add(one(i));
            blocks[b] = mo;
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
        for (auto& th : pool) th.join();
    }
    detail::Moments tot;
    for (const auto& b : blocks) tot.merge(b);
    Estimate e;
    e.samples = samples;
    e.mean = tot.mean;
    e.std_error = std::sqrt(tot.m2 / (tot.n - 1.0) / tot.n);
    return e;
}

}  // namespace stm::mc
