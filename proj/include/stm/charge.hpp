#pragma once

// Radial charge profiles xi(k) in one angular sector.  A Charge is a sum of
// components; each knows its breakpoints and its power-law behaviour at
// k -> 0 (head) and k -> inf (tail), which the integrators need.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "stm/errors.hpp"

namespace stm {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Support { All, BelowR, AboveR, Between };  // keep k < R, k >= R, or R <= k < R2

struct PowerLawCharge {
    cplx amplitude{1.0, 0.0};
    double gamma = 2.0;  // profile k^{-gamma}
    Support support = Support::All;
    double R = 1.0;
    double R2 = kInf;  // upper end for Between

    cplx value(double k) const {
        const bool below = k < R, above = k >= (support == Support::Between ? R2 : R);
        if ((support == Support::BelowR && !below) || (support == Support::AboveR && below) ||
            (support == Support::Between && (below || above)))
            return 0.0;
        return amplitude * std::pow(k, -gamma);
    }
    double head() const { return support == Support::AboveR || support == Support::Between ? kInf : -gamma; }
    double tail() const { return support == Support::BelowR || support == Support::Between ? -kInf : -gamma; }
    std::vector<double> breakpoints() const {
        if (support == Support::All) return {};
        if (support == Support::Between) return {R, R2};
        return {R};
    }
};

// amplitude * (k/scale) * exp(-(k/scale)^2)
struct GaussianCharge {
    cplx amplitude{1.0, 0.0};
    double scale = 1.0;

    cplx value(double k) const {
        const double x = k / scale;
        return amplitude * (x * std::exp(-x * x));
    }
    double head() const { return 1.0; }
    double tail() const { return -kInf; }
    std::vector<double> breakpoints() const { return {}; }
};

// Samples on increasing nodes, interpolated by a monotone cubic (Fritsch-
// Carlson) in log k, separately for the real and imaginary parts.  Outside
// the grid the profile continues as a power law with the declared exponents.
class RadialGridCharge {
public:
    RadialGridCharge(std::vector<double> nodes, std::vector<cplx> samples, double head_exponent,
                     double tail_exponent)
        : k_(std::move(nodes)), y_(std::move(samples)), head_(head_exponent), tail_(tail_exponent) {
        if (k_.size() < 2 || k_.size() != y_.size())
            throw DomainError("grid charge: need at least two nodes and one sample per node");
        for (std::size_t i = 0; i < k_.size(); ++i) {
            if (!(k_[i] > 0) || !std::isfinite(k_[i])) throw DomainError("grid charge: nodes must be positive");
            if (i > 0 && !(k_[i] > k_[i - 1])) throw DomainError("grid charge: nodes must be strictly increasing");
            if (!std::isfinite(y_[i].real()) || !std::isfinite(y_[i].imag()))
                throw DomainError("grid charge: samples must be finite");
        }
        if (!std::isfinite(head_) || !std::isfinite(tail_))
            throw DomainError("grid charge: head and tail exponents must be finite");
        x_.resize(k_.size());
        for (std::size_t i = 0; i < k_.size(); ++i) x_[i] = std::log(k_[i]);
        d_re_ = slopes([](cplx v) { return v.real(); });
        d_im_ = slopes([](cplx v) { return v.imag(); });
    }

    template <class F>
    static RadialGridCharge sample(F&& f, double k_min, double k_max, std::size_t n, double head_exponent,
                                   double tail_exponent) {
        if (!(k_min > 0) || !(k_max > k_min) || n < 2) throw DomainError("grid charge: bad sampling range");
        std::vector<double> k(n);
        std::vector<cplx> y(n);
        const double l0 = std::log(k_min), l1 = std::log(k_max);
        for (std::size_t i = 0; i < n; ++i) {
            k[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
            y[i] = cplx(f(k[i]));
        }
        k.front() = k_min;
        k.back() = k_max;
        return RadialGridCharge(std::move(k), std::move(y), head_exponent, tail_exponent);
    }

    cplx value(double k) const {
        if (k <= k_.front()) return y_.front() * std::pow(k / k_.front(), head_);
        if (k >= k_.back()) return y_.back() * std::pow(k / k_.back(), tail_);
        const double x = std::log(k);
        const std::size_t i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        const double re = h00 * y_[i].real() + h * h10 * d_re_[i] + h01 * y_[i + 1].real() + h * h11 * d_re_[i + 1];
        const double im = h00 * y_[i].imag() + h * h10 * d_im_[i] + h01 * y_[i + 1].imag() + h * h11 * d_im_[i + 1];
        return {re, im};
    }

    double head() const { return head_; }
    double tail() const { return tail_; }
    std::vector<double> breakpoints() const { return {k_.front(), k_.back()}; }
    const std::vector<double>& nodes() const { return k_; }
    const std::vector<cplx>& samples() const { return y_; }

private:
    // End slopes follow the declared power laws so the extension joins C^1.
    template <class Part>
    std::vector<double> slopes(Part part) const {
        const std::size_t n = k_.size();
        std::vector<double> d(n), delta(n - 1), h(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            delta[i] = (part(y_[i + 1]) - part(y_[i])) / h[i];
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0) {
                d[i] = 0.0;
            } else {
                const double w1 = 2 * h[i] + h[i - 1], w2 = h[i] + 2 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d.front() = head_ * part(y_.front());
        d.back() = tail_ * part(y_.back());
        return d;
    }

    std::vector<double> k_, x_;
    std::vector<cplx> y_;
    std::vector<double> d_re_, d_im_;
    double head_, tail_;
};

using ChargeComponent = std::variant<PowerLawCharge, GaussianCharge, RadialGridCharge>;

struct Charge {
    std::vector<ChargeComponent> parts;

    Charge() = default;
    Charge(ChargeComponent c) { parts.push_back(std::move(c)); }  // NOLINT: implicit on purpose

    cplx operator()(double k) const {
        cplx v = 0.0;
        for (const auto& p : parts) v += std::visit([k](const auto& c) { return c.value(k); }, p);
        return v;
    }
    // Most singular behaviour at 0 and slowest decay at infinity.
    double head() const {
        double h = kInf;
        for (const auto& p : parts) h = std::min(h, std::visit([](const auto& c) { return c.head(); }, p));
        return h;
    }
    double tail() const {
        double t = -kInf;
        for (const auto& p : parts) t = std::max(t, std::visit([](const auto& c) { return c.tail(); }, p));
        return t;
    }
    std::vector<double> breakpoints() const {
        std::vector<double> b;
        for (const auto& p : parts) {
            auto v = std::visit([](const auto& c) { return c.breakpoints(); }, p);
            b.insert(b.end(), v.begin(), v.end());
        }
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
        return b;
    }
    // Breakpoints plus the scales of localized components: points a
    // quadrature must not step over.
    std::vector<double> features() const {
        std::vector<double> f = breakpoints();
        for (const auto& p : parts)
            if (const auto* g = std::get_if<GaussianCharge>(&p)) f.push_back(g->scale);
        std::sort(f.begin(), f.end());
        f.erase(std::unique(f.begin(), f.end()), f.end());
        return f;
    }
    bool empty() const { return parts.empty(); }

    Charge& operator+=(const Charge& o) {
        parts.insert(parts.end(), o.parts.begin(), o.parts.end());
        return *this;
    }
    friend Charge operator+(Charge a, const Charge& b) { return a += b; }

    // Multiply every component by z (grid samples are rescaled, not copied lazily).
    Charge scaled(cplx z) const {
        Charge out;
        for (const auto& p : parts) {
            std::visit(
                [&](const auto& c) {
                    using C = std::decay_t<decltype(c)>;
                    if constexpr (std::is_same_v<C, RadialGridCharge>) {
                        std::vector<cplx> y = c.samples();
                        for (auto& v : y) v *= z;
                        out.parts.emplace_back(RadialGridCharge(c.nodes(), std::move(y), c.head(), c.tail()));
                    } else {
                        C d = c;
                        d.amplitude *= z;
                        out.parts.emplace_back(d);
                    }
                },
                p);
        }
        return out;
    }
};

}  // namespace stm
