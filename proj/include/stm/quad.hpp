#pragma once

// One-dimensional adaptive quadrature: Gauss-Kronrod 21 with a global
// priority queue, tanh-sinh for declared endpoint singularities, and
// compactifying maps for [a, inf).  Works for real and complex integrands.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "stm/errors.hpp"

namespace stm::quad {

struct Singularity {
    double point;
    double exponent = 0.0;  // f ~ |x - point|^exponent; 0 is a plain breakpoint
};

struct QuadSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    std::size_t max_subdivisions = 2000;
    std::vector<Singularity> singularity_hints;
    std::optional<double> tail_exponent;  // f ~ x^e at infinity, e < -1
    bool check_decay = true;

    void validate() const {
        if (!(rel_tol > 0) || !(abs_tol >= 0) || max_subdivisions < 1)
            throw DomainError("QuadSpec: need rel_tol > 0, abs_tol >= 0, max_subdivisions >= 1");
        if (tail_exponent && !(*tail_exponent < -1))
            throw DomainError("QuadSpec: tail exponent must be < -1");
    }

    double tolerance(double magnitude) const { return std::max(abs_tol, rel_tol * magnitude); }

    // Settings for an integral nested inside another one: tighter, and
    // stripped of hints that belong to the outer variable.
    QuadSpec inner() const {
        QuadSpec s;
        s.rel_tol = std::max(rel_tol * 1e-1, 1e-13);
        s.abs_tol = abs_tol * 1e-2;
        s.max_subdivisions = max_subdivisions;
        s.check_decay = false;
        return s;
    }
    QuadSpec with_hints(std::vector<Singularity> h) const {
        QuadSpec s = *this;
        s.singularity_hints = std::move(h);
        return s;
    }
    QuadSpec with_tail(double e) const {
        QuadSpec s = *this;
        s.tail_exponent = e;
        return s;
    }
    QuadSpec without_hints() const {
        QuadSpec s = *this;
        s.singularity_hints.clear();
        s.tail_exponent.reset();
        return s;
    }
};

template <class T = double>
struct QuadResult {
    T value{};
    double error_estimate = 0.0;
    std::size_t subdivisions_used = 0;
    bool converged = false;
};

// Unwrap a result inside a library computation; budget exhaustion there is
// an error, not something to silently propagate.
template <class T>
T require(const QuadResult<T>& r, const char* what) {
    if (!r.converged) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", r.error_estimate);
        throw ConvergenceError(std::string(what) + ": quadrature did not converge (error estimate " + buf + ")");
    }
    return r.value;
}

namespace detail {

// Integrands may be f(x) or f(x, d) where d is x minus the nearer endpoint
// of the current piece, computed without cancellation (d > 0: left end,
// d < 0: right end).
template <class F>
inline constexpr bool takes_offset = std::is_invocable_v<F&, double, double>;

template <class F>
auto call(F& f, double x, double d) {
    if constexpr (takes_offset<F>)
        return f(x, d);
    else
        return f(x);
}

template <class F>
using value_t = std::decay_t<decltype(call(std::declval<F&>(), 0.0, 0.0))>;

inline bool finite(double v) { return std::isfinite(v); }
inline bool finite(const std::complex<double>& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

template <class T>
void check_value(const T& v, double x) {
    if (!finite(v)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "integrand is not finite at x = %.17g", x);
        throw DomainError(buf);
    }
}

// QUADPACK qk21 abscissae and weights.
inline constexpr std::array<double, 11> xgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> wgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525472140, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> wg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class T>
struct Panel {
    double a, b;
    T value;
    double error;
};

// pa, pb: ends of the enclosing piece, used for the offset argument.
template <class T, class F>
Panel<T> gk21(F& f, double a, double b, double pa, double pb) {
    using std::abs;
    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);
    const double dhlgth = std::abs(hlgth);
    std::array<T, 10> f1{}, f2{};
    auto offset = [&](double from_centre) {
        const double dl = (centr - pa) + from_centre, dr = (centr - pb) + from_centre;
        return dl <= -dr ? dl : dr;
    };
    const T fc = call(f, centr, offset(0.0));
    check_value(fc, centr);
    T resg{};
    T resk = fc * wgk[10];
    double resabs = std::abs(wgk[10]) * abs(fc);
    for (int j = 0; j < 10; ++j) {
        const double absc = hlgth * xgk[j];
        const double xl = centr - absc, xr = centr + absc;
        f1[j] = call(f, xl, offset(-absc));
        f2[j] = call(f, xr, offset(absc));
        check_value(f1[j], xl);
        check_value(f2[j], xr);
        resk += wgk[j] * (f1[j] + f2[j]);
        resabs += wgk[j] * (abs(f1[j]) + abs(f2[j]));
        if (j % 2 == 1) resg += wg[j / 2] * (f1[j] + f2[j]);
    }
    const T reskh = resk * 0.5;
    double resasc = wgk[10] * abs(fc - reskh);
    for (int j = 0; j < 10; ++j) resasc += wgk[j] * (abs(f1[j] - reskh) + abs(f2[j] - reskh));
    const T result = resk * hlgth;
    resabs *= dhlgth;
    resasc *= dhlgth;
    double err = abs((resk - resg) * hlgth);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {a, b, result, err};
}

// Global adaptive GK21 over a set of initial pieces.
template <class T, class F>
QuadResult<T> adaptive(F& f, const std::vector<std::pair<double, double>>& pieces, double rel_tol,
                       double abs_tol, std::size_t max_sub) {
    using std::abs;
    std::vector<Panel<T>> panels;
    std::vector<std::size_t> owner;  // piece index of each panel
    panels.reserve(pieces.size() + 2 * max_sub);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        panels.push_back(gk21<T>(f, pieces[i].first, pieces[i].second, pieces[i].first, pieces[i].second));
        owner.push_back(i);
    }

    // Max-heap on error; ties broken by index so the order is reproducible.
    auto cmp = [&](std::size_t i, std::size_t j) {
        if (panels[i].error != panels[j].error) return panels[i].error < panels[j].error;
        return i > j;
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);
    std::vector<char> alive(panels.size(), 1);
    T total{};
    double err = 0.0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
        heap.push(i);
        total += panels[i].value;
        err += panels[i].error;
    }
    std::vector<std::size_t> frozen;
    std::size_t splits = 0;
    while (err > std::max(abs_tol, rel_tol * abs(total)) && splits < max_sub && !heap.empty()) {
        const std::size_t i = heap.top();
        heap.pop();
        const Panel<T> p = panels[i];
        const double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b) ||
            (p.b - p.a) < 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(p.a), std::abs(p.b))) {
            frozen.push_back(i);  // cannot resolve further in double precision
            continue;
        }
        alive[i] = 0;
        const auto [pa, pb] = pieces[owner[i]];
        panels.push_back(gk21<T>(f, p.a, mid, pa, pb));
        panels.push_back(gk21<T>(f, mid, p.b, pa, pb));
        owner.push_back(owner[i]);
        owner.push_back(owner[i]);
        alive.push_back(1);
        alive.push_back(1);
        heap.push(panels.size() - 2);
        heap.push(panels.size() - 1);
        ++splits;
        const auto& l = panels[panels.size() - 2];
        const auto& r = panels[panels.size() - 1];
        total += (l.value + r.value) - p.value;
        err += (l.error + r.error) - p.error;
        if (splits % 64 == 0) {  // resum to stop drift in the running totals
            total = T{};
            err = 0.0;
            for (std::size_t k = 0; k < panels.size(); ++k)
                if (alive[k]) {
                    total += panels[k].value;
                    err += panels[k].error;
                }
        }
    }
    // Deterministic final summation in left-to-right order.
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < panels.size(); ++k)
        if (alive[k]) idx.push_back(k);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return panels[i].a < panels[j].a; });
    QuadResult<T> r;
    r.value = T{};
    r.error_estimate = 0.0;
    for (auto k : idx) {
        r.value += panels[k].value;
        r.error_estimate += panels[k].error;
    }
    r.subdivisions_used = splits + pieces.size();
    r.converged = r.error_estimate <= std::max(abs_tol, rel_tol * abs(r.value));
    return r;
}

// Pieces that each met the relative tolerance can still miss it on their sum,
// because their errors add and because they may cancel.  One retry, with the
// tolerance halved and scaled by the observed cancellation; 0 means no retry.
inline double cancellation_retry_tol(double rel_tol, bool converged, bool pieces_ok, double total, double mass) {
    if (converged || !pieces_ok || !(mass > 0.0)) return 0.0;
    const double rel = 0.5 * rel_tol * std::min(1.0, total / mass);
    return rel >= 64.0 * std::numeric_limits<double>::epsilon() ? rel : 0.0;
}

// Tanh-sinh on [a, b]; handles algebraic endpoint singularities.
template <class T, class F>
QuadResult<T> tanh_sinh(F& f, double a, double b, double rel_tol, double abs_tol) {
    using std::abs;
    constexpr double half_pi = 1.57079632679489661923;
    constexpr int max_level = 10;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    // Without the offset argument, nodes that round onto an endpoint are
    // unusable; stop before that happens.
    // Near an end at zero, a + off stays exact much further in; the floor
    // there only keeps singular integrands from overflowing.
    const double tiny = std::numeric_limits<double>::min() * 1e10;
    auto cut = [&](double end) {
        return takes_offset<F> ? tiny : std::max(1e-100 * h, 8.0 * std::numeric_limits<double>::epsilon() * std::abs(end));
    };
    const std::array<double, 2> min_off{cut(b), cut(a)};  // indexed by `left`
    const double t_max = 6.5;

    std::array<double, 2> edge_off{h, h}, edge_mass{0.0, 0.0};
    auto term = [&](double t) -> T {
        const double u = half_pi * std::sinh(t);
        const double ch = std::cosh(u);
        const double w = half_pi * std::cosh(t) / (ch * ch);
        const double off = h * 2.0 / (std::exp(2.0 * std::abs(u)) + 1.0);  // distance to nearer end
        const bool left = t < 0;
        if (off < min_off[left] || w == 0.0) return T{};
        double x, d;
        if (t > 0) {
            x = b - off;
            d = -off;
        } else if (t < 0) {
            x = a + off;
            d = off;
        } else {
            x = c;
            d = c - a;
        }
        const T v = call(f, x, d);
        check_value(v, x);
        // Crude size of the part of the range cut off next to each end.
        if (t != 0 && off < edge_off[left]) {
            edge_off[left] = off;
            edge_mass[left] = abs(v) * off;
        }
        return v * w;
    };

    T sum = term(0.0);
    double step = 1.0;
    for (double t = step; t <= t_max; t += step) sum += term(t) + term(-t);
    T prev = sum * (h * step);
    QuadResult<T> r;
    for (int level = 1; level <= max_level; ++level) {
        step *= 0.5;
        T add{};
        for (double t = step; t <= t_max; t += 2.0 * step) add += term(t) + term(-t);
        sum += add;
        const T cur = sum * (h * step);
        const double diff = abs(cur - prev) + (takes_offset<F> ? 0.0 : edge_mass[0] + edge_mass[1]);
        r.value = cur;
        r.error_estimate = diff;
        r.subdivisions_used = static_cast<std::size_t>(level);
        if (level >= 3 && diff <= std::max(abs_tol, rel_tol * abs(cur))) {
            r.converged = true;
            return r;
        }
        prev = cur;
    }
    r.converged = false;
    return r;
}

}  // namespace detail

// ∫_a^b f.  Hints strictly inside (a, b) split the range; a hint with a
// nonzero exponent makes the adjacent pieces use tanh-sinh.
template <class F>
auto integrate_finite(F&& f, double a, double b, const QuadSpec& spec = {}) {
    using T = detail::value_t<F>;
    spec.validate();
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
        throw DomainError("integrate_finite: need finite a < b");

    struct Cut {
        double x;
        bool singular;
    };
    std::vector<Cut> cuts{{a, false}, {b, false}};
    for (const auto& s : spec.singularity_hints) {
        const bool sing = s.exponent != 0.0;
        if (s.point == a)
            cuts.front().singular = cuts.front().singular || sing;
        else if (s.point == b)
            cuts.back().singular = cuts.back().singular || sing;
        else if (s.point > a && s.point < b)
            cuts.push_back({s.point, sing});
    }
    std::sort(cuts.begin(), cuts.end(), [](const Cut& x, const Cut& y) { return x.x < y.x; });
    std::vector<Cut> uniq;
    for (const auto& c : cuts) {
        if (!uniq.empty() && uniq.back().x == c.x)
            uniq.back().singular = uniq.back().singular || c.singular;
        else
            uniq.push_back(c);
    }

    std::vector<std::pair<double, double>> smooth;
    std::vector<std::pair<double, double>> rough;
    for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
        if (uniq[i].singular || uniq[i + 1].singular)
            rough.emplace_back(uniq[i].x, uniq[i + 1].x);
        else
            smooth.emplace_back(uniq[i].x, uniq[i + 1].x);
    }

    using std::abs;
    const double share = 1.0 / static_cast<double>(rough.size() + (smooth.empty() ? 0 : 1));
    auto pass = [&](double rel, bool& pieces_ok, double& mass) {
        QuadResult<T> total;
        pieces_ok = true;
        mass = 0.0;
        auto add = [&](const QuadResult<T>& r) {
            total.value += r.value;
            total.error_estimate += r.error_estimate;
            total.subdivisions_used += r.subdivisions_used;
            pieces_ok = pieces_ok && r.converged;
            mass += abs(r.value);
        };
        for (auto [lo, hi] : rough) add(detail::tanh_sinh<T>(f, lo, hi, rel * 0.5, spec.abs_tol * share));
        if (!smooth.empty()) add(detail::adaptive<T>(f, smooth, rel, spec.abs_tol * share, spec.max_subdivisions));
        // global error control: a sliver piece need not meet its own relative target
        total.converged = total.error_estimate <= spec.tolerance(abs(total.value));
        return total;
    };
    bool ok;
    double mass;
    auto total = pass(spec.rel_tol, ok, mass);
    const double rel = detail::cancellation_retry_tol(spec.rel_tol, total.converged, ok, abs(total.value), mass);
    if (rel > 0) {
        const auto retry = pass(rel, ok, mass);
        if (retry.converged)
            total = retry;
        else
            total.subdivisions_used += retry.subdivisions_used;
    }
    return total;
}

// ∫_a^∞ f.  Hints beyond a split off finite pieces; the rest is mapped onto
// [0, 1) with p = L + u/(1-u), or with a power-law map when the tail
// exponent is declared.
template <class F>
auto integrate_semi_infinite(F&& f, double a, const QuadSpec& spec = {}) {
    using T = detail::value_t<F>;
    using std::abs;
    spec.validate();
    if (!std::isfinite(a) || a < 0) throw DomainError("integrate_semi_infinite: need finite a >= 0");

    double last = a;
    double last_exponent = 0.0;
    std::vector<Singularity> finite_hints;
    for (const auto& s : spec.singularity_hints) {
        if (!std::isfinite(s.point) || s.point < a) continue;
        finite_hints.push_back(s);
        if (s.point > last || (s.point == last && s.exponent != 0.0)) {
            last = s.point;
            last_exponent = s.exponent;
        }
    }

    std::optional<double> tail_exponent = spec.tail_exponent;
    if (spec.check_decay) {
        // Sample p*|f(p)| over several decades; a tail that does not shrink
        // is not integrable.  A clean power law seen here is used as the
        // tail hint when none was given.
        const double base = std::max({1.0, last, a});
        std::array<double, 6> g{};
        for (int k = 0; k < 6; ++k) {
            const double p = base * std::pow(10.0, k + 4);
            const T v = detail::call(f, p, p - last);
            detail::check_value(v, p);
            g[k] = abs(v) * p;
        }
        if (g[5] > 0.0 && g[5] >= g[0])
            throw DomainError("integrate_semi_infinite: integrand does not decay faster than 1/p");
        if (!tail_exponent && g[5] > 0.0 && g[4] > 0.0 && g[3] > 0.0) {
            const double e1 = std::log10(g[4] / g[3]) - 1.0, e2 = std::log10(g[5] / g[4]) - 1.0;
            if (std::abs(e1 - e2) < 1e-2 && e2 < -1.0 && e2 > -6.0) tail_exponent = e2;
        }
    }

    auto pass = [&](double rel, bool& pieces_ok, double& mass) {
        QuadResult<T> total;
        pieces_ok = true;
        mass = 0.0;
        auto accumulate = [&](const QuadResult<T>& r) {
            total.value += r.value;
            total.error_estimate += r.error_estimate;
            total.subdivisions_used += r.subdivisions_used;
            pieces_ok = pieces_ok && r.converged;
            mass += abs(r.value);
        };

        QuadSpec piece = spec;
        piece.tail_exponent.reset();
        piece.abs_tol = spec.abs_tol * 0.5;
        piece.rel_tol = rel;

        if (tail_exponent) {
            const double gamma = *tail_exponent;
            // a tiny last hint must not squeeze the bulk into u ~ 0
            const double B = std::max(2.0 * last, 1.0);
            piece.singularity_hints = finite_hints;
            accumulate(integrate_finite(f, a, B, piece));
            const double kappa = 1.0 / (-gamma - 1.0);
            auto g = [&](double u) -> T {
                const double p = B * std::pow(u, -kappa);
                if (!std::isfinite(p)) return T{};
                return detail::call(f, p, p - B) * (B * kappa * std::pow(u, -kappa - 1.0));
            };
            accumulate(detail::adaptive<T>(g, {{0.0, 1.0}}, rel, piece.abs_tol, spec.max_subdivisions));
        } else {
            if (last > a) {
                piece.singularity_hints = finite_hints;
                accumulate(integrate_finite(f, a, last, piece));
            }
            auto g = [&](double u, double d) -> T {
                const double om = d < 0 ? -d : 1.0 - u;  // 1 - u without cancellation near u = 1
                const double p = last + u / om;
                const double off = d > 0 ? d / (1.0 - d) : p - last;
                return detail::call(f, p, off) / (om * om);
            };
            QuadSpec tail = piece.without_hints();
            if (last_exponent != 0.0) tail.singularity_hints.push_back({0.0, last_exponent});
            accumulate(integrate_finite(g, 0.0, 1.0, tail));
        }
        // global error control: a sliver piece need not meet its own relative target
        total.converged = total.error_estimate <= spec.tolerance(abs(total.value));
        return total;
    };
    bool ok;
    double mass;
    auto total = pass(spec.rel_tol, ok, mass);
    const double rel = detail::cancellation_retry_tol(spec.rel_tol, total.converged, ok, abs(total.value), mass);
    if (rel > 0) {
        const auto retry = pass(rel, ok, mass);
        if (retry.converged)
            total = retry;
        else
            total.subdivisions_used += retry.subdivisions_used;
    }
    return total;
}

}  // namespace stm::quad
