// stm: command-line front end.  Data goes to stdout, diagnostics to stderr.
// Exit codes: 0 success, 2 bad input or out-of-regime mass, 3 non-convergence.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cli/cache.hpp"
#include "cli/charge_spec.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"
#include "stm/stm.hpp"

namespace {

using namespace stm;
using cli::format_number;
using cli::OutputRecord;

struct Context {
    cli::RunConfig cfg;
    quad::QuadSpec spec;
    std::optional<cli::SCurveCache> cache;

    OutputRecord record(const std::string& command) const {
        OutputRecord r;
        r.command = command;
        r.version = kVersion;
        r.tolerance = {cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions};
        return r;
    }

    RootReport s_of_m(MassParam m) {
        if (cache) return cache->s_of_m(m, spec);
        return stm::s_of_m(m, spec);
    }
};

// Runs body(i) for i < n on `threads` workers; results land by index.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i; !failed && (i = next++) < n;) {
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

OutputRecord cmd_critical_masses(Context& ctx, int ell) {
    auto r = ctx.record("critical-masses");
    r.inputs = {{"l", std::to_string(ell)}};
    r.columns = {"l", "m_star", "m_star_star", "residual_star", "residual_star_star"};
    const auto p = critical_pair({ell, 0}, ctx.spec);
    r.add_row({double(ell), p.m_star.m, p.m_star_star.m, p.residual_star, p.residual_star_star});
    return r;
}

OutputRecord cmd_s_curve(Context& ctx, double m_min, double m_max, int points) {
    if (!(m_min > 0) || !(m_max >= m_min)) throw DomainError("s-curve: need 0 < m-min <= m-max");
    if (points < 1 || (points == 1 && m_min != m_max)) throw DomainError("s-curve: need points >= 2 (or m-min == m-max)");
    // Check the whole range up front so a bad bound fails before any work.
    ctx.s_of_m(MassParam(m_min));
    ctx.s_of_m(MassParam(m_max));

    std::vector<double> ms(points);
    for (int i = 0; i < points; ++i)
        ms[i] = points == 1 ? m_min : m_min + (m_max - m_min) * static_cast<double>(i) / (points - 1);
    ms.back() = m_max;
    std::vector<RootReport> out(ms.size());
    std::vector<char> todo(ms.size(), 1);
    if (ctx.cache)
        for (std::size_t i = 0; i < ms.size(); ++i)
            if (const auto* hit = ctx.cache->find(ms[i])) out[i] = *hit, todo[i] = 0;
    parallel_for(ms.size(), ctx.cfg.threads, [&](std::size_t i) {
        if (todo[i]) out[i] = stm::s_of_m(MassParam(ms[i]), ctx.spec);
    });
    if (ctx.cache)
        for (std::size_t i = 0; i < ms.size(); ++i) ctx.cache->insert(ms[i], out[i]);

    auto r = ctx.record("s-curve");
    r.inputs = {{"m_min", format_number(m_min)}, {"m_max", format_number(m_max)}, {"points", std::to_string(points)}};
    r.columns = {"m", "s", "residual"};
    for (std::size_t i = 0; i < ms.size(); ++i) r.add_row({ms[i], out[i].value, out[i].residual});
    return r;
}

OutputRecord cmd_nu(Context& ctx, double m_value) {
    const MassParam m(m_value);
    const auto rep = nu(m, ctx.s_of_m(m).value, ctx.spec);
    auto r = ctx.record("nu");
    r.inputs = {{"m", format_number(m_value)}};
    r.columns = {"m", "s", "nu", "nu_signed", "nu_positive", "rel_gap", "outer_only"};
    r.add_row({m.m, rep.s, rep.value, rep.signed_value, rep.positive_value, rep.rel_gap, rep.outer_only});
    return r;
}

OutputRecord cmd_kernel_check(Context& ctx, double m_value, double p_min, double p_max, int points) {
    if (!(p_min > 0) || !(p_max > p_min) || points < 2) throw DomainError("kernel-check: need 0 < p-min < p-max, points >= 2");
    const MassParam m(m_value);
    const double s = ctx.s_of_m(m).value;
    if (!(s > 0.0 && s < 1.0)) throw RegimeError("kernel-check: s(m) is at an endpoint; m must lie strictly inside (m*, m**)");
    auto r = ctx.record("kernel-check");
    r.inputs = {{"m", format_number(m_value)}, {"p_min", format_number(p_min)}, {"p_max", format_number(p_max)},
                {"points", std::to_string(points)}};
    r.columns = {"p", "s", "gamma0_power", "scaled_residual"};
    double worst = 0.0;
    const double l0 = std::log(p_min), l1 = std::log(p_max);
    for (int i = 0; i < points; ++i) {
        const double p = i == points - 1 ? p_max : std::exp(l0 + (l1 - l0) * i / (points - 1));
        const double v = apply_power(m, s, p, ctx.spec);
        const double scaled = std::abs(v) * std::pow(p, 1.0 - s);
        worst = std::max(worst, scaled);
        r.add_row({p, s, v, scaled});
    }
    std::cerr << "kernel-check: max |Gamma_0 k^{-2+s}| p^{1-s} = " << format_number(worst) << '\n';
    return r;
}

std::array<double, 3> parse_beta(const std::string& text) {
    std::array<double, 3> b{};
    std::vector<std::string> f;
    std::string cur;
    for (char ch : text) {
        if (ch == ',') f.push_back(cur), cur.clear();
        else cur += ch;
    }
    f.push_back(cur);
    if (f.size() != 3) throw DomainError("bound: --beta needs three comma-separated values (n = -1, 0, +1)");
    for (int i = 0; i < 3; ++i) b[i] = cli::detail::to_double(f[i], "beta");
    return b;
}

OutputRecord cmd_bound(Context& ctx, double m_value, const std::string& beta_text) {
    const MassParam m(m_value);
    const ExtensionParams params{parse_beta(beta_text)};
    const auto rep = e0_bound(m, params, ctx.s_of_m(m).value, ctx.spec);
    auto r = ctx.record("bound");
    r.inputs = {{"m", format_number(m_value)}, {"beta", beta_text}};
    r.columns = {"m",        "s",        "D1",       "D2",   "Lambda1_surrogate", "c1_lower",
                 "a_star",   "c2_upper", "beta_max", "E0",   "log10_abs_E0",      "positive_form"};
    r.add_row({rep.m, rep.s, rep.D1, rep.D2, rep.Lambda1, rep.c1_lower, rep.a_star, rep.c2_upper, rep.beta_max,
               rep.E0, rep.log10_abs_E0, rep.positive_form ? 1.0 : 0.0});
    return r;
}

OutputRecord cmd_schur(Context& ctx, double m_value, std::optional<double> a) {
    const MassParam m(m_value);
    const auto lc = lower_constant(m, ctx.spec);
    const auto lt = lower_constant_tilde(m, ctx.spec);
    const double at = a.value_or(lc.a_star);
    const auto k = schur_constants(m, at, ctx.spec);
    auto r = ctx.record("schur");
    r.inputs = {{"m", format_number(m_value)}, {"a", a ? format_number(*a) : std::string("a_star")}};
    r.columns = {"m",  "c1_lower", "a_star", "c1_lower_tilde", "a_star_tilde", "c2_upper",
                 "a",  "c0",       "c1s",    "c2s",            "c1t",          "c2t"};
    r.add_row({m.m, lc.c1_lower, lc.a_star, lt.c1_lower, lt.a_star, upper_constant(m, ctx.spec), at, k.c0, k.c1s,
               k.c2s, k.c1t, k.c2t});
    return r;
}

struct FormArgs {
    double m = 0.09;
    double lambda = 1.0;
    double eps = 0.0;
    int ell = 1;
    int n = 0;
    std::vector<std::string> charges;
    std::vector<std::string> forms{"phi0", "phi_lambda", "potential_norm"};
    bool mc = false;
};

OutputRecord cmd_form_eval(Context& ctx, const FormArgs& a) {
    const MassParam m(a.m);
    SectorCharge sc{{a.ell, a.n}, {}, {}};
    for (const auto& c : a.charges) {
        sc.profile += cli::parse_charge(c);
        sc.label += (sc.label.empty() ? "" : " + ") + c;
    }
    if (sc.profile.empty()) throw DomainError("form-eval: give at least one --charge");
    require_odd(sc.sector, "form-eval");

    auto r = ctx.record("form-eval");
    r.inputs = {{"m", format_number(a.m)},     {"lambda", format_number(a.lambda)}, {"eps", format_number(a.eps)},
                {"l", std::to_string(a.ell)}, {"n", std::to_string(a.n)},           {"charge", sc.label}};
    std::vector<double> row;
    auto put = [&](const std::string& name, double v) {
        r.columns.push_back(name);
        row.push_back(v);
    };
    put("m", a.m);
    put("lambda", a.lambda);
    for (const auto& f : a.forms) {
        if (f == "phi0") {
            put("phi0", phi0(m, sc, ctx.spec));
        } else if (f == "phi_lambda") {
            put("phi_lambda", phi_lambda(m, a.lambda, sc, ctx.spec));
        } else if (f == "potential_norm") {
            const double pn = potential_norm(m, a.lambda, a.eps, sc, ctx.spec);
            const double hn = h_minus_half_norm_sq(a.lambda, sc, a.eps, ctx.spec);
            const double lo = lower_constant(m, ctx.spec).c1_lower, hi = upper_constant(m, ctx.spec);
            put("potential_norm", pn);
            put("h_minus_half_norm_sq", hn);
            put("c1_lower", lo);
            put("c2_upper", hi);
            put("sandwich_holds", lo * hn <= pn && pn <= hi * hn ? 1.0 : 0.0);
        } else {
            throw DomainError("form-eval: unknown form '" + f + "' (phi0, phi_lambda, potential_norm)");
        }
    }
    if (a.mc) {
        const auto e = mc::potential_norm_mc(m, a.lambda, a.eps, sc, ctx.cfg.mc_samples, ctx.cfg.mc_seed, ctx.cfg.threads);
        r.inputs.emplace_back("mc_seed", std::to_string(ctx.cfg.mc_seed));
        r.inputs.emplace_back("mc_samples", std::to_string(ctx.cfg.mc_samples));
        put("mc_mean", e.mean);
        put("mc_std_error", e.std_error);
    }
    r.add_row(row);
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerics for the 2+1 fermion problem at unitarity (zero-range STM Hamiltonians)."};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    app.set_version_flag("--version", std::string(kVersion));

    std::optional<double> rel_tol, abs_tol;
    std::optional<std::size_t> max_sub;
    std::optional<std::uint64_t> seed, mc_samples;
    std::optional<unsigned> threads;
    std::optional<std::string> format, cache_path;
    std::string config_path;
    app.add_option("--rel-tol", rel_tol, "relative tolerance (default 1e-10)");
    app.add_option("--abs-tol", abs_tol, "absolute tolerance (default 1e-14)");
    app.add_option("--max-subdivisions", max_sub, "adaptive subdivision budget (default 2000)");
    app.add_option("--format", format, "csv or json (default csv)")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--config", config_path, "key=value file; flags override it")->check(CLI::ExistingFile);
    app.add_option("--cache", cache_path, "CSV cache of the s(m) curve, read and extended");
    app.add_option("--seed", seed, "Monte-Carlo seed");
    app.add_option("--mc-samples", mc_samples, "Monte-Carlo sample count (default 1e7)");
    app.add_option("--threads", threads, "worker threads for sweeps and Monte Carlo (default 1)");

    std::function<OutputRecord(Context&)> run;

    int ell = 1;
    auto* crit = app.add_subcommand("critical-masses", "m*_l = m_l(0) and m**_l = m_l(1) for odd l");
    crit->add_option("--l", ell, "angular momentum (odd)")->required();
    crit->callback([&] { run = [&](Context& c) { return cmd_critical_masses(c, ell); }; });

    double m_min = 0, m_max = 0;
    int points = 20;
    auto* curve = app.add_subcommand("s-curve", "s(m) on an equispaced grid inside (m*, m**)");
    curve->add_option("--m-min", m_min)->required();
    curve->add_option("--m-max", m_max)->required();
    curve->add_option("--points", points, "grid points (default 20)");
    curve->callback([&] { run = [&](Context& c) { return cmd_s_curve(c, m_min, m_max, points); }; });

    double m = 0.09;
    auto* nu_cmd = app.add_subcommand("nu", "nu(m) by two representations");
    nu_cmd->add_option("--m", m)->required();
    nu_cmd->callback([&] { run = [&](Context& c) { return cmd_nu(c, m); }; });

    double p_min = 1e-2, p_max = 1e2;
    int kpoints = 9;
    auto* kern = app.add_subcommand("kernel-check", "Gamma_0 k^{-2+s(m)} over a range of p (should vanish)");
    kern->add_option("--m", m)->required();
    kern->add_option("--p-min", p_min, "default 1e-2");
    kern->add_option("--p-max", p_max, "default 1e2");
    kern->add_option("--points", kpoints, "log-spaced points (default 9)");
    kern->callback([&] { run = [&](Context& c) { return cmd_kernel_check(c, m, p_min, p_max, kpoints); }; });

    std::string beta = "0,0,0";
    auto* bound = app.add_subcommand("bound", "explicit lower bound E0 and its ingredients");
    bound->add_option("--m", m)->required();
    bound->add_option("--beta", beta, "beta_{-1},beta_0,beta_{+1}; 'inf' pins q_n = 0 (default 0,0,0)");
    bound->callback([&] { run = [&](Context& c) { return cmd_bound(c, m, beta); }; });

    std::optional<double> schur_a;
    auto* schur = app.add_subcommand("schur", "Schur-test constants of the norm equivalence");
    schur->add_option("--m", m)->required();
    schur->add_option("--a", schur_a, "evaluate c0..c2t at this a > 1 (default: the maximizer)");
    schur->callback([&] { run = [&](Context& c) { return cmd_schur(c, m, schur_a); }; });

    FormArgs fa;
    auto* forms = app.add_subcommand("form-eval", "quadratic forms and potential norm of a sector charge");
    forms->add_option("--m", fa.m)->required();
    forms->add_option("--lambda", fa.lambda, "spectral shift lambda >= 0 (default 1)");
    forms->add_option("--eps", fa.eps, "infrared cut-off for the potential norm (default 0)");
    forms->add_option("--l", fa.ell, "sector l (odd, default 1)");
    forms->add_option("--n", fa.n, "azimuthal index (default 0)");
    forms->add_option("--charge", fa.charges, "power:q,gamma[,trunc=below|above,R] | gauss:q,scale | file:PATH")
        ->required();
    forms->add_option("--forms", fa.forms, "subset of phi0,phi_lambda,potential_norm")->delimiter(',');
    forms->add_flag("--mc", fa.mc, "also estimate the potential norm by Monte Carlo");
    forms->callback([&] { run = [&](Context& c) { return cmd_form_eval(c, fa); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Context ctx;
        if (!config_path.empty()) cli::load_config(ctx.cfg, config_path);
        if (rel_tol) ctx.cfg.rel_tol = *rel_tol;
        if (abs_tol) ctx.cfg.abs_tol = *abs_tol;
        if (max_sub) ctx.cfg.max_subdivisions = *max_sub;
        if (seed) ctx.cfg.mc_seed = *seed;
        if (mc_samples) ctx.cfg.mc_samples = *mc_samples;
        if (threads) ctx.cfg.threads = *threads;
        if (format) ctx.cfg.format = *format;
        if (cache_path) ctx.cfg.cache = *cache_path;
        ctx.cfg.validate();
        ctx.spec = ctx.cfg.spec();
        if (!ctx.cfg.cache.empty()) {
            ctx.cache.emplace(ctx.cfg.cache, cli::Tolerance{ctx.cfg.rel_tol, ctx.cfg.abs_tol, ctx.cfg.max_subdivisions});
            if (ctx.cache->stale())
                std::cerr << "cache: " << ctx.cfg.cache << " was written under other tolerances; not used\n";
        }
        const OutputRecord rec = run(ctx);
        cli::write(std::cout, rec, ctx.cfg.format);
        std::cout.flush();
        if (ctx.cache) ctx.cache->save();
        return 0;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const RegimeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
