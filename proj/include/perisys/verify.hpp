#pragma once

// Post-hoc validators: the Picone inequality, the periodic ODE bound, weak
// residuals of a computed orbit, a priori bound compliance, and a Hoelder
// spot check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "perisys/error.hpp"
#include "perisys/grid.hpp"
#include "perisys/nonlocal.hpp"
#include "perisys/problem.hpp"

namespace perisys {

enum class CheckStatus { Pass, Fail, Skipped, Info };

inline const char* to_string(CheckStatus s)
{
    switch (s) {
    case CheckStatus::Pass: return "Pass";
    case CheckStatus::Fail: return "Fail";
    case CheckStatus::Skipped: return "Skipped";
    case CheckStatus::Info: return "Info";
    }
    return "Unknown";
}

/// margin is signed: negative means violated.
struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::Pass;
    double margin = 0.0;
    std::size_t samples = 0;
    double value = 0.0; // the measured quantity (residual, Gamma, norm...)
    std::string detail;

    bool passed() const { return status == CheckStatus::Pass || status == CheckStatus::Info; }
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    unsigned long long seed = 0;

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) {
            return c.status != CheckStatus::Fail;
        });
    }
    const CheckResult* find(const std::string& name) const
    {
        for (const auto& c : checks)
            if (c.name == name)
                return &c;
        return nullptr;
    }
};

// ---------------------------------------------------------------------------
// Picone

struct PiconeSample {
    double u = 1.0, phi = 1.0;
    std::vector<double> grad_u, grad_phi;
};

struct PiconeTerms {
    double lhs = 0.0, rhs = 0.0, scale = 1.0;
    bool violated() const { return lhs > rhs + 1e-12 * scale; }
};

/// lhs = |grad u|^{p-2} grad u . (p phi^{p-1} grad phi / u^{p-1} - (p-1) phi^p grad u / u^p),
/// rhs = |grad phi|^p.
inline PiconeTerms picone_terms(double p, const PiconeSample& s)
{
    double nu2 = 0.0, np2 = 0.0, dot = 0.0;
    for (std::size_t i = 0; i < s.grad_u.size(); ++i) {
        nu2 += s.grad_u[i] * s.grad_u[i];
        np2 += s.grad_phi[i] * s.grad_phi[i];
        dot += s.grad_u[i] * s.grad_phi[i];
    }
    const double nu = std::sqrt(nu2);
    const double w = nu > 0.0 ? std::pow(nu, p - 2.0) : 0.0;
    const double t1 = p * std::pow(s.phi / s.u, p - 1.0) * w * dot;
    const double t2 = (p - 1.0) * std::pow(s.phi / s.u, p) * w * nu2;
    PiconeTerms r;
    r.lhs = t1 - t2;
    r.rhs = std::pow(std::sqrt(np2), p);
    r.scale = std::max({1.0, std::abs(t1), std::abs(t2), r.rhs});
    return r;
}

inline PiconeSample random_picone_sample(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> pos(0.0, 10.0), comp(-10.0, 10.0);
    std::uniform_int_distribution<int> dim(1, 3);
    PiconeSample s;
    auto positive = [&] {
        double x = 0.0;
        while (x <= 0.0)
            x = 10.0 - pos(rng); // (0, 10]
        return x;
    };
    s.u = positive();
    s.phi = positive();
    const int d = dim(rng);
    for (int i = 0; i < d; ++i) {
        s.grad_u.push_back(comp(rng));
        s.grad_phi.push_back(comp(rng));
    }
    return s;
}

inline CheckResult picone_check(double p, std::size_t samples, unsigned long long seed)
{
    expect(p > 1.0, ErrorCode::InvalidArgument, "Picone check needs p > 1");
    std::mt19937_64 rng(seed);
    CheckResult r;
    r.name = "picone";
    r.samples = samples;
    r.margin = std::numeric_limits<double>::infinity();
    std::size_t violations = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const PiconeTerms t = picone_terms(p, random_picone_sample(rng));
        r.margin = std::min(r.margin, (t.rhs - t.lhs) / t.scale);
        if (t.violated())
            ++violations;
    }
    r.value = static_cast<double>(violations);
    r.status = violations == 0 ? CheckStatus::Pass : CheckStatus::Fail;
    r.detail = "p=" + std::to_string(p) + " violations=" + std::to_string(violations);
    return r;
}

// ---------------------------------------------------------------------------
// Periodic ODE bound: if f > 0 is T-periodic with f' <= f^s (beta - gamma f^alpha)
// then beta - gamma max f^alpha >= 0.

struct PeriodicOdeParams {
    double s = 1.0, alpha = 1.0, beta = 1.0, gamma = 1.0;
    double fd_tol = 1e-6; // slack for the finite-difference hypothesis check
};

/// `f` holds one period of uniformly spaced samples (f[n] wraps to f[0]).
inline CheckResult periodic_ode_oracle(const std::vector<double>& f, double period, const PeriodicOdeParams& lp)
{
    CheckResult r;
    r.name = "periodic_ode";
    r.samples = f.size();
    expect(f.size() >= 3 && period > 0.0, ErrorCode::InvalidArgument, "periodic ODE oracle needs >= 3 samples");
    const std::size_t n = f.size();
    const double dt = period / static_cast<double>(n);
    double fmax = 0.0;
    double hyp_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(f[i] > 0.0)) {
            r.status = CheckStatus::Skipped;
            r.detail = "samples not positive";
            return r;
        }
        fmax = std::max(fmax, f[i]);
        const double df = (f[(i + 1) % n] - f[(i + n - 1) % n]) / (2.0 * dt);
        const double bound = std::pow(f[i], lp.s) * (lp.beta - lp.gamma * std::pow(f[i], lp.alpha));
        hyp_margin = std::min(hyp_margin, bound - df);
    }
    if (hyp_margin < -lp.fd_tol) {
        r.status = CheckStatus::Skipped;
        r.margin = hyp_margin;
        r.detail = "hypothesis fails on the samples";
        return r;
    }
    r.margin = lp.beta - lp.gamma * std::pow(fmax, lp.alpha);
    r.value = r.margin;
    r.status = r.margin >= -1e-10 ? CheckStatus::Pass : CheckStatus::Fail;
    return r;
}

// ---------------------------------------------------------------------------
// Weak residual

/// Separable smooth test function sin(k pi x/Lx) [sin(l pi y/Ly)] times a
/// first-harmonic T-periodic factor.
struct TestFunction {
    int kx = 1, ky = 1;
    double c0 = 1.0, c1 = 0.0, c2 = 0.0;

    double time(double t, double T) const
    {
        const double w = 2.0 * std::numbers::pi / T;
        return c0 + c1 * std::cos(w * t) + c2 * std::sin(w * t);
    }
    double time_dt(double t, double T) const
    {
        const double w = 2.0 * std::numbers::pi / T;
        return w * (-c1 * std::sin(w * t) + c2 * std::cos(w * t));
    }
    double space(const Grid& g, double x, double y) const
    {
        double v = std::sin(kx * std::numbers::pi * x / g.lx());
        if (g.dim() == 2)
            v *= std::sin(ky * std::numbers::pi * y / g.ly());
        return v;
    }
    double space_dx(const Grid& g, double x, double y) const
    {
        const double a = kx * std::numbers::pi / g.lx();
        double v = a * std::cos(a * x);
        if (g.dim() == 2)
            v *= std::sin(ky * std::numbers::pi * y / g.ly());
        return v;
    }
    double space_dy(const Grid& g, double x, double y) const
    {
        const double b = ky * std::numbers::pi / g.ly();
        return std::sin(kx * std::numbers::pi * x / g.lx()) * b * std::cos(b * y);
    }
};

inline std::vector<TestFunction> random_test_functions(std::size_t count, unsigned long long seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> mode(1, 3);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<TestFunction> out;
    for (std::size_t i = 0; i < count; ++i) {
        TestFunction f;
        f.kx = mode(rng);
        f.ky = mode(rng);
        f.c0 = 1.0 + 0.5 * coef(rng);
        f.c1 = coef(rng);
        f.c2 = coef(rng);
        out.push_back(f);
    }
    return out;
}

struct WeakResidualOptions {
    std::size_t test_functions = 8;
    unsigned long long seed = 1;
    // Declared first-order model: tolerance = model_constant (dt/T + h/L).
    double model_constant = 10.0;
};

namespace detail {

/// Unmollified flux of the regularized operator on every edge of `w`,
/// with the edge state taken as the arithmetic mean of the endpoints.
inline EdgeField weak_flux(const Field& w, double p, double m, double eps)
{
    const Grid& g = w.grid();
    const EdgeField grad = discrete_gradient(w);
    const EdgeField sq = edge_gradient_sq(w, grad);
    const double l = (m - 1.0) * (p - 1.0);
    const double c = std::pow(m, p - 1.0);
    auto coef = [&](double a, double b, double s) {
        const double mean = 0.5 * (std::max(a, 0.0) + std::max(b, 0.0));
        const double sing = s > 0.0 ? std::pow(s, 0.5 * (p - 2.0)) : 0.0;
        return (eps + c * std::pow(mean, l)) * sing;
    };
    EdgeField f;
    f.x.resize(grad.x.size());
    f.y.resize(grad.y.size());
    if (g.dim() == 1) {
        for (std::size_t i = 0; i < g.nx(); ++i)
            f.x[i] = coef(w[i], w[i + 1], sq.x[i]) * grad.x[i];
        return f;
    }
    for (std::size_t j = 0; j <= g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const auto e = g.x_edge(i, j);
            f.x[e] = coef(w[g.index(i, j)], w[g.index(i + 1, j)], sq.x[e]) * grad.x[e];
        }
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i <= g.nx(); ++i) {
            const auto e = g.y_edge(i, j);
            f.y[e] = coef(w[g.index(i, j)], w[g.index(i, j + 1)], sq.y[e]) * grad.y[e];
        }
    return f;
}

/// Sum over edges of (edge measure) * flux * d(phi)/dn at the edge midpoint.
inline double flux_pairing(const EdgeField& f, const Grid& g, const TestFunction& tf)
{
    double s = 0.0;
    if (g.dim() == 1) {
        for (std::size_t i = 0; i < g.nx(); ++i)
            s += g.hx() * f.x[i] * tf.space_dx(g, (static_cast<double>(i) + 0.5) * g.hx(), 0.0);
        return s;
    }
    for (std::size_t j = 0; j <= g.ny(); ++j) {
        const double wy = (j == 0 || j == g.ny()) ? 0.5 * g.hy() : g.hy();
        for (std::size_t i = 0; i < g.nx(); ++i)
            s += g.hx() * wy * f.x[g.x_edge(i, j)] *
                 tf.space_dx(g, (static_cast<double>(i) + 0.5) * g.hx(), static_cast<double>(j) * g.hy());
    }
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i <= g.nx(); ++i) {
            const double wx = (i == 0 || i == g.nx()) ? 0.5 * g.hx() : g.hx();
            s += wx * g.hy() * f.y[g.y_edge(i, j)] *
                 tf.space_dy(g, static_cast<double>(i) * g.hx(), (static_cast<double>(j) + 0.5) * g.hy());
        }
    return s;
}

} // namespace detail

/// Both weak-form integrals  int int -w phi_t + F(w).grad phi - R(w) phi
/// over Q_T for random smooth T-periodic test functions vanishing on the
/// boundary, normalized by int int |phi|. Time uses the rectangle rule over
/// the periodic frames 0..S-1.
inline CheckResult weak_residual(const Trajectory& tr, const std::shared_ptr<const ProblemSpec>& spec,
                                 const WeakResidualOptions& opt = {})
{
    expect(tr.periodic, ErrorCode::InvalidArgument, "weak residual needs a periodic trajectory");
    expect(tr.steps() >= 1, ErrorCode::InvalidArgument, "weak residual needs at least two frames");
    const Grid& g = *tr.grid;
    expect(g.same_shape(*spec->grid), ErrorCode::InvalidArgument, "trajectory and problem grids differ");
    const auto tfs = random_test_functions(opt.test_functions, opt.seed);
    const std::size_t S = tr.steps();
    const double T = tr.period();

    std::vector<double> res_u(tfs.size(), 0.0), res_v(tfs.size(), 0.0), mass(tfs.size(), 0.0);
    std::vector<std::vector<double>> phis(tfs.size(), std::vector<double>(g.size()));
    for (std::size_t f = 0; f < tfs.size(); ++f)
        for (std::size_t k = 0; k < g.size(); ++k)
            phis[f][k] = g.boundary(k) ? 0.0 : tfs[f].space(g, g.x(k), g.y(k));

    DelayEvaluator ev(spec, tr);
    for (std::size_t j = 0; j < S; ++j) {
        const double t = tr.dt * static_cast<double>(j);
        const Field& u = tr.u[j];
        const Field& v = tr.v[j];
        auto [ru, rv] = reaction_rates(ev, t, u, v);
        const EdgeField fu = detail::weak_flux(u, spec->p, spec->m, spec->epsilon);
        const EdgeField fv = detail::weak_flux(v, spec->q, spec->n, spec->epsilon);
        for (std::size_t f = 0; f < tfs.size(); ++f) {
            const double th = tfs[f].time(t, T), thd = tfs[f].time_dt(t, T);
            double su = 0.0, sv = 0.0, sm = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) {
                const double w = g.weight(k) * phis[f][k];
                su += w * (-u[k] * thd - ru[k] * th);
                sv += w * (-v[k] * thd - rv[k] * th);
                sm += std::abs(w * th);
            }
            su += th * detail::flux_pairing(fu, g, tfs[f]);
            sv += th * detail::flux_pairing(fv, g, tfs[f]);
            res_u[f] += tr.dt * su;
            res_v[f] += tr.dt * sv;
            mass[f] += tr.dt * sm;
        }
    }
    double worst = 0.0;
    for (std::size_t f = 0; f < tfs.size(); ++f)
        worst = std::max({worst, std::abs(res_u[f]) / mass[f], std::abs(res_v[f]) / mass[f]});

    const double h_rel = g.dim() == 1 ? g.hx() / g.lx() : std::max(g.hx() / g.lx(), g.hy() / g.ly());
    const double tol = opt.model_constant * (1.0 / static_cast<double>(S) + h_rel);
    CheckResult r;
    r.name = "weak_residual";
    r.samples = tfs.size();
    r.value = worst;
    r.margin = tol - worst;
    r.status = worst <= tol ? CheckStatus::Pass : CheckStatus::Fail;
    r.detail = "first-order model tolerance " + std::to_string(tol);
    return r;
}

/// Discrete ||grad w^m||_{L^p(Q_T)} (reported only).
inline double gradient_power_norm(const Trajectory& tr, Component c, double m, double p)
{
    const Grid& g = *tr.grid;
    double s = 0.0;
    for (std::size_t j = 0; j < tr.steps(); ++j) {
        Field wm(tr.grid);
        const Field& w = tr.frames(c)[j];
        for (std::size_t k = 0; k < w.size(); ++k)
            wm[k] = std::pow(std::max(w[k], 0.0), m);
        const EdgeField sq = edge_gradient_sq(wm, discrete_gradient(wm));
        const double cell = g.dim() == 1 ? g.hx() : g.hx() * g.hy();
        double e = 0.0;
        for (double v : sq.x)
            e += cell * std::pow(v, 0.5 * p);
        if (g.dim() == 2) {
            // x- and y-edges each tile Omega once; average the two tilings.
            double ey = 0.0;
            for (double v : sq.y)
                ey += cell * std::pow(v, 0.5 * p);
            e = 0.5 * (e + ey);
        }
        s += tr.dt * e;
    }
    return std::pow(s, 1.0 / p);
}

// ---------------------------------------------------------------------------
// A priori compliance

struct AprioriBounds {
    double C1 = 0.0, C2 = 0.0;
    double exponent = 2.0; // 2, or alpha for the generalized system
    std::string theorem;
};

inline VerificationReport apriori_compliance(const Trajectory& tr, const AprioriBounds& b)
{
    VerificationReport rep;
    auto norm_check = [&](const char* name, Component c, double C) {
        CheckResult r;
        r.name = name;
        r.samples = tr.u.size();
        r.value = std::pow(norm_Lr_spacetime(tr, c, b.exponent), b.exponent);
        r.margin = C - r.value;
        r.status = std::isfinite(C) && r.margin >= 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
        r.detail = b.theorem + ": bound " + std::to_string(C);
        rep.checks.push_back(r);
    };
    norm_check("apriori_u", Component::U, b.C1);
    norm_check("apriori_v", Component::V, b.C2);

    CheckResult nn;
    nn.name = "nonnegativity";
    nn.margin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < tr.u.size(); ++j)
        nn.margin = std::min({nn.margin, tr.u[j].min(), tr.v[j].min()});
    nn.value = nn.margin;
    nn.samples = tr.u.size();
    nn.status = nn.margin >= 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
    rep.checks.push_back(nn);

    CheckResult sup;
    sup.name = "sup_finite";
    sup.value = std::max(sup_norm(tr, Component::U), sup_norm(tr, Component::V));
    sup.margin = std::isfinite(sup.value) ? 1.0 : -1.0;
    sup.samples = tr.u.size();
    sup.status = std::isfinite(sup.value) ? CheckStatus::Pass : CheckStatus::Fail;
    rep.checks.push_back(sup);
    return rep;
}

// ---------------------------------------------------------------------------
// Hoelder spot check

struct HolderOptions {
    std::size_t pairs = 2000;
    unsigned long long seed = 1;
    double beta = 0.5;
};

/// Smallest Gamma with |w(x1,t1) - w(x2,t2)| <= Gamma (|x1-x2|^beta + |t1-t2|^{beta/p})
/// over sampled node/frame pairs. Half the pairs share a time level and a
/// quarter share a node.
inline CheckResult holder_spotcheck(const Trajectory& tr, Component c, double p, const HolderOptions& opt = {})
{
    const Grid& g = *tr.grid;
    const std::size_t frames = tr.periodic ? tr.steps() : tr.u.size();
    expect(frames >= 1, ErrorCode::InvalidArgument, "empty trajectory");
    const double T = tr.dt * static_cast<double>(frames);
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::size_t> node(0, g.size() - 1), frame(0, frames - 1);
    const auto& fr = tr.frames(c);
    double gamma = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < opt.pairs; ++i) {
        const std::size_t k1 = node(rng), j1 = frame(rng);
        std::size_t k2 = node(rng), j2 = frame(rng);
        if (i % 4 < 2)
            j2 = j1;
        else if (i % 4 == 2)
            k2 = k1;
        if (k1 == k2 && j1 == j2)
            continue;
        const double dx = std::hypot(g.x(k1) - g.x(k2), g.y(k1) - g.y(k2));
        double dt = std::abs(tr.dt * (static_cast<double>(j1) - static_cast<double>(j2)));
        if (tr.periodic)
            dt = std::min(dt, T - dt);
        const double den = std::pow(dx, opt.beta) + std::pow(dt, opt.beta / p);
        if (den <= 0.0)
            continue;
        gamma = std::max(gamma, std::abs(fr[j1][k1] - fr[j2][k2]) / den);
        ++used;
    }
    CheckResult r;
    r.name = c == Component::U ? "holder_u" : "holder_v";
    r.status = CheckStatus::Info;
    r.value = gamma;
    r.margin = std::isfinite(gamma) ? 0.0 : -1.0;
    r.samples = used;
    r.detail = "beta=" + std::to_string(opt.beta);
    return r;
}

} // namespace perisys
