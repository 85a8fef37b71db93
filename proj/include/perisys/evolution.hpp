#pragma once

// Time stepping for the regularized system: lagged-coefficient IMEX (default)
// or fully explicit, plus period sweeps.

#include <cmath>
#include <utility>

#include "perisys/error.hpp"
#include "perisys/grid.hpp"
#include "perisys/linalg.hpp"
#include "perisys/nonlocal.hpp"
#include "perisys/problem.hpp"

namespace perisys {

enum class Scheme { ImexLagged, Explicit };

inline const char* to_string(Scheme s) { return s == Scheme::ImexLagged ? "imex" : "explicit"; }

struct StepperConfig {
    double dt = 1e-3;
    double delta_g = 1e-8;
    Scheme scheme = Scheme::ImexLagged;
    bool clamp_negative = true;
    double linear_tol = 1e-12; // direct solvers; kept for the record
    double explicit_safety = 0.25;
    EdgeAverage average = EdgeAverage::Arithmetic;
    // Homotopy parameter: sigma < 1 adds a (1 - sigma) source and scales
    // the degenerate part of the diffusion by sigma^{p-1}.
    double sigma = 1.0;
};

struct StepStats {
    double clamp_mass = 0.0; // sum of w_k * |negative part| removed
    double min_before_clamp = 0.0;
    std::size_t steps = 0;
};

namespace detail {

inline Field advance_component(const Field& w, const Field& rate, double p, double m, const ProblemSpec& spec,
                               const StepperConfig& cfg, StepStats* stats)
{
    FluxParams fp;
    fp.p = p;
    fp.m = m;
    fp.eps = spec.epsilon;
    fp.delta_g = cfg.delta_g;
    fp.average = cfg.average;
    fp.degenerate_scale = cfg.sigma == 1.0 ? 1.0 : std::pow(cfg.sigma, p - 1.0);
    const EdgeField d = edge_diffusivity(w, fp);
    const Grid& g = w.grid();
    const double source = 1.0 - cfg.sigma;

    Field next(w.grid_ptr());
    if (cfg.scheme == Scheme::ImexLagged) {
        Field rhs(w.grid_ptr());
        for (std::size_t k = 0; k < w.size(); ++k)
            rhs[k] = g.boundary(k) ? 0.0 : w[k] + cfg.dt * (rate[k] + source);
        next = solve_implicit_diffusion(d, cfg.dt, rhs);
    } else {
        double dmax = 0.0;
        for (double v : d.x)
            dmax = std::max(dmax, v);
        for (double v : d.y)
            dmax = std::max(dmax, v);
        const double h = g.dim() == 1 ? g.hx() : std::min(g.hx(), g.hy());
        const double ceiling = cfg.explicit_safety * h * h / std::max(dmax, 1e-300) / (g.dim() == 2 ? 2.0 : 1.0);
        if (cfg.dt > ceiling)
            throw Error(ErrorCode::StabilityViolation,
                        "explicit step " + std::to_string(cfg.dt) + " exceeds ceiling " + std::to_string(ceiling));
        const Field div = divergence(d, w);
        for (std::size_t k = 0; k < w.size(); ++k)
            next[k] = g.boundary(k) ? 0.0 : w[k] + cfg.dt * (div[k] + rate[k] + source);
    }

    double mn = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
        if (!std::isfinite(next[k]))
            throw Error(ErrorCode::DivergenceDetected, "non-finite state after step");
        if (next[k] < 0.0) {
            mn = std::min(mn, next[k]);
            if (cfg.clamp_negative) {
                if (stats)
                    stats->clamp_mass += g.weight(k) * (-next[k]);
                next[k] = 0.0;
            }
        }
    }
    if (stats)
        stats->min_before_clamp = std::min(stats->min_before_clamp, mn);
    return next;
}

} // namespace detail

/// One step from t to t + dt. Reaction and diffusivity are evaluated at the
/// old state; delayed integrals come from the evaluator.
inline std::pair<Field, Field> step(const Field& u, const Field& v, double t, const StepperConfig& cfg,
                                    const DelayEvaluator& ev, const ProblemSpec& spec, StepStats* stats = nullptr)
{
    expect(cfg.dt > 0.0, ErrorCode::InvalidArgument, "time step must be positive");
    auto [ru, rv] = reaction_rates(ev, t, u, v);
    Field un = detail::advance_component(u, ru, spec.p, spec.m, spec, cfg, stats);
    Field vn = detail::advance_component(v, rv, spec.q, spec.n, spec, cfg, stats);
    if (stats)
        ++stats->steps;
    return {std::move(un), std::move(vn)};
}

/// `steps` consecutive steps from time t0, returning all steps+1 frames.
/// A transient evaluator records each new frame so later delays see it.
inline Trajectory simulate(const Field& u0, const Field& v0, std::size_t steps, const StepperConfig& cfg,
                           DelayEvaluator& ev, const ProblemSpec& spec, StepStats* stats = nullptr, double t0 = 0.0)
{
    Trajectory tr;
    tr.grid = u0.grid_ptr();
    tr.dt = cfg.dt;
    tr.u.reserve(steps + 1);
    tr.v.reserve(steps + 1);
    tr.u.push_back(u0);
    tr.v.push_back(v0);
    for (std::size_t j = 0; j < steps; ++j) {
        const double t = t0 + cfg.dt * static_cast<double>(j);
        auto [un, vn] = step(tr.u.back(), tr.v.back(), t, cfg, ev, spec, stats);
        if (ev.mode() == DelayEvaluator::Mode::Transient)
            ev.record(un, vn);
        tr.u.push_back(std::move(un));
        tr.v.push_back(std::move(vn));
    }
    return tr;
}

/// Number of steps S with S * dt = T; rejects step sizes that do not divide T.
inline std::size_t steps_per_period(double T, double dt)
{
    const double s = T / dt;
    const double r = std::round(s);
    expect(r >= 1.0 && std::abs(s - r) <= 1e-9 * std::max(1.0, s), ErrorCode::InvalidArgument,
           "dt must divide the period T");
    return static_cast<std::size_t>(r);
}

/// One period [0, T] of the system, frame 0 = (u0, v0).
inline Trajectory sweep_period(const Field& u0, const Field& v0, const StepperConfig& cfg, DelayEvaluator& ev,
                               const ProblemSpec& spec, StepStats* stats = nullptr)
{
    return simulate(u0, v0, steps_per_period(spec.T, cfg.dt), cfg, ev, spec, stats);
}

} // namespace perisys
