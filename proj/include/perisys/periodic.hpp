#pragma once

// T-periodic orbits as fixed points of the period map. The outer loop
// freezes the delayed history, the inner loop runs damped Picard on the
// period map against it.

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "perisys/error.hpp"
#include "perisys/evolution.hpp"
#include "perisys/grid.hpp"
#include "perisys/nonlocal.hpp"
#include "perisys/problem.hpp"

namespace perisys {

enum class Classification { Trivial, SemiTrivialU, SemiTrivialV, Coexistence };

inline const char* to_string(Classification c)
{
    switch (c) {
    case Classification::Trivial: return "Trivial";
    case Classification::SemiTrivialU: return "SemiTrivialU";
    case Classification::SemiTrivialV: return "SemiTrivialV";
    case Classification::Coexistence: return "Coexistence";
    }
    return "Unknown";
}

enum class SolveStatus { Converged, MaxIterations, DivergenceDetected };

inline const char* to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::DivergenceDetected: return "DivergenceDetected";
    }
    return "Unknown";
}

struct PeriodicConfig {
    StepperConfig stepper;
    double omega = 0.7;
    double tol_outer = 1e-6;
    double tol_map = 1e-8;
    std::size_t max_outer = 50;
    std::size_t max_inner = 200;
    // Relaxation of the history update; 1 replaces the history outright.
    double outer_relax = 1.0;
    bool sigma_ramp = false;
    double sigma_start = 0.5;
    std::size_t sigma_ramp_iterations = 5;
    bool extrapolate = false; // vector extrapolation over the last 3 Picard iterates
    double theta_triv = 1e-6;
    double divergence_limit = std::numeric_limits<double>::infinity();
};

struct PeriodicResult {
    Trajectory trajectory;
    double map_residual = 0.0;
    double outer_residual = 0.0;
    Classification classification = Classification::Trivial;
    SolveStatus status = SolveStatus::Converged;
    double epsilon = 0.0;
    std::size_t outer_iterations = 0;
    std::size_t inner_iterations = 0;
    double sup_u = 0.0, sup_v = 0.0;
    double clamp_mass = 0.0;
    double min_before_clamp = 0.0;

    bool converged() const { return status == SolveStatus::Converged; }
};

inline Classification classify(double sup_u, double sup_v, double theta_triv)
{
    const bool nu = sup_u > theta_triv, nv = sup_v > theta_triv;
    if (nu && nv)
        return Classification::Coexistence;
    if (nu)
        return Classification::SemiTrivialU;
    if (nv)
        return Classification::SemiTrivialV;
    return Classification::Trivial;
}

/// End-of-period state with delays read from `history`.
inline std::pair<Field, Field> period_map(const Field& u0, const Field& v0, const Trajectory& history,
                                          const std::shared_ptr<const ProblemSpec>& spec, const StepperConfig& cfg,
                                          StepStats* stats = nullptr)
{
    DelayEvaluator ev(spec, history);
    Trajectory tr = sweep_period(u0, v0, cfg, ev, *spec, stats);
    return {tr.u.back(), tr.v.back()};
}

namespace detail {

inline double pair_sup_diff(const Field& a, const Field& b, const Field& c, const Field& d)
{
    return std::max(sup_diff(a, c), sup_diff(b, d));
}

/// Componentwise Aitken-type extrapolation from three successive iterates,
/// falling back to the newest where the differences are not contracting.
inline Field extrapolate3(const Field& x0, const Field& x1, const Field& x2)
{
    Field out = x2;
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double d1 = x1[k] - x0[k], d2 = x2[k] - x1[k];
        const double den = d2 - d1;
        if (std::abs(den) > 1e-14 && std::abs(d2) < std::abs(d1))
            out[k] = std::max(0.0, x2[k] - d2 * d2 / den);
    }
    return out;
}

inline Trajectory relax_history(const Trajectory& old, const Trajectory& next, double beta)
{
    if (beta == 1.0)
        return next;
    Trajectory out = next;
    for (std::size_t j = 0; j < out.u.size(); ++j)
        for (std::size_t k = 0; k < out.u[j].size(); ++k) {
            out.u[j][k] = (1.0 - beta) * old.u[j][k] + beta * next.u[j][k];
            out.v[j][k] = (1.0 - beta) * old.v[j][k] + beta * next.v[j][k];
        }
    return out;
}

} // namespace detail

/// Warm-startable periodic solve. `history` defaults to the constant
/// extension of the initial data.
inline PeriodicResult solve_periodic(const std::shared_ptr<const ProblemSpec>& spec, const PeriodicConfig& cfg,
                                     const Field& u_init, const Field& v_init,
                                     const Trajectory* initial_history = nullptr)
{
    expect(cfg.omega > 0.0 && cfg.omega <= 1.0, ErrorCode::InvalidArgument, "damping omega must lie in (0,1]");
    expect(cfg.outer_relax > 0.0 && cfg.outer_relax <= 1.0, ErrorCode::InvalidArgument,
           "outer relaxation must lie in (0,1]");
    const std::size_t S = steps_per_period(spec->T, cfg.stepper.dt);

    PeriodicResult res;
    res.epsilon = spec->epsilon;
    Trajectory history =
        initial_history ? *initial_history : Trajectory::constant(u_init, v_init, cfg.stepper.dt, S);
    history.periodic = true;
    expect(history.steps() == S, ErrorCode::InvalidArgument, "initial history has the wrong number of frames");

    Field u = u_init, v = v_init;
    Trajectory last;
    StepStats stats;
    bool done = false;
    for (std::size_t k = 0; k < cfg.max_outer && !done; ++k) {
        StepperConfig sc = cfg.stepper;
        if (cfg.sigma_ramp && cfg.sigma_ramp_iterations > 0)
            sc.sigma = std::min(1.0, cfg.sigma_start + (1.0 - cfg.sigma_start) * static_cast<double>(k) /
                                                           static_cast<double>(cfg.sigma_ramp_iterations));
        DelayEvaluator ev(spec, history);

        std::vector<std::pair<Field, Field>> recent;
        double map_res = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cfg.max_inner; ++i) {
            last = sweep_period(u, v, sc, ev, *spec, &stats);
            ++res.inner_iterations;
            const Field& ue = last.u.back();
            const Field& ve = last.v.back();
            map_res = detail::pair_sup_diff(ue, ve, u, v);
            const double sup = std::max(sup_norm(last, Component::U), sup_norm(last, Component::V));
            if (!std::isfinite(sup) || sup > cfg.divergence_limit) {
                res.status = SolveStatus::DivergenceDetected;
                res.trajectory = last;
                res.map_residual = map_res;
                res.outer_iterations = k + 1;
                res.sup_u = sup_norm(last, Component::U);
                res.sup_v = sup_norm(last, Component::V);
                res.classification = classify(res.sup_u, res.sup_v, cfg.theta_triv);
                res.clamp_mass = stats.clamp_mass;
                res.min_before_clamp = stats.min_before_clamp;
                return res;
            }
            if (map_res <= cfg.tol_map)
                break;
            Field un(u.grid_ptr()), vn(v.grid_ptr());
            for (std::size_t n = 0; n < u.size(); ++n) {
                un[n] = (1.0 - cfg.omega) * u[n] + cfg.omega * ue[n];
                vn[n] = (1.0 - cfg.omega) * v[n] + cfg.omega * ve[n];
            }
            if (cfg.extrapolate) {
                recent.emplace_back(un, vn);
                if (recent.size() == 3) {
                    un = detail::extrapolate3(recent[0].first, recent[1].first, recent[2].first);
                    vn = detail::extrapolate3(recent[0].second, recent[1].second, recent[2].second);
                    recent.clear();
                }
            }
            u = std::move(un);
            v = std::move(vn);
        }
        res.map_residual = map_res;

        Trajectory next = last;
        next.periodic = true;
        next.period_residual = map_res;
        res.outer_residual = trajectory_sup_diff(next, history);
        history = detail::relax_history(history, next, cfg.outer_relax);
        history.periodic = true;
        res.outer_iterations = k + 1;
        const bool sigma_done = sc.sigma == 1.0;
        done = sigma_done && map_res <= cfg.tol_map && res.outer_residual <= cfg.tol_outer;
    }

    res.trajectory = last;
    res.trajectory.periodic = true;
    res.trajectory.period_residual = res.map_residual;
    res.status = done ? SolveStatus::Converged : SolveStatus::MaxIterations;
    res.sup_u = sup_norm(res.trajectory, Component::U);
    res.sup_v = sup_norm(res.trajectory, Component::V);
    res.classification = classify(res.sup_u, res.sup_v, cfg.theta_triv);
    res.clamp_mass = stats.clamp_mass;
    res.min_before_clamp = stats.min_before_clamp;
    return res;
}

struct ContinuationResult {
    std::vector<PeriodicResult> results;
    std::vector<double> sup_differences; // between consecutive epsilon levels
    std::vector<std::string> failures;
};

/// Solves along a decreasing epsilon schedule, warm-starting each level from
/// the previous orbit and its history.
inline ContinuationResult epsilon_continuation(const ProblemSpec& base, const PeriodicConfig& cfg,
                                               const std::vector<double>& schedule, const Field& u_init,
                                               const Field& v_init)
{
    expect(!schedule.empty(), ErrorCode::InvalidArgument, "epsilon schedule is empty");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        expect(schedule[i] > 0.0, ErrorCode::InvalidArgument, "epsilon values must be positive");
        expect(i == 0 || schedule[i] < schedule[i - 1], ErrorCode::InvalidArgument,
               "epsilon schedule must be strictly decreasing");
    }
    ContinuationResult out;
    out.results.reserve(schedule.size());
    Field u = u_init, v = v_init;
    const Trajectory* warm = nullptr;
    for (double eps : schedule) {
        auto spec = std::make_shared<ProblemSpec>(base);
        spec->epsilon = eps;
        PeriodicResult r;
        try {
            r = solve_periodic(spec, cfg, u, v, warm);
        } catch (const Error& e) {
            out.failures.push_back("eps=" + std::to_string(eps) + ": " + e.what());
            continue;
        }
        if (!r.converged())
            out.failures.push_back("eps=" + std::to_string(eps) + ": " + to_string(r.status));
        if (!out.results.empty())
            out.sup_differences.push_back(trajectory_sup_diff(out.results.back().trajectory, r.trajectory));
        out.results.push_back(std::move(r));
        const auto& t = out.results.back().trajectory;
        u = t.u.front();
        v = t.v.front();
        warm = &t;
    }
    return out;
}

} // namespace perisys
