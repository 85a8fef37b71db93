#pragma once

// Delayed nonlocal kernel integrals  I_i(t) = int K_i(xi,t) w^alpha(xi, t - tau_i) dxi
// and the reaction rates they feed.

#include <cmath>
#include <memory>
#include <utility>

#include "perisys/error.hpp"
#include "perisys/grid.hpp"
#include "perisys/problem.hpp"

namespace perisys {

/// Quadrature of K * w^alpha over Omega.
inline double kernel_integral(const Field& K, const Field& w, double alpha)
{
    expect(alpha >= 1.0, ErrorCode::InvalidArgument, "nonlocal power alpha must be >= 1");
    const Grid& g = w.grid();
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] < -1e-10)
            throw Error(ErrorCode::NegativeState, "delayed state is negative");
        const double wp = std::max(w[k], 0.0);
        s += g.weight(k) * K[k] * (alpha == 2.0 ? wp * wp : std::pow(wp, alpha));
    }
    return s;
}

/// Same integral with K sampled straight from a space-time kernel at time t.
inline double kernel_integral(const SpaceTimeField& K, double t, const Field& w, double alpha)
{
    expect(alpha >= 1.0, ErrorCode::InvalidArgument, "nonlocal power alpha must be >= 1");
    const Grid& g = w.grid();
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] < -1e-10)
            throw Error(ErrorCode::NegativeState, "delayed state is negative");
        const double wp = std::max(w[k], 0.0);
        s += g.weight(k) * K.at(t, k) * (alpha == 2.0 ? wp * wp : std::pow(wp, alpha));
    }
    return s;
}

/// Reads delayed states from a reference trajectory. In periodic mode the
/// reference is a frozen T-periodic orbit and lookups wrap modulo T. In
/// transient mode frames are appended as a run progresses and times before
/// 0 see the constant extension of frame 0 (burn-in history).
class DelayEvaluator {
public:
    enum class Mode { Periodic, Transient };

    DelayEvaluator(std::shared_ptr<const ProblemSpec> spec, Trajectory history, Mode mode = Mode::Periodic)
        : spec_(std::move(spec)), history_(std::move(history)), mode_(mode)
    {
        expect(spec_ != nullptr, ErrorCode::InvalidArgument, "evaluator needs a problem");
        expect(!history_.u.empty(), ErrorCode::InvalidArgument, "evaluator needs at least one frame");
        if (mode_ == Mode::Periodic) {
            expect(history_.periodic, ErrorCode::InvalidArgument, "periodic evaluator needs a periodic history");
            expect(history_.steps() >= 1, ErrorCode::InvalidArgument, "periodic history needs two frames");
        }
    }

    /// Transient evaluator seeded with the initial data.
    static DelayEvaluator transient(std::shared_ptr<const ProblemSpec> spec, const Field& u0, const Field& v0,
                                    double dt)
    {
        Trajectory h;
        h.grid = u0.grid_ptr();
        h.dt = dt;
        h.u.push_back(u0);
        h.v.push_back(v0);
        return DelayEvaluator(std::move(spec), std::move(h), Mode::Transient);
    }

    const ProblemSpec& spec() const { return *spec_; }
    const std::shared_ptr<const ProblemSpec>& spec_ptr() const { return spec_; }
    const Trajectory& history() const { return history_; }
    Mode mode() const { return mode_; }

    /// Appends a frame (transient mode only).
    void record(const Field& u, const Field& v)
    {
        expect(mode_ == Mode::Transient, ErrorCode::InvalidArgument, "cannot record into a frozen history");
        history_.u.push_back(u);
        history_.v.push_back(v);
    }

    /// State of component c at time s, linearly interpolated between frames.
    Field state_at(Component c, double s) const
    {
        const auto& fr = history_.frames(c);
        const double dt = history_.dt;
        double x;
        if (mode_ == Mode::Periodic) {
            const double T = history_.period();
            double w = std::fmod(s, T);
            if (w < 0.0)
                w += T;
            x = w / dt;
        } else {
            x = std::max(s, 0.0) / dt;
        }
        const std::size_t last = fr.size() - 1;
        auto j0 = static_cast<std::size_t>(std::floor(x));
        if (j0 >= last)
            return fr[last];
        const double th = x - static_cast<double>(j0);
        if (th == 0.0)
            return fr[j0];
        Field out(history_.grid);
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = (1.0 - th) * fr[j0][k] + th * fr[j0 + 1][k];
        return out;
    }

    /// I_i(t) for i = 1..4 (w = u for i = 1,3 and w = v for i = 2,4).
    double integral(int i, double t) const
    {
        expect(i >= 1 && i <= 4, ErrorCode::InvalidArgument, "kernel index must be 1..4");
        const Component c = (i == 1 || i == 3) ? Component::U : Component::V;
        double tau = spec_->tau[static_cast<std::size_t>(i - 1)];
        if (mode_ == Mode::Periodic)
            tau = std::fmod(tau, history_.period());
        return kernel_integral(spec_->K[static_cast<std::size_t>(i - 1)], t, state_at(c, t - tau), spec_->alpha);
    }

private:
    std::shared_ptr<const ProblemSpec> spec_;
    Trajectory history_;
    Mode mode_;
};

/// Growth rates in front of (u+)^{p-1} and (v+)^{q-1} at time t, before the
/// power is applied: a - I1 + I2 and b + I3 - I4 per node.
inline std::pair<Field, Field> growth_rates(const DelayEvaluator& ev, double t)
{
    const ProblemSpec& s = ev.spec();
    const double i1 = ev.integral(1, t), i2 = ev.integral(2, t);
    const double i3 = ev.integral(3, t), i4 = ev.integral(4, t);
    Field gu(s.grid), gv(s.grid);
    for (std::size_t k = 0; k < gu.size(); ++k) {
        gu[k] = s.a.at(t, k) - i1 + i2;
        gv[k] = s.b.at(t, k) + i3 - i4;
    }
    return {std::move(gu), std::move(gv)};
}

/// R_u = (a - I1 + I2) (u+)^{p-1},  R_v = (b + I3 - I4) (v+)^{q-1}.
inline std::pair<Field, Field> reaction_rates(const DelayEvaluator& ev, double t, const Field& u_now,
                                              const Field& v_now)
{
    const ProblemSpec& s = ev.spec();
    for (std::size_t k = 0; k < u_now.size(); ++k)
        expect(u_now[k] >= -1e-10 && v_now[k] >= -1e-10, ErrorCode::NegativeState, "current state is negative");
    auto [ru, rv] = growth_rates(ev, t);
    for (std::size_t k = 0; k < ru.size(); ++k) {
        ru[k] *= std::pow(std::max(u_now[k], 0.0), s.p - 1.0);
        rv[k] *= std::pow(std::max(v_now[k], 0.0), s.q - 1.0);
    }
    return {std::move(ru), std::move(rv)};
}

} // namespace perisys
