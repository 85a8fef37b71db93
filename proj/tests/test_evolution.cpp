#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "common.hpp"
#include "perisys/evolution.hpp"

using namespace perisys;
using namespace perisys::testing;
using std::numbers::pi;

namespace {

DelayEvaluator frozen(const std::shared_ptr<ProblemSpec>& s, const Field& u, const Field& v, double dt)
{
    return DelayEvaluator(s, Trajectory::constant(u, v, dt, steps_per_period(s->T, dt)));
}

} // namespace

TEST(Step, ZeroIsFixed)
{
    auto s = cooperative(40).build();
    const Field z(s->grid);
    StepperConfig cfg;
    cfg.dt = 1e-3;
    auto ev = frozen(s, Field(s->grid, 1.0), Field(s->grid, 1.0), cfg.dt);
    auto [u, v] = step(z, z, 0.0, cfg, ev, *s);
    EXPECT_EQ(u.max_abs(), 0.0);
    EXPECT_EQ(v.max_abs(), 0.0);

    DelayEvaluator ev0(s, Trajectory::constant(z, z, 1e-2, 100));
    const Trajectory tr = sweep_period(z, z, cfg, ev0, *s);
    EXPECT_EQ(tr.steps(), 1000u);
    EXPECT_EQ(sup_norm(tr, Component::U), 0.0);
}

TEST(Step, L2DecayWithoutGrowth)
{
    SpecBuilder b = cooperative(60);
    b.a = b.b = 0.0;
    b.K = {0, 0, 0, 0};
    auto s = b.build();
    StepperConfig cfg;
    cfg.dt = 1e-3;
    Field u = sine_bump(s->grid), v = sine_bump(s->grid, 0.5);
    auto ev = frozen(s, u, v, cfg.dt);
    double prev = norm_Lr_space(u, 2.0);
    for (int j = 0; j < 200; ++j) {
        std::tie(u, v) = step(u, v, j * cfg.dt, cfg, ev, *s);
        const double now = norm_Lr_space(u, 2.0);
        EXPECT_LE(now, prev * (1.0 + 1e-14));
        prev = now;
    }
}

TEST(Step, HeatDecayOracle)
{
    // p = 2, eps = 1 and data of size 1e-8: the m-term is negligible and the
    // first mode decays like exp(-pi^2 t).
    SpecBuilder b;
    b.p = b.q = 2.0;
    b.m = b.n = 2.0;
    b.a = b.b = 0.0;
    b.K = {0, 0, 0, 0};
    b.epsilon = 1.0;
    b.N = 100;
    auto s = b.build();
    StepperConfig cfg;
    cfg.dt = 1e-4;
    Field u = sine_bump(s->grid, 1e-8), v = u;
    const double u0 = norm_Lr_space(u, 2.0);
    auto ev = frozen(s, u, v, cfg.dt);
    for (int j = 1; j <= 1000; ++j) {
        std::tie(u, v) = step(u, v, (j - 1) * cfg.dt, cfg, ev, *s);
        if (j % 100 == 0) {
            const double t = j * cfg.dt;
            const double ratio = norm_Lr_space(u, 2.0) / u0;
            EXPECT_NEAR(ratio / std::exp(-pi * pi * t), 1.0, 0.02) << "t=" << t;
        }
    }
}

TEST(Step, NonNegativityWithoutClamp)
{
    for (double k23 : {0.1, -0.2}) {
        SpecBuilder b = cooperative(100);
        b.K[1] = b.K[2] = k23;
        auto s = b.build();
        StepperConfig cfg;
        cfg.dt = 1e-3;
        cfg.clamp_negative = false;
        Field u = sine_bump(s->grid), v = sine_bump(s->grid, 2.0);
        DelayEvaluator ev = DelayEvaluator::transient(s, u, v, cfg.dt);
        StepStats stats;
        const Trajectory tr = simulate(u, v, 200, cfg, ev, *s, &stats);
        EXPECT_GE(stats.min_before_clamp, -1e-8);
        EXPECT_EQ(stats.clamp_mass, 0.0);
    }
}

TEST(Step, ClampGivesExactNonNegativity)
{
    auto s = cooperative(100).build();
    StepperConfig cfg;
    cfg.dt = 1e-3;
    Field u = sine_bump(s->grid), v = sine_bump(s->grid);
    DelayEvaluator ev = DelayEvaluator::transient(s, u, v, cfg.dt);
    const Trajectory tr = simulate(u, v, 200, cfg, ev, *s);
    for (std::size_t j = 0; j < tr.u.size(); ++j) {
        EXPECT_GE(tr.u[j].min(), 0.0);
        EXPECT_GE(tr.v[j].min(), 0.0);
    }
}

TEST(Step, ExplicitStabilityCeiling)
{
    auto s = cooperative(100).build();
    StepperConfig cfg;
    cfg.dt = 1e-3;
    cfg.scheme = Scheme::Explicit;
    Field u = sine_bump(s->grid);
    auto ev = frozen(s, u, u, cfg.dt);
    EXPECT_THROW(step(u, u, 0.0, cfg, ev, *s), Error);
    try {
        step(u, u, 0.0, cfg, ev, *s);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::StabilityViolation);
    }
}

TEST(Step, ImexAgreesWithExplicitToFirstOrder)
{
    // Smooth setting: a large gradient mollifier keeps the explicit ceiling reasonable.
    SpecBuilder b = cooperative(20);
    b.tau = {0.05, 0.05, 0.05, 0.05};
    auto s = b.build();
    auto diff_at = [&](double dt) {
        StepperConfig ci;
        ci.dt = dt;
        ci.delta_g = 1.0;
        StepperConfig ce = ci;
        ce.scheme = Scheme::Explicit;
        const std::size_t steps = static_cast<std::size_t>(std::lround(0.1 / dt));
        Field u0 = sine_bump(s->grid), v0 = sine_bump(s->grid, 0.5);
        DelayEvaluator ei = DelayEvaluator::transient(s, u0, v0, dt);
        DelayEvaluator ee = DelayEvaluator::transient(s, u0, v0, dt);
        const Trajectory a = simulate(u0, v0, steps, ci, ei, *s);
        const Trajectory c = simulate(u0, v0, steps, ce, ee, *s);
        return trajectory_sup_diff(a, c);
    };
    const double d1 = diff_at(2e-4), d2 = diff_at(1e-4);
    const double ratio = d1 / d2;
    EXPECT_GE(ratio, 1.5);
    EXPECT_LE(ratio, 3.0);
}

TEST(Sweep, DenseExpmOracle)
{
    // p = 2, m = 1: D = eps + 1 and the reaction is a u; the period sweep
    // approximates exp(T (D L_h + a I)) u0.
    SpecBuilder b;
    b.p = b.q = 2.0;
    b.m = b.n = 1.0;
    b.a = b.b = 3.0;
    b.K = {0, 0, 0, 0};
    b.epsilon = 0.5;
    b.N = 20;
    auto s = b.build();
    StepperConfig cfg;
    cfg.dt = 2.5e-5;
    const Field u0 = Field::dirichlet(s->grid, [](double x, double) { return x * (1.0 - x) * (1.0 + x); });
    auto ev = frozen(s, u0, u0, cfg.dt);
    const Trajectory tr = sweep_period(u0, u0, cfg, ev, *s);

    const int n = static_cast<int>(s->grid->nx()) - 1;
    const double h = s->grid->hx(), D = 1.5;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        A(i, i) = -2.0 * D / (h * h) + 3.0;
        if (i > 0)
            A(i, i - 1) = D / (h * h);
        if (i + 1 < n)
            A(i, i + 1) = D / (h * h);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    const Eigen::VectorXd ex = (es.eigenvalues() * s->T).array().exp();
    const Eigen::MatrixXd E = es.eigenvectors() * ex.asDiagonal() * es.eigenvectors().transpose();
    Eigen::VectorXd x0(n);
    for (int i = 0; i < n; ++i)
        x0(i) = u0[static_cast<std::size_t>(i + 1)];
    const Eigen::VectorXd want = E * x0;
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        err = std::max(err, std::abs(tr.u.back()[static_cast<std::size_t>(i + 1)] - want(i)));
    EXPECT_LE(err / want.cwiseAbs().maxCoeff(), 0.01);
}

TEST(Sweep, StepsMustDividePeriod)
{
    EXPECT_EQ(steps_per_period(1.0, 5e-4), 2000u);
    EXPECT_THROW(steps_per_period(1.0, 3e-1), Error);
}

TEST(Sweep, DecayGivesMonotoneFrameNorms)
{
    SpecBuilder b = cooperative(50);
    b.a = b.b = 0.0;
    auto s = b.build();
    StepperConfig cfg;
    cfg.dt = 1e-2;
    const Field u0 = sine_bump(s->grid);
    auto ev = frozen(s, u0, u0, cfg.dt);
    const Trajectory tr = sweep_period(u0, u0, cfg, ev, *s);
    for (std::size_t j = 1; j < tr.u.size(); ++j)
        EXPECT_LE(norm_Lr_space(tr.u[j], 2.0), norm_Lr_space(tr.u[j - 1], 2.0) * (1.0 + 1e-14));
}

TEST(Sweep, BoundedOverTenPeriods)
{
    for (double k23 : {0.1, -0.2}) {
        SpecBuilder b = cooperative(50);
        b.K[1] = b.K[2] = k23;
        auto s = b.build();
        StepperConfig cfg;
        cfg.dt = 2e-3;
        const Field u0 = sine_bump(s->grid), v0 = sine_bump(s->grid, 0.5);
        DelayEvaluator ev = DelayEvaluator::transient(s, u0, v0, cfg.dt);
        const Trajectory tr = simulate(u0, v0, 5000, cfg, ev, *s);
        double one = 0.0, ten = 0.0;
        for (std::size_t j = 0; j < tr.u.size(); ++j) {
            const double sj = std::max(tr.u[j].max_abs(), tr.v[j].max_abs());
            if (j <= 500)
                one = std::max(one, sj);
            ten = std::max(ten, sj);
        }
        EXPECT_LE(ten, 2.0 * one) << "K2=K3=" << k23;
    }
}
