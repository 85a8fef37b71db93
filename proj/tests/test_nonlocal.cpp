#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "perisys/nonlocal.hpp"

using namespace perisys;

namespace {

std::shared_ptr<ProblemSpec> spec_with(GridPtr g, double a, std::array<double, 4> k, double T = 1.0)
{
    auto s = std::make_shared<ProblemSpec>();
    s->grid = g;
    s->T = T;
    s->a = SpaceTimeField::constant(g, T, a);
    s->b = SpaceTimeField::constant(g, T, a);
    for (std::size_t i = 0; i < 4; ++i)
        s->K[i] = SpaceTimeField::constant(g, T, k[i]);
    return s;
}

Trajectory wavy_history(GridPtr g, double T, std::size_t S)
{
    Trajectory tr;
    tr.grid = g;
    tr.dt = T / static_cast<double>(S);
    for (std::size_t j = 0; j <= S; ++j) {
        const double t = tr.dt * static_cast<double>(j);
        tr.u.push_back(Field::from_function(g, [&](double x, double) {
            return 1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * t / T) * x;
        }));
        tr.v.push_back(Field::from_function(g, [&](double x, double) {
            return 2.0 + std::cos(2.0 * std::numbers::pi * t / T) * x * x;
        }));
    }
    tr.periodic = true;
    return tr;
}

} // namespace

TEST(KernelIntegral, Examples)
{
    auto g = Grid::interval(1.0, 200);
    EXPECT_EQ(kernel_integral(Field(g, 0.0), Field(g, 3.0), 2.0), 0.0);
    EXPECT_NEAR(kernel_integral(Field(g, 0.7), Field(g, 3.0), 2.0), 0.7 * 9.0, 1e-12);
    Field xi = Field::from_function(g, [](double x, double) { return x; });
    const double h = g->hx();
    EXPECT_NEAR(kernel_integral(xi, xi, 2.0), 0.25, h * h);
}

TEST(KernelIntegral, RejectsNegativeState)
{
    auto g = Grid::interval(1.0, 20);
    Field w(g, 1.0);
    w[3] = -1e-6;
    EXPECT_THROW(kernel_integral(Field(g, 1.0), w, 2.0), Error);
    EXPECT_THROW(kernel_integral(Field(g, 1.0), Field(g, 1.0), 0.5), Error);
}

TEST(KernelIntegral, AlphaTwoPathsAgree)
{
    auto g = Grid::interval(1.0, 100);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0.0, 2.0);
    Field K = Field::from_function(g, [&](double, double) { return U(rng); });
    Field w = Field::from_function(g, [&](double, double) { return U(rng); });
    double general = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k)
        general += g->weight(k) * K[k] * std::pow(w[k], 2.0);
    EXPECT_NEAR(kernel_integral(K, w, 2.0), general, 1e-15 * std::abs(general));
}

TEST(Reaction, Examples)
{
    auto g = Grid::interval(1.0, 50);
    {
        auto s = spec_with(g, 1.0, {0, 0, 0, 0});
        DelayEvaluator ev(s, Trajectory::constant(Field(g, 1.0), Field(g, 1.0), 0.1, 10));
        auto [ru, rv] = reaction_rates(ev, 0.3, Field(g, 1.0), Field(g, 1.0));
        for (std::size_t k = 0; k < ru.size(); ++k)
            EXPECT_DOUBLE_EQ(ru[k], 1.0);
    }
    {
        const double c = 1.5, kk = 0.4, a0 = 2.0;
        auto s = spec_with(g, a0, {kk, 0, 0, 0});
        DelayEvaluator ev(s, Trajectory::constant(Field(g, c), Field(g, 0.0), 0.1, 10));
        Field u_now = Field::from_function(g, [](double x, double) { return x; });
        auto [ru, rv] = reaction_rates(ev, 0.55, u_now, Field(g, 1.0));
        for (std::size_t k = 0; k < ru.size(); ++k)
            EXPECT_NEAR(ru[k], (a0 - kk * c * c) * std::pow(u_now[k], s->p - 1.0), 1e-12);
    }
    {
        auto s = spec_with(g, 3.0, {1, 2, 3, 4});
        DelayEvaluator ev(s, Trajectory::constant(Field(g, 1.0), Field(g, 1.0), 0.1, 10));
        auto [ru, rv] = reaction_rates(ev, 0.1, Field(g, 0.0), Field(g, 0.0));
        EXPECT_EQ(ru.max_abs(), 0.0);
        EXPECT_EQ(rv.max_abs(), 0.0);
    }
}

TEST(Delay, FullPeriodDelayMatchesZeroDelay)
{
    auto g = Grid::interval(1.0, 40);
    const double T = 1.3;
    auto s0 = spec_with(g, 1.0, {0.5, 0.2, 0.3, 0.7}, T);
    auto sT = std::make_shared<ProblemSpec>(*s0);
    s0->tau = {0.0, 0.0, 0.0, 0.0};
    sT->tau = {T, T, T, T};
    const Trajectory h = wavy_history(g, T, 52);
    DelayEvaluator e0(s0, h), eT(sT, h);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(0.0, 3.0 * T);
    for (int n = 0; n < 100; ++n) {
        const double t = U(rng);
        for (int i = 1; i <= 4; ++i)
            EXPECT_EQ(e0.integral(i, t), eT.integral(i, t)) << "t=" << t << " i=" << i;
    }
}

TEST(Delay, WrapsAndInterpolates)
{
    auto g = Grid::interval(1.0, 10);
    auto s = spec_with(g, 1.0, {0, 0, 0, 0});
    Trajectory tr;
    tr.grid = g;
    tr.dt = 0.25;
    for (int j = 0; j <= 4; ++j) {
        tr.u.push_back(Field(g, static_cast<double>(j % 4)));
        tr.v.push_back(Field(g, 0.0));
    }
    tr.periodic = true;
    DelayEvaluator ev(s, tr);
    EXPECT_DOUBLE_EQ(ev.state_at(Component::U, 0.125)[3], 0.5);
    EXPECT_DOUBLE_EQ(ev.state_at(Component::U, -0.125)[3], 1.5); // t = 0.875 between frames 3 and 4 (= 0)
    EXPECT_DOUBLE_EQ(ev.state_at(Component::U, 1.5)[3], 2.0);
}

TEST(Delay, TransientBurnIn)
{
    auto g = Grid::interval(1.0, 10);
    auto s = spec_with(g, 1.0, {0, 0, 0, 0});
    DelayEvaluator ev = DelayEvaluator::transient(s, Field(g, 2.0), Field(g, 3.0), 0.1);
    EXPECT_DOUBLE_EQ(ev.state_at(Component::U, -5.0)[4], 2.0);
    ev.record(Field(g, 4.0), Field(g, 3.0));
    EXPECT_DOUBLE_EQ(ev.state_at(Component::U, 0.05)[4], 3.0);
    EXPECT_DOUBLE_EQ(ev.state_at(Component::U, 7.0)[4], 4.0);

    DelayEvaluator frozen(s, Trajectory::constant(Field(g, 1.0), Field(g, 1.0), 0.1, 10));
    EXPECT_THROW(frozen.record(Field(g), Field(g)), Error);
}

TEST(Reaction, MonotoneInK1)
{
    auto g = Grid::interval(1.0, 30);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto s1 = spec_with(g, 2.0, {U(rng), U(rng), U(rng), U(rng)});
        auto s2 = std::make_shared<ProblemSpec>(*s1);
        s2->K[0] = SpaceTimeField::sample(g, 1.0, 1, [&](double, double, double) { return 5.0 + U(rng); });
        const Trajectory h = wavy_history(g, 1.0, 20);
        const Field u = Field::from_function(g, [&](double, double) { return U(rng); });
        const double t = U(rng);
        auto [r1, v1] = reaction_rates(DelayEvaluator(s1, h), t, u, u);
        auto [r2, v2] = reaction_rates(DelayEvaluator(s2, h), t, u, u);
        for (std::size_t k = 0; k < r1.size(); ++k)
            EXPECT_LE(r2[k], r1[k] + 1e-14);
    }
}
