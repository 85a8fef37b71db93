#pragma once

#include <array>
#include <memory>

#include "perisys/problem.hpp"

namespace perisys::testing {

struct SpecBuilder {
    double p = 1.5, q = 1.5, m = 2.0, n = 2.0, alpha = 2.0, T = 1.0;
    double a = 5.0, b = 5.0;
    std::array<double, 4> K{1.0, 0.1, 0.1, 1.0};
    std::array<double, 4> tau{0.25, 0.25, 0.25, 0.25};
    double epsilon = 1e-2;
    double L = 1.0;
    std::size_t N = 50;

    std::shared_ptr<ProblemSpec> build() const
    {
        auto s = std::make_shared<ProblemSpec>();
        s->p = p;
        s->q = q;
        s->m = m;
        s->n = n;
        s->alpha = alpha;
        s->T = T;
        s->tau = tau;
        s->grid = Grid::interval(L, N);
        s->a = SpaceTimeField::constant(s->grid, T, a);
        s->b = SpaceTimeField::constant(s->grid, T, b);
        for (std::size_t i = 0; i < 4; ++i)
            s->K[i] = SpaceTimeField::constant(s->grid, T, K[i]);
        s->epsilon = epsilon;
        return s;
    }
};

/// The coercive cooperative scenario: a = b = 5, K1 = K4 = 1, K2 = K3 = 0.1,
/// p = q = 1.5, m = n = 2 on (0,1), T = 1.
inline SpecBuilder cooperative(std::size_t N = 50)
{
    SpecBuilder b;
    b.N = N;
    return b;
}

inline Field sine_bump(const GridPtr& g, double amp = 1.0)
{
    return Field::dirichlet(g, [&](double x, double) { return amp * std::sin(std::numbers::pi * x / g->lx()); });
}

} // namespace perisys::testing
