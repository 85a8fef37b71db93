#pragma once

// First Dirichlet eigenpair of the r-Laplacian by minimizing the discrete
// Rayleigh quotient with preconditioned projected gradient descent.

#include <cmath>
#include <numbers>
#include <vector>

#include "perisys/error.hpp"
#include "perisys/grid.hpp"
#include "perisys/linalg.hpp"

namespace perisys {

struct EigenPair {
    double r = 2.0;
    double mu = 0.0;
    Field e;
    double residual = 0.0; // last relative change of the quotient
    std::size_t iterations = 0;
    bool converged = false;
    double grad_sup = 0.0; // max edge-gradient magnitude of e
    double delta_g = 0.0;
    std::vector<double> history; // quotient per accepted iterate
};

struct EigenOptions {
    double tol = 1e-12;
    std::size_t max_iterations = 5000;
    double delta_g = 1e-8;
    double armijo = 1e-4;
};

namespace detail {

/// Discrete r-Dirichlet energy sum_e w_e (|g_e|^2 + delta^2)^{r/2} and, if
/// requested, its nodal gradient. 1D uses edge differences; 2D uses cell
/// gradients built from the averaged edge differences of each cell.
inline double r_energy(const Field& z, double r, double delta, std::vector<double>* grad)
{
    const Grid& g = z.grid();
    const double d2 = delta * delta;
    double energy = 0.0;
    if (grad)
        grad->assign(z.size(), 0.0);
    if (g.dim() == 1) {
        const double h = g.hx();
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double gi = (z[i + 1] - z[i]) / h;
            const double s = gi * gi + d2;
            energy += h * std::pow(s, 0.5 * r);
            if (grad) {
                const double f = r * std::pow(s, 0.5 * r - 1.0) * gi; // d/dg, times h/h
                (*grad)[i + 1] += f;
                (*grad)[i] -= f;
            }
        }
        return energy;
    }
    const double hx = g.hx(), hy = g.hy(), area = hx * hy;
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const auto k00 = g.index(i, j), k10 = g.index(i + 1, j);
            const auto k01 = g.index(i, j + 1), k11 = g.index(i + 1, j + 1);
            const double gx = 0.5 * ((z[k10] - z[k00]) + (z[k11] - z[k01])) / hx;
            const double gy = 0.5 * ((z[k01] - z[k00]) + (z[k11] - z[k10])) / hy;
            const double s = gx * gx + gy * gy + d2;
            energy += area * std::pow(s, 0.5 * r);
            if (grad) {
                const double c = area * r * std::pow(s, 0.5 * r - 1.0);
                const double fx = c * gx * 0.5 / hx, fy = c * gy * 0.5 / hy;
                (*grad)[k00] += -fx - fy;
                (*grad)[k10] += fx - fy;
                (*grad)[k01] += -fx + fy;
                (*grad)[k11] += fx + fy;
            }
        }
    }
    return energy;
}

inline double r_mass(const Field& z, double r) { return integrate_pow(z, r); }

inline void project(Field& z, double r)
{
    const Grid& g = z.grid();
    for (std::size_t k = 0; k < z.size(); ++k)
        z[k] = g.boundary(k) ? 0.0 : std::abs(z[k]);
    const double nrm = norm_Lr_space(z, r);
    for (auto& v : z.raw())
        v /= nrm;
}

inline double max_edge_gradient(const Field& z)
{
    const EdgeField gr = discrete_gradient(z);
    const EdgeField sq = edge_gradient_sq(z, gr);
    double m = 0.0;
    for (double v : sq.x)
        m = std::max(m, v);
    for (double v : sq.y)
        m = std::max(m, v);
    return std::sqrt(m);
}

} // namespace detail

/// Discrete Rayleigh quotient of z (not necessarily normalized).
inline double rayleigh_quotient(const Field& z, double r, double delta_g)
{
    return detail::r_energy(z, r, delta_g, nullptr) / detail::r_mass(z, r);
}

inline EigenPair first_eigenpair(const GridPtr& grid, double r, const EigenOptions& opt = {})
{
    expect(r > 1.0, ErrorCode::InvalidArgument, "eigen exponent r must exceed 1");
    expect(opt.tol > 0.0, ErrorCode::InvalidArgument, "eigen tolerance must be positive");
    const Grid& g = *grid;

    Field z = Field::dirichlet(grid, [&](double x, double y) {
        double v = std::sin(std::numbers::pi * x / g.lx());
        if (g.dim() == 2)
            v *= std::sin(std::numbers::pi * y / g.ly());
        return v;
    });
    detail::project(z, r);

    // Preconditioner (I - c div(W grad)), c sized to the domain.
    const double ell = g.dim() == 1 ? g.lx() : std::min(g.lx(), g.ly());
    const double c_pre = ell * ell / (std::numbers::pi * std::numbers::pi);
    const EdgeField unit = unit_edges(g);

    EigenPair out;
    out.r = r;
    out.delta_g = opt.delta_g;
    std::vector<double> gn;
    double J = detail::r_energy(z, r, opt.delta_g, &gn); // mass is 1 after projection
    out.history.push_back(J);
    double step = 1.0;
    double rel = 1.0;
    std::size_t it = 0;
    for (; it < opt.max_iterations; ++it) {
        // grad J = grad N - J grad M at unit mass; divided by nodal weight it
        // becomes a grid-independent density.
        Field dens(grid);
        for (std::size_t k = 0; k < z.size(); ++k) {
            if (g.boundary(k))
                continue;
            const double w = g.weight(k);
            const double gm = r * w * std::pow(std::abs(z[k]), r - 1.0);
            dens[k] = (gn[k] - J * gm) / w;
        }
        EdgeField dw = unit;
        if (r != 2.0) {
            // Lagged r-Laplacian weights turn the step into a Kacanov-type
            // quasi-Newton update.
            const EdgeField gr = discrete_gradient(z);
            const EdgeField sq = edge_gradient_sq(z, gr);
            for (std::size_t e = 0; e < dw.x.size(); ++e)
                dw.x[e] = (r - 1.0) * std::pow(sq.x[e] + opt.delta_g * opt.delta_g, 0.5 * (r - 2.0));
            for (std::size_t e = 0; e < dw.y.size(); ++e)
                dw.y[e] = (r - 1.0) * std::pow(sq.y[e] + opt.delta_g * opt.delta_g, 0.5 * (r - 2.0));
        }
        const Field dir = solve_implicit_diffusion(dw, c_pre, dens);
        double slope = 0.0;
        for (std::size_t k = 0; k < z.size(); ++k)
            slope += g.weight(k) * dens[k] * dir[k];
        if (slope <= 0.0) {
            rel = 0.0;
            break;
        }

        bool accepted = false;
        double Jnew = J;
        Field trial(grid);
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t k = 0; k < z.size(); ++k)
                trial[k] = z[k] - step * dir[k];
            detail::project(trial, r);
            Jnew = rayleigh_quotient(trial, r, opt.delta_g);
            if (Jnew <= J - opt.armijo * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // No admissible decrease left at machine resolution.
            rel = 0.0;
            break;
        }
        rel = (J - Jnew) / J;
        z = trial;
        J = detail::r_energy(z, r, opt.delta_g, &gn) / detail::r_mass(z, r);
        out.history.push_back(J);
        step = std::min(2.0 * step, 4.0);
        if (rel <= opt.tol) {
            ++it;
            break;
        }
    }
    out.iterations = it;
    out.residual = rel;
    out.converged = rel <= opt.tol;
    out.mu = J;
    out.e = z;
    out.grad_sup = detail::max_edge_gradient(z);
    return out;
}

inline EigenPair first_eigenpair(const GridPtr& grid, double r, double tol)
{
    EigenOptions opt;
    opt.tol = tol;
    return first_eigenpair(grid, r, opt);
}

} // namespace perisys
