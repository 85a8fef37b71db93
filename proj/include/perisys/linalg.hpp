#pragma once

// Linear solves for the lagged-coefficient implicit diffusion operator
// (I - c div(D grad .)) with homogeneous Dirichlet data.

#include <cmath>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "perisys/error.hpp"
#include "perisys/grid.hpp"

namespace perisys {

/// Solves a tridiagonal system in place (Thomas algorithm). `lower[0]` and
/// `upper[n-1]` are ignored. Returns false on a zero pivot.
inline bool solve_tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                              std::vector<double>& rhs)
{
    const std::size_t n = diag.size();
    if (n == 0)
        return true;
    for (std::size_t i = 1; i < n; ++i) {
        if (diag[i - 1] == 0.0)
            return false;
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if (diag[n - 1] == 0.0)
        return false;
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    return true;
}

/// Solves (I - c div(D grad u)) u = rhs on interior nodes; boundary nodes
/// of the result are zero.
inline Field solve_implicit_diffusion(const EdgeField& d, double c, const Field& rhs)
{
    const Grid& g = rhs.grid();
    Field out(rhs.grid_ptr());
    if (g.dim() == 1) {
        const std::size_t n = g.nx() - 1;
        const double s = c / (g.hx() * g.hx());
        std::vector<double> lo(n), di(n), up(n), b(n);
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t i = r + 1;
            const double dl = d.x[i - 1], dr = d.x[i];
            lo[r] = -s * dl;
            up[r] = -s * dr;
            di[r] = 1.0 + s * (dl + dr);
            b[r] = rhs[i];
        }
        if (!solve_tridiagonal(lo, di, up, b))
            throw Error(ErrorCode::LinearSolveFailed, "zero pivot in tridiagonal solve");
        for (std::size_t r = 0; r < n; ++r) {
            if (!std::isfinite(b[r]))
                throw Error(ErrorCode::LinearSolveFailed, "non-finite value in tridiagonal solve");
            out[r + 1] = b[r];
        }
        return out;
    }

    const std::size_t mx = g.nx() - 1, my = g.ny() - 1;
    const std::size_t n = mx * my;
    auto row = [&](std::size_t i, std::size_t j) { return static_cast<int>((j - 1) * mx + (i - 1)); };
    const double sx = c / (g.hx() * g.hx()), sy = c / (g.hy() * g.hy());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * n);
    Eigen::VectorXd b(static_cast<Eigen::Index>(n));
    for (std::size_t j = 1; j < g.ny(); ++j) {
        for (std::size_t i = 1; i < g.nx(); ++i) {
            const int r = row(i, j);
            const double dw = d.x[g.x_edge(i - 1, j)], de = d.x[g.x_edge(i, j)];
            const double ds = d.y[g.y_edge(i, j - 1)], dn = d.y[g.y_edge(i, j)];
            trip.emplace_back(r, r, 1.0 + sx * (dw + de) + sy * (ds + dn));
            if (i > 1)
                trip.emplace_back(r, row(i - 1, j), -sx * dw);
            if (i + 1 < g.nx())
                trip.emplace_back(r, row(i + 1, j), -sx * de);
            if (j > 1)
                trip.emplace_back(r, row(i, j - 1), -sy * ds);
            if (j + 1 < g.ny())
                trip.emplace_back(r, row(i, j + 1), -sy * dn);
            b[r] = rhs[g.index(i, j)];
        }
    }
    Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::LinearSolveFailed, "sparse factorization failed");
    const Eigen::VectorXd x = solver.solve(b);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::LinearSolveFailed, "sparse solve failed");
    for (std::size_t j = 1; j < g.ny(); ++j)
        for (std::size_t i = 1; i < g.nx(); ++i)
            out[g.index(i, j)] = x[row(i, j)];
    (void)my;
    return out;
}

/// Unit edge coefficients, for the plain discrete Laplacian.
inline EdgeField unit_edges(const Grid& g)
{
    EdgeField e;
    e.x.assign(g.x_edges(), 1.0);
    e.y.assign(g.y_edges(), 1.0);
    return e;
}

} // namespace perisys
