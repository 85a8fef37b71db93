#pragma once

// Uniform tensor grids on intervals and rectangles, nodal fields, and the
// discrete calculus (edge gradients, conservative flux divergence,
// trapezoid quadrature) that the rest of the library is written against.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "perisys/error.hpp"

namespace perisys {

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Uniform node grid including boundary nodes. `nx`/`ny` count intervals,
/// so a 1D grid has nx+1 nodes and node 0 and nx are the Dirichlet boundary.
class Grid {
public:
    static GridPtr interval(double length, std::size_t intervals)
    {
        expect(length > 0.0, ErrorCode::InvalidArgument, "interval length must be positive");
        expect(intervals >= 4, ErrorCode::InvalidArgument, "need at least 3 interior nodes");
        return GridPtr(new Grid(1, length, 0.0, intervals, 0));
    }

    static GridPtr rectangle(double lx, double ly, std::size_t nx, std::size_t ny)
    {
        expect(lx > 0.0 && ly > 0.0, ErrorCode::InvalidArgument, "rectangle sides must be positive");
        expect(nx >= 4 && ny >= 4, ErrorCode::InvalidArgument, "need at least 3 interior nodes per axis");
        return GridPtr(new Grid(2, lx, ly, nx, ny));
    }

    int dim() const { return dim_; }
    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }

    std::size_t size() const { return dim_ == 1 ? nx_ + 1 : (nx_ + 1) * (ny_ + 1); }
    std::size_t index(std::size_t i, std::size_t j = 0) const { return j * (nx_ + 1) + i; }
    std::size_t ix(std::size_t k) const { return k % (nx_ + 1); }
    std::size_t iy(std::size_t k) const { return dim_ == 1 ? 0 : k / (nx_ + 1); }

    double x(std::size_t k) const { return static_cast<double>(ix(k)) * hx_; }
    double y(std::size_t k) const { return static_cast<double>(iy(k)) * hy_; }

    bool boundary(std::size_t k) const
    {
        const auto i = ix(k);
        if (i == 0 || i == nx_)
            return true;
        if (dim_ == 2) {
            const auto j = iy(k);
            return j == 0 || j == ny_;
        }
        return false;
    }

    /// Trapezoid quadrature weight of node k.
    double weight(std::size_t k) const
    {
        const auto i = ix(k);
        double w = (i == 0 || i == nx_) ? 0.5 * hx_ : hx_;
        if (dim_ == 2) {
            const auto j = iy(k);
            w *= (j == 0 || j == ny_) ? 0.5 * hy_ : hy_;
        }
        return w;
    }

    /// |Omega|
    double measure() const { return dim_ == 1 ? lx_ : lx_ * ly_; }

    std::size_t x_edges() const { return dim_ == 1 ? nx_ : nx_ * (ny_ + 1); }
    std::size_t y_edges() const { return dim_ == 1 ? 0 : (nx_ + 1) * ny_; }
    std::size_t x_edge(std::size_t i, std::size_t j = 0) const { return j * nx_ + i; }
    std::size_t y_edge(std::size_t i, std::size_t j) const { return j * (nx_ + 1) + i; }

    bool same_shape(const Grid& o) const
    {
        return dim_ == o.dim_ && nx_ == o.nx_ && ny_ == o.ny_ && lx_ == o.lx_ && ly_ == o.ly_;
    }

private:
    Grid(int dim, double lx, double ly, std::size_t nx, std::size_t ny)
        : dim_(dim), nx_(nx), ny_(ny), lx_(lx), ly_(ly),
          hx_(lx / static_cast<double>(nx)), hy_(dim == 2 ? ly / static_cast<double>(ny) : 1.0)
    {
    }

    int dim_;
    std::size_t nx_, ny_;
    double lx_, ly_;
    double hx_, hy_;
};

/// Nodal values on a grid. Value type; copying copies the values and
/// shares the (immutable) grid.
class Field {
public:
    Field() = default;
    explicit Field(GridPtr grid, double fill = 0.0) : grid_(std::move(grid)), values_(grid_->size(), fill) {}
    Field(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values))
    {
        expect(values_.size() == grid_->size(), ErrorCode::InvalidArgument, "field size does not match grid");
    }

    template <class F>
    static Field from_function(GridPtr grid, F&& f)
    {
        Field out(grid);
        for (std::size_t k = 0; k < grid->size(); ++k)
            out[k] = f(grid->x(k), grid->y(k));
        return out;
    }

    /// Same as from_function but forced to zero on boundary nodes.
    template <class F>
    static Field dirichlet(GridPtr grid, F&& f)
    {
        Field out(grid);
        for (std::size_t k = 0; k < grid->size(); ++k)
            out[k] = grid->boundary(k) ? 0.0 : f(grid->x(k), grid->y(k));
        return out;
    }

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& raw() { return values_; }
    const std::vector<double>& raw() const { return values_; }

    double min() const { return *std::min_element(values_.begin(), values_.end()); }
    double max_abs() const
    {
        double m = 0.0;
        for (double v : values_)
            m = std::max(m, std::abs(v));
        return m;
    }

private:
    GridPtr grid_;
    std::vector<double> values_;
};

inline double sup_diff(const Field& a, const Field& b)
{
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

enum class Component { U, V };

/// (u, v) frames at t_j = j*dt for j = 0..S. With `periodic` set frame S
/// aliases frame 0 and `period_residual` records their sup-distance.
struct Trajectory {
    GridPtr grid;
    double dt = 0.0;
    std::vector<Field> u;
    std::vector<Field> v;
    bool periodic = false;
    double period_residual = 0.0;

    std::size_t steps() const { return u.empty() ? 0 : u.size() - 1; }
    double period() const { return dt * static_cast<double>(steps()); }
    const std::vector<Field>& frames(Component c) const { return c == Component::U ? u : v; }
    std::vector<Field>& frames(Component c) { return c == Component::U ? u : v; }

    /// Constant-in-time trajectory of `frames` steps.
    static Trajectory constant(const Field& u0, const Field& v0, double dt, std::size_t steps)
    {
        Trajectory tr;
        tr.grid = u0.grid_ptr();
        tr.dt = dt;
        tr.u.assign(steps + 1, u0);
        tr.v.assign(steps + 1, v0);
        tr.periodic = true;
        return tr;
    }
};

inline double trajectory_sup_diff(const Trajectory& a, const Trajectory& b)
{
    expect(a.u.size() == b.u.size(), ErrorCode::InvalidArgument, "trajectory frame counts differ");
    double m = 0.0;
    for (std::size_t j = 0; j < a.u.size(); ++j)
        m = std::max({m, sup_diff(a.u[j], b.u[j]), sup_diff(a.v[j], b.v[j])});
    return m;
}

// ---------------------------------------------------------------------------
// Quadrature and norms

inline double integrate(const Field& f)
{
    const Grid& g = f.grid();
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
        s += g.weight(k) * f[k];
    return s;
}

/// Integral of |f|^r over Omega.
inline double integrate_pow(const Field& f, double r)
{
    const Grid& g = f.grid();
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
        s += g.weight(k) * std::pow(std::abs(f[k]), r);
    return s;
}

inline double norm_Lr_space(const Field& f, double r)
{
    expect(r >= 1.0, ErrorCode::InvalidArgument, "norm exponent must be >= 1");
    return std::pow(integrate_pow(f, r), 1.0 / r);
}

/// Time-trapezoid over one period of ||.||^r_{L^r(Omega)}, then the r-th root.
inline double norm_Lr_spacetime(const Trajectory& tr, Component c, double r, bool require_periodic = true)
{
    expect(r >= 1.0, ErrorCode::InvalidArgument, "norm exponent must be >= 1");
    expect(!require_periodic || tr.periodic, ErrorCode::InvalidArgument,
           "space-time norm over Q_T needs a periodic trajectory");
    const auto& fr = tr.frames(c);
    expect(fr.size() >= 2, ErrorCode::InvalidArgument, "trajectory needs at least two frames");
    double s = 0.0;
    for (std::size_t j = 0; j < fr.size(); ++j) {
        const double w = (j == 0 || j + 1 == fr.size()) ? 0.5 : 1.0;
        s += w * tr.dt * integrate_pow(fr[j], r);
    }
    return std::pow(s, 1.0 / r);
}

inline double sup_norm(const Trajectory& tr, Component c)
{
    double m = 0.0;
    for (const auto& f : tr.frames(c))
        m = std::max(m, f.max_abs());
    return m;
}

// ---------------------------------------------------------------------------
// Edge calculus

/// Values on cell edges: `x` on edges between (i,j),(i+1,j); `y` on edges
/// between (i,j),(i,j+1). In 1D only `x` is populated.
struct EdgeField {
    std::vector<double> x;
    std::vector<double> y;
};

inline EdgeField discrete_gradient(const Field& f)
{
    const Grid& g = f.grid();
    EdgeField e;
    e.x.resize(g.x_edges());
    e.y.resize(g.y_edges());
    if (g.dim() == 1) {
        for (std::size_t i = 0; i < g.nx(); ++i)
            e.x[i] = (f[i + 1] - f[i]) / g.hx();
        return e;
    }
    for (std::size_t j = 0; j <= g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i)
            e.x[g.x_edge(i, j)] = (f[g.index(i + 1, j)] - f[g.index(i, j)]) / g.hx();
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i <= g.nx(); ++i)
            e.y[g.y_edge(i, j)] = (f[g.index(i, j + 1)] - f[g.index(i, j)]) / g.hy();
    return e;
}

/// Squared gradient magnitude on each edge. The normal component is the
/// edge difference; in 2D the tangential component averages the four
/// neighbouring transverse edge differences (zero on boundary rows).
inline EdgeField edge_gradient_sq(const Field& f, const EdgeField& grad)
{
    const Grid& g = f.grid();
    EdgeField s;
    s.x.resize(grad.x.size());
    s.y.resize(grad.y.size());
    if (g.dim() == 1) {
        for (std::size_t i = 0; i < grad.x.size(); ++i)
            s.x[i] = grad.x[i] * grad.x[i];
        return s;
    }
    const std::size_t nx = g.nx(), ny = g.ny();
    for (std::size_t j = 0; j <= ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            double gt = 0.0;
            if (j > 0 && j < ny) {
                gt = 0.25 * (grad.y[g.y_edge(i, j - 1)] + grad.y[g.y_edge(i, j)] + grad.y[g.y_edge(i + 1, j - 1)] +
                             grad.y[g.y_edge(i + 1, j)]);
            }
            const double gn = grad.x[g.x_edge(i, j)];
            s.x[g.x_edge(i, j)] = gn * gn + gt * gt;
        }
    }
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i <= nx; ++i) {
            double gt = 0.0;
            if (i > 0 && i < nx) {
                gt = 0.25 * (grad.x[g.x_edge(i - 1, j)] + grad.x[g.x_edge(i, j)] + grad.x[g.x_edge(i - 1, j + 1)] +
                             grad.x[g.x_edge(i, j + 1)]);
            }
            const double gn = grad.y[g.y_edge(i, j)];
            s.y[g.y_edge(i, j)] = gn * gn + gt * gt;
        }
    }
    return s;
}

/// How the degenerate factor u^{(m-1)(p-1)} is carried to an edge:
/// Arithmetic averages u and then raises it to the power; ArithmeticPower
/// averages the nodal powers; Harmonic takes the harmonic mean of the powers.
enum class EdgeAverage { Arithmetic, ArithmeticPower, Harmonic };

/// Parameters of the regularized doubly nonlinear flux
/// (eps + scale * m^{p-1} (u+)^{(m-1)(p-1)}) (|grad u|^2 + delta^2)^{(p-2)/2} grad u.
struct FluxParams {
    double p = 2.0;
    double m = 1.0;
    double eps = 0.0;
    double delta_g = 1e-8;
    double degenerate_scale = 1.0; // sigma^{p-1} during the homotopy ramp
    EdgeAverage average = EdgeAverage::Arithmetic;
};

namespace detail {
inline void check_nonnegative(const Field& u)
{
    const Grid& g = u.grid();
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (!g.boundary(k) && u[k] < -1e-10) {
            std::ostringstream os;
            os << "interior value " << u[k] << " at node " << k << " is negative";
            throw Error(ErrorCode::NegativeState, os.str());
        }
    }
}

inline double edge_mean(double a, double b, EdgeAverage avg)
{
    if (avg == EdgeAverage::Harmonic)
        return (a > 0.0 && b > 0.0) ? 2.0 * a * b / (a + b) : 0.0;
    return 0.5 * (a + b);
}
} // namespace detail

/// Edge diffusivities D_e such that the flux is D_e * (edge gradient).
inline EdgeField edge_diffusivity(const Field& u, const FluxParams& fp)
{
    detail::check_nonnegative(u);
    const Grid& g = u.grid();
    const double l = (fp.m - 1.0) * (fp.p - 1.0);
    const double coef = fp.degenerate_scale * std::pow(fp.m, fp.p - 1.0);
    const double half_pm2 = 0.5 * (fp.p - 2.0);
    const double d2 = fp.delta_g * fp.delta_g;

    // With Arithmetic the nodal values stay linear and the power is taken
    // after averaging.
    const bool power_after = fp.average == EdgeAverage::Arithmetic;
    std::vector<double> nodal(u.size());
    for (std::size_t k = 0; k < u.size(); ++k)
        nodal[k] = power_after ? std::max(u[k], 0.0) : std::pow(std::max(u[k], 0.0), l);
    auto deg_of = [&](double mean) { return fp.eps + coef * (power_after ? std::pow(mean, l) : mean); };

    const EdgeField grad = discrete_gradient(u);
    const EdgeField gsq = edge_gradient_sq(u, grad);
    EdgeField d;
    d.x.resize(grad.x.size());
    d.y.resize(grad.y.size());
    auto sing = [&](double s) { return fp.p == 2.0 ? 1.0 : std::pow(s + d2, half_pm2); };
    if (g.dim() == 1) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double deg = deg_of(detail::edge_mean(nodal[i], nodal[i + 1], fp.average));
            d.x[i] = deg * sing(gsq.x[i]);
        }
        return d;
    }
    for (std::size_t j = 0; j <= g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const auto e = g.x_edge(i, j);
            const double deg = deg_of(detail::edge_mean(nodal[g.index(i, j)], nodal[g.index(i + 1, j)], fp.average));
            d.x[e] = deg * sing(gsq.x[e]);
        }
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i <= g.nx(); ++i) {
            const auto e = g.y_edge(i, j);
            const double deg = deg_of(detail::edge_mean(nodal[g.index(i, j)], nodal[g.index(i, j + 1)], fp.average));
            d.y[e] = deg * sing(gsq.y[e]);
        }
    return d;
}

/// div(D grad u) at interior nodes, zero on the boundary.
inline Field divergence(const EdgeField& d, const Field& u)
{
    const Grid& g = u.grid();
    Field out(u.grid_ptr());
    const EdgeField grad = discrete_gradient(u);
    if (g.dim() == 1) {
        for (std::size_t i = 1; i < g.nx(); ++i)
            out[i] = (d.x[i] * grad.x[i] - d.x[i - 1] * grad.x[i - 1]) / g.hx();
        return out;
    }
    for (std::size_t j = 1; j < g.ny(); ++j)
        for (std::size_t i = 1; i < g.nx(); ++i) {
            const double fx = d.x[g.x_edge(i, j)] * grad.x[g.x_edge(i, j)] -
                              d.x[g.x_edge(i - 1, j)] * grad.x[g.x_edge(i - 1, j)];
            const double fy = d.y[g.y_edge(i, j)] * grad.y[g.y_edge(i, j)] -
                              d.y[g.y_edge(i, j - 1)] * grad.y[g.y_edge(i, j - 1)];
            out[g.index(i, j)] = fx / g.hx() + fy / g.hy();
        }
    return out;
}

/// Conservative discretization of
/// div((eps + m^{p-1} u^{(m-1)(p-1)}) (|grad u|^2 + delta_g^2)^{(p-2)/2} grad u).
inline Field degenerate_flux_divergence(const Field& u, double p, double m, double eps, double delta_g)
{
    FluxParams fp;
    fp.p = p;
    fp.m = m;
    fp.eps = eps;
    fp.delta_g = delta_g;
    return divergence(edge_diffusivity(u, fp), u);
}

// ---------------------------------------------------------------------------
// Trajectory CSV: header "t,x,u,v" (1D) or "t,x,y,u,v" (2D), time-major rows.

namespace detail {
inline std::string fmt17(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}
} // namespace detail

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr)
{
    const Grid& g = *tr.grid;
    os << (g.dim() == 1 ? "t,x,u,v\n" : "t,x,y,u,v\n");
    os << std::setprecision(17);
    for (std::size_t j = 0; j < tr.u.size(); ++j) {
        const double t = tr.dt * static_cast<double>(j);
        for (std::size_t k = 0; k < g.size(); ++k) {
            os << t << ',' << g.x(k) << ',';
            if (g.dim() == 2)
                os << g.y(k) << ',';
            os << tr.u[j][k] << ',' << tr.v[j][k] << '\n';
        }
    }
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& tr)
{
    std::ofstream os(path);
    expect(static_cast<bool>(os), ErrorCode::IoError, "cannot open " + path);
    write_trajectory_csv(os, tr);
}

/// Re-reads a trajectory written by write_trajectory_csv. The grid and
/// time step are reconstructed from the coordinates.
inline Trajectory read_trajectory_csv(std::istream& is, bool periodic = true)
{
    std::string line;
    expect(static_cast<bool>(std::getline(is, line)), ErrorCode::IoError, "empty trajectory file");
    int dim = 0;
    if (line == "t,x,u,v")
        dim = 1;
    else if (line == "t,x,y,u,v")
        dim = 2;
    else
        throw Error(ErrorCode::IoError, "unexpected trajectory header '" + line + "'");

    std::vector<std::array<double, 5>> rows;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::array<double, 5> r{};
        std::stringstream ss(line);
        std::string cell;
        int c = 0;
        while (std::getline(ss, cell, ',') && c < 5)
            r[c++] = std::stod(cell);
        expect(c == dim + 3, ErrorCode::IoError, "malformed trajectory row: " + line);
        if (dim == 1) {
            r[4] = r[3];
            r[3] = r[2];
            r[2] = 0.0;
        }
        rows.push_back(r);
    }
    expect(!rows.empty(), ErrorCode::IoError, "trajectory has no rows");

    std::map<double, int> ts;
    double xmax = 0.0, ymax = 0.0;
    std::size_t nodes = 0;
    for (const auto& r : rows) {
        ts[r[0]] = 0;
        xmax = std::max(xmax, r[1]);
        ymax = std::max(ymax, r[2]);
        if (r[0] == rows.front()[0])
            ++nodes;
    }
    expect(rows.size() == nodes * ts.size(), ErrorCode::IoError, "ragged trajectory frames");

    GridPtr grid;
    if (dim == 1) {
        grid = Grid::interval(xmax, nodes - 1);
    } else {
        std::size_t nxp = 0;
        for (std::size_t k = 0; k < nodes && rows[k][2] == rows.front()[2]; ++k)
            ++nxp;
        grid = Grid::rectangle(xmax, ymax, nxp - 1, nodes / nxp - 1);
    }

    Trajectory tr;
    tr.grid = grid;
    const std::size_t frames = ts.size();
    tr.dt = frames > 1 ? (std::prev(ts.end())->first - ts.begin()->first) / static_cast<double>(frames - 1) : 0.0;
    for (std::size_t j = 0; j < frames; ++j) {
        Field u(grid), v(grid);
        for (std::size_t k = 0; k < nodes; ++k) {
            u[k] = rows[j * nodes + k][3];
            v[k] = rows[j * nodes + k][4];
        }
        tr.u.push_back(std::move(u));
        tr.v.push_back(std::move(v));
    }
    tr.periodic = periodic;
    if (periodic && frames > 1)
        tr.period_residual = std::max(sup_diff(tr.u.front(), tr.u.back()), sup_diff(tr.v.front(), tr.v.back()));
    return tr;
}

inline Trajectory read_trajectory_csv(const std::string& path, bool periodic = true)
{
    std::ifstream is(path);
    expect(static_cast<bool>(is), ErrorCode::IoError, "cannot open " + path);
    return read_trajectory_csv(is, periodic);
}

} // namespace perisys
