#pragma once

// Continuous problem data sampled on a grid, the standing-hypothesis checks,
// and the slow / normal / fast diffusion classification.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "perisys/error.hpp"
#include "perisys/grid.hpp"

namespace perisys {

/// A T-periodic function on Omega x [0,T) stored as `slices` equispaced
/// time samples. A single slice means constant in time.
class SpaceTimeField {
public:
    SpaceTimeField() = default;
    SpaceTimeField(GridPtr grid, double period, std::size_t slices, double fill = 0.0)
        : grid_(std::move(grid)), period_(period), slices_(slices), values_(slices * grid_->size(), fill)
    {
        expect(period > 0.0 && slices >= 1, ErrorCode::InvalidArgument, "space-time field needs T > 0 and a slice");
    }

    static SpaceTimeField constant(GridPtr grid, double period, double c) { return {std::move(grid), period, 1, c}; }

    template <class F>
    static SpaceTimeField sample(GridPtr grid, double period, std::size_t slices, F&& f)
    {
        SpaceTimeField out(grid, period, slices);
        for (std::size_t j = 0; j < slices; ++j) {
            const double t = period * static_cast<double>(j) / static_cast<double>(slices);
            for (std::size_t k = 0; k < grid->size(); ++k)
                out.values_[j * grid->size() + k] = f(grid->x(k), grid->y(k), t);
        }
        return out;
    }

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    double period() const { return period_; }
    std::size_t slices() const { return slices_; }
    double sample_at(std::size_t slice, std::size_t k) const { return values_[slice * grid_->size() + k]; }

    /// Value at node k, time t (any real; wrapped mod T, linear in time).
    double at(double t, std::size_t k) const
    {
        if (slices_ == 1)
            return values_[k];
        double s = std::fmod(t, period_) / period_ * static_cast<double>(slices_);
        if (s < 0.0)
            s += static_cast<double>(slices_);
        auto j0 = static_cast<std::size_t>(std::floor(s));
        const double w = s - static_cast<double>(j0);
        j0 %= slices_;
        const std::size_t j1 = (j0 + 1) % slices_;
        const std::size_t n = grid_->size();
        return (1.0 - w) * values_[j0 * n + k] + w * values_[j1 * n + k];
    }

    Field slice(double t) const
    {
        Field out(grid_);
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = at(t, k);
        return out;
    }

    double min() const { return *std::min_element(values_.begin(), values_.end()); }
    double max() const { return *std::max_element(values_.begin(), values_.end()); }
    double sup_abs() const { return std::max(std::abs(min()), std::abs(max())); }

    /// Space-time integral over Q_T: trapezoid in space, rectangle over the
    /// periodic time samples.
    double integral() const
    {
        const std::size_t n = grid_->size();
        double s = 0.0;
        for (std::size_t j = 0; j < slices_; ++j)
            for (std::size_t k = 0; k < n; ++k)
                s += grid_->weight(k) * values_[j * n + k];
        return s * period_ / static_cast<double>(slices_);
    }

    double l1_norm() const
    {
        const std::size_t n = grid_->size();
        double s = 0.0;
        for (std::size_t j = 0; j < slices_; ++j)
            for (std::size_t k = 0; k < n; ++k)
                s += grid_->weight(k) * std::abs(values_[j * n + k]);
        return s * period_ / static_cast<double>(slices_);
    }

    /// Integral over Q_T of this field times a time-independent weight w.
    double integral_against(const Field& w) const
    {
        const std::size_t n = grid_->size();
        double s = 0.0;
        for (std::size_t j = 0; j < slices_; ++j)
            for (std::size_t k = 0; k < n; ++k)
                s += grid_->weight(k) * values_[j * n + k] * w[k];
        return s * period_ / static_cast<double>(slices_);
    }

private:
    GridPtr grid_;
    double period_ = 1.0;
    std::size_t slices_ = 1;
    std::vector<double> values_;
};

/// Sign envelopes of the kernels: -klow_i <= K_i <= kbar_i for i = 2,3 and
/// the coercivity floors K_1 >= klow1, K_4 >= klow4.
struct KernelEnvelope {
    double kbar2 = 0.0, kbar3 = 0.0;
    double klow2 = 0.0, klow3 = 0.0;
    double klow1 = 0.0, klow4 = 0.0;

    bool coercive() const { return klow1 > 0.0 && klow4 > 0.0; }
};

struct ProblemSpec {
    double p = 1.5, q = 1.5;
    double m = 2.0, n = 2.0;
    double alpha = 2.0;
    std::array<double, 4> tau{0.25, 0.25, 0.25, 0.25};
    double T = 1.0;
    GridPtr grid;
    SpaceTimeField a, b;
    std::array<SpaceTimeField, 4> K; // K[0] = K1 ... K[3] = K4
    double epsilon = 0.0;
    std::optional<KernelEnvelope> envelope_override;

    double sup_a() const { return std::max(0.0, a.max()); }
    double sup_b() const { return std::max(0.0, b.max()); }
    double omega_measure() const { return grid->measure(); }
    double qt_measure() const { return grid->measure() * T; }
};

inline KernelEnvelope sampled_envelope(const ProblemSpec& s)
{
    KernelEnvelope e;
    e.klow1 = std::max(0.0, s.K[0].min());
    e.kbar2 = std::max(0.0, s.K[1].max());
    e.klow2 = std::max(0.0, -s.K[1].min());
    e.kbar3 = std::max(0.0, s.K[2].max());
    e.klow3 = std::max(0.0, -s.K[2].min());
    e.klow4 = std::max(0.0, s.K[3].min());
    return e;
}

inline KernelEnvelope envelope(const ProblemSpec& s)
{
    return s.envelope_override ? *s.envelope_override : sampled_envelope(s);
}

enum class Diffusion { Slow, Normal, Fast };

inline const char* to_string(Diffusion d)
{
    switch (d) {
    case Diffusion::Slow: return "Slow";
    case Diffusion::Normal: return "Normal";
    case Diffusion::Fast: return "Fast";
    }
    return "Unknown";
}

constexpr double normal_tolerance = 1e-12;

/// Classification from the product m(p-1) alone.
inline Diffusion classify_by_product(double product)
{
    const double d = product - 1.0;
    if (std::abs(d) <= normal_tolerance)
        return Diffusion::Normal;
    return d > 0.0 ? Diffusion::Slow : Diffusion::Fast;
}

inline Diffusion classify_diffusion(double m, double p)
{
    expect(p > 1.0 && p < 2.0, ErrorCode::InvalidArgument, "exponent p must lie in (1,2)");
    expect(m > 0.0, ErrorCode::InvalidArgument, "exponent m must be positive");
    return classify_by_product(m * (p - 1.0));
}

/// Fast diffusion together with m > p is only possible below the golden ratio.
inline bool fast_admissible(double p) { return p < 0.5 * (1.0 + std::sqrt(5.0)); }

struct RegimeReport {
    std::optional<Diffusion> regime_u, regime_v;
    bool fast_admissible_u = false, fast_admissible_v = false;
    std::vector<std::string> notes;
    std::vector<std::string> hypothesis_violations;

    bool ok() const { return hypothesis_violations.empty(); }
};

inline RegimeReport validate_hypotheses(const ProblemSpec& s)
{
    RegimeReport r;
    auto fail = [&](const std::string& name) { r.hypothesis_violations.push_back(name); };

    const bool p_ok = s.p > 1.0 && s.p < 2.0;
    const bool q_ok = s.q > 1.0 && s.q < 2.0;
    if (!p_ok)
        fail("p in (1,2) fails");
    if (!q_ok)
        fail("q in (1,2) fails");
    if (!(s.m > s.p))
        fail("m > p fails");
    if (!(s.n > s.q))
        fail("n > q fails");
    for (int i = 0; i < 4; ++i)
        if (!(s.tau[i] > 0.0))
            fail("tau" + std::to_string(i + 1) + " > 0 fails");
    if (!(s.T > 0.0))
        fail("T > 0 fails");
    if (!(s.alpha >= 1.0))
        fail("alpha >= 1 fails");
    if (!(s.epsilon >= 0.0))
        fail("epsilon >= 0 fails");
    if (s.a.min() < 0.0)
        fail("a non-negativity fails");
    if (s.b.min() < 0.0)
        fail("b non-negativity fails");
    if (s.K[0].min() < 0.0)
        fail("K1 non-negativity fails");
    if (s.K[3].min() < 0.0)
        fail("K4 non-negativity fails");

    const KernelEnvelope e = envelope(s);
    if (e.kbar2 < 0.0 || e.kbar3 < 0.0 || e.klow2 < 0.0 || e.klow3 < 0.0 || e.klow1 < 0.0 || e.klow4 < 0.0)
        fail("kernel envelope non-negativity fails");
    const double tol = 1e-12;
    if (s.K[1].max() > e.kbar2 + tol || s.K[1].min() < -e.klow2 - tol)
        fail("K2 envelope fails");
    if (s.K[2].max() > e.kbar3 + tol || s.K[2].min() < -e.klow3 - tol)
        fail("K3 envelope fails");
    if (s.K[0].min() < e.klow1 - tol)
        fail("K1 floor fails");
    if (s.K[3].min() < e.klow4 - tol)
        fail("K4 floor fails");

    if (p_ok && s.m > 0.0) {
        r.regime_u = classify_diffusion(s.m, s.p);
        r.fast_admissible_u = fast_admissible(s.p);
        if (*r.regime_u == Diffusion::Normal)
            r.notes.push_back("u: Boundary (m(p-1) = 1 within 1e-12)");
    }
    if (q_ok && s.n > 0.0) {
        r.regime_v = classify_diffusion(s.n, s.q);
        r.fast_admissible_v = fast_admissible(s.q);
        if (*r.regime_v == Diffusion::Normal)
            r.notes.push_back("v: Boundary (n(q-1) = 1 within 1e-12)");
    }
    return r;
}

} // namespace perisys
