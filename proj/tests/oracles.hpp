#pragma once

#include <cmath>
#include <numbers>

namespace perisys::testing {
/// Shooting oracle on (0, L): integrate phi = |u'|^{r-2} u', phi' = -mu |u|^{r-2} u
/// from u = 0, phi = 1 and bisect on mu until u' vanishes exactly at L/2.
inline double shooting_mu(double r, double L)
{
    auto turning_point = [r](double mu) {
        // RK4 in x until phi changes sign
        const double h = 1e-5;
        double x = 0.0, u = 0.0, phi = 1.0;
        auto du = [r](double ph) { return std::copysign(std::pow(std::abs(ph), 1.0 / (r - 1.0)), ph); };
        auto dphi = [r, mu](double uu) { return -mu * std::copysign(std::pow(std::abs(uu), r - 1.0), uu); };
        while (phi > 0.0 && x < 10.0) {
            const double k1u = du(phi), k1p = dphi(u);
            const double k2u = du(phi + 0.5 * h * k1p), k2p = dphi(u + 0.5 * h * k1u);
            const double k3u = du(phi + 0.5 * h * k2p), k3p = dphi(u + 0.5 * h * k2u);
            const double k4u = du(phi + h * k3p), k4p = dphi(u + h * k3u);
            const double un = u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
            const double pn = phi + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
            if (pn <= 0.0)
                return x + h * phi / (phi - pn);
            u = un;
            phi = pn;
            x += h;
        }
        return x;
    };
    double lo = 0.1, hi = 200.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (turning_point(mid) > 0.5 * L ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double closed_form_mu(double r)
{
    using std::numbers::pi;
    return (r - 1.0) * std::pow(2.0 * pi / (r * std::sin(pi / r)), r);
}

} // namespace perisys::testing
