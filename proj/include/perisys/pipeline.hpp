#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "perisys/bounds.hpp"
#include "perisys/config.hpp"
#include "perisys/periodic.hpp"
#include "perisys/report.hpp"
#include "perisys/verify.hpp"

namespace perisys {

/// First eigenpairs for p and q (shared when p = q).
inline std::pair<EigenPair, EigenPair> eigenpairs(const ProblemSpec& spec, const Numerics& n)
{
    EigenOptions eo;
    eo.tol = n.eigen_tol;
    EigenPair ep = first_eigenpair(spec.grid, spec.p, eo);
    EigenPair eq = spec.q == spec.p ? ep : first_eigenpair(spec.grid, spec.q, eo);
    return {std::move(ep), std::move(eq)};
}

inline BoundsOptions bounds_options(const Numerics& n)
{
    BoundsOptions bo;
    bo.s = n.s;
    bo.R_proxy = n.r_proxy;
    return bo;
}

struct SolveOutcome {
    PeriodicResult result;
    BoundsReport bounds;
    VerificationReport compliance;
    std::vector<std::string> warnings;
};

/// Bounds, periodic solve, then bounds again with R = 2 max sup when no proxy
/// was configured, and a priori compliance against the selected theorem.
inline SolveOutcome solve_with_bounds(const RunConfig& c, bool sigma_ramp)
{
    auto spec = make_spec(c);
    const auto [ep, eq] = eigenpairs(*spec, c.numerics);
    SolveOutcome out;
    out.bounds = theorem_verdicts(*spec, ep, eq, bounds_options(c.numerics));
    PeriodicConfig pc = periodic_config(c.numerics);
    pc.sigma_ramp = pc.sigma_ramp || sigma_ramp;
    pc.divergence_limit = divergence_limit(out.bounds, *spec);
    const auto [u0, v0] = initial_data(spec->grid, c.numerics);
    out.result = solve_periodic(spec, pc, u0, v0);

    if (!c.numerics.r_proxy) {
        BoundsOptions bo = bounds_options(c.numerics);
        bo.R_proxy = 2.0 * std::max({out.result.sup_u, out.result.sup_v, 1e-12});
        out.bounds = theorem_verdicts(*spec, ep, eq, bo);
    }
    const TheoremResult* sel = out.bounds.selected.empty() ? nullptr : out.bounds.find(out.bounds.selected);
    if (sel && sel->constants && out.result.classification != Classification::Trivial) {
        AprioriBounds ab{sel->constants->C1, sel->constants->C2, sel->norm_exponent, sel->id};
        out.compliance = apriori_compliance(out.result.trajectory, ab);
    }
    if (out.bounds.lower && out.result.classification == Classification::Coexistence) {
        const double floor = 0.1 * out.bounds.lower->lambda0;
        if (out.result.sup_u < floor || out.result.sup_v < floor)
            out.warnings.push_back("sup norm below 0.1 * lambda0 = " + detail::fmt17(floor));
    }
    return out;
}

} // namespace perisys
