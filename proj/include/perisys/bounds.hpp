#pragma once

// Explicit a priori constants, the non-bifurcation threshold theta, the
// gradient and lower bounds, Moser exponent arithmetic, and per-theorem
// applicability verdicts.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "perisys/eigenpair.hpp"
#include "perisys/error.hpp"
#include "perisys/grid.hpp"
#include "perisys/problem.hpp"

namespace perisys {

struct ConstantPair {
    double C1 = 0.0, C2 = 0.0;
};

// ---------------------------------------------------------------------------
// Coercive kernels

/// Competitive coercive case (zero cross upper bounds): T|a|/k1, T|b|/k4.
inline ConstantPair coercive_competitive_C1_C2(double kfloor1, double kfloor4, double sup_a, double sup_b, double T)
{
    expect(kfloor1 > 0.0 && kfloor4 > 0.0, ErrorCode::InfeasibleCoercivity, "coercivity floors must be positive");
    return {T / kfloor1 * sup_a, T / kfloor4 * sup_b};
}

inline ConstantPair coercive_C1_C2(double kfloor1, double kfloor4, double kbar2, double kbar3, double sup_a,
                                   double sup_b, double T)
{
    expect(kfloor1 > 0.0 && kfloor4 > 0.0, ErrorCode::InfeasibleCoercivity, "coercivity floors must be positive");
    if (kbar2 == 0.0 && kbar3 == 0.0)
        return coercive_competitive_C1_C2(kfloor1, kfloor4, sup_a, sup_b, T);
    const double det = kfloor1 * kfloor4 - kbar2 * kbar3;
    if (!(det > 0.0))
        throw Error(ErrorCode::InfeasibleCoercivity, "klow1*klow4 must exceed kbar2*kbar3");
    return {T * (kfloor4 * sup_a + kbar2 * sup_b) / det, T * (kbar3 * sup_a + kfloor1 * sup_b) / det};
}

// ---------------------------------------------------------------------------
// Non-coercive, competitive, slow or normal diffusion

/// |Q|^{(m(p-1)-1)/l} mu^{-2/l} (|Omega|^{1-p/2} A (m(p-1)+1)^p / (m^{p-1} p^p))^{2/l},
/// l = (p-1)(m-1).
inline double noncoercive_competitive_constant(double p, double m, double sup_a, double omega, double T, double mu)
{
    const double l = (p - 1.0) * (m - 1.0);
    const double Q = omega * T;
    const double e = (m * (p - 1.0) - 1.0) / l;
    const double qfac = e == 0.0 ? 1.0 : std::pow(Q, e);
    const double inner =
        std::pow(omega, 1.0 - 0.5 * p) * sup_a * std::pow(m * (p - 1.0) + 1.0, p) / (std::pow(m, p - 1.0) * std::pow(p, p));
    return qfac * std::pow(mu, -2.0 / l) * std::pow(inner, 2.0 / l);
}

inline ConstantPair noncoercive_competitive_C1_C2(const ProblemSpec& spec, double mu_p, double mu_q)
{
    const Diffusion du = classify_diffusion(spec.m, spec.p);
    const Diffusion dv = classify_diffusion(spec.n, spec.q);
    if (du == Diffusion::Fast || dv == Diffusion::Fast)
        throw Error(ErrorCode::RegimeMismatch, "non-coercive competitive bounds need slow or normal diffusion");
    const KernelEnvelope e = envelope(spec);
    if (e.kbar2 > 0.0 || e.kbar3 > 0.0)
        throw Error(ErrorCode::PreconditionViolated, "non-coercive competitive bounds need K2, K3 <= 0");
    const double om = spec.omega_measure();
    return {noncoercive_competitive_constant(spec.p, spec.m, spec.sup_a(), om, spec.T, mu_p),
            noncoercive_competitive_constant(spec.q, spec.n, spec.sup_b(), om, spec.T, mu_q)};
}

// ---------------------------------------------------------------------------
// Non-coercive with large exponents (no sign condition on K2, K3)

/// min{m(p-1)/(p+1), n(q-1)/(q+1)}
inline double bruteforce_threshold(double p, double m, double q, double n)
{
    return std::min(m * (p - 1.0) / (p + 1.0), n * (q - 1.0) / (q + 1.0));
}

struct BruteforceConstants {
    double Cp = 0.0, Cq = 0.0;
    double alpha_p = 0.0, alpha_q = 0.0;
    double beta_p = 0.0, beta_q = 0.0;
    double C1 = 0.0, C2 = 0.0;                 // reported constants
    double C1_formula = 0.0, C2_formula = 0.0; // the general closed form, always evaluated
    bool collapsed = false;                    // zero cross kernels: competitive form used
    bool normal = false;                       // threshold equality branch
    double condition_value = 0.0;              // beta_p at the equality branch
    bool condition_holds = true;
};

namespace detail {

inline double cp_constant(double p, double m, double omega, double T, double mu)
{
    const double l = (p - 1.0) * (m - 1.0);
    const double base = std::pow(l + 2.0, p) * std::pow(omega, 0.5 * l) /
                        (std::pow(p, p) * std::pow(m, p - 1.0) * (3.0 - p) * mu);
    return std::pow(base, 4.0 / (l + 2.0)) * std::pow(T, (l - 2.0) / (l + 2.0));
}

inline BruteforceConstants bruteforce_core(const ProblemSpec& spec, double mu_p, double mu_q)
{
    BruteforceConstants b;
    const KernelEnvelope e = envelope(spec);
    const double lp = (spec.p - 1.0) * (spec.m - 1.0);
    const double lq = (spec.q - 1.0) * (spec.n - 1.0);
    const double L = lp * lq;
    const double T = spec.T, A = spec.sup_a(), B = spec.sup_b();
    const double om = spec.omega_measure();
    b.Cp = cp_constant(spec.p, spec.m, om, T, mu_p);
    b.Cq = cp_constant(spec.q, spec.n, om, T, mu_q);
    const double P = std::pow(b.Cp, (lp + 2.0) / lp);
    const double Qc = std::pow(b.Cq, (lq + 2.0) / lq);
    const double k2 = e.kbar2, k3 = e.kbar3;
    b.alpha_p = P * std::pow(2.0 * T * A * A, 2.0 / lp) +
                P * std::pow(2.0 * k2 * k2 * Qc, 2.0 / lp) * std::pow(2.0 * T * B * B, 4.0 / L);
    b.alpha_q = Qc * std::pow(2.0 * T * B * B, 2.0 / lq) +
                Qc * std::pow(2.0 * k3 * k3 * P, 2.0 / lq) * std::pow(2.0 * T * A * A, 4.0 / L);
    b.beta_p = P * std::pow(2.0 * k2 * k2 * Qc, 2.0 / lp) * std::pow(2.0 * k3 * k3, 4.0 / L);
    b.beta_q = Qc * std::pow(2.0 * k3 * k3 * P, 2.0 / lq) * std::pow(2.0 * k2 * k2, 4.0 / L);
    b.collapsed = k2 == 0.0 && k3 == 0.0;
    return b;
}

} // namespace detail

/// Threshold equality: U <= alpha + beta U gives C = sqrt(T alpha / (1 - beta)).
inline BruteforceConstants normal_diffusion_condition(const ProblemSpec& spec, double mu_p, double mu_q)
{
    const double th = bruteforce_threshold(spec.p, spec.m, spec.q, spec.n);
    if (std::abs(th - 1.0) > normal_tolerance)
        throw Error(ErrorCode::RegimeMismatch, "normal-diffusion condition needs the threshold to equal 1");
    BruteforceConstants b = detail::bruteforce_core(spec, mu_p, mu_q);
    b.normal = true;
    b.condition_value = b.beta_p;
    b.condition_holds = b.beta_p < 1.0;
    if (b.condition_holds && b.beta_q < 1.0) {
        b.C1 = b.C1_formula = std::sqrt(spec.T * b.alpha_p / (1.0 - b.beta_p));
        b.C2 = b.C2_formula = std::sqrt(spec.T * b.alpha_q / (1.0 - b.beta_q));
    } else {
        b.C1 = b.C2 = b.C1_formula = b.C2_formula = std::numeric_limits<double>::infinity();
    }
    return b;
}

inline BruteforceConstants bruteforce_regime_C1_C2(const ProblemSpec& spec, double mu_p, double mu_q)
{
    const double th = bruteforce_threshold(spec.p, spec.m, spec.q, spec.n);
    if (std::abs(th - 1.0) <= normal_tolerance)
        return normal_diffusion_condition(spec, mu_p, mu_q);
    if (th < 1.0)
        throw Error(ErrorCode::RegimeMismatch, "min{m(p-1)/(p+1), n(q-1)/(q+1)} must exceed 1");
    BruteforceConstants b = detail::bruteforce_core(spec, mu_p, mu_q);
    const double L = (spec.p - 1.0) * (spec.m - 1.0) * (spec.q - 1.0) * (spec.n - 1.0);
    const double r = L / (L - 4.0);
    b.C1_formula = std::sqrt(spec.T) * std::sqrt(r * b.alpha_p + std::pow(b.beta_p, r));
    b.C2_formula = std::sqrt(spec.T) * std::sqrt(r * b.alpha_q + std::pow(b.beta_q, r));
    if (b.collapsed) {
        b.C1 = std::sqrt(spec.T * b.alpha_p);
        b.C2 = std::sqrt(spec.T * b.alpha_q);
    } else {
        b.C1 = b.C1_formula;
        b.C2 = b.C2_formula;
    }
    return b;
}

// ---------------------------------------------------------------------------
// Generalized nonlocal power alpha (bounds in L^alpha)

enum class AlphaBranch { Coercive, NonCoercive };

inline double generalized_noncoercive_constant(double p, double m, double alpha, double sup_a, double Q, double mu)
{
    const double mp = m * (p - 1.0);
    return Q * std::pow(mu, -alpha / mp) *
           std::pow(sup_a * std::pow(mp + alpha, p) / (alpha * std::pow(m, p - 1.0) * std::pow(p, p)), alpha / mp);
}

inline ConstantPair generalized_alpha_bounds(const ProblemSpec& spec, double mu_p, double mu_q, AlphaBranch branch)
{
    expect(spec.alpha >= 1.0, ErrorCode::InvalidArgument, "alpha must be >= 1");
    const KernelEnvelope e = envelope(spec);
    if (e.kbar2 > 0.0 || e.kbar3 > 0.0)
        throw Error(ErrorCode::PreconditionViolated, "generalized bounds need K2, K3 <= 0");
    if (branch == AlphaBranch::Coercive) {
        if (!e.coercive())
            throw Error(ErrorCode::PreconditionViolated, "coercive branch needs positive K1, K4 floors");
        return {spec.T / e.klow1 * spec.sup_a(), spec.T / e.klow4 * spec.sup_b()};
    }
    const double Q = spec.qt_measure();
    return {generalized_noncoercive_constant(spec.p, spec.m, spec.alpha, spec.sup_a(), Q, mu_p),
            generalized_noncoercive_constant(spec.q, spec.n, spec.alpha, spec.sup_b(), Q, mu_q)};
}

// ---------------------------------------------------------------------------
// theta and epsilon_0

/// Integral over Q_T of f(x,t) e(x)^r.
inline double weighted_integral(const SpaceTimeField& f, const EigenPair& e)
{
    Field w(e.e.grid_ptr());
    for (std::size_t k = 0; k < w.size(); ++k)
        w[k] = std::pow(std::max(e.e[k], 0.0), e.r);
    return f.integral_against(w);
}

struct ThetaValue {
    double theta = 0.0;
    double first = 0.0, second = 0.0; // the two bracketed quantities
};

inline ThetaValue theta(double C1, double C2, double eps0, const SpaceTimeField& a, const SpaceTimeField& b,
                        const EigenPair& ep, const EigenPair& eq, double klow2, double klow3, double T)
{
    ThetaValue v;
    v.first = weighted_integral(a, ep) / T - eps0 * ep.mu - klow2 * C2 / T;
    v.second = weighted_integral(b, eq) / T - eps0 * eq.mu - klow3 * C1 / T;
    v.theta = std::min(v.first, v.second);
    return v;
}

/// Largest eps0 keeping theta > 0 (bisection), halved. Zero when theta(0) <= 0.
inline double choose_eps0(double C1, double C2, const SpaceTimeField& a, const SpaceTimeField& b, const EigenPair& ep,
                          const EigenPair& eq, double klow2, double klow3, double T)
{
    auto th = [&](double e) { return theta(C1, C2, e, a, b, ep, eq, klow2, klow3, T).theta; };
    if (!(th(0.0) > 0.0))
        return 0.0;
    double lo = 0.0, hi = 1.0;
    while (th(hi) > 0.0 && hi < 1e300)
        hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (th(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * lo;
}

// ---------------------------------------------------------------------------
// Gradient bounds

/// Open interval (0, s_max) of admissible s.
inline double admissible_s_max(double p, double m, double q, double n)
{
    return std::min((p - 1.0) * (m - p) / p, (q - 1.0) * (n - q) / q);
}

struct GradientBounds {
    double s = 0.0, s_max = 0.0;
    double M1 = 0.0, M2 = 0.0;
    double beta = 0.0, beta_conj = 0.0;   // p side
    double delta = 0.0, delta_conj = 0.0; // q side
    double R_proxy = 0.0;
};

namespace detail {
inline double m_constant(double p, double m, double sup_a, double kbar, double omega, double T, double R, double s,
                         double mu, double& beta, double& beta_conj)
{
    const double l = (p - 1.0) * (m - 1.0);
    beta = p * (l - s) / (l - p * s);
    beta_conj = beta / (beta - 1.0);
    const double Q = omega * T;
    const double num = (sup_a + kbar * omega * R * R) * std::pow(Q, 1.0 / beta_conj) * std::pow(1.0 / mu, 1.0 / beta) *
                       std::pow(l - s, p);
    const double den = std::pow(m * (p - 1.0), p - 1.0) * ((p - 1.0) * (m - p) - p * s);
    return std::pow(num / den, beta / (p * (beta - 1.0)));
}
} // namespace detail

inline GradientBounds gradient_bounds_M1_M2(const ProblemSpec& spec, double mu_p, double mu_q, double s,
                                            double R_proxy)
{
    GradientBounds g;
    g.s_max = admissible_s_max(spec.p, spec.m, spec.q, spec.n);
    if (!(s > 0.0 && s < g.s_max))
        throw Error(ErrorCode::InadmissibleS,
                    "s=" + std::to_string(s) + " outside (0, " + std::to_string(g.s_max) + ")");
    expect(R_proxy > 0.0, ErrorCode::InvalidArgument, "R proxy must be positive");
    const KernelEnvelope e = envelope(spec);
    g.s = s;
    g.R_proxy = R_proxy;
    const double om = spec.omega_measure();
    g.M1 = detail::m_constant(spec.p, spec.m, spec.sup_a(), e.kbar2, om, spec.T, R_proxy, s, mu_p, g.beta,
                              g.beta_conj);
    g.M2 = detail::m_constant(spec.q, spec.n, spec.sup_b(), e.kbar3, om, spec.T, R_proxy, s, mu_q, g.delta,
                              g.delta_conj);
    return g;
}

// ---------------------------------------------------------------------------
// r0 and lambda0

struct LowerBounds {
    double r0 = 0.0, lambda0 = 0.0;
    double D1 = 0.0, D2 = 0.0;
    double K_p = 0.0, K_q = 0.0;
    double A_p = 0.0, A_q = 0.0; // int int a e_p^p - eps0 T mu_p and the q analogue
    double G_p = 0.0, G_q = 0.0; // gradient terms
    double theta = 0.0;
    double root = 2.0; // 2, or alpha for the generalized system
};

namespace detail {
inline double gradient_term(const EigenPair& e, double m, double M, double s, double Q)
{
    const double r = e.r;
    const double l = (r - 1.0) * (m - 1.0);
    double esup = 0.0;
    for (double v : e.e.raw())
        esup = std::max(esup, std::pow(std::max(v, 0.0), r - 1.0));
    return r * esup * e.grad_sup * std::pow(m * (r - 1.0) * M / (l - s), r - 1.0) * std::pow(Q, 1.0 / r);
}

inline double min_roots(double x, double root, double s) { return std::min(std::pow(x, 1.0 / root), std::pow(x, 1.0 / s)); }
} // namespace detail

inline LowerBounds r0_and_lambda(const ProblemSpec& spec, const EigenPair& ep, const EigenPair& eq,
                                 const GradientBounds& gb, double eps0, double C1, double C2)
{
    const KernelEnvelope e = envelope(spec);
    LowerBounds lb;
    lb.root = spec.alpha;
    lb.theta = theta(C1, C2, eps0, spec.a, spec.b, ep, eq, e.klow2, e.klow3, spec.T).theta;
    if (!(lb.theta > 0.0))
        throw Error(ErrorCode::NonpositiveTheta, "theta(C1, C2) = " + std::to_string(lb.theta) + " is not positive");
    const double Q = spec.qt_measure();
    lb.A_p = weighted_integral(spec.a, ep) - eps0 * spec.T * ep.mu;
    lb.A_q = weighted_integral(spec.b, eq) - eps0 * spec.T * eq.mu;
    lb.G_p = detail::gradient_term(ep, spec.m, gb.M1, gb.s, Q);
    lb.G_q = detail::gradient_term(eq, spec.n, gb.M2, gb.s, Q);
    const double k1 = spec.K[0].l1_norm(), k2 = spec.K[1].l1_norm();
    const double k3 = spec.K[2].l1_norm(), k4 = spec.K[3].l1_norm();
    lb.D1 = k1 + k2 + lb.G_p;
    lb.D2 = k3 + k4 + lb.G_q;
    lb.K_p = k1 + lb.G_p;
    lb.K_q = k4 + lb.G_q;
    const double s = gb.s;
    lb.r0 = std::min(detail::min_roots(lb.A_p / lb.D1, lb.root, s), detail::min_roots(lb.A_q / lb.D2, lb.root, s));
    const double tt = spec.T * lb.theta;
    lb.lambda0 = std::min(detail::min_roots(tt / lb.K_p, lb.root, s), detail::min_roots(tt / lb.K_q, lb.root, s));
    return lb;
}

// ---------------------------------------------------------------------------
// Moser exponent chain

struct MoserExponents {
    double s_k = 0.0;
    double alpha_k = 0.0;
    double alpha_k_over_p = 0.0; // equals 1 on the normal-diffusion line
};

inline MoserExponents moser_exponents(double p, double m, int k)
{
    expect(p > 1.0 && p < 2.0 && m > p, ErrorCode::InvalidArgument, "Moser exponents need p in (1,2), m > p");
    expect(k >= 0, ErrorCode::InvalidArgument, "Moser index must be non-negative");
    MoserExponents e;
    const double pk = std::pow(p, k);
    e.s_k = 2.0 * pk + (pk - p) / (p - 1.0) + m - 1.0;
    e.alpha_k = p * (e.s_k + 2.0) / (m * (p - 1.0) + e.s_k + 1.0);
    e.alpha_k_over_p = (e.s_k + 2.0) / (m * (p - 1.0) + e.s_k + 1.0);
    return e;
}

struct MoserCheck {
    bool holds = true;
    double worst_log_margin = std::numeric_limits<double>::infinity(); // log(M p^i) - log(prod)
    int worst_i = 0, worst_k = 0;
    double log_M = 0.0;
};

/// prod_{j=1..i} alpha_{k-j} <= M p^i for all 1 <= i <= k <= k_max, in log space.
inline MoserCheck product_bound_check(double p, double m, int k_max)
{
    MoserCheck c;
    c.log_M = std::abs(1.0 - m * (p - 1.0)) / (2.0 * (p - 1.0));
    std::vector<double> log_ratio(static_cast<std::size_t>(std::max(k_max, 0)) + 1);
    for (int k = 0; k <= k_max; ++k)
        log_ratio[static_cast<std::size_t>(k)] = std::log(moser_exponents(p, m, k).alpha_k_over_p);
    for (int k = 1; k <= k_max; ++k) {
        double acc = 0.0; // sum_j log(alpha_{k-j}/p)
        for (int i = 1; i <= k; ++i) {
            acc += log_ratio[static_cast<std::size_t>(k - i)];
            const double margin = c.log_M - acc;
            if (margin < c.worst_log_margin) {
                c.worst_log_margin = margin;
                c.worst_i = i;
                c.worst_k = k;
            }
            if (margin < -1e-12)
                c.holds = false;
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Aggregate report

enum class Verdict { Applicable, NotApplicable };

inline const char* to_string(Verdict v) { return v == Verdict::Applicable ? "Applicable" : "NotApplicable"; }

struct TheoremResult {
    std::string id;
    Verdict verdict = Verdict::NotApplicable;
    std::vector<std::string> checked;
    std::vector<std::string> failed;
    std::optional<ConstantPair> constants;
    double norm_exponent = 2.0; // bounds are on ||.||^e_{L^e(Q_T)}
    std::optional<ThetaValue> theta;
    double eps0 = 0.0;
    bool theta_required = true;
};

struct BoundsOptions {
    std::optional<double> s;       // default: midpoint of the admissible interval
    std::optional<double> R_proxy; // L-infinity stand-in; without it M1, M2 need kbar2 = kbar3 = 0
    std::optional<double> eps0;    // default: bisection, halved
    std::string only;              // restrict to one theorem id
};

struct BoundsReport {
    KernelEnvelope envelope;
    RegimeReport regime;
    double mu_p = 0.0, mu_q = 0.0;
    double grad_sup_p = 0.0, grad_sup_q = 0.0;
    std::vector<TheoremResult> theorems;
    std::optional<BruteforceConstants> bruteforce;
    std::string selected; // theorem whose constants feed theta, r0, lambda0
    std::optional<ConstantPair> selected_constants;
    std::optional<ThetaValue> theta;
    double eps0 = 0.0;
    std::optional<GradientBounds> gradient;
    std::optional<LowerBounds> lower;
    double bruteforce_threshold = 0.0;
    MoserCheck moser_u, moser_v;
    std::vector<std::string> notes;

    const TheoremResult* find(const std::string& id) const
    {
        for (const auto& t : theorems)
            if (t.id == id)
                return &t;
        return nullptr;
    }
};

inline const std::vector<std::string>& theorem_ids()
{
    static const std::vector<std::string> ids = {
        "coercive-cooperative", "coercive-competitive", "coercive",        "noncoercive-competitive",
        "bruteforce",           "normal-diffusion",     "alpha-coercive",  "alpha-noncoercive",
    };
    return ids;
}

inline BoundsReport theorem_verdicts(const ProblemSpec& spec, const EigenPair& ep, const EigenPair& eq,
                                     const BoundsOptions& opt = {})
{
    BoundsReport rep;
    rep.envelope = envelope(spec);
    rep.regime = validate_hypotheses(spec);
    rep.mu_p = ep.mu;
    rep.mu_q = eq.mu;
    rep.grad_sup_p = ep.grad_sup;
    rep.grad_sup_q = eq.grad_sup;
    const KernelEnvelope& e = rep.envelope;
    const bool hyp = rep.regime.ok();
    const bool alpha2 = spec.alpha == 2.0;
    const bool a_nontrivial = spec.a.max() > 0.0, b_nontrivial = spec.b.max() > 0.0;
    const bool competitive = e.kbar2 == 0.0 && e.kbar3 == 0.0;
    const bool cooperative = e.klow2 == 0.0 && e.klow3 == 0.0;
    const bool k14_nonneg = spec.K[0].min() >= 0.0 && spec.K[3].min() >= 0.0;
    const bool p_ok = spec.p > 1.0 && spec.p < 2.0 && spec.q > 1.0 && spec.q < 2.0;
    rep.bruteforce_threshold = bruteforce_threshold(spec.p, spec.m, spec.q, spec.n);

    auto run = [&](const std::string& id, auto&& body) {
        if (!opt.only.empty() && opt.only != id)
            return;
        TheoremResult t;
        t.id = id;
        auto need = [&](bool ok, const std::string& what) {
            t.checked.push_back(what);
            if (!ok)
                t.failed.push_back(what);
        };
        try {
            body(t, need);
        } catch (const Error& err) {
            t.failed.push_back(err.what());
        }
        if (t.constants) {
            t.eps0 = opt.eps0 ? *opt.eps0
                              : choose_eps0(t.constants->C1, t.constants->C2, spec.a, spec.b, ep, eq, e.klow2,
                                            e.klow3, spec.T);
            t.theta = theta(t.constants->C1, t.constants->C2, t.eps0, spec.a, spec.b, ep, eq, e.klow2, e.klow3,
                            spec.T);
            if (t.theta_required)
                need(t.theta->theta > 0.0, "theta(C1, C2) > 0");
        }
        t.verdict = t.failed.empty() ? Verdict::Applicable : Verdict::NotApplicable;
        rep.theorems.push_back(std::move(t));
    };

    run("coercive-cooperative", [&](TheoremResult& t, auto need) {
        t.theta_required = false;
        need(hyp, "standing hypotheses");
        need(alpha2, "alpha = 2");
        need(a_nontrivial && b_nontrivial, "a, b nontrivial");
        need(cooperative, "K2, K3 >= 0");
        need(e.coercive(), "K1, K4 bounded below by positive constants");
        need(e.klow1 * e.klow4 > e.kbar2 * e.kbar3, "klow1*klow4 > kbar2*kbar3");
        if (e.coercive() && e.klow1 * e.klow4 > e.kbar2 * e.kbar3)
            t.constants = coercive_C1_C2(e.klow1, e.klow4, e.kbar2, e.kbar3, spec.sup_a(), spec.sup_b(), spec.T);
    });
    run("coercive-competitive", [&](TheoremResult& t, auto need) {
        need(hyp, "standing hypotheses");
        need(alpha2, "alpha = 2");
        need(competitive, "K2, K3 <= 0");
        need(e.coercive(), "K1, K4 bounded below by positive constants");
        if (e.coercive())
            t.constants = coercive_competitive_C1_C2(e.klow1, e.klow4, spec.sup_a(), spec.sup_b(), spec.T);
    });
    run("coercive", [&](TheoremResult& t, auto need) {
        need(hyp, "standing hypotheses");
        need(alpha2, "alpha = 2");
        need(e.coercive(), "K1, K4 bounded below by positive constants");
        need(e.klow1 * e.klow4 > e.kbar2 * e.kbar3, "klow1*klow4 > kbar2*kbar3");
        if (e.coercive() && e.klow1 * e.klow4 > e.kbar2 * e.kbar3)
            t.constants = coercive_C1_C2(e.klow1, e.klow4, e.kbar2, e.kbar3, spec.sup_a(), spec.sup_b(), spec.T);
    });
    run("noncoercive-competitive", [&](TheoremResult& t, auto need) {
        need(hyp, "standing hypotheses");
        need(alpha2, "alpha = 2");
        need(competitive, "K2, K3 <= 0");
        const bool slow_or_normal = p_ok && spec.m * (spec.p - 1.0) >= 1.0 - normal_tolerance &&
                                    spec.n * (spec.q - 1.0) >= 1.0 - normal_tolerance;
        need(slow_or_normal, "slow or normal diffusion");
        if (competitive && slow_or_normal)
            t.constants = noncoercive_competitive_C1_C2(spec, ep.mu, eq.mu);
    });
    run("bruteforce", [&](TheoremResult& t, auto need) {
        need(alpha2, "alpha = 2");
        need(p_ok, "p, q in (1,2)");
        need(k14_nonneg, "K1, K4 >= 0");
        const bool above = rep.bruteforce_threshold > 1.0 + normal_tolerance;
        need(above, "min{m(p-1)/(p+1), n(q-1)/(q+1)} > 1");
        if (above) {
            rep.bruteforce = bruteforce_regime_C1_C2(spec, ep.mu, eq.mu);
            t.constants = ConstantPair{rep.bruteforce->C1, rep.bruteforce->C2};
        }
    });
    run("normal-diffusion", [&](TheoremResult& t, auto need) {
        need(alpha2, "alpha = 2");
        need(p_ok, "p, q in (1,2)");
        need(k14_nonneg, "K1, K4 >= 0");
        const bool at = std::abs(rep.bruteforce_threshold - 1.0) <= normal_tolerance;
        need(at, "min{m(p-1)/(p+1), n(q-1)/(q+1)} = 1");
        if (at) {
            rep.bruteforce = normal_diffusion_condition(spec, ep.mu, eq.mu);
            need(rep.bruteforce->condition_holds, "normal-diffusion condition < 1");
            if (rep.bruteforce->condition_holds && std::isfinite(rep.bruteforce->C1))
                t.constants = ConstantPair{rep.bruteforce->C1, rep.bruteforce->C2};
        }
    });
    run("alpha-coercive", [&](TheoremResult& t, auto need) {
        t.norm_exponent = spec.alpha;
        need(hyp, "standing hypotheses");
        need(competitive, "K2, K3 <= 0");
        need(e.coercive(), "K1, K4 bounded below by positive constants");
        if (competitive && e.coercive())
            t.constants = generalized_alpha_bounds(spec, ep.mu, eq.mu, AlphaBranch::Coercive);
    });
    run("alpha-noncoercive", [&](TheoremResult& t, auto need) {
        t.norm_exponent = spec.alpha;
        need(hyp, "standing hypotheses");
        need(competitive, "K2, K3 <= 0");
        if (competitive)
            t.constants = generalized_alpha_bounds(spec, ep.mu, eq.mu, AlphaBranch::NonCoercive);
    });

    // The first applicable theorem in list order feeds the derived constants.
    for (const auto& t : rep.theorems) {
        if (t.verdict == Verdict::Applicable && t.constants) {
            rep.selected = t.id;
            rep.selected_constants = t.constants;
            rep.theta = t.theta;
            rep.eps0 = t.eps0;
            break;
        }
    }

    if (p_ok && spec.m > spec.p && spec.n > spec.q) {
        rep.moser_u = product_bound_check(spec.p, spec.m, 30);
        rep.moser_v = product_bound_check(spec.q, spec.n, 30);
        const double smax = admissible_s_max(spec.p, spec.m, spec.q, spec.n);
        const double s = opt.s.value_or(0.5 * smax);
        const bool need_R = e.kbar2 > 0.0 || e.kbar3 > 0.0;
        if (need_R && !opt.R_proxy) {
            rep.notes.push_back("M1, M2 not evaluated: nonzero kbar2/kbar3 need an L-infinity proxy R");
        } else {
            try {
                rep.gradient = gradient_bounds_M1_M2(spec, ep.mu, eq.mu, s, opt.R_proxy.value_or(1.0));
            } catch (const Error& err) {
                rep.notes.push_back(err.what());
            }
        }
        if (rep.gradient && rep.selected_constants) {
            try {
                rep.lower = r0_and_lambda(spec, ep, eq, *rep.gradient, rep.eps0, rep.selected_constants->C1,
                                          rep.selected_constants->C2);
            } catch (const Error& err) {
                rep.notes.push_back(err.what());
            }
        }
    }
    return rep;
}

/// L-infinity scale used to flag runaway iterates: 10 x max(1, sqrt(max C / |Q_T|)).
inline double divergence_limit(const BoundsReport& rep, const ProblemSpec& spec)
{
    double scale = 1.0;
    if (rep.selected_constants) {
        const double c = std::max(rep.selected_constants->C1, rep.selected_constants->C2);
        if (std::isfinite(c))
            scale = std::max(scale, std::sqrt(c / spec.qt_measure()));
    }
    return 10.0 * scale;
}

} // namespace perisys
