#pragma once

// JSON views of the module results and a deterministic writer that prints
// every floating value with 17 significant digits.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "perisys/bounds.hpp"
#include "perisys/eigenpair.hpp"
#include "perisys/periodic.hpp"
#include "perisys/problem.hpp"
#include "perisys/verify.hpp"

namespace perisys {

using json = nlohmann::ordered_json;

namespace detail {

inline void write_string(std::ostream& os, const std::string& s)
{
    os << json(s).dump(); // reuse the library's escaping
}

inline void write_json(std::ostream& os, const json& j, int indent, int depth)
{
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (const auto& [k, v] : j.items()) {
            if (!first)
                os << ",\n";
            first = false;
            os << pad;
            write_string(os, k);
            os << ": ";
            write_json(os, v, indent, depth + 1);
        }
        os << "\n" << close << "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        os << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i)
                os << ",\n";
            os << pad;
            write_json(os, j[i], indent, depth + 1);
        }
        os << "\n" << close << "]";
        return;
    }
    case json::value_t::number_float: {
        const double v = j.get<double>();
        if (std::isnan(v))
            os << "\"nan\"";
        else if (std::isinf(v))
            os << (v > 0 ? "\"inf\"" : "\"-inf\"");
        else {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << buf;
        }
        return;
    }
    default:
        os << j.dump();
    }
}

} // namespace detail

inline std::string to_json_text(const json& j)
{
    std::ostringstream os;
    detail::write_json(os, j, 2, 0);
    os << "\n";
    return os.str();
}

template <class T>
json optional_json(const std::optional<T>& v)
{
    return v ? json(*v) : json(nullptr);
}

inline json to_json(const EigenPair& e)
{
    return json{{"r", e.r},
                {"mu", e.mu},
                {"residual", e.residual},
                {"iterations", e.iterations},
                {"converged", e.converged},
                {"grad_sup", e.grad_sup}};
}

inline json to_json(const KernelEnvelope& e)
{
    return json{{"kbar2", e.kbar2}, {"kbar3", e.kbar3}, {"klow1", e.klow1},
                {"klow2", e.klow2}, {"klow3", e.klow3}, {"klow4", e.klow4}};
}

inline json to_json(const RegimeReport& r)
{
    return json{{"regime_u", r.regime_u ? json(to_string(*r.regime_u)) : json(nullptr)},
                {"regime_v", r.regime_v ? json(to_string(*r.regime_v)) : json(nullptr)},
                {"fast_admissible_u", r.fast_admissible_u},
                {"fast_admissible_v", r.fast_admissible_v},
                {"hypothesis_violations", r.hypothesis_violations},
                {"notes", r.notes}};
}

inline json to_json(const ThetaValue& t)
{
    return json{{"theta", t.theta}, {"first", t.first}, {"second", t.second}};
}

inline json to_json(const TheoremResult& t)
{
    json j{{"id", t.id}, {"verdict", to_string(t.verdict)}, {"checked", t.checked}, {"failed", t.failed}};
    j["norm_exponent"] = t.norm_exponent;
    j["C1"] = t.constants ? json(t.constants->C1) : json(nullptr);
    j["C2"] = t.constants ? json(t.constants->C2) : json(nullptr);
    j["theta"] = t.theta ? to_json(*t.theta) : json(nullptr);
    j["theta_required"] = t.theta_required;
    j["eps0"] = t.eps0;
    return j;
}

inline json to_json(const BruteforceConstants& b)
{
    return json{{"Cp", b.Cp},
                {"Cq", b.Cq},
                {"alpha_p", b.alpha_p},
                {"alpha_q", b.alpha_q},
                {"beta_p", b.beta_p},
                {"beta_q", b.beta_q},
                {"C1", b.C1},
                {"C2", b.C2},
                {"C1_formula", b.C1_formula},
                {"C2_formula", b.C2_formula},
                {"collapsed", b.collapsed},
                {"normal", b.normal},
                {"condition_value", b.condition_value},
                {"condition_holds", b.condition_holds}};
}

inline json to_json(const GradientBounds& g)
{
    return json{{"s", g.s},       {"s_max", g.s_max}, {"M1", g.M1},       {"M2", g.M2},
                {"beta", g.beta}, {"delta", g.delta}, {"R_proxy", g.R_proxy}};
}

inline json to_json(const LowerBounds& l)
{
    return json{{"r0", l.r0},   {"lambda0", l.lambda0}, {"D1", l.D1},   {"D2", l.D2},     {"K_p", l.K_p},
                {"K_q", l.K_q}, {"A_p", l.A_p},         {"A_q", l.A_q}, {"theta", l.theta}, {"root", l.root}};
}

inline json to_json(const MoserCheck& m)
{
    return json{{"holds", m.holds},
                {"worst_log_margin", m.worst_log_margin},
                {"worst_i", m.worst_i},
                {"worst_k", m.worst_k},
                {"log_M", m.log_M}};
}

inline json to_json(const BoundsReport& r)
{
    json j;
    j["envelope"] = to_json(r.envelope);
    j["regime"] = to_json(r.regime);
    j["mu_p"] = r.mu_p;
    j["mu_q"] = r.mu_q;
    j["grad_sup_p"] = r.grad_sup_p;
    j["grad_sup_q"] = r.grad_sup_q;
    j["bruteforce_threshold"] = r.bruteforce_threshold;
    json th = json::array();
    for (const auto& t : r.theorems)
        th.push_back(to_json(t));
    j["theorems"] = th;
    j["bruteforce"] = r.bruteforce ? to_json(*r.bruteforce) : json(nullptr);
    j["selected"] = r.selected.empty() ? json(nullptr) : json(r.selected);
    j["C1"] = r.selected_constants ? json(r.selected_constants->C1) : json(nullptr);
    j["C2"] = r.selected_constants ? json(r.selected_constants->C2) : json(nullptr);
    j["theta"] = r.theta ? to_json(*r.theta) : json(nullptr);
    j["eps0"] = r.eps0;
    j["gradient"] = r.gradient ? to_json(*r.gradient) : json(nullptr);
    j["lower"] = r.lower ? to_json(*r.lower) : json(nullptr);
    j["moser_u"] = to_json(r.moser_u);
    j["moser_v"] = to_json(r.moser_v);
    j["notes"] = r.notes;
    return j;
}

inline json to_json(const CheckResult& c)
{
    return json{{"name", c.name},       {"status", to_string(c.status)}, {"margin", c.margin},
                {"samples", c.samples}, {"value", c.value},              {"detail", c.detail}};
}

inline json to_json(const VerificationReport& r)
{
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back(to_json(c));
    return json{{"seed", r.seed}, {"passed", r.passed()}, {"checks", checks}};
}

inline json to_json(const PeriodicResult& r)
{
    return json{{"classification", to_string(r.classification)},
                {"status", to_string(r.status)},
                {"epsilon", r.epsilon},
                {"map_residual", r.map_residual},
                {"outer_residual", r.outer_residual},
                {"outer_iterations", r.outer_iterations},
                {"inner_iterations", r.inner_iterations},
                {"sup_u", r.sup_u},
                {"sup_v", r.sup_v},
                {"L2sq_u", std::pow(norm_Lr_spacetime(r.trajectory, Component::U, 2.0), 2.0)},
                {"L2sq_v", std::pow(norm_Lr_spacetime(r.trajectory, Component::V, 2.0), 2.0)},
                {"clamp_mass", r.clamp_mass},
                {"min_before_clamp", r.min_before_clamp}};
}

} // namespace perisys
