#pragma once

// JSON run configuration: problem data (preset or inline), numerics, outputs
// and sweep settings. Validation collects every error with its JSON path.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "perisys/bounds.hpp"
#include "perisys/error.hpp"
#include "perisys/grid.hpp"
#include "perisys/periodic.hpp"
#include "perisys/problem.hpp"

namespace perisys {

using json = nlohmann::ordered_json;

#ifndef PERISYS_PRESET_DIR
#define PERISYS_PRESET_DIR "presets"
#endif

/// (c + amp * tfun(2 pi t / T)) * sfun(x), sfun = 1 or the product of sin(pi x_i / L_i).
struct Coefficient {
    enum class Time { None, Sin, Cos };
    enum class Space { One, Sine };
    double c = 0.0;
    double amp = 0.0;
    Time time = Time::None;
    Space space = Space::One;

    bool time_dependent() const { return time != Time::None && amp != 0.0; }

    double operator()(double x, double y, double t, double T, double lx, double ly, int dim) const
    {
        double tf = 0.0;
        if (time == Time::Sin)
            tf = std::sin(2.0 * std::numbers::pi * t / T);
        else if (time == Time::Cos)
            tf = std::cos(2.0 * std::numbers::pi * t / T);
        double sf = 1.0;
        if (space == Space::Sine) {
            sf = std::sin(std::numbers::pi * x / lx);
            if (dim == 2)
                sf *= std::sin(std::numbers::pi * y / ly);
        }
        return (c + amp * tf) * sf;
    }
};

struct ProblemInput {
    double p = 1.5, q = 1.5, m = 2.0, n = 2.0, alpha = 2.0, T = 1.0;
    std::array<double, 4> tau{0.25, 0.25, 0.25, 0.25};
    double lx = 1.0, ly = 0.0; // ly = 0: one-dimensional
    Coefficient a, b;
    std::array<Coefficient, 4> K;
    double epsilon = 1e-2;
    std::optional<KernelEnvelope> envelope;
};

struct Numerics {
    std::size_t N = 200, Ny = 0;
    std::size_t S = 2000;
    double dt = 0.0; // T / S after validation
    double delta_g = 1e-8;
    Scheme scheme = Scheme::ImexLagged;
    EdgeAverage average = EdgeAverage::Arithmetic;
    bool clamp = true;
    double omega = 0.7;
    double tol_outer = 1e-6, tol_map = 1e-8;
    std::size_t max_outer = 50, max_inner = 200;
    double outer_relax = 1.0;
    bool sigma_ramp = false;
    bool extrapolate = false;
    double theta_triv = 1e-6;
    unsigned long long seed = 1;
    double u0 = 1.0, v0 = 1.0; // amplitudes of the sine initial data
    double eigen_tol = 1e-12;
    std::optional<double> s;
    std::optional<double> r_proxy;
};

struct Outputs {
    std::string trajectory, report;
};

struct SweepSettings {
    std::vector<double> epsilon;                                  // continuation schedule
    std::vector<std::pair<std::string, std::vector<double>>> grid; // independent solves, cartesian product
};

struct RunConfig {
    std::string preset;
    ProblemInput problem;
    Numerics numerics;
    Outputs outputs;
    SweepSettings sweep;
    json source; // merged document after preset expansion
};

struct LoadResult {
    std::optional<RunConfig> config;
    std::vector<std::string> errors;
    bool ok() const { return config.has_value() && errors.empty(); }
};

inline std::filesystem::path preset_dir()
{
    if (const char* env = std::getenv("PERISYS_PRESETS"))
        return env;
    return PERISYS_PRESET_DIR;
}

inline std::vector<std::string> preset_names()
{
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& e : std::filesystem::directory_iterator(preset_dir(), ec))
        if (e.path().extension() == ".json" && e.path().stem() != "schema")
            out.push_back(e.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail {

class Reader {
public:
    std::vector<std::string>& errors;

    void error(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

    bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed)
    {
        if (!j.is_object()) {
            error(path, "expected an object");
            return false;
        }
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [k, v] : j.items())
            if (!ok.count(k))
                error(path + "/" + k, "unknown key");
        return true;
    }

    void number(const json& j, const std::string& path, const char* key, double& out)
    {
        if (!j.contains(key))
            return;
        const json& v = j.at(key);
        if (!v.is_number())
            error(path + "/" + key, "expected a number");
        else
            out = v.get<double>();
    }

    void count(const json& j, const std::string& path, const char* key, std::size_t& out, std::size_t min = 1)
    {
        if (!j.contains(key))
            return;
        const json& v = j.at(key);
        if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min))
            error(path + "/" + key, "expected an integer >= " + std::to_string(min));
        else
            out = v.get<std::size_t>();
    }

    void boolean(const json& j, const std::string& path, const char* key, bool& out)
    {
        if (!j.contains(key))
            return;
        if (!j.at(key).is_boolean())
            error(path + "/" + key, "expected a boolean");
        else
            out = j.at(key).get<bool>();
    }

    void string(const json& j, const std::string& path, const char* key, std::string& out)
    {
        if (!j.contains(key))
            return;
        if (!j.at(key).is_string())
            error(path + "/" + key, "expected a string");
        else
            out = j.at(key).get<std::string>();
    }

    void coefficient(const json& j, const std::string& path, Coefficient& c)
    {
        if (j.is_number()) {
            c = Coefficient{};
            c.c = j.get<double>();
            return;
        }
        if (!object(j, path, {"const", "amp", "time", "space"}))
            return;
        c = Coefficient{};
        number(j, path, "const", c.c);
        number(j, path, "amp", c.amp);
        std::string t = "none", s = "one";
        string(j, path, "time", t);
        string(j, path, "space", s);
        if (t == "sin")
            c.time = Coefficient::Time::Sin;
        else if (t == "cos")
            c.time = Coefficient::Time::Cos;
        else if (t != "none")
            error(path + "/time", "expected \"none\", \"sin\" or \"cos\"");
        if (s == "sine")
            c.space = Coefficient::Space::Sine;
        else if (s != "one")
            error(path + "/space", "expected \"one\" or \"sine\"");
    }
};

inline void read_problem(Reader& r, const json& j, ProblemInput& p)
{
    const std::string path = "/problem";
    if (!r.object(j, path,
                  {"p", "q", "m", "n", "alpha", "T", "tau", "domain", "a", "b", "K1", "K2", "K3", "K4", "epsilon",
                   "envelope"}))
        return;
    r.number(j, path, "p", p.p);
    r.number(j, path, "q", p.q);
    r.number(j, path, "m", p.m);
    r.number(j, path, "n", p.n);
    r.number(j, path, "alpha", p.alpha);
    r.number(j, path, "T", p.T);
    r.number(j, path, "epsilon", p.epsilon);
    for (const char* key : {"p", "q"}) {
        const double v = key[0] == 'p' ? p.p : p.q;
        if (!(v > 1.0 && v < 2.0))
            r.error(path + "/" + key, "must lie in the open interval (1,2) required by the standing hypotheses");
    }
    if (!(p.T > 0.0))
        r.error(path + "/T", "period must be positive");
    if (!(p.epsilon >= 0.0))
        r.error(path + "/epsilon", "must be non-negative");
    if (!(p.alpha >= 1.0))
        r.error(path + "/alpha", "must be >= 1");
    if (!(p.m > 0.0))
        r.error(path + "/m", "must be positive");
    if (!(p.n > 0.0))
        r.error(path + "/n", "must be positive");
    if (j.contains("tau")) {
        const json& t = j.at("tau");
        if (t.is_number()) {
            p.tau.fill(t.get<double>());
        } else if (t.is_array() && t.size() == 4 && std::all_of(t.begin(), t.end(), [](const json& v) { return v.is_number(); })) {
            for (std::size_t i = 0; i < 4; ++i)
                p.tau[i] = t[i].get<double>();
        } else {
            r.error(path + "/tau", "expected a number or an array of 4 numbers");
        }
        for (double v : p.tau)
            if (!(v > 0.0))
                r.error(path + "/tau", "delays must be positive");
    }
    if (j.contains("domain")) {
        const json& d = j.at("domain");
        if (r.object(d, path + "/domain", {"lx", "ly"})) {
            r.number(d, path + "/domain", "lx", p.lx);
            r.number(d, path + "/domain", "ly", p.ly);
        }
        if (!(p.lx > 0.0))
            r.error(path + "/domain/lx", "must be positive");
        if (p.ly < 0.0)
            r.error(path + "/domain/ly", "must be positive (or 0 for one dimension)");
    }
    if (j.contains("a"))
        r.coefficient(j.at("a"), path + "/a", p.a);
    if (j.contains("b"))
        r.coefficient(j.at("b"), path + "/b", p.b);
    const char* kn[4] = {"K1", "K2", "K3", "K4"};
    for (int i = 0; i < 4; ++i)
        if (j.contains(kn[i]))
            r.coefficient(j.at(kn[i]), path + "/" + kn[i], p.K[static_cast<std::size_t>(i)]);
    if (j.contains("envelope")) {
        const json& e = j.at("envelope");
        const std::string ep = path + "/envelope";
        if (r.object(e, ep, {"kbar2", "kbar3", "klow1", "klow2", "klow3", "klow4"})) {
            KernelEnvelope env;
            r.number(e, ep, "kbar2", env.kbar2);
            r.number(e, ep, "kbar3", env.kbar3);
            r.number(e, ep, "klow1", env.klow1);
            r.number(e, ep, "klow2", env.klow2);
            r.number(e, ep, "klow3", env.klow3);
            r.number(e, ep, "klow4", env.klow4);
            p.envelope = env;
        }
    }
}

inline void read_numerics(Reader& r, const json& j, Numerics& n, double T)
{
    const std::string path = "/numerics";
    if (!r.object(j, path,
                  {"N", "Ny", "S", "dt", "delta_g", "scheme", "edge_average", "clamp", "omega", "tol_outer", "tol_map",
                   "max_outer", "max_inner", "outer_relax", "sigma_ramp", "extrapolate", "theta_triv", "seed",
                   "initial", "eigen_tol", "s", "r_proxy"}))
        return;
    r.count(j, path, "N", n.N, 4);
    if (j.contains("Ny"))
        r.count(j, path, "Ny", n.Ny, 4);
    r.count(j, path, "S", n.S, 1);
    r.number(j, path, "delta_g", n.delta_g);
    r.number(j, path, "omega", n.omega);
    r.number(j, path, "tol_outer", n.tol_outer);
    r.number(j, path, "tol_map", n.tol_map);
    r.count(j, path, "max_outer", n.max_outer);
    r.count(j, path, "max_inner", n.max_inner);
    r.number(j, path, "outer_relax", n.outer_relax);
    r.boolean(j, path, "sigma_ramp", n.sigma_ramp);
    r.boolean(j, path, "extrapolate", n.extrapolate);
    r.boolean(j, path, "clamp", n.clamp);
    r.number(j, path, "theta_triv", n.theta_triv);
    r.number(j, path, "eigen_tol", n.eigen_tol);
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned())
            r.error(path + "/seed", "expected a non-negative integer");
        else
            n.seed = j.at("seed").get<unsigned long long>();
    }
    std::string scheme = "imex", avg = "arithmetic";
    r.string(j, path, "scheme", scheme);
    r.string(j, path, "edge_average", avg);
    if (scheme == "explicit")
        n.scheme = Scheme::Explicit;
    else if (scheme != "imex")
        r.error(path + "/scheme", "expected \"imex\" or \"explicit\"");
    if (avg == "arithmetic-power")
        n.average = EdgeAverage::ArithmeticPower;
    else if (avg == "harmonic")
        n.average = EdgeAverage::Harmonic;
    else if (avg != "arithmetic")
        r.error(path + "/edge_average", "expected \"arithmetic\", \"arithmetic-power\" or \"harmonic\"");
    if (j.contains("initial")) {
        const json& i = j.at("initial");
        if (r.object(i, path + "/initial", {"u", "v"})) {
            r.number(i, path + "/initial", "u", n.u0);
            r.number(i, path + "/initial", "v", n.v0);
        }
        if (n.u0 < 0.0 || n.v0 < 0.0)
            r.error(path + "/initial", "amplitudes must be non-negative");
    }
    for (const char* key : {"s", "r_proxy"}) {
        if (!j.contains(key))
            continue;
        double v = 0.0;
        r.number(j, path, key, v);
        (key[0] == 's' ? n.s : n.r_proxy) = v;
    }
    if (!(n.omega > 0.0 && n.omega <= 1.0))
        r.error(path + "/omega", "must lie in (0,1]");
    if (!(n.outer_relax > 0.0 && n.outer_relax <= 1.0))
        r.error(path + "/outer_relax", "must lie in (0,1]");
    if (!(n.delta_g > 0.0))
        r.error(path + "/delta_g", "must be positive");
    if (!(n.tol_outer > 0.0) || !(n.tol_map > 0.0))
        r.error(path, "tolerances must be positive");
    if (n.r_proxy && !(*n.r_proxy > 0.0))
        r.error(path + "/r_proxy", "must be positive");
    n.dt = T / static_cast<double>(n.S);
    if (j.contains("dt")) {
        double dt = 0.0;
        r.number(j, path, "dt", dt);
        if (!(dt > 0.0) || std::abs(dt * static_cast<double>(n.S) - T) > 1e-9 * T)
            r.error(path + "/dt", "inconsistent with S and T: dt * S must equal T");
    }
}

inline void read_outputs(Reader& r, const json& j, Outputs& o)
{
    if (!r.object(j, "/outputs", {"trajectory", "report"}))
        return;
    r.string(j, "/outputs", "trajectory", o.trajectory);
    r.string(j, "/outputs", "report", o.report);
}

inline void read_sweep(Reader& r, const json& j, SweepSettings& s)
{
    const std::string path = "/sweep";
    if (!r.object(j, path, {"epsilon", "grid"}))
        return;
    auto numbers = [&](const json& v, const std::string& at, std::vector<double>& out) {
        if (!v.is_array() || v.empty()) {
            r.error(at, "expected a non-empty array of numbers");
            return;
        }
        for (const auto& x : v) {
            if (!x.is_number()) {
                r.error(at, "expected a non-empty array of numbers");
                return;
            }
            out.push_back(x.get<double>());
        }
    };
    if (j.contains("epsilon"))
        numbers(j.at("epsilon"), path + "/epsilon", s.epsilon);
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        if (r.object(g, path + "/grid", {"p", "q", "m", "n", "alpha", "epsilon", "a", "b", "T"})) {
            for (const auto& [k, v] : g.items()) {
                std::vector<double> vals;
                numbers(v, path + "/grid/" + k, vals);
                s.grid.emplace_back(k, std::move(vals));
            }
        }
    }
}

} // namespace detail

/// Validates a config document. A top-level "preset" names a file in the
/// preset directory; the remaining keys are merged over it.
inline LoadResult parse_config(json doc)
{
    LoadResult res;
    if (!doc.is_object()) {
        res.errors.push_back("/: expected an object");
        return res;
    }
    RunConfig cfg;
    if (doc.contains("preset")) {
        if (!doc.at("preset").is_string()) {
            res.errors.push_back("/preset: expected a string");
            return res;
        }
        cfg.preset = doc.at("preset").get<std::string>();
        const auto file = preset_dir() / (cfg.preset + ".json");
        std::ifstream in(file);
        if (!in) {
            res.errors.push_back("/preset: unknown preset \"" + cfg.preset + "\"");
            return res;
        }
        json base;
        try {
            base = json::parse(in);
        } catch (const json::parse_error& e) {
            res.errors.push_back("/preset: " + file.string() + ": " + e.what());
            return res;
        }
        base.erase("preset");
        doc.erase("preset");
        base.merge_patch(doc);
        doc = std::move(base);
    }

    detail::Reader r{res.errors};
    r.object(doc, "", {"description", "problem", "numerics", "outputs", "sweep"});
    if (doc.contains("problem"))
        detail::read_problem(r, doc.at("problem"), cfg.problem);
    else
        r.error("/problem", "missing");
    detail::read_numerics(r, doc.value("numerics", json::object()), cfg.numerics, cfg.problem.T);
    if (doc.contains("outputs"))
        detail::read_outputs(r, doc.at("outputs"), cfg.outputs);
    if (doc.contains("sweep"))
        detail::read_sweep(r, doc.at("sweep"), cfg.sweep);
    if (cfg.problem.ly > 0.0 && cfg.numerics.Ny == 0)
        cfg.numerics.Ny = cfg.numerics.N;
    if (cfg.problem.ly == 0.0 && cfg.numerics.Ny != 0)
        r.error("/numerics/Ny", "set only for a two-dimensional domain");
    cfg.source = std::move(doc);
    if (res.errors.empty())
        res.config = std::move(cfg);
    return res;
}

inline LoadResult load_config(const std::string& path)
{
    LoadResult res;
    std::ifstream in(path);
    if (!in) {
        res.errors.push_back(path + ": cannot open");
        return res;
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        res.errors.push_back(path + ": parse error: " + e.what());
        return res;
    }
    return parse_config(std::move(doc));
}

inline LoadResult load_preset(const std::string& name) { return parse_config(json{{"preset", name}}); }

inline GridPtr make_grid(const ProblemInput& p, const Numerics& n)
{
    return p.ly > 0.0 ? Grid::rectangle(p.lx, p.ly, n.N, n.Ny) : Grid::interval(p.lx, n.N);
}

inline SpaceTimeField sample_coefficient(const Coefficient& c, const GridPtr& g, double T, std::size_t slices)
{
    const double lx = g->x(g->size() - 1);
    const double ly = g->dim() == 2 ? g->y(g->size() - 1) : 0.0;
    const int dim = g->dim();
    return SpaceTimeField::sample(g, T, c.time_dependent() ? slices : 1,
                                  [&](double x, double y, double t) { return c(x, y, t, T, lx, ly, dim); });
}

inline std::shared_ptr<ProblemSpec> make_spec(const ProblemInput& p, const Numerics& n)
{
    auto s = std::make_shared<ProblemSpec>();
    s->p = p.p;
    s->q = p.q;
    s->m = p.m;
    s->n = p.n;
    s->alpha = p.alpha;
    s->T = p.T;
    s->tau = p.tau;
    s->grid = make_grid(p, n);
    s->a = sample_coefficient(p.a, s->grid, p.T, n.S);
    s->b = sample_coefficient(p.b, s->grid, p.T, n.S);
    for (std::size_t i = 0; i < 4; ++i)
        s->K[i] = sample_coefficient(p.K[i], s->grid, p.T, n.S);
    s->epsilon = p.epsilon;
    s->envelope_override = p.envelope;
    return s;
}

inline std::shared_ptr<ProblemSpec> make_spec(const RunConfig& c) { return make_spec(c.problem, c.numerics); }

inline PeriodicConfig periodic_config(const Numerics& n)
{
    PeriodicConfig pc;
    pc.stepper.dt = n.dt;
    pc.stepper.delta_g = n.delta_g;
    pc.stepper.scheme = n.scheme;
    pc.stepper.average = n.average;
    pc.stepper.clamp_negative = n.clamp;
    pc.omega = n.omega;
    pc.tol_outer = n.tol_outer;
    pc.tol_map = n.tol_map;
    pc.max_outer = n.max_outer;
    pc.max_inner = n.max_inner;
    pc.outer_relax = n.outer_relax;
    pc.sigma_ramp = n.sigma_ramp;
    pc.extrapolate = n.extrapolate;
    pc.theta_triv = n.theta_triv;
    return pc;
}

/// Sine-profile initial data with the configured amplitudes.
inline std::pair<Field, Field> initial_data(const GridPtr& g, const Numerics& n)
{
    const double lx = g->x(g->size() - 1);
    const double ly = g->dim() == 2 ? g->y(g->size() - 1) : 1.0;
    auto shape = [&](double x, double y) {
        double s = std::sin(std::numbers::pi * x / lx);
        if (g->dim() == 2)
            s *= std::sin(std::numbers::pi * y / ly);
        return std::max(0.0, s);
    };
    return {Field::dirichlet(g, [&](double x, double y) { return n.u0 * shape(x, y); }),
            Field::dirichlet(g, [&](double x, double y) { return n.v0 * shape(x, y); })};
}

} // namespace perisys
