#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"

#include "perisys/perisys.hpp"

using namespace perisys;

namespace {

constexpr int exit_ok = 0, exit_solver = 1, exit_config = 2;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string config_path, preset;
    std::optional<unsigned long long> seed;
    std::optional<double> eps;
    std::optional<std::size_t> N, S;

    void add(CLI::App* app)
    {
        app->add_option("--config", config_path, "JSON run configuration");
        app->add_option("--preset", preset, "bundled preset name");
        app->add_option("--seed", seed, "random seed");
        app->add_option("--eps", eps, "regularization epsilon");
        app->add_option("--N", N, "spatial intervals per axis");
        app->add_option("--S", S, "time steps per period");
    }

    RunConfig load(bool required = true) const
    {
        LoadResult lr;
        if (!config_path.empty()) {
            lr = load_config(config_path);
        } else if (!preset.empty()) {
            lr = load_preset(preset);
        } else if (required) {
            throw ConfigError("one of --config or --preset is required");
        } else {
            lr = parse_config(json{{"problem", json::object()}});
        }
        if (!lr.ok()) {
            std::string msg;
            for (const auto& e : lr.errors)
                msg += e + "\n";
            throw ConfigError(msg);
        }
        RunConfig c = *lr.config;
        if (seed)
            c.numerics.seed = *seed;
        if (eps)
            c.problem.epsilon = *eps;
        if (N)
            c.numerics.N = *N;
        if (S)
            c.numerics.S = *S;
        if (N && c.problem.ly > 0.0)
            c.numerics.Ny = *N;
        c.numerics.dt = c.problem.T / static_cast<double>(c.numerics.S);
        return c;
    }
};

void emit(const json& j, const std::string& path)
{
    const std::string text = to_json_text(j);
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path);
    out << text;
}

json config_header(const RunConfig& c)
{
    return json{{"preset", c.preset.empty() ? json(nullptr) : json(c.preset)},
                {"seed", c.numerics.seed},
                {"N", c.numerics.N},
                {"S", c.numerics.S},
                {"dt", c.numerics.dt},
                {"epsilon", c.problem.epsilon}};
}

json outcome_json(const RunConfig& c, const SolveOutcome& o)
{
    json j;
    j["config"] = config_header(c);
    j["result"] = to_json(o.result);
    j["bounds"] = to_json(o.bounds);
    j["compliance"] = o.compliance.checks.empty() ? json(nullptr) : to_json(o.compliance);
    j["warnings"] = o.warnings;
    return j;
}

std::size_t pool_size(std::optional<std::size_t> flag)
{
    std::size_t n = flag.value_or(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("PERISYS_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0)
            n = std::min(n, static_cast<std::size_t>(cap));
    }
    return std::max<std::size_t>(n, 1);
}

void apply_parameter(RunConfig& c, const std::string& key, double v)
{
    auto& p = c.problem;
    if (key == "p") p.p = v;
    else if (key == "q") p.q = v;
    else if (key == "m") p.m = v;
    else if (key == "n") p.n = v;
    else if (key == "alpha") p.alpha = v;
    else if (key == "epsilon") p.epsilon = v;
    else if (key == "T") p.T = v, c.numerics.dt = v / static_cast<double>(c.numerics.S);
    else if (key == "a") p.a.c = v;
    else if (key == "b") p.b.c = v;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Periodic solutions of a delayed nonlocal doubly nonlinear parabolic system"};
    app.require_subcommand(1);

    Common common;
    std::string out_path, theorem;
    auto* check = app.add_subcommand("check", "bounds report for a configuration");
    common.add(check);
    check->add_option("--theorem", theorem, "restrict to one theorem id");
    check->add_option("--out", out_path, "write the report here instead of stdout");

    std::optional<double> eig_r, eig_length;
    std::string eig_csv;
    auto* eig = app.add_subcommand("eig", "first eigenpair of the Dirichlet r-Laplacian");
    common.add(eig);
    eig->add_option("--r", eig_r, "exponent r (default: the problem's p)");
    eig->add_option("--length", eig_length, "interval length when no config is given");
    eig->add_option("--csv", eig_csv, "write x,e to this CSV file");
    eig->add_option("--out", out_path, "write the JSON here instead of stdout");

    std::optional<std::size_t> run_steps;
    std::optional<double> run_dt;
    std::string run_scheme, run_csv;
    auto* run = app.add_subcommand("run", "transient simulation from the configured initial data");
    common.add(run);
    run->add_option("--steps", run_steps, "number of steps (default: one period)");
    run->add_option("--dt", run_dt, "time step");
    run->add_option("--scheme", run_scheme, "imex or explicit")->check(CLI::IsMember({"imex", "explicit"}));
    run->add_option("--out", run_csv, "trajectory CSV path");

    std::optional<double> tol_outer, tol_map;
    bool sigma_ramp = false;
    std::string out_traj, out_report;
    auto* periodic = app.add_subcommand("periodic", "T-periodic solve with bounds and compliance");
    common.add(periodic);
    periodic->add_option("--tol-outer", tol_outer, "outer tolerance");
    periodic->add_option("--tol-map", tol_map, "period-map tolerance");
    periodic->add_flag("--sigma-ramp", sigma_ramp, "homotopy ramp on the first outer iterations");
    periodic->add_option("--out-traj", out_traj, "trajectory CSV path");
    periodic->add_option("--out-report", out_report, "report JSON path (default: stdout)");

    std::optional<std::size_t> threads;
    auto* sweep = app.add_subcommand("sweep", "epsilon continuation or parameter grid");
    common.add(sweep);
    sweep->add_option("--threads", threads, "worker pool size (capped by PERISYS_THREADS)");
    sweep->add_option("--out", out_path, "write the JSON here instead of stdout");

    std::string traj_path;
    auto* verify = app.add_subcommand("verify", "verification checks on a stored trajectory");
    common.add(verify);
    verify->add_option("--traj", traj_path, "trajectory CSV")->required();
    verify->add_option("--report", out_path, "VerificationReport JSON path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_config;
    }

    try {
        if (check->parsed()) {
            const RunConfig c = common.load();
            auto spec = make_spec(c);
            const auto [ep, eq] = eigenpairs(*spec, c.numerics);
            BoundsOptions bo = bounds_options(c.numerics);
            if (!theorem.empty()) {
                const auto& ids = theorem_ids();
                if (std::find(ids.begin(), ids.end(), theorem) == ids.end())
                    throw ConfigError("unknown theorem id " + theorem);
                bo.only = theorem;
            }
            json j;
            j["config"] = config_header(c);
            j["bounds"] = to_json(theorem_verdicts(*spec, ep, eq, bo));
            emit(j, out_path);
            return exit_ok;
        }
        if (eig->parsed()) {
            const bool have = !common.config_path.empty() || !common.preset.empty();
            RunConfig c = common.load(false);
            if (!have && eig_length)
                c.problem.lx = *eig_length;
            if (!have && !common.N)
                c.numerics.N = 400;
            const GridPtr g = make_grid(c.problem, c.numerics);
            EigenOptions eo;
            eo.tol = c.numerics.eigen_tol;
            const EigenPair e = first_eigenpair(g, eig_r.value_or(c.problem.p), eo);
            if (!eig_csv.empty()) {
                std::ofstream os(eig_csv);
                if (!os)
                    throw Error(ErrorCode::IoError, "cannot write " + eig_csv);
                os << (g->dim() == 1 ? "x,e\n" : "x,y,e\n");
                for (std::size_t k = 0; k < g->size(); ++k) {
                    os << detail::fmt17(g->x(k)) << ',';
                    if (g->dim() == 2)
                        os << detail::fmt17(g->y(k)) << ',';
                    os << detail::fmt17(e.e[k]) << '\n';
                }
            }
            emit(to_json(e), out_path);
            return e.converged ? exit_ok : exit_solver;
        }
        if (run->parsed()) {
            RunConfig c = common.load();
            auto spec = make_spec(c);
            StepperConfig sc = periodic_config(c.numerics).stepper;
            if (run_dt)
                sc.dt = *run_dt;
            if (!run_scheme.empty())
                sc.scheme = run_scheme == "explicit" ? Scheme::Explicit : Scheme::ImexLagged;
            const std::size_t steps = run_steps.value_or(c.numerics.S);
            const auto [u0, v0] = initial_data(spec->grid, c.numerics);
            DelayEvaluator ev = DelayEvaluator::transient(spec, u0, v0, sc.dt);
            StepStats stats;
            const Trajectory tr = simulate(u0, v0, steps, sc, ev, *spec, &stats);
            if (!run_csv.empty())
                write_trajectory_csv(run_csv, tr);
            json j;
            j["config"] = config_header(c);
            j["steps"] = steps;
            j["dt"] = sc.dt;
            j["scheme"] = to_string(sc.scheme);
            j["sup_u"] = sup_norm(tr, Component::U);
            j["sup_v"] = sup_norm(tr, Component::V);
            j["clamp_mass"] = stats.clamp_mass;
            j["min_before_clamp"] = stats.min_before_clamp;
            emit(j, "");
            return exit_ok;
        }
        if (periodic->parsed()) {
            RunConfig c = common.load();
            if (tol_outer)
                c.numerics.tol_outer = *tol_outer;
            if (tol_map)
                c.numerics.tol_map = *tol_map;
            const SolveOutcome o = solve_with_bounds(c, sigma_ramp);
            const std::string traj = !out_traj.empty() ? out_traj : c.outputs.trajectory;
            if (!traj.empty())
                write_trajectory_csv(traj, o.result.trajectory);
            for (const auto& w : o.warnings)
                std::cerr << "warning: " << w << "\n";
            emit(outcome_json(c, o), !out_report.empty() ? out_report : c.outputs.report);
            return o.result.converged() ? exit_ok : exit_solver;
        }
        if (sweep->parsed()) {
            const RunConfig c = common.load();
            json j;
            j["config"] = config_header(c);
            bool ok = true;
            if (!c.sweep.grid.empty()) {
                std::vector<RunConfig> jobs{c};
                for (const auto& [key, values] : c.sweep.grid) {
                    std::vector<RunConfig> next;
                    for (const auto& base : jobs)
                        for (double v : values) {
                            RunConfig r = base;
                            apply_parameter(r, key, v);
                            next.push_back(std::move(r));
                        }
                    jobs = std::move(next);
                }
                std::vector<json> results(jobs.size());
                std::atomic<std::size_t> next{0};
                std::atomic<bool> all_ok{true};
                auto worker = [&] {
                    for (std::size_t i; (i = next++) < jobs.size();) {
                        json r;
                        r["parameters"] = json::object();
                        for (const auto& kv : c.sweep.grid)
                            r["parameters"][kv.first] = nullptr;
                        const auto& pr = jobs[i].problem;
                        for (const auto& kv : c.sweep.grid) {
                            const std::string& k = kv.first;
                            const double v = k == "p" ? pr.p : k == "q" ? pr.q : k == "m" ? pr.m : k == "n" ? pr.n
                                           : k == "alpha" ? pr.alpha : k == "epsilon" ? pr.epsilon : k == "T" ? pr.T
                                           : k == "a" ? pr.a.c : pr.b.c;
                            r["parameters"][k] = v;
                        }
                        try {
                            const SolveOutcome o = solve_with_bounds(jobs[i], false);
                            r["result"] = to_json(o.result);
                            r["selected"] = o.bounds.selected.empty() ? json(nullptr) : json(o.bounds.selected);
                            if (!o.result.converged())
                                all_ok = false;
                        } catch (const Error& e) {
                            r["error"] = e.what();
                            all_ok = false;
                        }
                        results[i] = std::move(r);
                    }
                };
                const std::size_t n = std::min(pool_size(threads), jobs.size());
                std::vector<std::thread> pool;
                for (std::size_t t = 1; t < n; ++t)
                    pool.emplace_back(worker);
                worker();
                for (auto& t : pool)
                    t.join();
                j["mode"] = "grid";
                j["results"] = results;
                ok = all_ok;
            } else {
                if (c.sweep.epsilon.empty())
                    throw ConfigError("/sweep: needs an epsilon schedule or a parameter grid");
                const ProblemSpec base = *make_spec(c);
                const auto [u0, v0] = initial_data(base.grid, c.numerics);
                const ContinuationResult cr =
                    epsilon_continuation(base, periodic_config(c.numerics), c.sweep.epsilon, u0, v0);
                json rs = json::array();
                for (const auto& r : cr.results)
                    rs.push_back(to_json(r));
                j["mode"] = "continuation";
                j["results"] = rs;
                j["sup_differences"] = cr.sup_differences;
                j["failures"] = cr.failures;
                ok = cr.failures.empty();
            }
            emit(j, out_path);
            return ok ? exit_ok : exit_solver;
        }
        if (verify->parsed()) {
            RunConfig c = common.load();
            const Trajectory tr = read_trajectory_csv(traj_path);
            c.numerics.N = tr.grid->nx();
            if (tr.grid->dim() == 2)
                c.numerics.Ny = tr.grid->ny();
            c.numerics.S = tr.steps();
            c.numerics.dt = tr.dt;
            c.problem.T = tr.dt * static_cast<double>(tr.steps());
            auto spec = make_spec(c);
            const unsigned long long seed = c.numerics.seed;

            VerificationReport rep;
            rep.seed = seed;
            WeakResidualOptions wo;
            wo.seed = seed;
            rep.checks.push_back(weak_residual(tr, spec, wo));

            const auto [ep, eq] = eigenpairs(*spec, c.numerics);
            BoundsOptions bo = bounds_options(c.numerics);
            if (!bo.R_proxy)
                bo.R_proxy = 2.0 * std::max({sup_norm(tr, Component::U), sup_norm(tr, Component::V), 1e-12});
            const BoundsReport br = theorem_verdicts(*spec, ep, eq, bo);
            const TheoremResult* sel = br.selected.empty() ? nullptr : br.find(br.selected);
            if (sel && sel->constants) {
                AprioriBounds ab{sel->constants->C1, sel->constants->C2, sel->norm_exponent, sel->id};
                for (auto& r : apriori_compliance(tr, ab).checks)
                    rep.checks.push_back(std::move(r));
            }
            HolderOptions ho;
            ho.seed = seed;
            CheckResult hu = holder_spotcheck(tr, Component::U, spec->p, ho);
            hu.name = "holder_u";
            rep.checks.push_back(hu);
            CheckResult hv = holder_spotcheck(tr, Component::V, spec->q, ho);
            hv.name = "holder_v";
            rep.checks.push_back(hv);
            for (auto [name, comp, m, p] : {std::tuple{"grad_power_u", Component::U, spec->m, spec->p},
                                            std::tuple{"grad_power_v", Component::V, spec->n, spec->q}}) {
                CheckResult g;
                g.name = name;
                g.status = CheckStatus::Info;
                g.value = gradient_power_norm(tr, comp, m, p);
                g.samples = tr.steps();
                rep.checks.push_back(g);
            }
            rep.checks.push_back(picone_check(spec->p, 10000, seed));
            emit(to_json(rep), out_path);
            return rep.passed() ? exit_ok : exit_solver;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::IoError ? exit_config : exit_solver;
    }
    return exit_ok;
}
