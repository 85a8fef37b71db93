// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "oracles.hpp"
#include "perisys/perisys.hpp"
#include "process.hpp"

using namespace perisys;
using namespace perisys::testing;
using std::numbers::pi;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail)
{
    std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

void info(const std::string& line)
{
    std::printf("      info: %s\n", line.c_str());
    std::fflush(stdout);
}

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string g(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

RunConfig preset(const std::string& name, std::size_t N = 0, std::size_t S = 0)
{
    json doc{{"preset", name}};
    if (N)
        doc["numerics"] = json{{"N", N}, {"S", S}};
    LoadResult r = parse_config(doc);
    if (!r.ok())
        throw std::runtime_error(name + ": " + r.errors.front());
    return *r.config;
}

/// Sup over coarse nodes and frames of |fine - coarse| relative to the fine sup,
/// for grids and step counts related by a factor of two.
double relative_refinement_diff(const Trajectory& coarse, const Trajectory& fine)
{
    double diff = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < coarse.u.size(); ++j)
        for (std::size_t k = 0; k < coarse.u[j].size(); ++k) {
            diff = std::max({diff, std::abs(coarse.u[j][k] - fine.u[2 * j][2 * k]),
                             std::abs(coarse.v[j][k] - fine.v[2 * j][2 * k])});
        }
    for (std::size_t j = 0; j < fine.u.size(); ++j)
        scale = std::max({scale, fine.u[j].max_abs(), fine.v[j].max_abs()});
    return diff / scale;
}

void criterion1()
{
    Stopwatch sw;
    auto grid = Grid::interval(1.0, 400);
    const EigenPair e = first_eigenpair(grid, 2.0, 1e-12);
    const double secs = sw.seconds();
    double ferr = 0.0;
    for (std::size_t k = 0; k < grid->size(); ++k)
        ferr = std::max(ferr, std::abs(e.e[k] - std::sqrt(2.0) * std::sin(pi * grid->x(k))));
    const double merr = std::abs(e.mu / (pi * pi) - 1.0);
    report(1, merr <= 1e-3 && ferr <= 1e-3 && secs <= 5.0,
           "mu rel err " + g(merr) + ", eigenfunction err " + g(ferr) + ", " + g(secs) + " s");
}

void criterion2()
{
    bool ok = true;
    std::string d;
    for (double r : {1.3, 1.5, 1.8}) {
        const double err = std::abs(first_eigenpair(Grid::interval(1.0, 400), r, 1e-12).mu / shooting_mu(r, 1.0) - 1.0);
        ok = ok && err <= 1e-3;
        d += "r=" + g(r) + " err " + g(err) + "; ";
        double lo = INFINITY, hi = 0.0;
        for (double L : {0.5, 1.0, 2.0}) {
            const double v = first_eigenpair(Grid::interval(L, 400), r, 1e-12).mu * std::pow(L, r);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        ok = ok && hi / lo - 1.0 <= 1e-3;
        d += "scaling spread " + g(hi / lo - 1.0) + "; ";
    }
    report(2, ok, d);
}

void criterion3()
{
    Stopwatch sw;
    bool ok = true;
    std::string d;
    for (double p : {1.2, 1.5, 1.9}) {
        const CheckResult r = picone_check(p, 100000, 7);
        ok = ok && r.status == CheckStatus::Pass;
        d += "p=" + g(p) + " violations " + g(r.value) + "; ";
    }
    const double secs = sw.seconds();
    report(3, ok && secs <= 5.0, d + g(secs) + " s");
}

void criterion4()
{
    bool ok = true;
    double worst = INFINITY;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const MoserCheck c = product_bound_check(1.05 + 0.1 * i, 2.0 + 0.5 * j, 30);
            ok = ok && c.holds;
            worst = std::min(worst, c.worst_log_margin);
        }
    bool exact = true;
    for (double p : {1.125, 1.25, 1.5}) {
        const double m = 1.0 / (p - 1.0);
        for (int k = 0; k <= 30; ++k)
            exact = exact && moser_exponents(p, m, k).alpha_k_over_p == 1.0;
        exact = exact && product_bound_check(p, m, 30).worst_log_margin == 0.0;
    }
    report(4, ok && exact,
           "10x10 lattice p in [1.05,1.95], m in [2,6.5], k <= 30; worst log margin " + g(worst) +
               "; normal line exact: " + (exact ? "yes" : "no"));
}

void criterion5()
{
    const ConstantPair c = coercive_C1_C2(2, 2, 1, 1, 1, 1, 1);
    bool ok = c.C1 == 1.0 && c.C2 == 1.0;
    bool reduction = true;
    for (double k1 : {0.5, 1.0, 3.0})
        for (double A : {1.0, 2.5}) {
            const ConstantPair a = coercive_C1_C2(k1, 2.0, 0.0, 0.0, A, 2.0 * A, 1.5);
            const ConstantPair b = coercive_competitive_C1_C2(k1, 2.0, A, 2.0 * A, 1.5);
            reduction = reduction && a.C1 == b.C1 && a.C2 == b.C2;
        }
    bool raised = false;
    try {
        coercive_C1_C2(1, 1, 1, 1, 1, 1, 1);
    } catch (const Error& e) {
        raised = e.code() == ErrorCode::InfeasibleCoercivity;
    }
    report(5, ok && reduction && raised,
           "(2,2,1,1,1,1,1) -> (" + g(c.C1) + ", " + g(c.C2) + "); reduction exact: " + (reduction ? "yes" : "no") +
               "; InfeasibleCoercivity raised: " + (raised ? "yes" : "no"));
}

void criterion6()
{
    Stopwatch sw;
    const RunConfig c = preset("extinction");
    auto spec = make_spec(c);
    const auto [u0, v0] = initial_data(spec->grid, c.numerics);
    const PeriodicResult r = solve_periodic(spec, periodic_config(c.numerics), u0, v0);
    const double secs = sw.seconds();
    const bool ok = r.converged() && r.classification == Classification::Trivial && r.sup_u < 1e-6 &&
                    r.sup_v < 1e-6 && r.outer_iterations <= 50 && secs <= 60.0;
    report(6, ok,
           std::string(to_string(r.classification)) + ", " + to_string(r.status) + ", sup " +
               g(std::max(r.sup_u, r.sup_v)) + ", " + std::to_string(r.outer_iterations) + " outer, " + g(secs) +
               " s");
}

struct Orbits {
    SolveOutcome fine;
    PeriodicResult coarse;
};

Orbits criterion7()
{
    Stopwatch sw;
    const RunConfig c = preset("coercive-cooperative");
    Orbits o;
    o.fine = solve_with_bounds(c, false);
    const double secs = sw.seconds();
    const PeriodicResult& r = o.fine.result;
    const CheckResult* au = o.fine.compliance.find("apriori_u");
    const CheckResult* av = o.fine.compliance.find("apriori_v");
    const CheckResult* nn = o.fine.compliance.find("nonnegativity");
    const bool ok = r.converged() && r.classification == Classification::Coexistence && au && av && nn &&
                    o.fine.compliance.passed() && nn->value >= 0.0 && secs <= 120.0;
    std::string d = std::string(to_string(r.classification)) + ", selected " + o.fine.bounds.selected;
    if (au && av && nn)
        d += ", |u|^2 = " + g(au->value) + " <= C1 = " + g(au->value + au->margin) + ", |v|^2 = " + g(av->value) +
             " <= C2 = " + g(av->value + av->margin) + ", min value " + g(nn->value);
    report(7, ok, d + ", " + g(secs) + " s");
    return o;
}

void criterion8()
{
    const RunConfig c = preset("coercive-cooperative");
    auto spec = make_spec(c);
    const auto [u0, v0] = initial_data(spec->grid, c.numerics);
    const ContinuationResult cr =
        epsilon_continuation(*spec, periodic_config(c.numerics), {1e-1, 5e-2, 2.5e-2, 1.25e-2}, u0, v0);
    bool ok = cr.failures.empty() && cr.sup_differences.size() == 3;
    std::string d = "sup differences";
    for (std::size_t i = 0; i < cr.sup_differences.size(); ++i) {
        d += " " + g(cr.sup_differences[i]);
        if (i > 0)
            ok = ok && cr.sup_differences[i] <= cr.sup_differences[i - 1];
    }
    for (const auto& f : cr.failures)
        d += "; " + f;
    report(8, ok, d);
}

PeriodicResult solve_preset(const std::string& name, std::size_t N, std::size_t S)
{
    const RunConfig c = preset(name, N, S);
    auto spec = make_spec(c);
    const auto [u0, v0] = initial_data(spec->grid, c.numerics);
    return solve_periodic(spec, periodic_config(c.numerics), u0, v0);
}

void criterion9(Orbits& o)
{
    o.coarse = solve_preset("coercive-cooperative", 100, 1000);
    const double d = relative_refinement_diff(o.coarse.trajectory, o.fine.result.trajectory);
    report(9, o.coarse.converged() && d <= 0.02, "(100,1000) vs (200,2000) relative sup difference " + g(d));
}

void criterion10(const Orbits& o)
{
    auto residual = [](const std::string& name, std::size_t N, std::size_t S, const Trajectory& tr) {
        return weak_residual(tr, make_spec(preset(name, N, S))).value;
    };
    const PeriodicResult fine = solve_preset("coercive-cooperative-seasonal", 200, 2000);
    const PeriodicResult coarse = solve_preset("coercive-cooperative-seasonal", 100, 1000);
    const double rf = residual("coercive-cooperative-seasonal", 200, 2000, fine.trajectory);
    const double rc = residual("coercive-cooperative-seasonal", 100, 1000, coarse.trajectory);
    const double ratio = rc / rf;
    report(10, fine.converged() && coarse.converged() && rf <= 5e-2 && ratio >= 1.3 && ratio <= 3.0,
           "seasonal preset: residual " + g(rf) + " at (200,2000), " + g(rc) + " at (100,1000), ratio " + g(ratio));
    const double sf = residual("coercive-cooperative", 200, 2000, o.fine.result.trajectory);
    const double sc = residual("coercive-cooperative", 100, 1000, o.coarse.trajectory);
    info("steady cooperative orbit: residual " + g(sf) + " at (200,2000), " + g(sc) + " at (100,1000), ratio " +
         g(sc / sf));
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void criterion11()
{
    const auto dir = std::filesystem::temp_directory_path() / "perisys-acceptance";
    std::filesystem::create_directories(dir);
    const std::string cli = PERISYS_CLI;
    const std::string coarse = " --preset coercive-cooperative --N 40 --S 200";
    {
        std::ofstream sweep(dir / "sweep.json");
        sweep << R"({"preset": "coercive-cooperative", "numerics": {"N": 40, "S": 200},
                     "sweep": {"epsilon": [0.1, 0.05]}})";
    }
    struct Case {
        std::string name, args, file;
    };
    const std::vector<Case> cases{
        {"check", "check" + coarse, ""},
        {"eig", "eig --r 1.5 --N 200", ""},
        {"run", "run" + coarse + " --steps 50 --out " + (dir / "run.csv").string(), "run.csv"},
        {"periodic", "periodic" + coarse + " --out-traj " + (dir / "orbit.csv").string(), "orbit.csv"},
        {"sweep", "sweep --config " + (dir / "sweep.json").string(), ""},
        {"verify", "verify" + coarse + " --traj " + (dir / "orbit.csv").string(), ""},
    };
    bool ok = true;
    std::string d;
    for (const auto& c : cases) {
        std::string out[2], file[2];
        int code[2];
        for (int k = 0; k < 2; ++k) {
            const CommandResult r = run_command(cli + " " + c.args);
            out[k] = r.out;
            code[k] = r.exit_code;
            if (!c.file.empty())
                file[k] = slurp(dir / c.file);
        }
        const bool same = out[0] == out[1] && file[0] == file[1] && code[0] == code[1] && !out[0].empty();
        ok = ok && same;
        d += c.name + (same ? " identical" : " DIFFERS") + " (exit " + std::to_string(code[0]) + "); ";
    }
    std::filesystem::remove_all(dir);
    report(11, ok, d);
}

} // namespace

int main()
{
    try {
        criterion1();
        criterion2();
        criterion3();
        criterion4();
        criterion5();
        criterion6();
        Orbits o = criterion7();
        criterion8();
        criterion9(o);
        criterion10(o);
        criterion11();
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
