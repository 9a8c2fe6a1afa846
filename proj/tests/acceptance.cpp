// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "memlab/analysis.hpp"
#include "memlab/cli.hpp"
#include "memlab/error.hpp"
#include "memlab/experiments.hpp"
#include "memlab/greens.hpp"
#include "memlab/problem.hpp"
#include "memlab/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace memlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

Problem flat(ModelParams prm, std::size_t nodes, BoundaryKernel k, double c) {
    Domain1D d(1.0, nodes);
    return Problem{prm, d, std::move(k), InitialData(d, std::vector<double>(nodes, c))};
}

Problem compatible(ModelParams prm, std::size_t nodes, BoundaryKernel k, double level) {
    Domain1D d(1.0, nodes);
    InitialData u0 = make_compatible_initial(level, k, prm, d);
    return Problem{prm, d, std::move(k), std::move(u0)};
}

SolverConfig cfg(double dt, double T, std::size_t stride, double eps = 0.0) {
    SolverConfig c;
    c.dt = dt;
    c.t_final = T;
    c.snapshot_stride = stride;
    c.epsilon = eps;
    return c;
}

// u' = a ∫u - b u, u(0) = 1, a = b = 1
double ode_closed_form(double t) {
    const double s5 = std::sqrt(5.0);
    const double r1 = 0.5 * (-1.0 + s5), r2 = 0.5 * (-1.0 - s5);
    const double B = (r1 + 1.0) / (r1 - r2);
    return (1.0 - B) * std::exp(r1 * t) + B * std::exp(r2 * t);
}

double heat_mode(double x, double t) { return 1.0 + 0.5 * std::exp(-M_PI * M_PI * t) * std::cos(M_PI * x); }

// ---------------------------------------------------------------------------

Outcome kernel_identities() {
    const NeumannHeatKernel G(1.0);
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_mass = 0.0, min_value = 1.0, worst_asym = 0.0;
    for (int n = 0; n < 100; ++n) {
        const double x = unit(rng), y = unit(rng);
        const double t = 1e-5 * std::pow(1e5, unit(rng));
        // Composite Simpson on a grid that resolves the peak width sqrt(2t).
        const double h_target = std::sqrt(2.0 * t) / 40.0;
        int intervals = static_cast<int>(std::ceil(1.0 / h_target));
        intervals = std::max(intervals + intervals % 2, 200);
        const double h = 1.0 / intervals;
        double s = G(x, 0.0, t) + G(x, 1.0, t);
        for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * G(x, i * h, t);
        worst_mass = std::max(worst_mass, std::abs(s * h / 3.0 - 1.0));
        min_value = std::min(min_value, G(x, y, t));
        worst_asym = std::max(worst_asym, std::abs(G(x, y, t) - G(y, x, t)));
    }
    const bool pass = worst_mass <= 1e-8 && min_value >= -1e-12 && worst_asym <= 1e-12;
    return {pass, fmt("max |int G - 1| = %.3g, min G = %.3g, max asymmetry = %.3g over 100 samples",
                      worst_mass, min_value, worst_asym)};
}

Outcome heat_mode_accuracy() {
    const ModelParams prm{0, 0, 1, 1, 1, 1};
    const Domain1D d(1.0, 201);
    std::vector<double> v(d.nodes());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = heat_mode(d.node(i), 0.0);
    const Problem pr{prm, d, BoundaryKernel::zero(), InitialData(d, v)};
    const Trajectory t = solve(pr, cfg(1e-4, 0.1, 1000));
    double err = 0.0;
    for (std::size_t i = 0; i < d.nodes(); ++i) {
        err = std::max(err, std::abs(t.snapshots().back().u[i] - heat_mode(d.node(i), 0.1)));
    }

    ConvergenceCase cs;
    cs.params = prm;
    cs.initial = [](double x) { return heat_mode(x, 0.0); };
    cs.exact = heat_mode;
    const ConvergenceTable table =
        convergence_study(cs, {{51, 4e-4}, {101, 1e-4}, {201, 2.5e-5}}, cfg(1e-4, 0.1, 100000));
    const double o1 = table.rows[1].order.value_or(0.0), o2 = table.rows[2].order.value_or(0.0);
    return {err <= 2e-3 && o1 >= 1.8 && o2 >= 1.8,
            fmt("L-inf error %.3g at N = 201 (<= 2e-3); spatial orders %.3f, %.3f (>= 1.8)", err, o1, o2)};
}

Outcome ode_reduction() {
    const ModelParams prm{1, 1, 0, 1, 1, 1};
    const Problem pr = flat(prm, 21, BoundaryKernel::zero(), 1.0);
    const Trajectory t = solve(pr, cfg(1e-4, 1.0, 10000));
    const double exact = ode_closed_form(1.0);
    double rel = 0.0;
    for (double v : t.snapshots().back().u) rel = std::max(rel, std::abs(v / exact - 1.0));

    PicardConfig pc;
    pc.space_nodes = 51;
    pc.time_nodes = 101;
    pc.t_final = 0.5;
    const PicardResult r = picard_solve(pr, pc);
    double perr = 0.0;
    for (std::size_t j = 0; j < r.solution.t.size(); ++j) {
        for (std::size_t i = 0; i < r.solution.x.size(); ++i) {
            perr = std::max(perr, std::abs(r.solution.values(i, j) - ode_closed_form(r.solution.t[j])));
        }
    }
    return {rel <= 1e-3 && r.converged && perr <= 5e-3,
            fmt("exact u(1) = %.6f, solver relative error %.3g (<= 1e-3); Picard sup error %.3g on [0, 0.5] "
                "(<= 5e-3)",
                exact, rel, perr)};
}

Outcome cross_solver() {
    PicardConfig pc;
    pc.space_nodes = 51;
    pc.time_nodes = 101;
    pc.t_final = 0.5;
    const SolverConfig sc = cfg(1e-4, 0.5, 50);
    const Problem first = compatible({1, 1, 1, 1, 1, 1}, 51, BoundaryKernel::constant(0.1), 1.0);
    const Problem second = compatible({0.5, 1, 1, 1, 2, 1}, 51,
                                      BoundaryKernel::separable(
                                          0.2, [](double y) { return 1.0 + y; }, [](double) { return 1.0; }),
                                      0.8);
    const CrossSolverReport a = cross_solver_check(first, pc, sc);
    const CrossSolverReport b = cross_solver_check(second, pc, sc);
    return {a.picard.converged && b.picard.converged && a.sup_difference <= 5e-3 && b.sup_difference <= 5e-3,
            fmt("sup |Picard - FD| = %.3g (k = 0.1) and %.3g (k = 0.2(1 + y)), limit 5e-3", a.sup_difference,
                b.sup_difference)};
}

Outcome epsilon_monotonicity() {
    const std::vector<Problem> presets{
        flat({1, 1, 1, 1, 1, 1}, 41, BoundaryKernel::zero(), 1.0),
        compatible({1, 1, 1, 1, 1, 1}, 41, BoundaryKernel::constant(0.1), 0.5),
        flat({1, 1, 0.2, 0.2, 0.8, 1}, 41, BoundaryKernel::zero(), 0.0),
    };
    std::size_t violations = 0;
    double worst = -1.0;
    for (const Problem& pr : presets) {
        SweepResult s;
        try {
            s = maximal_solution_sweep(pr, default_ladder(), cfg(1e-4, 0.5, 100), 1e-6);
        } catch (const Error& e) {
            return {false, e.what()};
        }
        // Independent pass over every node and snapshot of adjacent rungs.
        for (std::size_t j = 0; j + 1 < s.runs.size(); ++j) {
            for (std::size_t n = 0; n < s.runs[j].size(); ++n) {
                const auto& hi = s.runs[j].snapshot(n).u;
                const auto& lo = s.runs[j + 1].snapshot(n).u;
                for (std::size_t i = 0; i < hi.size(); ++i) {
                    worst = std::max(worst, lo[i] - hi[i]);
                    if (lo[i] > hi[i] + 1e-6) ++violations;
                }
            }
        }
    }
    return {violations == 0, fmt("%zu violations of u(eps_j+1) <= u(eps_j) + 1e-6 on 3 presets x 5 rungs, "
                                 "max excess %.3g",
                                 violations, worst)};
}

Outcome comparison_principle() {
    std::mt19937_64 rng(7);
    auto draw = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    std::size_t violations = 0, gronwall_fail = 0;
    double worst = -1.0;
    for (int n = 0; n < 20; ++n) {
        const ModelParams prm{draw(0.5, 1.5), draw(0.5, 1.5), draw(1.0, 2.0), draw(1.0, 2.0), draw(1.0, 2.0),
                              draw(1.0, 2.0)};
        const BoundaryKernel k = BoundaryKernel::constant(draw(0.0, 0.2));
        const Problem lower = compatible(prm, 41, k, draw(0.2, 1.0));
        const Problem upper = lower.with_initial(shift_compatible(lower.initial, 0.5, k, prm));
        const SolverConfig c = cfg(1e-4, 0.5, 100);
        const Trajectory a = solve(lower, c);
        const Trajectory b = solve(upper, c);
        if (a.termination() != Termination::completed || b.termination() != Termination::completed) {
            return {false, fmt("draw %d did not complete", n)};
        }
        double M = 0.0;
        for (std::size_t s = 0; s < a.size(); ++s) {
            for (std::size_t i = 0; i < a.snapshot(s).u.size(); ++i) {
                const double lo = a.snapshot(s).u[i], hi = b.snapshot(s).u[i];
                worst = std::max(worst, lo - hi);
                if (lo > hi + 1e-6) ++violations;
                M = std::max({M, lo, hi});
            }
        }
        for (const auto& [u, v] : {std::pair{&a, &b}, std::pair{&b, &a}}) {
            const GronwallReport g =
                gronwall_bound(a.times(), positive_part_series(*u, *v), M, prm, 0.0, 0.5, lower.domain);
            if (!g.holds) ++gronwall_fail;
        }
    }
    return {violations == 0 && gronwall_fail == 0,
            fmt("20 draws: %zu ordering violations at 1e-6 (max lower - upper = %.3g), %zu Gronwall failures",
                violations, worst, gronwall_fail)};
}

Outcome explicit_constructions() {
    const Problem pr = compatible({1, 1, 1, 1, 1, 1}, 41, BoundaryKernel::constant(0.1), 1.0);
    const InitialData u0e = build_epsilon_initial(pr.initial, 0.01, pr.kernel, pr.params);
    const SubSuperSpec super = build_exp_supersolution(pr, u0e);
    const ResidualReport rs = check_candidate(super, pr.with_initial(u0e),
                                              CheckGrid::uniform(101, 0.0, super.window.end, 100), 1e-4, 0.01);

    const ModelParams tp{1, 1, 0.2, 0.2, 0.8, 1};
    const SubSuperSpec sub = build_tgamma_subsolution(tp);
    const Problem zero = flat(tp, 21, BoundaryKernel::zero(), 0.0);
    const ResidualReport rt = check_candidate(sub, zero, CheckGrid::uniform(21, 0.0, 1e-3, 200));
    const double spot = rt.interior(rt.interior.rows() / 2, rt.interior.cols() - 1);
    const double oracle = 4e-9 - std::pow(1e-3, 2.6) / 1.8 + std::pow(1e-3, 3.2);

    const double eps1 = build_constant_subsolution(0.1, 0.5, {1, 1, 0.2, 1, 0.8, 1}).constant.eps1;
    const bool pass = rs.is_supersolution() && rt.is_subsolution() && rt.interior.maxCoeff() <= 0.0 &&
                      sub.tgamma.gamma == 4.0 && std::abs(spot - oracle) <= 0.01 * std::abs(oracle) &&
                      std::abs(eps1 - 0.006786) <= 1e-6;
    return {pass, fmt("exp_super %s on [0, %.3g]; t^4 %s, max interior residual %.3g, spot %.4g (oracle %.4g); "
                      "eps1 = %.7f",
                      std::string(to_string(rs.verdict)).c_str(), super.window.end,
                      std::string(to_string(rt.verdict)).c_str(), rt.interior.maxCoeff(), spot, oracle, eps1)};
}

Outcome positivity() {
    const ModelParams prm{1, 1, 1, 1, 1, 1};
    const Domain1D d(1.0, 101);
    std::vector<double> v(d.nodes());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = std::max(0.0, 1.0 - std::abs(d.node(i) - 0.5) / 0.25);
        v[i] = 0.1 * r * r;
    }
    const Problem pr{prm, d, BoundaryKernel::zero(), InitialData(d, v)};
    const Trajectory t = solve(pr, cfg(1e-4, 0.5, 100));
    double min_value = INFINITY;
    for (const Snapshot& s : t.snapshots()) {
        if (s.t < 0.01 - 1e-12) continue;
        min_value = std::min(min_value, *std::min_element(s.u.begin(), s.u.end()));
    }
    const PositivityReport r = positivity_check(t, prm, pr.initial, 0.01);
    return {r.positive && min_value > 0.0, fmt("min u over t in [0.01, 0.5] = %.4g", min_value)};
}

// Independent RK4 for the spatially constant regularized problem from u = ε.
double ode_eps(const ModelParams& p, double eps, double T, double h) {
    auto f = [&](double u, double I) {
        u = std::max(u, 0.0);
        return std::pair{p.a * std::pow(u, p.p) * I - p.b * std::pow(u, p.m) + p.b * std::pow(eps, p.m),
                         std::pow(u, p.q)};
    };
    double u = eps, I = 0.0;
    const auto n = static_cast<long>(std::llround(T / h));
    for (long k = 0; k < n; ++k) {
        const auto [a1, b1] = f(u, I);
        const auto [a2, b2] = f(u + 0.5 * h * a1, I + 0.5 * h * b1);
        const auto [a3, b3] = f(u + 0.5 * h * a2, I + 0.5 * h * b2);
        const auto [a4, b4] = f(u + h * a3, I + h * b3);
        u = std::max(0.0, u + h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4));
        I += h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4);
    }
    return u;
}

Outcome nonuniqueness_tgamma() {
    const ModelParams prm{1, 1, 0.2, 0.2, 0.8, 1};
    const Problem pr = flat(prm, 21, BoundaryKernel::zero(), 0.0);
    NonuniqConfig c;
    c.solver = cfg(1e-4, 1.0, 10);
    c.ladder = {0.1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    c.branch = NonuniqBranch::tgamma;
    c.dominance_horizon = 1e-3;
    c.ordering_tolerance = 1e-9;
    const NonuniqReport r = nonuniqueness_demo(pr, c);

    const auto& last = r.sweep.limit.u.back();
    const double limit_t1 = *std::max_element(last.begin(), last.end());
    // Deep ODE ladder: successive values settle once ε is far below the limit scale.
    const double o14 = ode_eps(prm, 1e-14, 1.0, 1e-5);
    const double o16 = ode_eps(prm, 1e-16, 1.0, 1e-5);
    const double rel = std::abs(limit_t1 - o16) / o16;
    const bool dominated = r.limit_dominates && r.limit_dominates->ordered;
    const bool pass = r.zero_check.verdict == Verdict::solution && limit_t1 >= 0.01 && rel <= 0.05 &&
                      std::abs(o14 - o16) <= 1e-3 * o16 && dominated;
    return {pass, fmt("zero check %s; u_M(1) = %.6g (%s), ODE limit %.6g, rel diff %.3g (<= 5%%); u_M >= t^4 on "
                      "t <= 1e-3: %s",
                      std::string(to_string(r.zero_check.verdict)).c_str(), limit_t1,
                      std::string(to_string(r.sweep.tag)).c_str(), o16, rel, dominated ? "yes" : "no")};
}

Outcome nonuniqueness_boundary() {
    const ModelParams prm{1, 1, 1, 1, 1, 0.5};
    const Problem pr = flat(prm, 41, BoundaryKernel::constant(1.0), 0.0);
    NonuniqConfig c;
    c.solver = cfg(1e-5, 0.5, 100);
    c.ladder = {0.1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    c.branch = NonuniqBranch::boundary;
    const NonuniqReport r = nonuniqueness_demo(pr, c);
    if (!r.search_failure.empty()) {
        const bool reported = r.least_violating.has_value();
        return {reported, "search failed, least-violating parameters reported: " + r.search_failure};
    }
    const bool verified = r.subsolution_check && r.subsolution_check->is_subsolution();
    const bool dominated = r.limit_dominates && r.limit_dominates->ordered;
    const auto& d = r.subsolution->boundary_layer;
    return {verified && dominated && r.pass,
            fmt("layer subsolution A = %.3g, xi0 = %.3g, T0 = %.3g verified: %s; dominated by u_M (sup %.4g): %s",
                d.A, d.xi0, d.T0, verified ? "yes" : "no", r.sup_limit, dominated ? "yes" : "no")};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
    const fs::path out = fs::temp_directory_path() / "memlab_acceptance_determinism";
    fs::remove_all(out);
    const fs::path cfg_path = fs::path(MEMLAB_SOURCE_DIR) / "configs" / "compare.cfg";
    std::ostringstream sink;
    std::size_t compared = 0, differing = 0;
    for (const char* name : {"a", "b"}) {
        const int code =
            cli::run({"compare", "--problem", cfg_path.string(), "--out", out.string(), "--run-name", name,
                      "--seed", "42", "--set", "solver.t_final=0.1"},
                     sink, sink);
        if (code != 0) return {false, fmt("compare run %s exited %d", name, code)};
    }
    for (const char* name : {"a", "b"}) {
        const int code = cli::run({"greens-check", "--out", out.string(), "--run-name",
                                   std::string("g") + name, "--seed", "42", "--set", "greens.dump=true",
                                   "--set", "greens.samples=20"},
                                  sink, sink);
        if (code != 0) return {false, fmt("greens-check run %s exited %d", name, code)};
    }
    for (const auto& [x, y] : {std::pair{"a", "b"}, std::pair{"ga", "gb"}}) {
        for (const auto& entry : fs::directory_iterator(out / x)) {
            if (entry.path().extension() != ".csv") continue;
            ++compared;
            if (slurp(entry.path()) != slurp(out / y / entry.path().filename())) ++differing;
        }
    }
    return {compared >= 3 && differing == 0,
            fmt("%zu CSV files compared across repeated seeded runs, %zu differ", compared, differing)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"kernel identities", kernel_identities},
        {"exact heat mode", heat_mode_accuracy},
        {"ODE closed form", ode_reduction},
        {"cross-solver agreement", cross_solver},
        {"epsilon monotonicity", epsilon_monotonicity},
        {"comparison principle", comparison_principle},
        {"explicit constructions", explicit_constructions},
        {"positivity", positivity},
        {"nonuniqueness, t^gamma branch", nonuniqueness_tgamma},
        {"nonuniqueness, boundary branch", nonuniqueness_boundary},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t n = 0; n < criteria.size(); ++n) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[n].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %zu (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", n + 1, criteria[n].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
