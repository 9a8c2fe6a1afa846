#include "memlab/cli.hpp"
#include "memlab/analysis.hpp"
#include "memlab/config.hpp"
#include "memlab/error.hpp"
#include "memlab/experiments.hpp"
#include "memlab/greens.hpp"
#include "memlab/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <ctime>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

namespace memlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
    const RunOptions& options;
    RunSettings settings;
    fs::path dir;
    json artifacts = json::array();
    std::ostream& out;

    fs::path artifact(const std::string& name, const std::string& kind) {
        artifacts.push_back({{"file", name}, {"kind", kind}});
        return dir / name;
    }
};

struct Result {
    bool pass = false;
    json report;
};

std::string utc_stamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
    return buf;
}

fs::path make_run_directory(const RunOptions& o) {
    const std::string base = o.run_name.empty() ? o.subcommand + "-" + utc_stamp() : o.run_name;
    fs::path dir = o.out / base;
    for (int n = 2; fs::exists(dir); ++n) dir = o.out / (base + "-" + std::to_string(n));
    fs::create_directories(dir);
    return dir;
}

int exit_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParameter:
        case ErrorCode::InvalidDomain:
        case ErrorCode::InvalidKernel:
        case ErrorCode::InvalidInitialData:
        case ErrorCode::InvalidConfig:
        case ErrorCode::NoCompatibleData:
        case ErrorCode::RegimeMismatch:
        case ErrorCode::HypothesisUnmet:
            return exit_usage;
        case ErrorCode::MonotonicityViolated:
        case ErrorCode::SearchFailed:
            return exit_verdict_fail;
        default:
            return exit_runtime;
    }
}

std::string rung_name(std::size_t j) { return "rung_" + std::to_string(j) + ".csv"; }

// --- subcommands -----------------------------------------------------------

Result do_solve(Context& ctx) {
    const Problem problem = build_problem(ctx.settings);
    const Trajectory traj = solve(problem, ctx.settings.solver);
    write_trajectory_csv(traj, ctx.artifact("trajectory.csv", "trajectory"));
    Result r;
    r.report = trajectory_summary(traj);
    r.report["compatibility"] =
        to_json(compatibility_residual(problem.initial, problem.kernel, problem.params, 1e-8));
    r.pass = traj.termination() == Termination::completed;
    ctx.out << "solve: " << to_string(traj.termination()) << " at t = " << traj.final_time()
            << " | mass " << r.report["mass_initial"].get<double>() << " -> "
            << r.report["mass_final"].get<double>() << ", clamp events "
            << traj.counters().clamp_events << '\n';
    return r;
}

Result do_picard(Context& ctx) {
    const Problem problem = build_problem(ctx.settings);
    Result r;
    PicardResult result;
    std::optional<double> cross;
    if (ctx.settings.picard_cross_check) {
        CrossSolverReport c = cross_solver_check(problem, ctx.settings.picard, ctx.settings.solver);
        result = std::move(c.picard);
        cross = c.sup_difference;
    } else {
        result = picard_solve(problem, ctx.settings.picard);
    }
    write_field_csv(result.solution, ctx.artifact("picard.csv", "field"));
    r.report = to_json(result);
    r.report["params"] = params_json(problem.params);
    if (cross) r.report["cross_solver_sup_difference"] = *cross;
    r.pass = result.converged;
    ctx.out << "picard: " << (result.converged ? "converged" : "not converged") << " after "
            << result.iterations << " iterations | last increment "
            << (result.increments.empty() ? 0.0 : result.increments.back());
    if (cross) ctx.out << ", sup |picard - fd| = " << *cross;
    ctx.out << '\n';
    return r;
}

Result do_verify(Context& ctx) {
    const RunSettings& s = ctx.settings;
    const VerifySettings& v = s.verify;
    const Problem problem = build_problem(s);
    SubSuperSpec spec;
    std::optional<CheckGrid> grid;
    double epsilon = 0.0;
    Verdict wanted = Verdict::subsolution;
    std::optional<Trajectory> traj;

    if (v.candidate == "solution") {
        traj.emplace(solve(problem, s.solver));
        traj->require_completed();
        spec = numeric_spec(*traj, "solution");
        grid = CheckGrid::of(*traj);
        epsilon = s.solver.epsilon;
        wanted = Verdict::solution;
    } else if (v.candidate == "zero") {
        spec.kind = SpecKind::numeric;
        spec.name = "zero";
        spec.window = {0.0, s.solver.t_final};
        spec.eval = [](double, double) { return 0.0; };
        spec.memory_prefix = [](double) { return 0.0; };
        spec.initial_reference = [&problem](double x) {
            const std::vector<double> xs = problem.domain.node_positions();
            const auto u0 = problem.initial.values();
            const auto it = std::lower_bound(xs.begin(), xs.end(), x - 1e-12);
            return u0[static_cast<std::size_t>(std::min<std::ptrdiff_t>(
                it - xs.begin(), static_cast<std::ptrdiff_t>(xs.size()) - 1))];
        };
        wanted = Verdict::solution;
    } else if (v.candidate == "exp_super") {
        epsilon = s.solver.epsilon;
        const InitialData u0 = epsilon > 0.0
                                   ? build_epsilon_initial(problem.initial, epsilon, problem.kernel,
                                                           problem.params)
                                   : problem.initial;
        spec = build_exp_supersolution(problem, u0, {.T_guess = s.solver.t_final});
        wanted = Verdict::supersolution;
    } else if (v.candidate == "tgamma") {
        spec = build_tgamma_subsolution(problem.params);
    } else if (v.candidate == "constant") {
        spec = build_constant_subsolution(v.eps, v.tau, problem.params, v.T0);
        epsilon = v.eps;
    } else {
        try {
            spec = build_boundary_layer_subsolution(problem.params, problem.kernel, problem.domain,
                                                    0.0, s.solver.t_final, {.tolerance = v.tolerance});
        } catch (const SearchFailed& e) {
            const BoundaryLayerData& b = e.best();
            Result r;
            r.report = {{"schema_version", kSchemaVersion},
                        {"candidate", "boundary_layer"},
                        {"search_failure", e.what()},
                        {"least_violating",
                         {{"A", b.A}, {"xi0", b.xi0}, {"T0", b.T0}, {"violation", e.violation()}}}};
            ctx.out << "boundary_layer: search failed | least violating A = " << b.A
                    << ", xi0 = " << b.xi0 << ", T0 = " << b.T0 << '\n';
            return r;
        }
    }
    if (!grid) {
        double end = spec.window.end;
        if (v.t_end > 0.0) end = std::min(end, v.t_end);
        if (!std::isfinite(end)) end = spec.window.start + s.solver.t_final;
        std::size_t nodes = v.nodes;
        if (spec.kind == SpecKind::boundary_layer_sub) nodes = std::max(nodes, problem.domain.nodes());
        grid = CheckGrid::uniform(nodes, spec.window.start, end, v.intervals);
    }
    const ResidualReport report = check_candidate(spec, problem, *grid, v.tolerance, epsilon);
    Result r;
    r.report = to_json(report);
    r.report["spec"] = to_json(spec);
    r.report["expected"] = std::string(to_string(wanted));
    r.report["epsilon"] = epsilon;
    if (traj) write_trajectory_csv(*traj, ctx.artifact("trajectory.csv", "trajectory"));
    switch (wanted) {
        case Verdict::solution: r.pass = report.verdict == Verdict::solution; break;
        case Verdict::supersolution: r.pass = report.is_supersolution(); break;
        default: r.pass = report.is_subsolution(); break;
    }
    ctx.out << verdict_line(report) << '\n';
    return r;
}

Result do_compare(Context& ctx) {
    const RunSettings& s = ctx.settings;
    const Problem problem = build_problem(s);
    const InitialData raised =
        shift_compatible(problem.initial, s.compare.upper_shift, problem.kernel, problem.params);
    const Trajectory base = solve(problem, s.solver);
    const Trajectory shifted = solve(problem.with_initial(raised), s.solver);
    base.require_completed();
    shifted.require_completed();
    const Trajectory& lower = s.compare.swap ? shifted : base;
    const Trajectory& upper = s.compare.swap ? base : shifted;
    write_trajectory_csv(lower, ctx.artifact("lower.csv", "trajectory"));
    write_trajectory_csv(upper, ctx.artifact("upper.csv", "trajectory"));

    const OrderingReport order =
        compare(numeric_spec(lower, "lower"), numeric_spec(upper, "upper"), problem.params,
                problem.domain.node_positions(), lower.times(), s.compare.tolerance);
    double M = 0.0;
    for (const Trajectory* t : {&lower, &upper}) {
        for (const Snapshot& snap : t->snapshots()) {
            M = std::max(M, *std::max_element(snap.u.begin(), snap.u.end()));
        }
    }
    const GronwallReport envelope =
        gronwall_bound(lower.times(), positive_part_series(lower, upper), M, problem.params,
                       s.solver.epsilon, s.solver.t_final, problem.domain);
    Result r;
    r.report = to_json(order);
    r.report["swapped"] = s.compare.swap;
    r.report["upper_shift"] = s.compare.upper_shift;
    r.report["gronwall"] = to_json(envelope);
    r.pass = order.ordered && envelope.holds;
    ctx.out << verdict_line(order) << " | gronwall " << (envelope.holds ? "holds" : "violated")
            << '\n';
    return r;
}

void write_sweep(Context& ctx, const SweepResult& sweep) {
    for (std::size_t j = 0; j < sweep.runs.size(); ++j) {
        write_trajectory_csv(sweep.runs[j], ctx.artifact(rung_name(j), "trajectory"));
    }
    if (!sweep.limit.u.empty()) write_grid_csv(sweep.limit, ctx.artifact("limit.csv", "limit"));
}

Result do_sweep(Context& ctx) {
    const RunSettings& s = ctx.settings;
    const Problem problem = build_problem(s);
    const SweepResult sweep = maximal_solution_sweep(problem, s.ladder, s.solver, s.sweep_tolerance);
    write_sweep(ctx, sweep);
    Result r;
    r.report = to_json(sweep);
    r.pass = sweep.monotonicity.monotone;
    ctx.out << "sweep: " << (sweep.monotonicity.monotone ? "monotone" : "not monotone")
            << " over " << sweep.ladder.size() << " rungs | limit (" << to_string(sweep.tag)
            << ") sup " << sweep.limit.max() << ", last-rung agreement " << sweep.agreement
            << '\n';
    return r;
}

Result do_nonuniq(Context& ctx) {
    const RunSettings& s = ctx.settings;
    const Problem problem = build_problem(s);
    NonuniqConfig cfg;
    cfg.ladder = s.ladder;
    cfg.solver = s.solver;
    cfg.branch = s.nonuniq.branch == "tgamma"     ? NonuniqBranch::tgamma
                 : s.nonuniq.branch == "boundary" ? NonuniqBranch::boundary
                                                  : NonuniqBranch::automatic;
    cfg.check_tolerance = s.nonuniq.check_tolerance;
    cfg.ordering_tolerance = s.nonuniq.ordering_tolerance;
    cfg.dominance_horizon = s.nonuniq.dominance_horizon;
    const NonuniqReport rep = nonuniqueness_demo(problem, cfg);
    write_sweep(ctx, rep.sweep);
    Result r;
    r.report = to_json(rep);
    r.pass = rep.pass;
    ctx.out << "nonuniq: zero solution " << to_string(rep.zero_check.verdict)
            << ", maximal solution sup " << rep.sup_limit;
    if (rep.limit_dominates) ctx.out << ", dominance " << verdict_line(*rep.limit_dominates);
    if (!rep.search_failure.empty()) ctx.out << ", subsolution search failed";
    ctx.out << " | " << (rep.pass ? "PASS" : "FAIL") << '\n';
    return r;
}

Result do_unique(Context& ctx) {
    const RunSettings& s = ctx.settings;
    const Problem problem = build_problem(s);
    const UniquenessReport rep = uniqueness_probe(problem, s.delta0, s.solver);
    Result r;
    r.report = to_json(rep);
    r.pass = rep.within_envelope && (s.delta0 > 0.0 || rep.identical);
    ctx.out << "unique: divergence " << rep.divergence << " (ratio " << rep.ratio << ")"
            << ", envelope " << (rep.within_envelope ? "holds" : "violated")
            << (s.delta0 == 0.0 ? (rep.identical ? ", identical" : ", NOT identical") : "")
            << '\n';
    return r;
}

Result do_converge(Context& ctx) {
    const RunSettings& s = ctx.settings;
    validate_numeric_params(s.params);
    ConvergenceCase study;
    study.params = s.params;
    study.length = s.length;
    study.kernel = build_kernel(s);
    study.initial = initial_profile(s);
    if (s.converge.exact == "heat_mode") {
        if (s.params.a != 0.0 || s.params.b != 0.0 || !study.kernel.is_zero() ||
            s.initial.type != "cosine") {
            throw Error(ErrorCode::InvalidConfig,
                        "heat_mode needs a = b = 0, a zero kernel and a cosine initial profile");
        }
        const double level = s.initial.level, amp = s.initial.amplitude, L = s.length;
        study.exact = [=](double x, double t) {
            const double k = std::numbers::pi / L;
            return level + amp * std::cos(k * x) * std::exp(-k * k * t);
        };
    } else if (s.converge.exact == "ode") {
        if (!study.kernel.is_zero() || s.initial.type != "constant") {
            throw Error(ErrorCode::InvalidConfig, "ode reference needs a zero kernel and constant data");
        }
        const auto ode = std::make_shared<OdeTrajectory>(
            ode_oracle(s.params, s.initial.level, s.solver.epsilon, s.solver.t_final));
        study.exact = [ode](double, double t) { return ode->value_at(t); };
    }
    const ConvergenceTable table = convergence_study(study, s.converge.levels, s.solver);
    Result r;
    r.report = to_json(table);
    r.pass = std::all_of(table.rows.begin(), table.rows.end(),
                         [](const ConvergenceRow& row) { return std::isfinite(row.error); });
    ctx.out << "converge (" << table.reference << "):";
    for (const ConvergenceRow& row : table.rows) {
        ctx.out << " [N=" << row.level.nodes << " dt=" << row.level.dt << " err=" << row.error
                << " order=";
        if (row.order) ctx.out << *row.order; else ctx.out << "undefined";
        ctx.out << "]";
    }
    ctx.out << '\n';
    return r;
}

Result do_greens_check(Context& ctx) {
    const RunSettings& s = ctx.settings;
    const NeumannHeatKernel kernel(s.length);
    const KernelIdentityReport rep = check_kernel_identities(kernel, s.greens.samples,
                                                             ctx.options.seed, s.greens.t_min,
                                                             s.greens.t_max);
    if (s.greens.dump) {
        std::vector<double> xs(s.greens.dump_nodes);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            xs[i] = s.length * static_cast<double>(i) / static_cast<double>(xs.size() - 1);
        }
        write_kernel_csv(kernel, xs, s.greens.dump_times, ctx.artifact("kernel.csv", "kernel"));
    }
    json samples = json::array();
    for (const KernelIdentitySample& k : rep.samples) {
        samples.push_back({{"x", k.x}, {"y", k.y}, {"t", k.t}, {"mass_error", k.mass_error},
                           {"G", k.value}, {"asymmetry", k.asymmetry}});
    }
    Result r;
    r.report = {{"schema_version", kSchemaVersion},
                {"length", s.length},
                {"t_switch", kernel.t_switch()},
                {"seed", rep.seed},
                {"max_mass_error", rep.max_mass_error},
                {"min_value", rep.min_value},
                {"max_asymmetry", rep.max_asymmetry},
                {"pass", rep.pass},
                {"samples", samples}};
    r.pass = rep.pass;
    ctx.out << "greens-check: " << (rep.pass ? "pass" : "FAIL") << " | " << rep.samples.size()
            << " samples, max |mass - 1| = " << rep.max_mass_error << ", min G = " << rep.min_value
            << ", max asymmetry = " << rep.max_asymmetry << '\n';
    return r;
}

using Handler = Result (*)(Context&);

struct Command {
    std::string name;
    Handler handler;
    std::string summary;
};

const std::vector<Command>& handlers() {
    static const std::vector<Command> table = {
        {"solve", do_solve, "march the finite-difference solver and write the trajectory"},
        {"picard", do_picard, "Green's-function Picard iteration, optionally cross-checked"},
        {"verify", do_verify, "residual check of a named sub/supersolution construction"},
        {"compare", do_compare, "pointwise ordering of a subsolution and a supersolution"},
        {"sweep", do_sweep, "epsilon ladder of regularized solutions and the limit"},
        {"nonuniq", do_nonuniq, "zero solution next to the nonzero maximal solution"},
        {"unique", do_unique, "perturbation growth against the Gronwall envelope"},
        {"converge", do_converge, "observed orders under grid refinement"},
        {"greens-check", do_greens_check, "seeded identity checks of the heat kernel"},
    };
    return table;
}

const std::string& summary_of(const std::string& name) {
    for (const Command& c : handlers()) {
        if (c.name == name) return c.summary;
    }
    static const std::string none;
    return none;
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const Command& c : handlers()) out.push_back(c.name);
        return out;
    }();
    return names;
}

RunOutcome execute(const RunOptions& options, std::ostream& out, std::ostream& err) {
    RunOutcome outcome;
    Handler handler = nullptr;
    for (const Command& c : handlers()) {
        if (c.name == options.subcommand) handler = c.handler;
    }
    if (!handler) {
        err << "unknown subcommand '" << options.subcommand << "'\n";
        outcome.exit_code = exit_usage;
        return outcome;
    }

    try {
        outcome.directory = make_run_directory(options);
    } catch (const std::exception& e) {
        err << "cannot create run directory: " << e.what() << '\n';
        outcome.exit_code = exit_usage;
        return outcome;
    }

    Context ctx{options, RunSettings{}, outcome.directory, json::array(), out};
    if (!options.problem.empty()) {
        fs::copy_file(options.problem, ctx.artifact("problem.cfg", "config"),
                      fs::copy_options::overwrite_existing);
    }
    json report;
    try {
        // Config errors are reported like any other failure of the run.
        ctx.settings = options.problem.empty() ? settings_from_string("", options.overrides)
                                               : load_settings(options.problem, options.overrides);
        Result r = handler(ctx);
        report = std::move(r.report);
        outcome.exit_code = r.pass ? exit_ok : exit_verdict_fail;
    } catch (const Error& e) {
        outcome.exit_code = exit_for(e.code());
        report = {{"schema_version", kSchemaVersion},
                  {"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
        err << options.subcommand << ": " << e.what() << '\n';
    } catch (const std::exception& e) {
        outcome.exit_code = exit_runtime;
        report = {{"schema_version", kSchemaVersion},
                  {"error", {{"code", "Internal"}, {"message", e.what()}}}};
        err << options.subcommand << ": " << e.what() << '\n';
    }
    report["subcommand"] = options.subcommand;
    report["exit_code"] = outcome.exit_code;
    write_json(report, ctx.artifact("report.json", "report"));
    write_json({{"schema_version", kSchemaVersion},
                {"subcommand", options.subcommand},
                {"problem", options.problem.string()},
                {"overrides", options.overrides},
                {"seed", options.seed},
                {"exit_code", outcome.exit_code},
                {"artifacts", ctx.artifacts}},
               outcome.directory / "index.json");
    out << "run directory: " << outcome.directory.string() << '\n';
    return outcome;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical lab for a parabolic equation with memory and a nonlocal boundary flux",
                 "memlab"};
    app.require_subcommand(1);
    RunOptions options;
    std::string problem, outdir = "runs";
    for (const std::string& name : subcommands()) {
        CLI::App* sub = app.add_subcommand(name, summary_of(name));
        sub->add_option("--problem", problem, "INI problem/config file")->check(CLI::ExistingFile);
        sub->add_option("--out", outdir, "parent directory for run directories")
            ->capture_default_str();
        sub->add_option("--set", options.overrides, "override section.key=value (repeatable)")
            ->allow_extra_args(false);
        sub->add_option("--seed", options.seed, "seed for randomized checks")->capture_default_str();
        sub->add_option("--run-name", options.run_name, "run directory name");
    }
    std::vector<const char*> argv{"memlab"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }
    options.subcommand = app.get_subcommands().front()->get_name();
    options.problem = problem;
    options.out = outdir;
    return execute(options, out, err).exit_code;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace memlab::cli
