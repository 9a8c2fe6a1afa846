#include "memlab/experiments.hpp"
#include "memlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace memlab {

namespace {

double pos_pow(double base, double exponent) { return nonneg_pow(std::max(base, 0.0), exponent); }

}  // namespace

// ---------------------------------------------------------------------------
// ODE oracle

double OdeTrajectory::value_at(double tq) const { return interpolate_linear(t, u, tq); }

OdeTrajectory ode_oracle(const ModelParams& prm, double c0, double epsilon, double T, double dt) {
    validate_numeric_params(prm);
    if (!(c0 >= 0.0)) throw Error(ErrorCode::InvalidInitialData, "c0 must be >= 0");
    if (!(T > 0.0) || !(dt > 0.0)) throw Error(ErrorCode::InvalidParameter, "T and dt must be > 0");
    const double step = std::min(dt, 1e-5);
    const auto n = static_cast<std::size_t>(std::ceil(T / step - 1e-9));
    const double h = T / static_cast<double>(n);
    const double source = epsilon > 0.0 ? prm.b * std::pow(epsilon, prm.m) : 0.0;

    OdeTrajectory out;
    out.t.resize(n + 1);
    out.u.resize(n + 1);
    out.memory.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) out.t[k] = k == n ? T : h * static_cast<double>(k);

    if (prm.p == 0.0 && prm.q == 1.0 && prm.m == 1.0) {
        // u'' + b u' - a u = 0 with u(0) = c0, u'(0) = b(ε - c0).
        out.closed_form = true;
        const double disc = std::sqrt(prm.b * prm.b + 4.0 * prm.a);
        const double r1 = 0.5 * (-prm.b + disc);
        const double r2 = 0.5 * (-prm.b - disc);
        const double du0 = prm.b * (epsilon - c0);
        const double A = (du0 - r2 * c0) / (r1 - r2);
        const double B = c0 - A;
        for (std::size_t k = 0; k <= n; ++k) {
            const double e1 = A * std::exp(r1 * out.t[k]);
            const double e2 = B * std::exp(r2 * out.t[k]);
            out.u[k] = e1 + e2;
            out.memory[k] = (r1 * e1 + r2 * e2 + prm.b * out.u[k] - source) / prm.a;
        }
        return out;
    }

    auto rhs = [&](double u, double mem) {
        return std::pair{prm.a * pos_pow(u, prm.p) * mem - prm.b * pos_pow(u, prm.m) + source,
                         pos_pow(u, prm.q)};
    };
    double u = c0;
    double mem = 0.0;
    out.u[0] = u;
    out.memory[0] = mem;
    for (std::size_t k = 1; k <= n; ++k) {
        const auto [k1u, k1m] = rhs(u, mem);
        const auto [k2u, k2m] = rhs(u + 0.5 * h * k1u, mem + 0.5 * h * k1m);
        const auto [k3u, k3m] = rhs(u + 0.5 * h * k2u, mem + 0.5 * h * k2m);
        const auto [k4u, k4m] = rhs(u + h * k3u, mem + h * k3m);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        mem += h / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
        if (u < 0.0) {
            std::ostringstream os;
            os << "oracle value " << u << " at t = " << out.t[k];
            throw Error(ErrorCode::NegativeState, os.str());
        }
        out.u[k] = u;
        out.memory[k] = mem;
    }
    return out;
}

// ---------------------------------------------------------------------------
// ε → 0 limits

std::string_view to_string(LimitTag tag) {
    return tag == LimitTag::last_iterate ? "last-iterate" : "richardson";
}

std::vector<double> default_ladder() { return {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}; }

namespace {

double sup_difference(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// r with (ea^r - eb^r) / (eb^r - ec^r) = target, searched on [0.05, 4].
double fit_rate(double ea, double eb, double ec, double target) {
    auto g = [&](double r) {
        return (std::pow(ea, r) - std::pow(eb, r)) / (std::pow(eb, r) - std::pow(ec, r));
    };
    double lo = 0.05;
    double hi = 4.0;
    if (target <= g(lo)) return lo;
    if (target >= g(hi)) return hi;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

LimitEstimate epsilon_limit(const std::vector<double>& ladder,
                            const std::vector<std::vector<double>>& rungs, double agreement_tol) {
    if (ladder.empty() || ladder.size() != rungs.size()) {
        throw Error(ErrorCode::InvalidParameter, "ladder and rungs must be nonempty and aligned");
    }
    LimitEstimate est;
    const std::size_t n = rungs.size();
    est.values = rungs.back();
    if (n == 1) return est;
    est.agreement = sup_difference(rungs[n - 1], rungs[n - 2]);
    if (est.agreement < agreement_tol) return est;

    est.tag = LimitTag::richardson;
    est.rate = 1.0;
    if (n >= 3) {
        const double d_prev = sup_difference(rungs[n - 2], rungs[n - 3]);
        est.rate = fit_rate(ladder[n - 3], ladder[n - 2], ladder[n - 1], d_prev / est.agreement);
    }
    const double e_last = std::pow(ladder[n - 1], est.rate);
    const double e_prev = std::pow(ladder[n - 2], est.rate);
    const double factor = e_last / (e_prev - e_last);
    for (std::size_t i = 0; i < est.values.size(); ++i) {
        const double v = rungs[n - 1][i] - (rungs[n - 2][i] - rungs[n - 1][i]) * factor;
        // The rungs decrease to a nonnegative limit: 0 <= u_M <= last rung.
        est.values[i] = std::clamp(v, 0.0, rungs[n - 1][i]);
    }
    return est;
}

SweepResult maximal_solution_sweep(const Problem& problem, const std::vector<double>& ladder,
                                   const SolverConfig& cfg, double tolerance) {
    if (ladder.empty()) throw Error(ErrorCode::InvalidParameter, "empty epsilon ladder");
    for (std::size_t j = 0; j < ladder.size(); ++j) {
        if (!(ladder[j] > 0.0 && ladder[j] < 1.0) || (j > 0 && !(ladder[j] < ladder[j - 1]))) {
            throw Error(ErrorCode::InvalidParameter,
                        "epsilon ladder must be strictly decreasing inside (0, 1)");
        }
    }

    SweepResult result;
    result.ladder = ladder;
    for (double eps : ladder) {
        SolverConfig rung = cfg;
        rung.epsilon = eps;
        const InitialData u0 =
            build_epsilon_initial(problem.initial, eps, problem.kernel, problem.params);
        Trajectory traj = solve(problem.with_initial(u0), rung);
        traj.require_completed();
        result.runs.push_back(std::move(traj));
    }

    MonotonicityReport& mono = result.monotonicity;
    mono.max_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < result.runs.size(); ++j) {
        const Trajectory& big = result.runs[j];
        const Trajectory& small = result.runs[j + 1];
        const std::size_t shared = std::min(big.size(), small.size());
        for (std::size_t s = 0; s < shared; ++s) {
            const auto& ub = big.snapshot(s).u;
            const auto& us = small.snapshot(s).u;
            for (std::size_t i = 0; i < ub.size(); ++i) {
                const double excess = us[i] - ub[i];
                if (excess > mono.max_excess) {
                    mono.max_excess = excess;
                    mono.epsilon_small = ladder[j + 1];
                    mono.epsilon_large = ladder[j];
                    mono.x = big.domain().node(i);
                    mono.t = big.snapshot(s).t;
                }
            }
        }
    }
    if (result.runs.size() == 1) mono.max_excess = 0.0;
    mono.monotone = mono.max_excess <= tolerance;
    if (!mono.monotone) {
        std::ostringstream os;
        os << "u(eps=" << mono.epsilon_small << ") exceeds u(eps=" << mono.epsilon_large
           << ") by " << mono.max_excess << " at x = " << mono.x << ", t = " << mono.t;
        throw Error(ErrorCode::MonotonicityViolated, os.str());
    }

    const Trajectory& last = result.runs.back();
    const std::size_t nodes = last.domain().nodes();
    std::vector<std::vector<double>> flat;
    for (const Trajectory& run : result.runs) {
        std::vector<double> v;
        v.reserve(last.size() * nodes);
        for (std::size_t s = 0; s < last.size(); ++s) {
            v.insert(v.end(), run.snapshot(s).u.begin(), run.snapshot(s).u.end());
        }
        flat.push_back(std::move(v));
    }
    const LimitEstimate est = epsilon_limit(ladder, flat);
    result.tag = est.tag;
    result.rate = est.rate;
    result.agreement = est.agreement;
    result.limit.x = last.domain().node_positions();
    result.limit.t = last.times();
    for (std::size_t s = 0; s < last.size(); ++s) {
        const auto first = est.values.begin() + static_cast<std::ptrdiff_t>(s * nodes);
        result.limit.u.emplace_back(first, first + static_cast<std::ptrdiff_t>(nodes));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Nonuniqueness

NonuniqReport nonuniqueness_demo(const Problem& problem, const NonuniqConfig& cfg) {
    const RegimeSummary regime = validate_params(problem.params);
    NonuniqReport report;
    switch (cfg.branch) {
        case NonuniqBranch::automatic:
            if (regime.nonuniq_tgamma) {
                report.branch = NonuniqBranch::tgamma;
            } else if (regime.nonuniq_boundary) {
                report.branch = NonuniqBranch::boundary;
            } else {
                throw Error(ErrorCode::RegimeMismatch,
                            "neither p + q < min(1, m) nor l < min(1, m) holds");
            }
            break;
        case NonuniqBranch::tgamma:
            if (!regime.nonuniq_tgamma) {
                throw Error(ErrorCode::RegimeMismatch, "p + q < min(1, m) does not hold");
            }
            report.branch = NonuniqBranch::tgamma;
            break;
        case NonuniqBranch::boundary:
            if (!regime.nonuniq_boundary) {
                throw Error(ErrorCode::RegimeMismatch, "l < min(1, m) does not hold");
            }
            report.branch = NonuniqBranch::boundary;
            break;
    }

    const Problem zero_problem = problem.with_initial(
        InitialData(problem.domain, std::vector<double>(problem.domain.nodes(), 0.0)));

    // (i) the zero solution
    SolverConfig plain = cfg.solver;
    plain.epsilon = 0.0;
    const Trajectory zero = solve(zero_problem, plain);
    zero.require_completed();
    report.zero_check = check_candidate(numeric_spec(zero, "zero"), zero_problem,
                                        CheckGrid::of(zero), cfg.check_tolerance);

    // (ii) the maximal solution
    report.sweep = maximal_solution_sweep(zero_problem, cfg.ladder, cfg.solver);
    report.sup_limit = report.sweep.limit.max();
    report.distinct = report.sup_limit >= 10.0 * cfg.check_tolerance;

    // (iii) an explicit subsolution below it
    try {
        SubSuperSpec sub;
        CheckGrid grid;
        if (report.branch == NonuniqBranch::tgamma) {
            sub = build_tgamma_subsolution(problem.params);
            if (cfg.dominance_horizon > 0.0) {
                sub.window.end = std::min(sub.window.end, cfg.dominance_horizon);
            }
            grid = CheckGrid::uniform(problem.domain.nodes(), sub.window.start, sub.window.end, 40);
        } else {
            BoundaryLayerOptions opts;
            opts.tolerance = cfg.check_tolerance;
            sub = build_boundary_layer_subsolution(problem.params, problem.kernel, problem.domain,
                                                   0.0, cfg.solver.t_final, opts);
            const BoundaryLayerData& d = sub.boundary_layer;
            const double h_max = d.xi0 * std::sqrt(d.T0 / 40.0) / 6.0;
            const auto nodes = static_cast<std::size_t>(
                std::clamp(std::ceil(problem.domain.length() / h_max) + 1.0, 101.0,
                           static_cast<double>(opts.max_nodes)));
            grid = CheckGrid::uniform(nodes, d.t0, d.t0 + d.T0, 40);
            if (cfg.dominance_horizon > 0.0) {
                sub.window.end = std::min(sub.window.end, cfg.dominance_horizon);
            }
        }
        report.subsolution_check =
            check_candidate(sub, zero_problem, grid, cfg.check_tolerance);

        const SubSuperSpec limit = numeric_spec(report.sweep.limit, "u_M",
                                                [](double) { return 0.0; });
        const SubSuperSpec rung = numeric_spec(report.sweep.runs.back(), "u_eps");
        report.limit_dominates =
            ordering(sub, limit, report.sweep.limit.x, report.sweep.limit.t,
                     cfg.ordering_tolerance);
        report.rung_dominates = compare(sub, rung, problem.params, report.sweep.limit.x,
                                        report.sweep.limit.t, cfg.ordering_tolerance);
        report.subsolution = std::move(sub);
    } catch (const SearchFailed& e) {
        report.search_failure = e.what();
        report.least_violating = e.best();
    }

    const bool zero_ok = report.zero_check.verdict == Verdict::solution;
    if (report.subsolution) {
        report.pass = zero_ok && report.distinct && report.subsolution_check->is_subsolution() &&
                      report.limit_dominates->ordered && report.rung_dominates->ordered;
    } else {
        report.pass = zero_ok && report.distinct;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Uniqueness

UniquenessReport uniqueness_probe(const Problem& problem, double delta0, const SolverConfig& cfg) {
    const RegimeSummary regime = validate_params(problem.params);
    if (!(delta0 >= 0.0)) throw Error(ErrorCode::InvalidParameter, "delta0 must be >= 0");
    const ModelParams& prm = problem.params;
    const auto& v = problem.initial.values();
    const double u0_min = *std::min_element(v.begin(), v.end());

    UniquenessReport report;
    if (regime.uniqueness_regime) {
        report.hypothesis = "min(p, q, l) >= 1, nonnegative data";
    } else if (u0_min > 0.0 && prm.m >= 1.0) {
        report.hypothesis = "positive data, m >= 1";
    } else if (u0_min > 0.0 && prm.p < prm.m && prm.m < 1.0) {
        report.hypothesis = "positive data, p < m < 1";
    } else {
        throw Error(ErrorCode::HypothesisUnmet,
                    "uniqueness needs min(p, q, l) >= 1, or positive data with m >= 1 or p < m < 1");
    }
    report.delta0 = delta0;

    const Trajectory base = solve(problem, cfg);
    base.require_completed();
    const InitialData shifted =
        delta0 == 0.0 ? problem.initial
                      : shift_compatible(problem.initial, delta0, problem.kernel, prm);
    const Trajectory perturbed = solve(problem.with_initial(shifted), cfg);
    perturbed.require_completed();

    report.identical = base.size() == perturbed.size();
    for (std::size_t s = 0; s < base.size() && report.identical; ++s) {
        report.identical = base.snapshot(s).u == perturbed.snapshot(s).u;
    }
    for (const Trajectory* traj : {&base, &perturbed}) {
        for (const Snapshot& s : traj->snapshots()) {
            report.M = std::max(report.M, *std::max_element(s.u.begin(), s.u.end()));
        }
    }
    const auto& ub = base.snapshots().back().u;
    const auto& up = perturbed.snapshots().back().u;
    for (std::size_t i = 0; i < ub.size(); ++i) {
        report.divergence = std::max(report.divergence, std::abs(up[i] - ub[i]));
    }
    report.ratio = delta0 > 0.0 ? report.divergence / delta0 : 0.0;
    report.t = base.times();
    report.l1_divergence = positive_part_series(perturbed, base);
    report.envelope = gronwall_bound(report.t, report.l1_divergence, report.M, prm, 0.0,
                                     cfg.t_final, problem.domain);
    report.within_envelope = report.envelope.holds;
    return report;
}

// ---------------------------------------------------------------------------
// Convergence

ConvergenceTable convergence_study(const ConvergenceCase& study,
                                   const std::vector<ConvergenceLevel>& levels,
                                   const SolverConfig& cfg) {
    if (levels.size() < 2) throw Error(ErrorCode::InvalidParameter, "need at least two levels");
    if (!study.initial) throw Error(ErrorCode::InvalidParameter, "initial profile missing");

    std::vector<Trajectory> runs;
    for (const ConvergenceLevel& level : levels) {
        const Domain1D domain(study.length, level.nodes);
        std::vector<double> u0(level.nodes);
        for (std::size_t i = 0; i < level.nodes; ++i) u0[i] = study.initial(domain.node(i));
        SolverConfig c = cfg;
        c.dt = level.dt;
        Trajectory traj = solve(Problem{study.params, domain, study.kernel,
                                        InitialData(domain, std::move(u0))},
                                c);
        traj.require_completed();
        runs.push_back(std::move(traj));
    }

    ConvergenceTable table;
    table.reference = study.exact ? "exact" : "finest";
    const std::size_t count = study.exact ? levels.size() : levels.size() - 1;
    const double t_end = cfg.t_final;
    for (std::size_t k = 0; k < count; ++k) {
        const Trajectory& run = runs[k];
        const auto& u = run.snapshots().back().u;
        double err = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double x = run.domain().node(i);
            const double ref = study.exact ? study.exact(x, t_end) : runs.back().value_at(x, t_end);
            err = std::max(err, std::abs(u[i] - ref));
        }
        ConvergenceRow row{levels[k], err, std::nullopt};
        if (k > 0) {
            const ConvergenceRow& prev = table.rows.back();
            double ratio = 1.0;
            if (prev.level.nodes != row.level.nodes) {
                ratio = static_cast<double>(row.level.nodes - 1) /
                        static_cast<double>(prev.level.nodes - 1);
            } else if (prev.level.dt != row.level.dt) {
                ratio = prev.level.dt / row.level.dt;
            }
            if (ratio != 1.0 && prev.error > 0.0 && row.error > 0.0) {
                row.order = std::log(prev.error / row.error) / std::log(ratio);
            }
        }
        table.rows.push_back(row);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Cross-solver agreement

CrossSolverReport cross_solver_check(const Problem& problem, const PicardConfig& picard,
                                     const SolverConfig& solver) {
    CrossSolverReport report;
    report.picard = picard_solve(problem, picard);
    SolverConfig cfg = solver;
    cfg.t_final = picard.t_final;
    cfg.epsilon = picard.epsilon;
    const Trajectory traj = solve(problem, cfg);
    traj.require_completed();
    const SpaceTimeField& field = report.picard.solution;
    for (std::size_t j = 0; j < field.t.size(); ++j) {
        for (std::size_t i = 0; i < field.x.size(); ++i) {
            const double diff = std::abs(field.values(static_cast<Eigen::Index>(i),
                                                      static_cast<Eigen::Index>(j)) -
                                         traj.value_at(field.x[i], field.t[j]));
            report.sup_difference = std::max(report.sup_difference, diff);
        }
    }
    return report;
}

}  // namespace memlab
