#include "memlab/analysis.hpp"
#include "memlab/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace memlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bracketing index and weight for q in a strictly increasing grid (clamped).
std::pair<std::size_t, double> bracket(const std::vector<double>& grid, double q) {
    if (grid.size() == 1 || q <= grid.front()) return {0, 0.0};
    if (q >= grid.back()) return {grid.size() - 2, 1.0};
    const auto it = std::upper_bound(grid.begin(), grid.end(), q);
    const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
    const std::size_t lo = hi - 1;
    return {lo, (q - grid[lo]) / (grid[hi] - grid[lo])};
}

double pos_pow(double base, double exponent) { return nonneg_pow(std::max(base, 0.0), exponent); }

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

void track(FieldStats& s, double value, double x, double t, bool first) {
    if (first || value < s.min) {
        s.min = value;
        s.x_at_min = x;
        s.t_at_min = t;
    }
    if (first || value > s.max) {
        s.max = value;
        s.x_at_max = x;
        s.t_at_max = t;
    }
}

}  // namespace

double GridFunction::at(double xq, double tq) const {
    const auto [j, wt] = bracket(t, tq);
    const auto [i, wx] = bracket(x, xq);
    auto row = [&](std::size_t jj) {
        const std::vector<double>& r = u[jj];
        if (x.size() == 1) return r[0];
        return (1.0 - wx) * r[i] + wx * r[i + 1];
    };
    if (t.size() == 1) return row(0);
    return (1.0 - wt) * row(j) + wt * row(j + 1);
}

double GridFunction::min() const {
    double v = kInf;
    for (const auto& r : u) v = std::min(v, *std::min_element(r.begin(), r.end()));
    return v;
}

double GridFunction::max() const {
    double v = -kInf;
    for (const auto& r : u) v = std::max(v, *std::max_element(r.begin(), r.end()));
    return v;
}

GridFunction to_grid_function(const Trajectory& traj) {
    GridFunction g;
    g.x = traj.domain().node_positions();
    g.t = traj.times();
    g.u.reserve(traj.size());
    for (const Snapshot& s : traj.snapshots()) g.u.push_back(s.u);
    return g;
}

std::string_view to_string(SpecKind kind) {
    switch (kind) {
        case SpecKind::exp_super: return "exp_super";
        case SpecKind::tgamma_sub: return "tgamma_sub";
        case SpecKind::boundary_layer_sub: return "boundary_layer_sub";
        case SpecKind::constant_sub: return "constant_sub";
        case SpecKind::numeric: return "numeric";
    }
    return "unknown";
}

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::solution: return "solution";
        case Verdict::supersolution: return "supersolution";
        case Verdict::subsolution: return "subsolution";
        case Verdict::neither: return "neither";
    }
    return "unknown";
}

bool TimeWindow::contains(double t) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(end));
    return t >= start - slack && t <= end + slack;
}

SubSuperSpec numeric_spec(GridFunction field, std::string name,
                          std::function<double(double)> initial_reference) {
    SubSuperSpec spec;
    spec.kind = SpecKind::numeric;
    spec.name = std::move(name);
    auto shared = std::make_shared<const GridFunction>(std::move(field));
    spec.field = shared;
    spec.window = {shared->t.front(), shared->t.back()};
    spec.eval = [shared](double x, double t) { return shared->at(x, t); };
    spec.memory_prefix = [](double) { return 0.0; };
    spec.initial_reference = std::move(initial_reference);
    return spec;
}

SubSuperSpec numeric_spec(const Trajectory& traj, std::string name) {
    const std::vector<double> nodes = traj.domain().node_positions();
    const std::vector<double> u0(traj.problem().initial.values().begin(),
                                 traj.problem().initial.values().end());
    return numeric_spec(to_grid_function(traj), std::move(name), [nodes, u0](double x) {
        return interpolate_linear(nodes, u0, x);
    });
}

CheckGrid CheckGrid::uniform(std::size_t nodes, double t_start, double t_end,
                             std::size_t intervals) {
    CheckGrid g;
    g.nodes = nodes;
    g.times = linspace(t_start, t_end, intervals + 1);
    return g;
}

CheckGrid CheckGrid::of(const Trajectory& traj) {
    CheckGrid g;
    g.nodes = traj.domain().nodes();
    g.times = traj.times();
    return g;
}

bool ResidualReport::is_supersolution() const {
    return verdict == Verdict::supersolution || verdict == Verdict::solution;
}

bool ResidualReport::is_subsolution() const {
    return verdict == Verdict::subsolution || verdict == Verdict::solution;
}

double ResidualReport::worst_violation(bool super_side) const {
    double worst = -kInf;
    for (const FieldStats* s : {&interior_stats, &boundary_stats, &initial_stats}) {
        const double excess = super_side ? -s->min : s->max;
        const double scale = s->magnitude > 0.0 ? s->magnitude : 1.0;
        worst = std::max(worst, excess / scale);
    }
    return worst;
}

ResidualReport check_candidate(const SubSuperSpec& spec, const Problem& problem,
                               const CheckGrid& grid, double tolerance, double epsilon) {
    if (grid.nodes < 3) throw Error(ErrorCode::InvalidParameter, "check grid needs >= 3 nodes");
    std::vector<double> times;
    times.push_back(spec.window.start);
    for (double t : grid.times) {
        if (!spec.window.contains(t) || same_time(t, spec.window.start)) continue;
        if (t < spec.window.start) continue;
        times.push_back(std::min(t, spec.window.end));
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(), same_time), times.end());
    if (times.size() < 2) {
        std::ostringstream os;
        os << "no check time inside [" << spec.window.start << ", " << spec.window.end << "]";
        throw Error(ErrorCode::WindowEmpty, os.str());
    }

    const ModelParams& prm = problem.params;
    const double length = problem.domain.length();
    const std::size_t n = grid.nodes;
    const std::size_t nt = times.size();
    const std::vector<double> x = linspace(0.0, length, n);
    const double h = length / static_cast<double>(n - 1);
    const double regularizer = epsilon > 0.0 ? prm.b * std::pow(epsilon, prm.m) : 0.0;

    std::vector<std::vector<double>> u(nt, std::vector<double>(n));
    for (std::size_t j = 0; j < nt; ++j) {
        for (std::size_t i = 0; i < n; ++i) u[j][i] = spec.eval(x[i], times[j]);
    }

    // Memory from the candidate: prefix plus cumulative trapezoid.
    std::vector<std::vector<double>> memory(nt, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        memory[0][i] = spec.memory_prefix ? spec.memory_prefix(x[i]) : 0.0;
    }
    for (std::size_t j = 1; j < nt; ++j) {
        const double dt = times[j] - times[j - 1];
        for (std::size_t i = 0; i < n; ++i) {
            memory[j][i] = memory[j - 1][i] +
                           0.5 * dt * (pos_pow(u[j - 1][i], prm.q) + pos_pow(u[j][i], prm.q));
        }
    }

    auto time_derivative = [&](std::size_t j, std::size_t i) {
        if (nt == 2) return (u[1][i] - u[0][i]) / (times[1] - times[0]);
        if (j + 1 < nt) {
            const double h1 = times[j] - times[j - 1];
            const double h2 = times[j + 1] - times[j];
            return -h2 / (h1 * (h1 + h2)) * u[j - 1][i] + (h2 - h1) / (h1 * h2) * u[j][i] +
                   h1 / (h2 * (h1 + h2)) * u[j + 1][i];
        }
        const double h1 = times[j] - times[j - 1];
        const double h2 = times[j - 1] - times[j - 2];
        return (2.0 * h1 + h2) / (h1 * (h1 + h2)) * u[j][i] -
               (h1 + h2) / (h1 * h2) * u[j - 1][i] + h1 / (h2 * (h1 + h2)) * u[j - 2][i];
    };

    ResidualReport report;
    report.candidate = spec.name;
    report.x = x;
    report.t = times;
    report.relative_tolerance = tolerance;
    report.interior.resize(static_cast<Eigen::Index>(n - 2), static_cast<Eigen::Index>(nt - 1));
    report.boundary.resize(2, static_cast<Eigen::Index>(nt - 1));

    std::vector<double> weights(n);
    std::vector<double> integrand(n);
    for (std::size_t j = 1; j < nt; ++j) {
        const auto col = static_cast<Eigen::Index>(j - 1);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double ut = time_derivative(j, i);
            const double uxx = (u[j][i - 1] - 2.0 * u[j][i] + u[j][i + 1]) / (h * h);
            const double source = prm.a * pos_pow(u[j][i], prm.p) * memory[j][i];
            const double absorption = prm.b * pos_pow(u[j][i], prm.m);
            const double r = ut - uxx - source + absorption - regularizer;
            report.interior(static_cast<Eigen::Index>(i - 1), col) = r;
            const bool first = j == 1 && i == 1;
            track(report.interior_stats, r, x[i], times[j], first);
            report.interior_stats.magnitude =
                std::max(report.interior_stats.magnitude,
                         std::abs(ut) + std::abs(uxx) + source + absorption + regularizer);
            report.interior_stats.roundoff = std::max(
                report.interior_stats.roundoff,
                (std::abs(u[j][i - 1]) + 2.0 * std::abs(u[j][i]) + std::abs(u[j][i + 1])) / (h * h) +
                    4.0 * std::abs(u[j][i]) / (times[j] - times[j - 1]));
        }
        for (int b = 0; b < 2; ++b) {
            const Boundary side = b == 0 ? Boundary::left : Boundary::right;
            problem.kernel.sample(side, times[j], x, weights);
            for (std::size_t i = 0; i < n; ++i) integrand[i] = weights[i] * pos_pow(u[j][i], prm.l);
            const double flux = trapezoid(integrand, h);
            const double dnu = normal_derivative(u[j], h, side);
            const double r = dnu - flux;
            report.boundary(b, col) = r;
            track(report.boundary_stats, r, b == 0 ? 0.0 : length, times[j], j == 1 && b == 0);
            report.boundary_stats.magnitude =
                std::max(report.boundary_stats.magnitude, std::abs(dnu) + std::abs(flux));
            const std::size_t e = b == 0 ? 0 : n - 1;
            const std::size_t e1 = b == 0 ? 1 : n - 2;
            const std::size_t e2 = b == 0 ? 2 : n - 3;
            report.boundary_stats.roundoff = std::max(
                report.boundary_stats.roundoff,
                (3.0 * std::abs(u[j][e]) + 4.0 * std::abs(u[j][e1]) + std::abs(u[j][e2])) / (2.0 * h));
        }
    }

    const std::vector<double> nodes = problem.domain.node_positions();
    report.initial.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ref = spec.initial_reference
                               ? spec.initial_reference(x[i])
                               : interpolate_linear(nodes, problem.initial.values(), x[i]);
        report.initial[i] = u[0][i] - ref;
        track(report.initial_stats, report.initial[i], x[i], times[0], i == 0);
        report.initial_stats.magnitude =
            std::max(report.initial_stats.magnitude, std::max(std::abs(u[0][i]), std::abs(ref)));
    }

    for (FieldStats* s : {&report.interior_stats, &report.boundary_stats, &report.initial_stats}) {
        s->tolerance = tolerance * s->magnitude +
                       64.0 * std::numeric_limits<double>::epsilon() * s->roundoff;
    }
    auto super_ok = [](const FieldStats& s) { return s.min >= -s.tolerance; };
    auto sub_ok = [](const FieldStats& s) { return s.max <= s.tolerance; };
    const bool super = super_ok(report.interior_stats) && super_ok(report.boundary_stats) &&
                       super_ok(report.initial_stats);
    const bool sub = sub_ok(report.interior_stats) && sub_ok(report.boundary_stats) &&
                     sub_ok(report.initial_stats);
    report.verdict = super && sub ? Verdict::solution
                     : super      ? Verdict::supersolution
                     : sub        ? Verdict::subsolution
                                  : Verdict::neither;
    return report;
}

// ---------------------------------------------------------------------------
// Exponential supersolution

double exp_super_alpha(const ModelParams& prm, double C, double s, double length) {
    const double e = prm.p + prm.q - 1.0;
    const double psi_sup = e >= 0.0 ? C * (1.0 + 0.25 * s) : C;  // where ψ^{p+q-1} peaks
    const double curvature = 2.0 * s / (length * length);        // ψ''/ψ is largest at the centre
    return std::max(1.0 / prm.q, prm.a * std::numbers::e * std::pow(psi_sup, e) + curvature);
}

SubSuperSpec build_exp_supersolution(const Problem& problem, const InitialData& u0_eps,
                                     const ExpSuperOptions& options) {
    const ModelParams& prm = problem.params;
    validate_params(prm);
    const double length = problem.domain.length();
    const double C = options.C > 0.0 ? options.C : std::max(u0_eps.sup(), 1.0);
    if (C < u0_eps.sup()) {
        throw Error(ErrorCode::InvalidParameter, "C must dominate sup u0");
    }
    const double K = problem.kernel.sup(length, options.T_guess);
    const double boost_l = std::max(1.0, std::exp(prm.l - 1.0));

    using Gauss = boost::math::quadrature::gauss<double, 30>;
    auto psi_at = [C, length](double s, double x) {
        const double r = x / length - 0.5;
        return C * (1.0 + s * r * r);
    };
    // Outward slope minus the flux bound, with a 1% safety factor.
    auto gap = [&](double s) {
        const double integral = Gauss::integrate(
            [&](double x) { return std::pow(psi_at(s, x), prm.l); }, 0.0, length);
        return C * s / length - 1.01 * K * boost_l * integral;
    };

    constexpr double kMaxS = 1e6;
    double s = std::max(options.s_min, 0.0);
    if (gap(s) < 0.0) {
        double lo = s;
        double hi = std::max(s, 1e-3);
        while (gap(hi) < 0.0) {
            lo = hi;
            hi *= 2.0;
            if (hi > kMaxS) {
                std::ostringstream os;
                os << "no curvature s <= " << kMaxS << " satisfies the boundary inequality (K = "
                   << K << ", l = " << prm.l << ")";
                throw Error(ErrorCode::NoSupersolution, os.str());
            }
        }
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (gap(mid) < 0.0 ? lo : hi) = mid;
        }
        s = hi;
    }

    const double alpha = exp_super_alpha(prm, C, s, length);
    const double T_valid =
        std::min({1.0 / ((prm.p + prm.q) * alpha), 1.0 / alpha, options.T_guess});

    SubSuperSpec spec;
    spec.kind = SpecKind::exp_super;
    spec.name = "exp_super";
    spec.window = {0.0, T_valid};
    spec.eval = [psi_at, s, alpha](double x, double t) { return std::exp(alpha * t) * psi_at(s, x); };
    spec.memory_prefix = [](double) { return 0.0; };
    const std::vector<double> nodes = u0_eps.domain().node_positions();
    const std::vector<double> u0(u0_eps.values().begin(), u0_eps.values().end());
    spec.initial_reference = [nodes, u0](double x) { return interpolate_linear(nodes, u0, x); };
    spec.exp_super.C = C;
    spec.exp_super.s = s;
    spec.exp_super.alpha = alpha;
    spec.exp_super.T_valid = T_valid;
    spec.exp_super.K = K;
    for (double xn : problem.domain.node_positions()) spec.exp_super.psi.push_back(psi_at(s, xn));
    return spec;
}

// ---------------------------------------------------------------------------
// t^γ subsolution

SubSuperSpec build_tgamma_subsolution(const ModelParams& prm) {
    validate_params(prm);
    const double pq = prm.p + prm.q;
    if (!(pq < std::min(1.0, prm.m))) {
        std::ostringstream os;
        os << "p + q = " << pq << " is not below min(1, m) = " << std::min(1.0, prm.m);
        throw Error(ErrorCode::RegimeMismatch, os.str());
    }
    const double bound = std::max(2.0 / (1.0 - pq), 1.0 / (prm.m - pq));
    const double gamma = 1.2 * bound;

    // (γ t^{γ-1} + b t^{γm}) / (a t^{γ(p+q)+1}/(γq+1)), increasing in t.
    auto ratio = [&](double t) {
        return (gamma * prm.q + 1.0) / prm.a *
               (gamma * std::pow(t, gamma * (1.0 - pq) - 2.0) +
                prm.b * std::pow(t, gamma * (prm.m - pq) - 1.0));
    };
    constexpr double kMargin = 0.9;
    double lo = 1e-12;
    double hi = 1e-12;
    while (ratio(hi) <= kMargin && hi < 1e6) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-14; ++it) {
        const double mid = std::sqrt(lo * hi);
        (ratio(mid) <= kMargin ? lo : hi) = mid;
    }

    SubSuperSpec spec;
    spec.kind = SpecKind::tgamma_sub;
    spec.name = "tgamma_sub";
    spec.window = {0.0, lo};
    spec.eval = [gamma](double, double t) { return t > 0.0 ? std::pow(t, gamma) : 0.0; };
    spec.memory_prefix = [](double) { return 0.0; };
    spec.initial_reference = [](double) { return 0.0; };
    spec.tgamma = {gamma, bound, lo};
    return spec;
}

// ---------------------------------------------------------------------------
// Boundary-layer subsolution

SearchFailed::SearchFailed(BoundaryLayerData best, double violation, std::string message)
    : Error(ErrorCode::SearchFailed, message), best_(best), violation_(violation) {}

std::pair<double, double> boundary_layer_exponents(const ModelParams& prm) {
    const double alpha_lo = 1.0 / (1.0 - prm.l);
    if (prm.m < 1.0) {
        const double alpha_hi = 1.0 / (1.0 - prm.m);
        const double beta_hi = 2.0 / (1.0 - prm.m);
        return {0.5 * (alpha_lo + alpha_hi), 0.5 * (2.0 + beta_hi)};
    }
    return {alpha_lo + 1.0, 3.0};
}

namespace {

SubSuperSpec boundary_layer_spec(const BoundaryLayerData& d, double length) {
    SubSuperSpec spec;
    spec.kind = SpecKind::boundary_layer_sub;
    spec.name = "boundary_layer_sub";
    spec.window = {d.t0, d.t0 + d.T0};
    spec.eval = [d, length](double x, double t) {
        const double tau = t - d.t0;
        if (tau <= 0.0) return 0.0;
        const double s = std::min(x, length - x);
        const double z = d.xi0 - s / std::sqrt(tau);
        if (z <= 0.0) return 0.0;
        return d.A * std::pow(tau, d.alpha) * std::pow(z, d.beta);
    };
    spec.memory_prefix = [](double) { return 0.0; };
    spec.initial_reference = [](double) { return 0.0; };
    spec.boundary_layer = d;
    return spec;
}

}  // namespace

SubSuperSpec build_boundary_layer_subsolution(const ModelParams& prm, const BoundaryKernel& kernel,
                                              const Domain1D& domain, double t0, double T_guess,
                                              const BoundaryLayerOptions& options) {
    validate_params(prm);
    if (!(prm.l < std::min(1.0, prm.m))) {
        std::ostringstream os;
        os << "l = " << prm.l << " is not below min(1, m) = " << std::min(1.0, prm.m);
        throw Error(ErrorCode::RegimeMismatch, os.str());
    }
    const double length = domain.length();
    // Positivity at both endpoints for a common boundary point y0.
    bool positive = false;
    for (double y0 : {0.0, length}) {
        if (kernel(Boundary::left, y0, t0) > 0.0 && kernel(Boundary::right, y0, t0) > 0.0) {
            positive = true;
        }
    }
    if (!positive) {
        throw Error(ErrorCode::RegimeMismatch,
                    "kernel is not positive at the boundary for any boundary y0 at t0");
    }
    if (!(T_guess > t0)) throw Error(ErrorCode::InvalidParameter, "T_guess must exceed t0");

    const auto [alpha, beta] = boundary_layer_exponents(prm);
    const double delta = 0.2 * length;
    const double T_cap = std::min(T_guess - t0, delta * delta);

    const Problem problem{prm, domain, kernel,
                          InitialData(domain, std::vector<double>(domain.nodes(), 0.0))};

    BoundaryLayerData best;
    double best_violation = kInf;
    for (double A : {1.0, 1e-1, 1e-2, 1e-3, 1e-4}) {
        for (double xi0 : {1.0, 0.5, 0.2, 0.1}) {
            for (double frac : {1.0, 0.5, 0.25, 0.125}) {
                const BoundaryLayerData d{A, xi0, alpha, beta, t0, frac * T_cap};
                const double h_max =
                    xi0 * std::sqrt(d.T0 / static_cast<double>(options.check_intervals)) / 6.0;
                const auto nodes = static_cast<std::size_t>(std::clamp(
                    std::ceil(length / h_max) + 1.0, 101.0, static_cast<double>(options.max_nodes)));
                const SubSuperSpec spec = boundary_layer_spec(d, length);
                const CheckGrid grid =
                    CheckGrid::uniform(nodes, d.t0, d.t0 + d.T0, options.check_intervals);
                const ResidualReport report = check_candidate(spec, problem, grid, options.tolerance);
                if (report.is_subsolution()) return spec;
                const double violation = report.worst_violation(false);
                if (violation < best_violation) {
                    best_violation = violation;
                    best = d;
                }
            }
        }
    }
    std::ostringstream os;
    os << "no (A, xi0, T0) on the search grid passed; least violating A = " << best.A
       << ", xi0 = " << best.xi0 << ", T0 = " << best.T0 << " (excess " << best_violation
       << " of field magnitude)";
    throw SearchFailed(best, best_violation, os.str());
}

// ---------------------------------------------------------------------------
// Constant subsolution

SubSuperSpec build_constant_subsolution(double eps, double tau, const ModelParams& prm,
                                        double T0) {
    validate_params(prm);
    if (!(prm.p < prm.m && prm.m < 1.0)) {
        std::ostringstream os;
        os << "constant subsolution needs p < m < 1 (p = " << prm.p << ", m = " << prm.m << ")";
        throw Error(ErrorCode::RegimeMismatch, os.str());
    }
    if (!(eps > 0.0) || !(tau > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "eps and tau must be positive");
    }
    if (!(T0 > tau)) throw Error(ErrorCode::InvalidParameter, "T0 must exceed tau");
    const double eps1 =
        std::min(eps, std::pow(prm.a * tau * std::pow(eps, prm.q) / prm.b, 1.0 / (prm.m - prm.p)));

    SubSuperSpec spec;
    spec.kind = SpecKind::constant_sub;
    spec.name = "constant_sub";
    spec.window = {tau, T0};
    spec.eval = [eps1](double, double) { return eps1; };
    // u >= ε on [0, τ] contributes at least τ ε^q to the memory.
    const double prefix = tau * std::pow(eps, prm.q);
    spec.memory_prefix = [prefix](double) { return prefix; };
    spec.initial_reference = [eps](double) { return eps; };
    spec.constant = {eps1, eps, tau, T0};
    return spec;
}

// ---------------------------------------------------------------------------
// Ordering

OrderingReport ordering(const SubSuperSpec& lower, const SubSuperSpec& upper,
                        const std::vector<double>& x, const std::vector<double>& t,
                        double tolerance) {
    constexpr std::size_t kKeep = 20;
    OrderingReport report;
    report.max_excess = -kInf;
    for (double tj : t) {
        if (!lower.window.contains(tj) || !upper.window.contains(tj)) continue;
        for (double xi : x) {
            const double lo = lower(xi, tj);
            const double up = upper(xi, tj);
            ++report.points_checked;
            report.max_excess = std::max(report.max_excess, lo - up);
            if (lo > up + tolerance) {
                ++report.violation_count;
                if (report.violations.size() < kKeep) report.violations.push_back({xi, tj, lo, up});
            }
        }
    }
    if (report.points_checked == 0) {
        throw Error(ErrorCode::WindowEmpty, "the two candidates share no grid point");
    }
    report.ordered = report.violation_count == 0;
    return report;
}

OrderingReport compare(const SubSuperSpec& lower, const SubSuperSpec& upper,
                       const ModelParams& params, const std::vector<double>& x,
                       const std::vector<double>& t, double tolerance) {
    const bool required =
        std::min(params.q, params.l) < 1.0 || (params.p > 0.0 && params.p < 1.0);
    std::string witness;
    if (required) {
        auto min_on_grid = [&](const SubSuperSpec& spec) {
            double v = kInf;
            for (double tj : t) {
                if (!lower.window.contains(tj) || !upper.window.contains(tj)) continue;
                for (double xi : x) v = std::min(v, spec(xi, tj));
            }
            return v;
        };
        const double lower_min = min_on_grid(lower);
        const double upper_min = min_on_grid(upper);
        if (upper_min > 0.0 && std::isfinite(upper_min)) {
            witness = "upper >= " + std::to_string(upper_min);
        } else if (lower_min > 0.0 && std::isfinite(lower_min)) {
            witness = "lower >= " + std::to_string(lower_min);
        } else {
            throw Error(ErrorCode::HypothesisUnmet,
                        "comparison needs a candidate bounded below by a positive constant "
                        "(min(q, l) < 1 or 0 < p < 1)");
        }
    }
    OrderingReport report = ordering(lower, upper, x, t, tolerance);
    report.proviso_required = required;
    report.proviso_witness = witness;
    return report;
}

// ---------------------------------------------------------------------------
// Gronwall estimate

GronwallReport gronwall_bound(const std::vector<double>& t, const std::vector<double>& w_plus,
                              double M, const ModelParams& prm, double epsilon, double T0,
                              const Domain1D& domain) {
    if (t.size() != w_plus.size() || t.empty()) {
        throw Error(ErrorCode::InvalidParameter, "Gronwall series needs matching nonempty t and w");
    }
    GronwallReport report;
    report.constant = prm.a * (prm.p + prm.q) * std::pow(M, prm.p + prm.q - 1.0) * T0 +
                      prm.l * Domain1D::boundary_measure() * std::pow(M, prm.l);
    report.prefactor =
        w_plus.front() + nonneg_pow(epsilon, prm.m) * prm.b * T0 * domain.measure();
    report.min_margin = kInf;
    for (std::size_t j = 0; j < t.size(); ++j) {
        const double rhs = report.prefactor * std::exp(report.constant * t[j]);
        report.samples.push_back({t[j], w_plus[j], rhs});
        if (w_plus[j] == 0.0) continue;
        report.min_margin = std::min(report.min_margin, rhs - w_plus[j]);
        // Relative slack for the rounding in rhs.
        if (w_plus[j] > rhs * (1.0 + 1e-12)) report.holds = false;
    }
    return report;
}

std::vector<double> positive_part_series(const Trajectory& u, const Trajectory& v) {
    if (u.size() != v.size() || !(u.domain() == v.domain())) {
        throw Error(ErrorCode::InvalidParameter, "trajectories are on different grids");
    }
    std::vector<double> out(u.size());
    std::vector<double> diff(u.domain().nodes());
    for (std::size_t j = 0; j < u.size(); ++j) {
        const auto& a = u.snapshot(j).u;
        const auto& b = v.snapshot(j).u;
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = std::max(a[i] - b[i], 0.0);
        out[j] = trapezoid(diff, u.domain().spacing());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Positivity

PositivityReport scan_positivity(const Trajectory& traj, double t_from) {
    PositivityReport report;
    report.min_positive_time = kInf;
    bool any = false;
    for (const Snapshot& s : traj.snapshots()) {
        const double mn = *std::min_element(s.u.begin(), s.u.end());
        report.t.push_back(s.t);
        report.min_value.push_back(mn);
        if (s.t <= 0.0 || s.t < t_from) continue;
        any = true;
        report.min_positive_time = std::min(report.min_positive_time, mn);
        if (!(mn > 0.0) && !report.first_nonpositive) report.first_nonpositive = s.t;
    }
    report.positive = any && !report.first_nonpositive;
    return report;
}

PositivityReport positivity_check(const Trajectory& traj, const ModelParams& prm,
                                  const InitialData& u0, double t_from) {
    std::string hypothesis;
    const double u0_min = *std::min_element(u0.values().begin(), u0.values().end());
    if (prm.m >= 1.0 && !u0.identically_zero()) {
        hypothesis = "m >= 1 and u0 not identically zero";
    } else if (u0_min > 0.0 && prm.p < prm.m && prm.m < 1.0) {
        hypothesis = "u0 > 0 and p < m < 1";
    } else {
        throw Error(ErrorCode::HypothesisUnmet,
                    "positivity needs (m >= 1, u0 not identically zero) or (u0 > 0, p < m < 1)");
    }
    PositivityReport report = scan_positivity(traj, t_from);
    report.hypothesis = hypothesis;
    return report;
}

}  // namespace memlab
