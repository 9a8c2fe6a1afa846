#include "memlab/solver.hpp"
#include "memlab/error.hpp"
#include "memlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace memlab {

namespace {

constexpr double kMinSubstep = 1e-12;

double max_value(std::span<const double> v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

bool has_negative(std::span<const double> v) {
    return std::any_of(v.begin(), v.end(), [](double x) { return !(x >= 0.0); });
}

// One backward-Euler diffusion solve with all other terms frozen at the start state.
std::vector<double> imex_update(const StepState& state, double h, const SolverConfig& cfg,
                                const Problem& problem) {
    const ModelParams& prm = problem.params;
    const Domain1D& dom = problem.domain;
    const std::size_t n = state.u.size();
    const double dx = dom.spacing();
    const double r = h / (dx * dx);

    const auto [flux_left, flux_right] =
        boundary_flux(state.u, problem.kernel, state.t, prm, dom);
    const double regularizer = cfg.epsilon > 0.0 ? prm.b * std::pow(cfg.epsilon, prm.m) : 0.0;

    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = state.u[i];
        const double source = prm.a * nonneg_pow(u, prm.p) * state.memory.integral[i] -
                              prm.b * nonneg_pow(u, prm.m) + regularizer;
        rhs[i] = u + h * source;
    }
    // Ghost nodes: u_{-1} = u_1 + 2 dx flux_left, u_N = u_{N-2} + 2 dx flux_right.
    rhs[0] += 2.0 * r * dx * flux_left;
    rhs[n - 1] += 2.0 * r * dx * flux_right;

    std::vector<double> lower(n, -r);
    std::vector<double> diag(n, 1.0 + 2.0 * r);
    std::vector<double> upper(n, -r);
    upper[0] = -2.0 * r;
    lower[n - 1] = -2.0 * r;
    return solve_tridiagonal(lower, diag, upper, rhs);
}

}  // namespace

void SolverConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw Error(ErrorCode::InvalidParameter, "solver dt must be > 0");
    }
    if (!(t_final > 0.0) || !std::isfinite(t_final)) {
        throw Error(ErrorCode::InvalidParameter, "solver t_final must be > 0");
    }
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw Error(ErrorCode::InvalidParameter, "solver epsilon must lie in [0, 1)");
    }
    if (snapshot_stride < 1) {
        throw Error(ErrorCode::InvalidParameter, "snapshot_stride must be >= 1");
    }
    if (!(blowup_cap > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "blowup_cap must be > 0");
    }
}

MemoryState MemoryState::start(std::span<const double> u, double q) {
    MemoryState state;
    state.integral.assign(u.size(), 0.0);
    state.last_power.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) state.last_power[i] = nonneg_pow(u[i], q);
    return state;
}

MemoryState memory_update(const MemoryState& memory, std::span<const double> u_prev,
                          std::span<const double> u_new, double q, double dt) {
    MemoryState next;
    next.integral.resize(u_new.size());
    next.last_power.resize(u_new.size());
    for (std::size_t i = 0; i < u_new.size(); ++i) {
        const double prev_pow = nonneg_pow(u_prev[i], q);
        const double new_pow = nonneg_pow(u_new[i], q);
        next.integral[i] = memory.integral[i] + 0.5 * dt * (prev_pow + new_pow);
        next.last_power[i] = new_pow;
    }
    return next;
}

double explicit_source_dt_limit(const StepState& state, const ModelParams& prm) {
    const double u_max = max_value(state.u);
    if (!(u_max > 0.0)) return std::numeric_limits<double>::infinity();
    const double i_max = max_value(state.memory.integral);
    const double rate = prm.b * prm.m * std::pow(u_max, prm.m - 1.0) +
                        prm.a * (prm.p + prm.q) * std::pow(u_max, prm.p + prm.q - 1.0) *
                            (1.0 + i_max);
    return rate > 0.0 ? 0.1 / rate : std::numeric_limits<double>::infinity();
}

StepState step(const StepState& state, const SolverConfig& cfg, const Problem& problem,
               StepCounters& counters) {
    StepState current = state;
    double remaining = cfg.dt;
    while (remaining > 1e-14 * cfg.dt) {
        double h = remaining;
        if (cfg.adaptive) h = std::min(h, explicit_source_dt_limit(current, problem.params));
        std::vector<double> next = imex_update(current, h, cfg, problem);
        while (cfg.adaptive && has_negative(next)) {
            h *= 0.5;
            ++counters.dt_halvings;
            if (h < kMinSubstep) {
                std::ostringstream os;
                os << "substep fell below " << kMinSubstep << " at t = " << current.t;
                throw Error(ErrorCode::StepRejected, os.str());
            }
            next = imex_update(current, h, cfg, problem);
        }
        for (std::size_t i = 0; i < next.size(); ++i) {
            if (next[i] >= 0.0) continue;
            if (cfg.clamp == ClampPolicy::error_on_negative || !std::isfinite(next[i])) {
                std::ostringstream os;
                os << "value " << next[i] << " at node " << i << ", t = " << current.t + h;
                throw Error(ErrorCode::NegativeState, os.str());
            }
            next[i] = 0.0;
            ++counters.clamp_events;
        }
        current.memory = memory_update(current.memory, current.u, next, problem.params.q, h);
        current.u = std::move(next);
        current.t += h;
        remaining -= h;
        ++counters.substeps;
        // Past the cap the guard shrinks substeps toward the blow-up time; stop
        // here and let the caller record where it happened.
        if (max_value(current.u) > cfg.blowup_cap) return current;
    }
    current.t = state.t + cfg.dt;
    ++counters.steps;
    return current;
}

std::string_view to_string(Termination termination) {
    switch (termination) {
        case Termination::completed: return "completed";
        case Termination::step_rejected: return "step_rejected";
        case Termination::blowup: return "blowup";
    }
    return "unknown";
}

Trajectory::Trajectory(Problem problem, SolverConfig config)
    : problem_(std::move(problem)), config_(config) {}

std::vector<double> Trajectory::times() const {
    std::vector<double> ts(snapshots_.size());
    for (std::size_t i = 0; i < snapshots_.size(); ++i) ts[i] = snapshots_[i].t;
    return ts;
}

std::size_t Trajectory::index_of_time(double t) const {
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    auto it = std::lower_bound(snapshots_.begin(), snapshots_.end(), t - tol,
                               [](const Snapshot& s, double v) { return s.t < v; });
    if (it == snapshots_.end() || std::abs(it->t - t) > tol) {
        std::ostringstream os;
        os << "no snapshot at t = " << t;
        throw Error(ErrorCode::InvalidParameter, os.str());
    }
    return static_cast<std::size_t>(it - snapshots_.begin());
}

double Trajectory::value_at(double x, double t) const {
    const Domain1D& dom = domain();
    double pos = std::clamp(x, 0.0, dom.length()) / dom.spacing();
    if (std::abs(pos - std::round(pos)) < 1e-9) pos = std::round(pos);  // node hits exact
    const std::size_t i0 = std::min(static_cast<std::size_t>(pos), dom.nodes() - 2);
    const double wx = std::clamp(pos - static_cast<double>(i0), 0.0, 1.0);
    auto at_snapshot = [&](std::size_t k) {
        const std::vector<double>& u = snapshots_[k].u;
        return (1.0 - wx) * u[i0] + wx * u[i0 + 1];
    };
    if (t <= snapshots_.front().t) return at_snapshot(0);
    if (t >= snapshots_.back().t) return at_snapshot(snapshots_.size() - 1);
    auto it = std::upper_bound(snapshots_.begin(), snapshots_.end(), t,
                               [](double v, const Snapshot& s) { return v < s.t; });
    const std::size_t hi = static_cast<std::size_t>(it - snapshots_.begin());
    const std::size_t lo = hi - 1;
    const double theta = (t - snapshots_[lo].t) / (snapshots_[hi].t - snapshots_[lo].t);
    return (1.0 - theta) * at_snapshot(lo) + theta * at_snapshot(hi);
}

void Trajectory::require_completed() const {
    std::ostringstream os;
    os << "run ended at t = " << final_time() << " before t_final = " << config_.t_final;
    if (termination_ == Termination::step_rejected) throw Error(ErrorCode::StepRejected, os.str());
    if (termination_ == Termination::blowup) throw Error(ErrorCode::Blowup, os.str());
}

Trajectory solve(const Problem& problem, const SolverConfig& cfg_in) {
    validate_numeric_params(problem.params);
    cfg_in.validate();
    problem.kernel.check_nonnegative(problem.domain.length(), cfg_in.t_final);
    if (!(problem.initial.domain() == problem.domain)) {
        throw Error(ErrorCode::InvalidInitialData, "initial data lives on a different grid");
    }

    // Snap dt so that an integer number of steps lands on t_final.
    SolverConfig cfg = cfg_in;
    const auto n_steps = static_cast<std::size_t>(
        std::max(1.0, std::ceil(cfg.t_final / cfg.dt - 1e-9)));
    cfg.dt = cfg.t_final / static_cast<double>(n_steps);

    Trajectory traj(problem, cfg);
    StepState state;
    state.u.assign(problem.initial.values().begin(), problem.initial.values().end());
    state.memory = MemoryState::start(state.u, problem.params.q);
    state.t = 0.0;
    traj.snapshots_.push_back({0.0, state.u, state.memory.integral});

    for (std::size_t n = 1; n <= n_steps; ++n) {
        try {
            state = step(state, cfg, problem, traj.counters_);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::StepRejected) throw;
            traj.termination_ = Termination::step_rejected;
            break;
        }
        const bool blown = max_value(state.u) > cfg.blowup_cap;
        if (!blown) state.t = n == n_steps ? cfg.t_final : cfg.dt * static_cast<double>(n);
        if (blown || n % cfg.snapshot_stride == 0 || n == n_steps) {
            traj.snapshots_.push_back({state.t, state.u, state.memory.integral});
        }
        if (blown) {
            traj.termination_ = Termination::blowup;
            break;
        }
    }
    return traj;
}

double total_mass(std::span<const double> u, const Domain1D& domain) {
    return trapezoid(u, domain.spacing());
}

}  // namespace memlab
