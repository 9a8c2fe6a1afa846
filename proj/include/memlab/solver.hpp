#pragma once

#include "memlab/problem.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace memlab {

enum class ClampPolicy { clamp_to_zero_and_count, error_on_negative };

struct SolverConfig {
    double dt = 1e-4;
    double t_final = 1.0;
    /// 0 solves the original problem; > 0 adds the source b ε^m of the regularized problem.
    double epsilon = 0.0;
    ClampPolicy clamp = ClampPolicy::clamp_to_zero_and_count;
    std::size_t snapshot_stride = 1;
    /// Substep under the explicit-source guard and halve on negative undershoot.
    bool adaptive = false;
    double blowup_cap = 1e8;

    void validate() const;
};

/// Per-node trapezoid accumulator of ∫_0^t u^q dτ.
struct MemoryState {
    std::vector<double> integral;
    std::vector<double> last_power;  // u^q at the most recent sample

    static MemoryState start(std::span<const double> u, double q);
};

MemoryState memory_update(const MemoryState& memory, std::span<const double> u_prev,
                          std::span<const double> u_new, double q, double dt);

struct StepState {
    std::vector<double> u;
    MemoryState memory;
    double t = 0.0;
};

struct StepCounters {
    std::size_t steps = 0;
    std::size_t substeps = 0;
    std::size_t clamp_events = 0;
    std::size_t dt_halvings = 0;
};

/// Largest substep allowed by the explicit-source guard
///   dt <= 0.1 / (b m max(u)^{m-1} + a (p+q) max(u)^{p+q-1} (1 + max I)).
double explicit_source_dt_limit(const StepState& state, const ModelParams& params);

/// Advances the state by exactly cfg.dt: implicit (backward Euler) diffusion,
/// explicit memory source, absorption, regularizing source and ghost-node
/// boundary flux, all frozen at the start of each substep. Returns early, at
/// the time reached, once max u exceeds cfg.blowup_cap.
StepState step(const StepState& state, const SolverConfig& cfg, const Problem& problem,
               StepCounters& counters);

struct Snapshot {
    double t = 0.0;
    std::vector<double> u;
    std::vector<double> memory;
};

enum class Termination { completed, step_rejected, blowup };

std::string_view to_string(Termination termination);

class Trajectory {
public:
    Trajectory(Problem problem, SolverConfig config);

    const Problem& problem() const { return problem_; }
    const SolverConfig& config() const { return config_; }
    const Domain1D& domain() const { return problem_.domain; }

    const std::vector<Snapshot>& snapshots() const { return snapshots_; }
    const Snapshot& snapshot(std::size_t i) const { return snapshots_[i]; }
    std::size_t size() const { return snapshots_.size(); }
    std::vector<double> times() const;

    const StepCounters& counters() const { return counters_; }
    Termination termination() const { return termination_; }
    double final_time() const { return snapshots_.back().t; }

    /// Index of the snapshot whose time matches t within 1e-9 relative; throws if absent.
    std::size_t index_of_time(double t) const;

    /// Linear interpolation in space and time; clamps outside the covered range.
    double value_at(double x, double t) const;

    /// Throws StepRejected or Blowup unless the run completed.
    void require_completed() const;

private:
    friend Trajectory solve(const Problem&, const SolverConfig&);

    Problem problem_;
    SolverConfig config_;
    std::vector<Snapshot> snapshots_;
    StepCounters counters_;
    Termination termination_ = Termination::completed;
};

/// Integrates from t = 0 to cfg.t_final. Step rejection and blow-up end the run
/// early and are recorded in Trajectory::termination().
Trajectory solve(const Problem& problem, const SolverConfig& cfg);

/// Trapezoid-weighted mass ∫ u dx of a grid function.
double total_mass(std::span<const double> u, const Domain1D& domain);

}  // namespace memlab
