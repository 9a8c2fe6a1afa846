#pragma once

#include "memlab/analysis.hpp"
#include "memlab/greens.hpp"
#include "memlab/problem.hpp"
#include "memlab/solver.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace memlab {

/// Spatially constant solution of u' = a u^p I - b u^m + b ε^m, I' = u^q.
struct OdeTrajectory {
    std::vector<double> t;
    std::vector<double> u;
    std::vector<double> memory;
    bool closed_form = false;

    double value_at(double tq) const;
};

/// Closed form for p = 0, q = 1, m = 1, otherwise classical RK4 with step
/// min(dt, 1e-5). Throws NegativeState if u drops below zero.
OdeTrajectory ode_oracle(const ModelParams& params, double c0, double epsilon, double T,
                         double dt = 1e-5);

enum class LimitTag { last_iterate, richardson };

std::string_view to_string(LimitTag tag);

/// Estimate of lim_{ε→0} from rungs u_ε on a decreasing ladder. When the last
/// two rungs agree to `agreement_tol` the last rung is returned; otherwise the
/// model u_ε = u_M + c ε^r is fitted with one global rate r from the sup-norm
/// differences of the last three rungs (r = 1 with two rungs).
struct LimitEstimate {
    std::vector<double> values;
    LimitTag tag = LimitTag::last_iterate;
    double rate = 0.0;
    double agreement = 0.0;  // sup |u_last - u_previous|
};

LimitEstimate epsilon_limit(const std::vector<double>& ladder,
                            const std::vector<std::vector<double>>& rungs,
                            double agreement_tol = 1e-4);

struct MonotonicityReport {
    bool monotone = true;
    double max_excess = 0.0;  // max(u_{ε_{j+1}} - u_{ε_j})
    double epsilon_small = 0.0, epsilon_large = 0.0;
    double x = 0.0, t = 0.0;
};

struct SweepResult {
    std::vector<double> ladder;
    std::vector<Trajectory> runs;
    MonotonicityReport monotonicity;
    GridFunction limit;
    LimitTag tag = LimitTag::last_iterate;
    double rate = 0.0;
    double agreement = 0.0;
};

/// Solves the regularized problem for every ε of a strictly decreasing ladder
/// in (0, 1) and extrapolates to ε → 0. Throws MonotonicityViolated if a
/// smaller ε rises above a larger one by more than `tolerance`.
SweepResult maximal_solution_sweep(const Problem& problem, const std::vector<double>& ladder,
                                   const SolverConfig& cfg, double tolerance = 1e-6);

std::vector<double> default_ladder();

enum class NonuniqBranch { automatic, tgamma, boundary };

struct NonuniqConfig {
    std::vector<double> ladder = default_ladder();
    SolverConfig solver;
    NonuniqBranch branch = NonuniqBranch::automatic;
    double check_tolerance = 1e-4;
    double ordering_tolerance = 1e-9;
    double dominance_horizon = 0.0;  // > 0 clips the subsolution window
};

struct NonuniqReport {
    NonuniqBranch branch = NonuniqBranch::tgamma;
    ResidualReport zero_check;
    SweepResult sweep;
    double sup_limit = 0.0;
    bool distinct = false;  // sup u_M >= 10 × check tolerance
    std::optional<SubSuperSpec> subsolution;
    std::optional<ResidualReport> subsolution_check;
    std::optional<OrderingReport> limit_dominates;   // u_M >= sub pointwise
    std::optional<OrderingReport> rung_dominates;    // u_ε >= sub, comparison principle
    std::string search_failure;                      // set when the layer search failed
    std::optional<BoundaryLayerData> least_violating;
    bool pass = false;
};

/// Exhibits the zero solution and the nonzero maximal solution for u0 ≡ 0.
/// Throws RegimeMismatch unless p + q < min(1, m) or l < min(1, m).
NonuniqReport nonuniqueness_demo(const Problem& problem, const NonuniqConfig& cfg);

struct UniquenessReport {
    std::string hypothesis;
    double delta0 = 0.0;
    double divergence = 0.0;  // sup |u_δ - u| at the final time
    double ratio = 0.0;       // divergence / δ0 (0 when δ0 = 0)
    double M = 0.0;
    std::vector<double> t;
    std::vector<double> l1_divergence;  // ∫ (u_δ - u)_+ dx
    GronwallReport envelope;
    bool identical = false;  // bitwise equal trajectories
    bool within_envelope = false;
};

/// Solves from u0 and from u0 + δ0 (retuned for compatibility) and checks the
/// L1 divergence against the Gronwall envelope. Throws HypothesisUnmet outside
/// the uniqueness hypotheses.
UniquenessReport uniqueness_probe(const Problem& problem, double delta0, const SolverConfig& cfg);

struct ConvergenceLevel {
    std::size_t nodes = 0;
    double dt = 0.0;
};

struct ConvergenceRow {
    ConvergenceLevel level;
    double error = 0.0;
    std::optional<double> order;  // undefined for the first row, zero errors or equal levels
};

struct ConvergenceCase {
    ModelParams params;
    double length = 1.0;
    BoundaryKernel kernel = BoundaryKernel::zero();
    std::function<double(double)> initial;
    /// Exact solution; when empty the finest level is the reference.
    std::function<double(double, double)> exact;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    std::string reference;  // "exact" or "finest"
};

/// L∞ error at cfg.t_final for each level. Orders use the grid-spacing ratio
/// when node counts differ, else the time-step ratio.
ConvergenceTable convergence_study(const ConvergenceCase& study,
                                   const std::vector<ConvergenceLevel>& levels,
                                   const SolverConfig& cfg);

struct CrossSolverReport {
    PicardResult picard;
    double sup_difference = 0.0;
};

/// Picard fixed point vs the finite-difference trajectory at the Picard nodes.
CrossSolverReport cross_solver_check(const Problem& problem, const PicardConfig& picard,
                                     const SolverConfig& solver);

}  // namespace memlab
