#pragma once

#include "memlab/error.hpp"
#include "memlab/problem.hpp"
#include "memlab/solver.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace memlab {

/// Values on a tensor grid of nodes x and times t, linearly interpolated.
struct GridFunction {
    std::vector<double> x;
    std::vector<double> t;
    std::vector<std::vector<double>> u;  // u[j][i] = value at (x[i], t[j])

    double at(double xq, double tq) const;
    double min() const;
    double max() const;
};

GridFunction to_grid_function(const Trajectory& traj);

enum class SpecKind { exp_super, tgamma_sub, boundary_layer_sub, constant_sub, numeric };

std::string_view to_string(SpecKind kind);

struct TimeWindow {
    double start = 0.0;
    double end = 0.0;
    bool contains(double t) const;
};

struct ExpSuperData {
    std::vector<double> psi;  // ψ on the problem nodes
    double C = 0.0;
    double s = 0.0;
    double alpha = 0.0;
    double T_valid = 0.0;
    double K = 0.0;
};

struct TGammaData {
    double gamma = 0.0;
    double bound = 0.0;  // strict lower bound for γ
    double tau_valid = 0.0;
};

struct BoundaryLayerData {
    double A = 0.0;
    double xi0 = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double t0 = 0.0;
    double T0 = 0.0;
};

struct ConstantSubData {
    double eps1 = 0.0;
    double eps = 0.0;
    double tau = 0.0;
    double T0 = 0.0;
};

/// Candidate super/subsolution: an evaluation closure on a validity window
/// plus whatever the residual check cannot recover from the closure alone.
struct SubSuperSpec {
    SpecKind kind = SpecKind::numeric;
    std::string name;
    TimeWindow window;
    std::function<double(double x, double t)> eval;
    /// ∫_0^{window.start} u^q dτ at x (the candidate's history before the window).
    std::function<double(double x)> memory_prefix;
    /// Data the candidate is compared with at window.start.
    std::function<double(double x)> initial_reference;

    ExpSuperData exp_super;
    TGammaData tgamma;
    BoundaryLayerData boundary_layer;
    ConstantSubData constant;
    std::shared_ptr<const GridFunction> field;  // numeric kind only

    double operator()(double x, double t) const { return eval(x, t); }
};

SubSuperSpec numeric_spec(const Trajectory& traj, std::string name = "trajectory");
SubSuperSpec numeric_spec(GridFunction field, std::string name,
                          std::function<double(double)> initial_reference);

struct CheckGrid {
    std::size_t nodes = 101;
    std::vector<double> times;

    static CheckGrid uniform(std::size_t nodes, double t_start, double t_end,
                             std::size_t intervals);
    static CheckGrid of(const Trajectory& traj);
};

enum class Verdict { solution, supersolution, subsolution, neither };

std::string_view to_string(Verdict verdict);

struct FieldStats {
    double min = 0.0;
    double max = 0.0;
    double x_at_min = 0.0, t_at_min = 0.0;
    double x_at_max = 0.0, t_at_max = 0.0;
    double magnitude = 0.0;  // largest sum of absolute term sizes
    double roundoff = 0.0;   // largest stencil scale, sum of |coefficient × value|
    double tolerance = 0.0;  // relative tolerance × magnitude + 64 ulp × roundoff
};

/// Signed residuals of
///   R  = u_t - u_xx - a u^p ∫_0^t u^q + b u^m - b ε^m   (interior nodes, t > start)
///   Rb = ∂u/∂ν - ∫ k u^l dy                            (both endpoints, t > start)
///   R0 = u(·, start) - reference
struct ResidualReport {
    std::string candidate;
    std::vector<double> x;
    std::vector<double> t;
    Eigen::MatrixXd interior;  // (nodes - 2) × (times - 1)
    Eigen::MatrixXd boundary;  // 2 × (times - 1), row 0 left
    std::vector<double> initial;
    FieldStats interior_stats;
    FieldStats boundary_stats;
    FieldStats initial_stats;
    double relative_tolerance = 0.0;
    Verdict verdict = Verdict::neither;

    bool is_supersolution() const;
    bool is_subsolution() const;
    /// Largest violation of the requested side, in units of the field tolerance.
    double worst_violation(bool super_side) const;
};

/// Residuals by finite differences on the check grid (clipped to the window,
/// window start prepended) with the memory integral rebuilt from the
/// candidate. Tolerance is relative to each field's term magnitude.
/// Throws WindowEmpty when no grid time lies in the window.
ResidualReport check_candidate(const SubSuperSpec& spec, const Problem& problem,
                               const CheckGrid& grid, double tolerance = 1e-4,
                               double epsilon = 0.0);

struct ExpSuperOptions {
    double C = 0.0;       // 0 selects max(sup u0ε, 1)
    double s_min = 0.0;   // lower end of the curvature search
    double T_guess = 1.0; // horizon for K = sup k
};

/// w = e^{αt} ψ(x), ψ = C(1 + s (x/L - 1/2)^2), with
///   α = max{1/q, a e sup ψ^{p+q-1} + sup ψ''/ψ},  T_valid = min(1/((p+q)α), 1/α, T_guess).
/// Throws NoSupersolution if no s <= 1e6 satisfies the boundary inequality.
SubSuperSpec build_exp_supersolution(const Problem& problem, const InitialData& u0_eps,
                                     const ExpSuperOptions& options = {});

/// α for given C, s (exposed for the monotonicity property).
double exp_super_alpha(const ModelParams& params, double C, double s, double length);

/// t^γ with γ = 1.2 × max(2/(1-(p+q)), 1/(m-(p+q))); τ_valid is where the
/// positive terms reach 90% of the memory source. Throws RegimeMismatch
/// unless p + q < min(1, m).
SubSuperSpec build_tgamma_subsolution(const ModelParams& params);

struct BoundaryLayerOptions {
    double tolerance = 1e-4;
    std::size_t check_intervals = 40;
    std::size_t max_nodes = 4001;
};

/// Thrown by the boundary-layer search; carries the least-violating triple.
class SearchFailed : public Error {
public:
    SearchFailed(BoundaryLayerData best, double violation, std::string message);
    const BoundaryLayerData& best() const { return best_; }
    double violation() const { return violation_; }

private:
    BoundaryLayerData best_;
    double violation_;
};

/// A (t-t0)^α (ξ0 - s/√(t-t0))_+^β with s the distance to the nearer endpoint,
/// zero before t0. (A, ξ0, T0) are searched on a fixed grid and the first
/// triple that checks as a subsolution is returned.
SubSuperSpec build_boundary_layer_subsolution(const ModelParams& params,
                                              const BoundaryKernel& kernel,
                                              const Domain1D& domain, double t0,
                                              double T_guess,
                                              const BoundaryLayerOptions& options = {});

/// Exponents (α, β) used by the boundary-layer profile.
std::pair<double, double> boundary_layer_exponents(const ModelParams& params);

/// ε1 = min(ε, (aτε^q/b)^{1/(m-p)}) on (τ, T0]. Throws RegimeMismatch unless p < m < 1.
SubSuperSpec build_constant_subsolution(double eps, double tau, const ModelParams& params,
                                        double T0 = 1.0);

struct Violation {
    double x = 0.0;
    double t = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

struct OrderingReport {
    bool ordered = true;
    std::size_t points_checked = 0;
    std::size_t violation_count = 0;
    double max_excess = 0.0;            // max(lower - upper), may be negative
    std::vector<Violation> violations;  // first few only
    bool proviso_required = false;
    std::string proviso_witness;        // which side was positive, if required
};

/// Pointwise lower <= upper + tolerance on the grid intersected with both windows.
OrderingReport ordering(const SubSuperSpec& lower, const SubSuperSpec& upper,
                        const std::vector<double>& x, const std::vector<double>& t,
                        double tolerance);

/// ordering() behind the positivity proviso (needed when min(q,l) < 1 or
/// 0 < p < 1): one side must stay above a positive constant on the grid,
/// otherwise HypothesisUnmet.
OrderingReport compare(const SubSuperSpec& lower, const SubSuperSpec& upper,
                       const ModelParams& params, const std::vector<double>& x,
                       const std::vector<double>& t, double tolerance);

struct GronwallSample {
    double t = 0.0;
    double lhs = 0.0;  // ∫ w_+ dx
    double rhs = 0.0;
};

struct GronwallReport {
    double constant = 0.0;  // a(p+q)M^{p+q-1}T0 + l|∂Ω|M^l
    double prefactor = 0.0; // ∫w_+(·,0) + ε^m b T0 |Ω|
    std::vector<GronwallSample> samples;
    double min_margin = 0.0;  // min(rhs - lhs)
    bool holds = true;
};

GronwallReport gronwall_bound(const std::vector<double>& t, const std::vector<double>& w_plus,
                              double M, const ModelParams& params, double epsilon, double T0,
                              const Domain1D& domain);

/// t ↦ ∫ (u - v)_+ dx over snapshots shared by two trajectories on one grid.
std::vector<double> positive_part_series(const Trajectory& u, const Trajectory& v);

struct PositivityReport {
    std::string hypothesis;
    std::vector<double> t;
    std::vector<double> min_value;  // per snapshot, over all nodes
    double min_positive_time = 0.0; // minimum over snapshots with t > 0
    std::optional<double> first_nonpositive;
    bool positive = false;
};

/// Minimum over all nodes per snapshot without any hypothesis check.
PositivityReport scan_positivity(const Trajectory& traj, double t_from = 0.0);

/// Requires (m >= 1 and u0 ≢ 0) or (u0 > 0 and p < m < 1), else HypothesisUnmet.
PositivityReport positivity_check(const Trajectory& traj, const ModelParams& params,
                                  const InitialData& u0, double t_from = 0.0);

}  // namespace memlab
