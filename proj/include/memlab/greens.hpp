#pragma once

#include "memlab/problem.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace memlab {

/// Heat kernel on (0, L) with homogeneous Neumann conditions,
///   G(x,y;t) = 1/L + Σ_{j>=1} (2/L) exp(-(jπ/L)^2 t) cos(jπx/L) cos(jπy/L),
/// evaluated by the method of images for t < t_switch and by the cosine
/// expansion otherwise. Both routes are symmetric in (x, y) bit-for-bit.
class NeumannHeatKernel {
public:
    struct Options {
        double tolerance = 1e-15;       // size of the first dropped eigenmode
        std::size_t max_modes = 20000;
        double t_switch = -1.0;         // < 0 selects 0.05 (L/π)^2
        int image_pairs = 3;            // reflections n = -3..3, i.e. 7 terms per family
    };

    explicit NeumannHeatKernel(double length);
    NeumannHeatKernel(double length, Options options);

    double length() const { return length_; }
    double t_switch() const { return t_switch_; }

    /// Throws TimeTooSmall for t < 1e-10.
    double operator()(double x, double y, double t) const;

    double eigen_sum(double x, double y, double t) const;
    double image_sum(double x, double y, double t) const;

    /// Modes retained by the cosine expansion at time t.
    std::size_t modes_for(double t) const;

    /// out(i, k) = G(xs[i], ys[k]; t).
    Eigen::MatrixXd matrix(std::span<const double> xs, std::span<const double> ys, double t) const;

private:
    double length_;
    Options options_;
    double t_switch_;
};

/// Space-time grid function on uniform nodes x_i (columns of the time slices)
/// and uniform times t_j.
struct SpaceTimeField {
    std::vector<double> x;
    std::vector<double> t;
    Eigen::MatrixXd values;  // rows: space nodes, cols: time nodes

    double sup_difference(const SpaceTimeField& other) const;
};

struct PicardConfig {
    std::size_t space_nodes = 101;
    std::size_t time_nodes = 201;
    double t_final = 0.5;
    std::size_t max_iterations = 200;
    double tolerance = 1e-10;
    double epsilon = 0.0;
    /// Consecutive non-decreasing increments tolerated before NoContraction.
    std::size_t stall_limit = 5;

    void validate() const;
};

/// Discretized right-hand side of the heat-kernel representation
///   u(x,t) = ∫G(x,y;t)u0(y)dy
///          + ∫_0^t∫G(x,y;t-τ)(a v^p ∫_0^τ v^q dσ + b(ε^m - w^m))dy dτ
///          + Σ_b ∫_0^t G(x,ξ_b;t-τ) ∫k(ξ_b,y,τ)v^l(y,τ)dy dτ.
/// Kernel matrices for every time lag are built once on construction.
class PicardOperator {
public:
    PicardOperator(const Problem& problem, const PicardConfig& cfg);

    const std::vector<double>& nodes() const { return x_; }
    const std::vector<double>& times() const { return t_; }
    std::span<const double> initial() const { return u0_; }

    /// Applies the map with memory/source/boundary terms from v and absorption from w.
    SpaceTimeField apply(const SpaceTimeField& v, const SpaceTimeField& w) const;

    /// u0 extended constantly in time.
    SpaceTimeField constant_extension() const;

private:
    Problem problem_;
    PicardConfig cfg_;
    std::vector<double> x_;
    std::vector<double> t_;
    std::vector<double> u0_;
    double dt_;
    std::vector<Eigen::MatrixXd> lag_;  // lag_[d] = weighted G at lag d·dt (d >= 1)
    Eigen::MatrixXd half_lag_;          // weighted G at lag dt/2
    Eigen::MatrixXd initial_term_;      // ∫G(x,y;t_j)u0 dy, rows x, cols t
    // Product-integration weights for piecewise-linear boundary data on lag
    // interval e: boundary_near_[b](i, e) multiplies the value at the later
    // end of the interval (s = e dt), boundary_far_ the earlier one.
    std::array<Eigen::MatrixXd, 2> boundary_near_;
    std::array<Eigen::MatrixXd, 2> boundary_far_;
};

SpaceTimeField picard_apply(const SpaceTimeField& v, const SpaceTimeField& u_prev,
                            const Problem& problem, const PicardConfig& cfg);

struct PicardResult {
    SpaceTimeField solution;
    std::vector<double> increments;  // sup-norm change per application
    std::size_t iterations = 0;      // applications before the fixed point was confirmed
    std::size_t clamp_events = 0;
    bool converged = false;
};

/// Iterates u_{n+1} = A(u_n, u_n) from the constant extension of u0. Throws
/// NoContraction when increments fail to decrease `stall_limit` times in a row.
PicardResult picard_solve(const Problem& problem, const PicardConfig& cfg);

struct KernelIdentitySample {
    double x = 0.0, y = 0.0, t = 0.0;
    double mass_error = 0.0;  // |∫G(x,·;t) - 1|
    double value = 0.0;       // G(x,y;t)
    double asymmetry = 0.0;   // |G(x,y;t) - G(y,x;t)|
};

struct KernelIdentityReport {
    std::uint64_t seed = 0;
    std::vector<KernelIdentitySample> samples;
    double max_mass_error = 0.0;
    double min_value = 0.0;
    double max_asymmetry = 0.0;
    bool pass = false;  // mass <= 1e-8, G >= -1e-12, asymmetry <= 1e-12
};

/// Unit mass, nonnegativity and symmetry on random (x, y, t), t log-uniform in
/// [t_min, t_max]. Mass uses adaptive Gauss-Kronrod split at the peak x.
KernelIdentityReport check_kernel_identities(const NeumannHeatKernel& kernel,
                                             std::size_t samples, std::uint64_t seed,
                                             double t_min = 1e-5, double t_max = 1.0);

}  // namespace memlab
