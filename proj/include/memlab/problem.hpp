#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace memlab {

/// Coefficients and exponents of
///   u_t = u_xx + a u^p ∫_0^t u^q dτ - b u^m,   ∂u/∂ν = ∫ k(x,y,t) u^l dy.
struct ModelParams {
    double a = 1.0;
    double b = 1.0;
    double p = 1.0;
    double q = 1.0;
    double m = 1.0;
    double l = 1.0;
};

struct RegimeSummary {
    bool uniqueness_regime = false;  // min(p, q, l) >= 1
    bool nonuniq_tgamma = false;     // p + q < min(1, m)
    bool nonuniq_boundary = false;   // l < min(1, m)
};

/// Throws InvalidParameter naming the field when a, b, q, m, l <= 0 or p < 0.
RegimeSummary validate_params(const ModelParams& params);

/// Looser check for the numerical solvers: also admits a = 0 or b = 0, the
/// degenerate heat and pure-decay cases used as exact references.
void validate_numeric_params(const ModelParams& params);

enum class Boundary { left, right };

/// Uniform grid on Ω = (0, L). The boundary set {0, L} carries counting measure,
/// so |∂Ω| = 2.
class Domain1D {
public:
    Domain1D(double length, std::size_t nodes);

    double length() const { return length_; }
    std::size_t nodes() const { return nodes_; }
    double spacing() const { return spacing_; }
    double node(std::size_t i) const;
    std::vector<double> node_positions() const;
    double measure() const { return length_; }
    static constexpr double boundary_measure() { return 2.0; }

    bool operator==(const Domain1D&) const = default;

private:
    double length_;
    std::size_t nodes_;
    double spacing_;
};

/// Rectangular table of k(x_b, y, t) samples for one boundary point.
/// values are stored time-major: values[it * y.size() + iy].
struct KernelTable {
    std::vector<double> y;
    std::vector<double> t;
    std::vector<double> values;

    /// Bilinear interpolation; throws InvalidKernel outside the tabulated range.
    double at(double yq, double tq) const;
};

/// Nonlocal boundary weight k(x_b, y, t) for x_b in {0, L}.
class BoundaryKernel {
public:
    enum class Kind { zero, constant, separable, tabulated };

    using Profile = std::function<double(double)>;

    static BoundaryKernel zero();
    static BoundaryKernel constant(double kappa);
    /// k = kappa * phi(y) * eta(t), identical at both endpoints.
    static BoundaryKernel separable(double kappa, Profile phi, Profile eta,
                                    std::string description = "separable");
    static BoundaryKernel tabulated(KernelTable left, KernelTable right);

    Kind kind() const { return kind_; }
    const std::string& description() const { return description_; }

    double operator()(Boundary b, double y, double t) const;

    /// Samples k(b, y_i, t) into out.
    void sample(Boundary b, double t, std::span<const double> ys, std::span<double> out) const;

    /// sup of k over both endpoints, y in [0, length], t in [0, t_max].
    double sup(double length, double t_max) const;

    /// Throws InvalidKernel if a negative value is found on a sampling grid
    /// covering [0, length] x [0, t_max].
    void check_nonnegative(double length, double t_max) const;

    bool is_zero() const { return kind_ == Kind::zero; }

private:
    BoundaryKernel() = default;

    Kind kind_ = Kind::zero;
    double kappa_ = 0.0;
    Profile phi_;
    Profile eta_;
    KernelTable left_;
    KernelTable right_;
    std::string description_ = "zero";
};

/// Nonnegative grid function u0 on the domain nodes together with its
/// outward normal derivatives from second-order one-sided differences.
class InitialData {
public:
    InitialData(Domain1D domain, std::vector<double> values);

    const Domain1D& domain() const { return domain_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double normal_derivative(Boundary b) const {
        return b == Boundary::left ? dnu_left_ : dnu_right_;
    }
    double sup() const;
    bool identically_zero() const;

private:
    Domain1D domain_;
    std::vector<double> values_;
    double dnu_left_ = 0.0;
    double dnu_right_ = 0.0;
};

/// Outward normal derivative of a grid function, second-order one-sided.
double normal_derivative(std::span<const double> u, double h, Boundary b);

struct CompatibilityReport {
    double residual_left = 0.0;
    double residual_right = 0.0;
    double tolerance = 0.0;
    bool pass = false;

    double max_abs() const;
};

/// ∫_0^L k(b, y, t) u(y)^l dy at both endpoints by composite trapezoid.
std::pair<double, double> boundary_flux(std::span<const double> u, const BoundaryKernel& kernel,
                                        double t, const ModelParams& params,
                                        const Domain1D& domain);

/// ∂u0/∂ν - ∫ k(x_b, y, 0) u0^l dy at each endpoint.
CompatibilityReport compatibility_residual(const InitialData& u0, const BoundaryKernel& kernel,
                                           const ModelParams& params, double tolerance = 1e-10);

/// Cubic boundary profile used to tune normal slopes: unit outward slope at
/// the endpoint b, vanishing with two derivatives at distance 0.2 L.
std::vector<double> corrector_profile(const Domain1D& domain, Boundary b);

/// u0 = c + corrector with slopes tuned so the compatibility residual is
/// below `tolerance`. Throws NoCompatibleData after 100 sweeps without convergence.
InitialData make_compatible_initial(double level, const BoundaryKernel& kernel,
                                    const ModelParams& params, const Domain1D& domain,
                                    double tolerance = 1e-10);

/// Adds `shift` to u0 and retunes the boundary correctors so the result is
/// again compatible.
InitialData shift_compatible(const InitialData& u0, double shift, const BoundaryKernel& kernel,
                             const ModelParams& params, double tolerance = 1e-10);

/// Regularized initial data u0ε >= ε, monotone in ε, compatible to 1e-8.
InitialData build_epsilon_initial(const InitialData& u0, double epsilon,
                                  const BoundaryKernel& kernel, const ModelParams& params);

struct Problem {
    ModelParams params;
    Domain1D domain;
    BoundaryKernel kernel;
    InitialData initial;

    Problem with_initial(InitialData data) const {
        Problem out = *this;
        out.initial = std::move(data);
        return out;
    }
};

}  // namespace memlab
