#include "memlab/problem.hpp"
#include "memlab/error.hpp"
#include "memlab/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace memlab {

namespace {

void require(double value, bool ok, const char* name, const char* rule) {
    if (!ok || !std::isfinite(value)) {
        std::ostringstream os;
        os << "field '" << name << "' = " << value << " must be " << rule;
        throw Error(ErrorCode::InvalidParameter, os.str());
    }
}

void require_exponents(const ModelParams& params) {
    require(params.p, params.p >= 0.0, "p", ">= 0");
    require(params.q, params.q > 0.0, "q", "> 0");
    require(params.m, params.m > 0.0, "m", "> 0");
    require(params.l, params.l > 0.0, "l", "> 0");
}

}  // namespace

void validate_numeric_params(const ModelParams& params) {
    require(params.a, params.a >= 0.0, "a", ">= 0");
    require(params.b, params.b >= 0.0, "b", ">= 0");
    require_exponents(params);
}

RegimeSummary validate_params(const ModelParams& params) {
    require(params.a, params.a > 0.0, "a", "> 0");
    require(params.b, params.b > 0.0, "b", "> 0");
    require_exponents(params);

    const double min_one_m = std::min(1.0, params.m);
    RegimeSummary summary;
    summary.uniqueness_regime = std::min({params.p, params.q, params.l}) >= 1.0;
    summary.nonuniq_tgamma = params.p + params.q < min_one_m;
    summary.nonuniq_boundary = params.l < min_one_m;
    return summary;
}

Domain1D::Domain1D(double length, std::size_t nodes)
    : length_(length), nodes_(nodes), spacing_(0.0) {
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw Error(ErrorCode::InvalidDomain, "interval length must be positive");
    }
    if (nodes < 3) {
        throw Error(ErrorCode::InvalidDomain, "at least 3 nodes are required");
    }
    spacing_ = length / static_cast<double>(nodes - 1);
}

double Domain1D::node(std::size_t i) const {
    return i + 1 == nodes_ ? length_ : spacing_ * static_cast<double>(i);
}

std::vector<double> Domain1D::node_positions() const {
    std::vector<double> xs(nodes_);
    for (std::size_t i = 0; i < nodes_; ++i) xs[i] = node(i);
    return xs;
}

double normal_derivative(std::span<const double> u, double h, Boundary b) {
    const std::size_t n = u.size();
    if (b == Boundary::left) {
        // ∂/∂ν = -∂/∂x at x = 0
        return (3.0 * u[0] - 4.0 * u[1] + u[2]) / (2.0 * h);
    }
    return (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
}

InitialData::InitialData(Domain1D domain, std::vector<double> values)
    : domain_(domain), values_(std::move(values)) {
    if (values_.size() != domain_.nodes()) {
        throw Error(ErrorCode::InvalidInitialData, "initial data size does not match the grid");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
            std::ostringstream os;
            os << "initial value at node " << i << " is " << values_[i] << " (must be >= 0)";
            throw Error(ErrorCode::InvalidInitialData, os.str());
        }
    }
    dnu_left_ = memlab::normal_derivative(values_, domain_.spacing(), Boundary::left);
    dnu_right_ = memlab::normal_derivative(values_, domain_.spacing(), Boundary::right);
}

double InitialData::sup() const { return *std::max_element(values_.begin(), values_.end()); }

bool InitialData::identically_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

double CompatibilityReport::max_abs() const {
    return std::max(std::abs(residual_left), std::abs(residual_right));
}

std::pair<double, double> boundary_flux(std::span<const double> u, const BoundaryKernel& kernel,
                                        double t, const ModelParams& params,
                                        const Domain1D& domain) {
    if (kernel.is_zero()) return {0.0, 0.0};
    const std::size_t n = u.size();
    const double h = domain.spacing();
    std::vector<double> powered(n);
    for (std::size_t i = 0; i < n; ++i) powered[i] = nonneg_pow(u[i], params.l);

    const std::vector<double> ys = domain.node_positions();
    std::vector<double> weights(n);
    std::vector<double> integrand(n);
    std::array<double, 2> flux{};
    for (Boundary b : {Boundary::left, Boundary::right}) {
        kernel.sample(b, t, ys, weights);
        for (std::size_t i = 0; i < n; ++i) integrand[i] = weights[i] * powered[i];
        flux[b == Boundary::left ? 0 : 1] = trapezoid(integrand, h);
    }
    return {flux[0], flux[1]};
}

CompatibilityReport compatibility_residual(const InitialData& u0, const BoundaryKernel& kernel,
                                           const ModelParams& params, double tolerance) {
    const auto [flux_left, flux_right] =
        boundary_flux(u0.values(), kernel, 0.0, params, u0.domain());
    CompatibilityReport report;
    report.residual_left = u0.normal_derivative(Boundary::left) - flux_left;
    report.residual_right = u0.normal_derivative(Boundary::right) - flux_right;
    report.tolerance = tolerance;
    report.pass = report.max_abs() <= tolerance;
    return report;
}

std::vector<double> corrector_profile(const Domain1D& domain, Boundary b) {
    const double width = 0.2 * domain.length();
    std::vector<double> profile(domain.nodes(), 0.0);
    for (std::size_t i = 0; i < domain.nodes(); ++i) {
        const double x = domain.node(i);
        const double dist = b == Boundary::left ? x : domain.length() - x;
        if (dist < width) {
            const double r = 1.0 - dist / width;
            profile[i] = width / 3.0 * r * r * r;
        }
    }
    return profile;
}

namespace {

constexpr int kMaxSweeps = 100;

// Finds slopes (σ_left, σ_right) so that base + σ_left φ_left + σ_right φ_right has
// discrete normal derivatives equal to the nonlocal flux it induces.
InitialData tune_correctors(const Domain1D& domain, const std::vector<double>& base,
                            const BoundaryKernel& kernel, const ModelParams& params,
                            double tolerance) {
    const double h = domain.spacing();
    const std::vector<double> phi_left = corrector_profile(domain, Boundary::left);
    const std::vector<double> phi_right = corrector_profile(domain, Boundary::right);

    // Discrete normal derivatives are linear in the corrector amplitudes.
    const double d_ll = normal_derivative(phi_left, h, Boundary::left);
    const double d_lr = normal_derivative(phi_right, h, Boundary::left);
    const double d_rl = normal_derivative(phi_left, h, Boundary::right);
    const double d_rr = normal_derivative(phi_right, h, Boundary::right);
    const double det = d_ll * d_rr - d_lr * d_rl;
    const double base_left = normal_derivative(base, h, Boundary::left);
    const double base_right = normal_derivative(base, h, Boundary::right);

    std::vector<double> u = base;
    auto assemble = [&](double s_left, double s_right) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] = base[i] + s_left * phi_left[i] + s_right * phi_right[i];
        }
    };

    double s_left = 0.0;
    double s_right = 0.0;
    double residual = 0.0;
    for (int sweep = 0; sweep <= kMaxSweeps; ++sweep) {
        assemble(s_left, s_right);
        if (std::any_of(u.begin(), u.end(), [](double v) { return v < 0.0; })) {
            throw Error(ErrorCode::NoCompatibleData,
                        "boundary corrector drives the initial data negative");
        }
        const auto [f_left, f_right] = boundary_flux(u, kernel, 0.0, params, domain);
        residual = std::max(
            std::abs(base_left + s_left * d_ll + s_right * d_lr - f_left),
            std::abs(base_right + s_left * d_rl + s_right * d_rr - f_right));
        if (residual <= tolerance) {
            return InitialData(domain, u);
        }
        const double rhs_left = f_left - base_left;
        const double rhs_right = f_right - base_right;
        s_left = (rhs_left * d_rr - d_lr * rhs_right) / det;
        s_right = (d_ll * rhs_right - d_rl * rhs_left) / det;
        if (!std::isfinite(s_left) || !std::isfinite(s_right)) break;
    }
    std::ostringstream os;
    os << "corrector iteration did not converge in " << kMaxSweeps
       << " sweeps (last residual " << residual << ")";
    throw Error(ErrorCode::NoCompatibleData, os.str());
}

}  // namespace

InitialData make_compatible_initial(double level, const BoundaryKernel& kernel,
                                    const ModelParams& params, const Domain1D& domain,
                                    double tolerance) {
    if (!(level >= 0.0)) {
        throw Error(ErrorCode::InvalidInitialData, "base level must be >= 0");
    }
    return tune_correctors(domain, std::vector<double>(domain.nodes(), level), kernel, params,
                           tolerance);
}

InitialData shift_compatible(const InitialData& u0, double shift, const BoundaryKernel& kernel,
                             const ModelParams& params, double tolerance) {
    std::vector<double> base(u0.values().begin(), u0.values().end());
    for (double& v : base) v += shift;
    return tune_correctors(u0.domain(), base, kernel, params, tolerance);
}

InitialData build_epsilon_initial(const InitialData& u0, double epsilon,
                                  const BoundaryKernel& kernel, const ModelParams& params) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw Error(ErrorCode::InvalidParameter, "epsilon must lie in (0, 1)");
    }
    return shift_compatible(u0, epsilon, kernel, params, 1e-10);
}

}  // namespace memlab
