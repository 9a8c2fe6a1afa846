#include "memlab/greens.hpp"
#include "memlab/error.hpp"
#include "memlab/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>
#include <sstream>

namespace memlab {

namespace {

constexpr double kMinKernelTime = 1e-10;
constexpr unsigned kGaussPoints = 30;
using Gauss = boost::math::quadrature::gauss<double, kGaussPoints>;

}  // namespace

NeumannHeatKernel::NeumannHeatKernel(double length) : NeumannHeatKernel(length, Options{}) {}

NeumannHeatKernel::NeumannHeatKernel(double length, Options options)
    : length_(length), options_(options), t_switch_(options.t_switch) {
    if (!(length > 0.0)) throw Error(ErrorCode::InvalidDomain, "kernel length must be positive");
    if (t_switch_ < 0.0) {
        const double scale = length / std::numbers::pi;
        t_switch_ = 0.05 * scale * scale;
    }
}

std::size_t NeumannHeatKernel::modes_for(double t) const {
    // First dropped term (2/L) exp(-(jπ/L)^2 t) below tolerance.
    const double log_ratio = std::log(2.0 / (length_ * options_.tolerance));
    const double j = length_ / std::numbers::pi * std::sqrt(std::max(log_ratio, 0.0) / t);
    const double capped = std::min(std::ceil(j), static_cast<double>(options_.max_modes));
    return static_cast<std::size_t>(std::max(capped, 1.0));
}

double NeumannHeatKernel::eigen_sum(double x, double y, double t) const {
    const std::size_t modes = modes_for(t);
    const double k = std::numbers::pi / length_;
    double sum = 0.0;
    for (std::size_t j = 1; j <= modes; ++j) {
        const double kj = k * static_cast<double>(j);
        sum += std::exp(-kj * kj * t) * (std::cos(kj * x) * std::cos(kj * y));
    }
    return (1.0 + 2.0 * sum) / length_;
}

double NeumannHeatKernel::image_sum(double x, double y, double t) const {
    const double four_t = 4.0 * t;
    const double norm = 1.0 / std::sqrt(std::numbers::pi * four_t);
    auto g = [four_t](double z) { return std::exp(-(z * z) / four_t); };
    const double d = x - y;
    const double s = x + y;
    double sum = g(d) + g(s);
    for (int n = 1; n <= options_.image_pairs; ++n) {
        const double shift = 2.0 * static_cast<double>(n) * length_;
        // Pairs are added before accumulation so swapping x and y only commutes them.
        sum += g(d + shift) + g(d - shift);
        sum += g(s + shift) + g(s - shift);
    }
    return norm * sum;
}

double NeumannHeatKernel::operator()(double x, double y, double t) const {
    if (!(t >= kMinKernelTime)) {
        std::ostringstream os;
        os << "kernel evaluated at t = " << t;
        throw Error(ErrorCode::TimeTooSmall, os.str());
    }
    return t < t_switch_ ? image_sum(x, y, t) : eigen_sum(x, y, t);
}

Eigen::MatrixXd NeumannHeatKernel::matrix(std::span<const double> xs, std::span<const double> ys,
                                          double t) const {
    if (!(t >= kMinKernelTime)) {
        std::ostringstream os;
        os << "kernel evaluated at t = " << t;
        throw Error(ErrorCode::TimeTooSmall, os.str());
    }
    const auto nx = static_cast<Eigen::Index>(xs.size());
    const auto ny = static_cast<Eigen::Index>(ys.size());
    Eigen::MatrixXd out(nx, ny);
    if (t < t_switch_) {
        for (Eigen::Index i = 0; i < nx; ++i) {
            for (Eigen::Index k = 0; k < ny; ++k) out(i, k) = image_sum(xs[i], ys[k], t);
        }
        return out;
    }
    const auto modes = static_cast<Eigen::Index>(modes_for(t));
    const double k = std::numbers::pi / length_;
    Eigen::MatrixXd cx(modes, nx);
    Eigen::MatrixXd cy(modes, ny);
    Eigen::VectorXd decay(modes);
    for (Eigen::Index j = 0; j < modes; ++j) {
        const double kj = k * static_cast<double>(j + 1);
        decay(j) = 2.0 * std::exp(-kj * kj * t) / length_;
        for (Eigen::Index i = 0; i < nx; ++i) cx(j, i) = std::cos(kj * xs[i]);
        for (Eigen::Index i = 0; i < ny; ++i) cy(j, i) = std::cos(kj * ys[i]);
    }
    out = cx.transpose() * decay.asDiagonal() * cy;
    out.array() += 1.0 / length_;
    return out;
}

double SpaceTimeField::sup_difference(const SpaceTimeField& other) const {
    return (values - other.values).cwiseAbs().maxCoeff();
}

void PicardConfig::validate() const {
    if (space_nodes < 3 || time_nodes < 3) {
        throw Error(ErrorCode::InvalidParameter, "Picard grid needs at least 3 nodes per axis");
    }
    if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidParameter, "Picard tolerance must be > 0");
    if (!(t_final > 0.0)) throw Error(ErrorCode::InvalidParameter, "Picard t_final must be > 0");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw Error(ErrorCode::InvalidParameter, "Picard epsilon must lie in [0, 1)");
    }
}

namespace {

// Weighted kernel matrix with rows rescaled to unit discrete integral.
Eigen::MatrixXd weighted_kernel(const NeumannHeatKernel& kernel, const std::vector<double>& x,
                                const Eigen::VectorXd& weights, double t) {
    Eigen::MatrixXd g = kernel.matrix(x, x, t) * weights.asDiagonal();
    const Eigen::VectorXd row_sums = g.rowwise().sum();
    for (Eigen::Index i = 0; i < g.rows(); ++i) g.row(i) /= row_sums(i);
    return g;
}

}  // namespace

PicardOperator::PicardOperator(const Problem& problem, const PicardConfig& cfg)
    : problem_(problem), cfg_(cfg) {
    validate_numeric_params(problem.params);
    cfg.validate();
    problem.kernel.check_nonnegative(problem.domain.length(), cfg.t_final);

    const double length = problem.domain.length();
    const std::size_t n = cfg.space_nodes;
    const std::size_t m = cfg.time_nodes;
    x_ = linspace(0.0, length, n);
    t_ = linspace(0.0, cfg.t_final, m);
    dt_ = cfg.t_final / static_cast<double>(m - 1);

    const std::vector<double> source_nodes = problem.domain.node_positions();
    u0_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        u0_[i] = interpolate_linear(source_nodes, problem.initial.values(), x_[i]);
    }

    const NeumannHeatKernel kernel(length);
    const std::vector<double> w = trapezoid_weights(n, length / static_cast<double>(n - 1));
    const Eigen::VectorXd weights = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());

    lag_.resize(m);
    for (std::size_t d = 1; d < m; ++d) {
        lag_[d] = weighted_kernel(kernel, x_, weights, dt_ * static_cast<double>(d));
    }
    half_lag_ = weighted_kernel(kernel, x_, weights, 0.5 * dt_);

    const auto ni = static_cast<Eigen::Index>(n);
    const auto mi = static_cast<Eigen::Index>(m);
    const Eigen::Map<const Eigen::VectorXd> u0(u0_.data(), ni);
    initial_term_.resize(ni, mi);
    initial_term_.col(0) = u0;
    for (std::size_t j = 1; j < m; ++j) initial_term_.col(static_cast<Eigen::Index>(j)) = lag_[j] * u0;

    // Boundary product integration. For lag intervals at or beyond t_switch the
    // cosine expansion is evaluated with the mode decay shared across nodes.
    const double k = std::numbers::pi / length;
    const std::size_t max_modes = kernel.modes_for(kernel.t_switch());
    Eigen::MatrixXd cos_table(static_cast<Eigen::Index>(max_modes), ni);
    for (std::size_t j = 0; j < max_modes; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            cos_table(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                std::cos(k * static_cast<double>(j + 1) * x_[i]);
        }
    }

    for (int b = 0; b < 2; ++b) {
        const double xi = b == 0 ? 0.0 : length;
        boundary_near_[b] = Eigen::MatrixXd::Zero(ni, mi - 1);
        boundary_far_[b] = Eigen::MatrixXd::Zero(ni, mi - 1);

        // Values of G(x_i, ξ; s) for all nodes at one lag s.
        Eigen::VectorXd column(ni);
        auto kernel_column = [&](double s) {
            if (s < kernel.t_switch()) {
                for (std::size_t i = 0; i < n; ++i) column(static_cast<Eigen::Index>(i)) = kernel.image_sum(x_[i], xi, s);
                return;
            }
            const auto modes = static_cast<Eigen::Index>(std::min(kernel.modes_for(s), max_modes));
            Eigen::VectorXd coef(modes);
            for (Eigen::Index j = 0; j < modes; ++j) {
                const double kj = k * static_cast<double>(j + 1);
                const double sign = (b == 1 && (j % 2 == 0)) ? -1.0 : 1.0;  // cos(jπ) for the right end
                coef(j) = sign * 2.0 * std::exp(-kj * kj * s) / length;
            }
            column = cos_table.topRows(modes).transpose() * coef;
            column.array() += 1.0 / length;
        };

        for (std::size_t e = 0; e + 1 < m; ++e) {
            const double s0 = dt_ * static_cast<double>(e);
            Eigen::VectorXd p0 = Eigen::VectorXd::Zero(ni);
            Eigen::VectorXd p1 = Eigen::VectorXd::Zero(ni);
            if (e == 0) {
                // s = r^2 removes the 1/sqrt(s) singularity at the boundary node.
                const double r_max = std::sqrt(dt_);
                const double half = 0.5 * r_max;
                for (unsigned g = 0; g < Gauss::abscissa().size(); ++g) {
                    const double a = Gauss::abscissa()[g];
                    const double wg = Gauss::weights()[g] * half;
                    for (double r : (a == 0.0 ? std::vector<double>{half} : std::vector<double>{half - half * a, half + half * a})) {
                        const double s = r * r;
                        kernel_column(s);
                        p0 += (wg * 2.0 * r) * column;
                        p1 += (wg * 2.0 * r * s / dt_) * column;
                    }
                }
            } else {
                const double half = 0.5 * dt_;
                const double mid = s0 + half;
                for (unsigned g = 0; g < Gauss::abscissa().size(); ++g) {
                    const double a = Gauss::abscissa()[g];
                    const double wg = Gauss::weights()[g] * half;
                    for (double s : (a == 0.0 ? std::vector<double>{mid} : std::vector<double>{mid - half * a, mid + half * a})) {
                        kernel_column(s);
                        p0 += wg * column;
                        p1 += (wg * (s - s0) / dt_) * column;
                    }
                }
            }
            boundary_near_[b].col(static_cast<Eigen::Index>(e)) = p0 - p1;
            boundary_far_[b].col(static_cast<Eigen::Index>(e)) = p1;
        }
    }
}

SpaceTimeField PicardOperator::constant_extension() const {
    SpaceTimeField field;
    field.x = x_;
    field.t = t_;
    const auto ni = static_cast<Eigen::Index>(x_.size());
    field.values = Eigen::Map<const Eigen::VectorXd>(u0_.data(), ni).replicate(1, static_cast<Eigen::Index>(t_.size()));
    return field;
}

SpaceTimeField PicardOperator::apply(const SpaceTimeField& v, const SpaceTimeField& w) const {
    const auto n = static_cast<Eigen::Index>(x_.size());
    const auto m = static_cast<Eigen::Index>(t_.size());
    if (v.values.rows() != n || v.values.cols() != m || w.values.rows() != n ||
        w.values.cols() != m) {
        throw Error(ErrorCode::InvalidParameter, "Picard field does not match the operator grid");
    }
    const ModelParams& prm = problem_.params;
    const double regularizer = cfg_.epsilon > 0.0 ? std::pow(cfg_.epsilon, prm.m) : 0.0;

    // Memory, interior source and boundary flux from the iterate.
    Eigen::MatrixXd source(n, m);
    Eigen::MatrixXd flux(2, m);
    const std::vector<double> wy = trapezoid_weights(x_.size(), problem_.domain.length() / static_cast<double>(n - 1));
    Eigen::VectorXd memory = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd prev_pow(n);
    std::vector<double> kernel_row(x_.size());
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double vij = std::max(v.values(i, j), 0.0);
            const double wij = std::max(w.values(i, j), 0.0);
            const double vq = nonneg_pow(vij, prm.q);
            if (j > 0) memory(i) += 0.5 * dt_ * (prev_pow(i) + vq);
            prev_pow(i) = vq;
            source(i, j) = prm.a * nonneg_pow(vij, prm.p) * memory(i) +
                           prm.b * (regularizer - nonneg_pow(wij, prm.m));
        }
        for (int b = 0; b < 2; ++b) {
            problem_.kernel.sample(b == 0 ? Boundary::left : Boundary::right, t_[static_cast<std::size_t>(j)], x_, kernel_row);
            double total = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                total += wy[static_cast<std::size_t>(i)] * kernel_row[static_cast<std::size_t>(i)] *
                         nonneg_pow(std::max(v.values(i, j), 0.0), prm.l);
            }
            flux(b, j) = total;
        }
    }

    Eigen::MatrixXd out = initial_term_;

    // Interior: trapezoid over whole lag intervals, midpoint kernel on the last one.
    for (Eigen::Index d = 1; d < m; ++d) {
        const Eigen::MatrixXd products = lag_[static_cast<std::size_t>(d)] * source.leftCols(m - d);
        for (Eigen::Index k = 0; k + d < m; ++k) {
            const Eigen::Index j = k + d;
            if (j < 2) continue;
            const double weight = (k == 0 || d == 1) ? 0.5 : 1.0;
            out.col(j) += (dt_ * weight) * products.col(k);
        }
    }
    const Eigen::MatrixXd last_slice =
        half_lag_ * (0.5 * dt_ * (source.leftCols(m - 1) + source.rightCols(m - 1)));
    out.rightCols(m - 1) += last_slice;

    // Boundary: product integration against piecewise-linear flux.
    for (int b = 0; b < 2; ++b) {
        for (Eigen::Index j = 1; j < m; ++j) {
            for (Eigen::Index e = 0; e < j; ++e) {
                out.col(j) += boundary_near_[b].col(e) * flux(b, j - e) +
                              boundary_far_[b].col(e) * flux(b, j - e - 1);
            }
        }
    }

    SpaceTimeField result;
    result.x = x_;
    result.t = t_;
    result.values = std::move(out);
    return result;
}

SpaceTimeField picard_apply(const SpaceTimeField& v, const SpaceTimeField& u_prev,
                            const Problem& problem, const PicardConfig& cfg) {
    return PicardOperator(problem, cfg).apply(v, u_prev);
}

PicardResult picard_solve(const Problem& problem, const PicardConfig& cfg) {
    const PicardOperator op(problem, cfg);
    PicardResult result;
    SpaceTimeField current = op.constant_extension();
    std::size_t stalls = 0;
    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        SpaceTimeField next = op.apply(current, current);
        for (Eigen::Index c = 0; c < next.values.size(); ++c) {
            double& value = next.values.data()[c];
            if (value < 0.0) {
                value = 0.0;
                ++result.clamp_events;
            }
        }
        const double increment = next.sup_difference(current);
        if (!std::isfinite(increment)) {
            throw Error(ErrorCode::NoContraction, "Picard iterate became non-finite");
        }
        if (!result.increments.empty() && increment >= result.increments.back()) {
            if (++stalls >= cfg.stall_limit) {
                std::ostringstream os;
                os << "increments failed to decrease " << stalls << " times in a row (last "
                   << increment << "); reduce t_final";
                throw Error(ErrorCode::NoContraction, os.str());
            }
        } else {
            stalls = 0;
        }
        result.increments.push_back(increment);
        current = std::move(next);
        if (increment < cfg.tolerance) {
            result.converged = true;
            break;
        }
    }
    result.iterations = result.increments.empty() ? 0 : result.increments.size() - 1;
    result.solution = std::move(current);
    return result;
}

KernelIdentityReport check_kernel_identities(const NeumannHeatKernel& kernel,
                                             std::size_t samples, std::uint64_t seed,
                                             double t_min, double t_max) {
    using boost::math::quadrature::gauss_kronrod;
    if (!(t_min >= 1e-10 && t_max >= t_min)) {
        throw Error(ErrorCode::InvalidParameter, "need 1e-10 <= t_min <= t_max");
    }
    const double L = kernel.length();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    KernelIdentityReport report;
    report.seed = seed;
    report.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < samples; ++n) {
        KernelIdentitySample s;
        s.x = L * unit(rng);
        s.y = L * unit(rng);
        s.t = t_min * std::pow(t_max / t_min, unit(rng));
        auto g = [&](double y) { return kernel(s.x, y, s.t); };
        double mass = 0.0;
        if (s.x > 0.0) mass += gauss_kronrod<double, 31>::integrate(g, 0.0, s.x, 15, 1e-12);
        if (s.x < L) mass += gauss_kronrod<double, 31>::integrate(g, s.x, L, 15, 1e-12);
        s.mass_error = std::abs(mass - 1.0);
        s.value = kernel(s.x, s.y, s.t);
        s.asymmetry = std::abs(s.value - kernel(s.y, s.x, s.t));
        report.max_mass_error = std::max(report.max_mass_error, s.mass_error);
        report.min_value = std::min(report.min_value, s.value);
        report.max_asymmetry = std::max(report.max_asymmetry, s.asymmetry);
        report.samples.push_back(s);
    }
    report.pass = report.max_mass_error <= 1e-8 && report.min_value >= -1e-12 &&
                  report.max_asymmetry <= 1e-12;
    return report;
}

}  // namespace memlab
