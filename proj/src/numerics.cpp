#include "memlab/numerics.hpp"
#include "memlab/error.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace memlab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::InvalidDomain: return "InvalidDomain";
        case ErrorCode::InvalidKernel: return "InvalidKernel";
        case ErrorCode::InvalidInitialData: return "InvalidInitialData";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::NoCompatibleData: return "NoCompatibleData";
        case ErrorCode::NegativeState: return "NegativeState";
        case ErrorCode::StepRejected: return "StepRejected";
        case ErrorCode::Blowup: return "Blowup";
        case ErrorCode::TimeTooSmall: return "TimeTooSmall";
        case ErrorCode::KernelEvalFailed: return "KernelEvalFailed";
        case ErrorCode::NoContraction: return "NoContraction";
        case ErrorCode::NoSupersolution: return "NoSupersolution";
        case ErrorCode::RegimeMismatch: return "RegimeMismatch";
        case ErrorCode::SearchFailed: return "SearchFailed";
        case ErrorCode::WindowEmpty: return "WindowEmpty";
        case ErrorCode::HypothesisUnmet: return "HypothesisUnmet";
        case ErrorCode::MonotonicityViolated: return "MonotonicityViolated";
    }
    return "Unknown";
}

double nonneg_pow(double base, double exponent) {
    assert(base >= 0.0);
    if (base == 0.0) {
        return exponent == 0.0 ? 1.0 : 0.0;
    }
    if (exponent == 1.0) return base;
    if (exponent == 2.0) return base * base;
    return std::pow(base, exponent);
}

double trapezoid(std::span<const double> values, double h) {
    if (values.size() < 2) return 0.0;
    double interior = 0.0;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) interior += values[i];
    return h * (0.5 * (values.front() + values.back()) + interior);
}

std::vector<double> trapezoid_weights(std::size_t n, double h) {
    std::vector<double> w(n, h);
    if (n >= 1) w.front() = 0.5 * h;
    if (n >= 2) w.back() = 0.5 * h;
    if (n == 1) w.front() = 0.0;
    return w;
}

std::vector<double> solve_tridiagonal(std::span<const double> lower,
                                      std::span<const double> diag,
                                      std::span<const double> upper,
                                      std::span<const double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n, 0.0);
    std::vector<double> x(rhs.begin(), rhs.end());
    double denom = diag[0];
    c[0] = n > 1 ? upper[0] / denom : 0.0;
    x[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * c[i - 1];
        if (i + 1 < n) c[i] = upper[i] / denom;
        x[i] = (x[i] - lower[i] * x[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] -= c[i] * x[i + 1];
    }
    return x;
}

double interpolate_linear(std::span<const double> xs, std::span<const double> ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double theta = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return (1.0 - theta) * ys[lo] + theta * ys[hi];
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

double sup_norm(std::span<const double> values) {
    double s = 0.0;
    for (double v : values) s = std::max(s, std::abs(v));
    return s;
}

}  // namespace memlab
