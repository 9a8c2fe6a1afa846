#include "memlab/error.hpp"
#include "memlab/numerics.hpp"
#include "memlab/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace memlab {

namespace {

constexpr std::size_t kSupSamples = 201;

void validate_table(const KernelTable& table, const char* which) {
    auto increasing = [](const std::vector<double>& v) {
        return std::adjacent_find(v.begin(), v.end(),
                                  [](double a, double b) { return !(a < b); }) == v.end();
    };
    if (table.y.size() < 2 || table.t.size() < 2) {
        throw Error(ErrorCode::InvalidKernel,
                    std::string(which) + " table needs at least two y and two t samples");
    }
    if (!increasing(table.y) || !increasing(table.t)) {
        throw Error(ErrorCode::InvalidKernel,
                    std::string(which) + " table abscissae must be strictly increasing");
    }
    if (table.values.size() != table.y.size() * table.t.size()) {
        throw Error(ErrorCode::InvalidKernel, std::string(which) + " table is not rectangular");
    }
    for (double v : table.values) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw Error(ErrorCode::InvalidKernel,
                        std::string(which) + " table contains a negative or non-finite value");
        }
    }
}

}  // namespace

double KernelTable::at(double yq, double tq) const {
    // A few ulps of slack so grid endpoints computed in floating point still hit the table.
    const double y_slack = 1e-12 * std::max(1.0, std::abs(y.back()));
    const double t_slack = 1e-12 * std::max(1.0, std::abs(t.back()));
    if (yq < y.front() - y_slack || yq > y.back() + y_slack || tq < t.front() - t_slack ||
        tq > t.back() + t_slack) {
        std::ostringstream os;
        os << "query (y=" << yq << ", t=" << tq << ") outside tabulated range";
        throw Error(ErrorCode::InvalidKernel, os.str());
    }
    yq = std::clamp(yq, y.front(), y.back());
    tq = std::clamp(tq, t.front(), t.back());

    auto bracket = [](const std::vector<double>& xs, double x) {
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t hi = static_cast<std::size_t>(it - xs.begin());
        hi = std::clamp<std::size_t>(hi, 1, xs.size() - 1);
        const std::size_t lo = hi - 1;
        return std::pair{lo, (x - xs[lo]) / (xs[hi] - xs[lo])};
    };
    const auto [iy, wy] = bracket(y, yq);
    const auto [it, wt] = bracket(t, tq);
    const std::size_t ny = y.size();
    const double v00 = values[it * ny + iy];
    const double v01 = values[it * ny + iy + 1];
    const double v10 = values[(it + 1) * ny + iy];
    const double v11 = values[(it + 1) * ny + iy + 1];
    return (1.0 - wt) * ((1.0 - wy) * v00 + wy * v01) + wt * ((1.0 - wy) * v10 + wy * v11);
}

BoundaryKernel BoundaryKernel::zero() { return BoundaryKernel{}; }

BoundaryKernel BoundaryKernel::constant(double kappa) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
        throw Error(ErrorCode::InvalidKernel, "constant kernel value must be >= 0");
    }
    if (kappa == 0.0) return zero();
    BoundaryKernel k;
    k.kind_ = Kind::constant;
    k.kappa_ = kappa;
    std::ostringstream os;
    os << "constant " << kappa;
    k.description_ = os.str();
    return k;
}

BoundaryKernel BoundaryKernel::separable(double kappa, Profile phi, Profile eta,
                                         std::string description) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
        throw Error(ErrorCode::InvalidKernel, "separable kernel scale must be >= 0");
    }
    if (!phi || !eta) {
        throw Error(ErrorCode::InvalidKernel, "separable kernel needs both profiles");
    }
    BoundaryKernel k;
    k.kind_ = Kind::separable;
    k.kappa_ = kappa;
    k.phi_ = std::move(phi);
    k.eta_ = std::move(eta);
    k.description_ = std::move(description);
    return k;
}

BoundaryKernel BoundaryKernel::tabulated(KernelTable left, KernelTable right) {
    validate_table(left, "left");
    validate_table(right, "right");
    BoundaryKernel k;
    k.kind_ = Kind::tabulated;
    k.left_ = std::move(left);
    k.right_ = std::move(right);
    k.description_ = "tabulated";
    return k;
}

double BoundaryKernel::operator()(Boundary b, double y, double t) const {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::constant: return kappa_;
        case Kind::separable: return kappa_ * phi_(y) * eta_(t);
        case Kind::tabulated: return (b == Boundary::left ? left_ : right_).at(y, t);
    }
    return 0.0;
}

void BoundaryKernel::sample(Boundary b, double t, std::span<const double> ys,
                            std::span<double> out) const {
    switch (kind_) {
        case Kind::zero:
            std::fill(out.begin(), out.end(), 0.0);
            return;
        case Kind::constant:
            std::fill(out.begin(), out.end(), kappa_);
            return;
        case Kind::separable: {
            const double scale = kappa_ * eta_(t);
            for (std::size_t i = 0; i < ys.size(); ++i) out[i] = scale * phi_(ys[i]);
            return;
        }
        case Kind::tabulated: {
            const KernelTable& table = b == Boundary::left ? left_ : right_;
            for (std::size_t i = 0; i < ys.size(); ++i) out[i] = table.at(ys[i], t);
            return;
        }
    }
}

double BoundaryKernel::sup(double length, double t_max) const {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::constant: return kappa_;
        case Kind::separable: {
            double phi_max = 0.0;
            double eta_max = 0.0;
            for (double y : linspace(0.0, length, kSupSamples)) phi_max = std::max(phi_max, phi_(y));
            for (double t : linspace(0.0, t_max, kSupSamples)) eta_max = std::max(eta_max, eta_(t));
            return kappa_ * phi_max * eta_max;
        }
        case Kind::tabulated: {
            // Bilinear interpolation attains its extrema at table nodes.
            double s = 0.0;
            for (const KernelTable* table : {&left_, &right_}) {
                for (std::size_t it = 0; it < table->t.size(); ++it) {
                    if (it > 0 && table->t[it - 1] >= t_max) break;
                    for (std::size_t iy = 0; iy < table->y.size(); ++iy) {
                        s = std::max(s, table->values[it * table->y.size() + iy]);
                    }
                }
            }
            return s;
        }
    }
    return 0.0;
}

void BoundaryKernel::check_nonnegative(double length, double t_max) const {
    if (kind_ != Kind::separable) return;  // other kinds are validated on construction
    for (double y : linspace(0.0, length, kSupSamples)) {
        if (!(phi_(y) >= 0.0)) {
            throw Error(ErrorCode::InvalidKernel, "separable kernel profile phi(y) < 0");
        }
    }
    for (double t : linspace(0.0, t_max, kSupSamples)) {
        if (!(eta_(t) >= 0.0)) {
            throw Error(ErrorCode::InvalidKernel, "separable kernel profile eta(t) < 0");
        }
    }
}

}  // namespace memlab
