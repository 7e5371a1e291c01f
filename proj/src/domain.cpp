#include "ilpp/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ilpp/error.hpp"

namespace ilpp {

RectangleDomain::RectangleDomain(double l, double b) : l_(l), b_(b) {
    if (!(l > 0.0) || !std::isfinite(l)) {
        throw ValidationError("rectangle: l must be positive and finite");
    }
    if (!(std::abs(b) < l)) {
        std::ostringstream msg;
        msg << "rectangle: need |b| < l, got l = " << l << ", b = " << b;
        throw ValidationError(msg.str());
    }
}

bool RectangleDomain::contains(double x, double y, double tol) const {
    return x >= -tol && x <= l_ + tol && std::abs(y) <= x + tol && std::abs(b_ - y) <= l_ - x + tol;
}

std::pair<double, double> RectangleDomain::y_range(double x) const {
    return {std::max(-x, b_ - (l_ - x)), std::min(x, b_ + (l_ - x))};
}

std::pair<double, double> RectangleDomain::project(double x, double y) const {
    const double xc = std::clamp(x, 0.0, l_);
    const auto [lo, hi] = y_range(xc);
    return {xc, std::clamp(y, lo, std::max(lo, hi))};
}

std::pair<double, double> RectangleDomain::at(double u, double v) const {
    const double a = (l_ + b_) / 2;
    const double c = (l_ - b_) / 2;
    return {u * a + v * c, u * a - v * c};
}

double gamma(double w) {
    const double aw = std::abs(w);
    if (!(aw <= 1.0 + kGammaClampBand)) {
        std::ostringstream msg;
        msg << "gamma: slope " << w << " outside [-1, 1]";
        throw DomainError(msg.str());
    }
    if (aw >= 1.0) {
        return 1.0;
    }
    return 1.0 + std::sqrt(1.0 - w * w);
}

GammaDerivatives gamma_derivatives(double w) {
    if (!(std::abs(w) < 1.0)) {
        std::ostringstream msg;
        msg << "gamma_derivatives: need |w| < 1, got " << w;
        throw DomainError(msg.str());
    }
    const double u2 = 1.0 - w * w;
    const double u = std::sqrt(u2);
    return {-w / u, -1.0 / (u2 * u)};
}

double gamma_curvature_ratio(double w) {
    const auto [g1, g2] = gamma_derivatives(w);
    return g1 * g1 / (-gamma(w) * g2);
}

}  // namespace ilpp
