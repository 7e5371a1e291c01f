#pragma once

#include <utility>

namespace ilpp {

/// Rectangle Q with vertices (0,0) and (l,b), sides of slope +-1:
///   Q = {(x,y) : 0 <= x <= l, |y| <= x, |b - y| <= l - x}.
class RectangleDomain {
public:
    /// Throws ValidationError unless l > 0 and |b| < l.
    RectangleDomain(double l, double b);

    double l() const { return l_; }
    double b() const { return b_; }

    /// Membership with an absolute slack `tol` on every constraint.
    bool contains(double x, double y, double tol = 0.0) const;

    /// Admissible y-interval of the column at abscissa x (empty if x is outside [0, l]).
    std::pair<double, double> y_range(double x) const;
    /// y-extent of the whole rectangle: [-(l-b)/2, (l+b)/2].
    double y_min() const { return -(l_ - b_) / 2; }
    double y_max() const { return (l_ + b_) / 2; }

    /// Nearest point of Q in the column x (x itself is clamped to [0, l]).
    std::pair<double, double> project(double x, double y) const;

    /// Point (x, y) of Q at rotated coordinates u, v in [0,1]:
    /// (0,0) + u * ((l+b)/2)(1,1) + v * ((l-b)/2)(1,-1).
    std::pair<double, double> at(double u, double v) const;

    bool operator==(const RectangleDomain&) const = default;

private:
    double l_;
    double b_;
};

inline constexpr double kGammaClampBand = 1e-12;

/// Homogeneous shape function 1 + sqrt(1 - w^2). Slopes with |w| <= 1 + 1e-12
/// are clamped to [-1, 1]; anything beyond throws DomainError.
double gamma(double w);

struct GammaDerivatives {
    double first;
    double second;
};

/// First and second derivative of gamma on the open interval |w| < 1.
GammaDerivatives gamma_derivatives(double w);

/// (gamma')^2 / (-gamma gamma''), equal to u(1-u) with u = sqrt(1 - w^2).
double gamma_curvature_ratio(double w);

}  // namespace ilpp
