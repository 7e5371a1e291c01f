#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ilpp/domain.hpp"

namespace ilpp {

/// Slack on the discrete 1-Lipschitz condition |y_{i+1} - y_i| <= x_{i+1} - x_i.
inline constexpr double kLipschitzTol = 1e-12;

/// Piecewise-linear member of X = {y : [0,l] -> R, y(0) = 0, y(l) = b, 1-Lipschitz}.
/// The constructor validates the grid, the endpoints, the Lipschitz bound and
/// membership of every node in Q; violations throw ValidationError.
class LipschitzPath {
public:
    LipschitzPath(const RectangleDomain& domain, std::vector<double> x, std::vector<double> y);

    /// Uniform grid x_i = i l / (y.size() - 1).
    static LipschitzPath uniform(const RectangleDomain& domain, std::vector<double> y);
    /// Samples f at n + 1 uniform nodes.
    static LipschitzPath sample(const RectangleDomain& domain, std::size_t n,
                                const std::function<double(double)>& f);

    const RectangleDomain& domain() const { return domain_; }
    std::span<const double> x() const { return x_; }
    std::span<const double> y() const { return y_; }
    std::size_t size() const { return x_.size(); }

    /// Linear interpolation; x is clamped to [0, l].
    double at(double x) const;

    /// Mirror image y -> -y, living on the rectangle with endpoint (l, -b).
    LipschitzPath reflected() const;

private:
    RectangleDomain domain_;
    std::vector<double> x_;
    std::vector<double> y_;
};

}  // namespace ilpp
