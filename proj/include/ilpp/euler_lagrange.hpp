#pragma once

#include <string>
#include <vector>

#include "ilpp/alpha_field.hpp"
#include "ilpp/domain.hpp"
#include "ilpp/path.hpp"

namespace ilpp {

/// Right-hand side of the Euler-Lagrange system y' = w,
///   w' = -(1/alpha) [alpha_y (1 - w^2)^{3/2} + (alpha_x w + alpha_y)(1 - w^2)].
/// Exactly zero on |w| = 1. Throws DomainError outside Q and NumericalError
/// if alpha is not positive or drops more than 0.1% below the field's
/// alpha_min.
double el_rhs(const AlphaField& field, double x, double y, double w);

struct TrajectorySample {
    double x;
    double y;
    double w;
};

struct ShootingSolution {
    double w0;
    std::vector<TrajectorySample> trajectory;
    double endpoint_error;  ///< y(l) - b

    /// The trajectory as a member of X. The residual endpoint error is removed
    /// by the linear correction y - endpoint_error x / l.
    LipschitzPath as_path(const RectangleDomain& domain) const;
};

/// Default integrator step l / 2000.
inline constexpr int kDefaultShootingSteps = 2000;

/// Classical fixed-step RK4 from y(0) = 0, w(0) = w0 to x = l. w is clamped
/// to [-1, 1] after every step (and inside stage evaluations), so {w = +-1}
/// stays invariant. The state is not confined to Q: alpha and its derivatives
/// are queried at the projection of (x, y) onto Q. A step h that does not
/// divide l is shrunk to l / ceil(l / h).
///
/// Throws ValidationError unless |w0| <= 1, 0 < h <= l/100 and the field
/// declares alpha_min > 0.
ShootingSolution shoot(const AlphaField& field, const RectangleDomain& domain, double w0, double h);

struct BvpOptions {
    double tol = 1e-10;
    int scan_points = 512;
    double h = 0.0;  ///< 0 selects l / kDefaultShootingSteps
};

struct BvpResult {
    std::vector<ShootingSolution> roots;  ///< ordered by w0
    std::vector<std::string> warnings;
    double scan_spacing;
};

/// Shooting for y(l) = b. Scans F(w0) = y(l) - b on a uniform grid of
/// scan_points values of w0 in [-1, 1], bisects every sign change down to
/// |F| <= tol and returns all distinct roots. F(-1) = -l - b < 0 < l - b = F(1)
/// guarantees at least one root. Roots closer than the scan spacing produce a
/// warning (a pair inside one scan cell would be missed).
BvpResult solve_bvp(const AlphaField& field, const RectangleDomain& domain, const BvpOptions& options = {});

}  // namespace ilpp
