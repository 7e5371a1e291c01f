#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ilpp/alpha_field.hpp"
#include "ilpp/domain.hpp"
#include "ilpp/path.hpp"

namespace ilpp {

/// Integral of alpha(x, y(x)) gamma(y'(x)) over [0, l], one midpoint
/// evaluation per segment of the path's grid.
double functional_eval(const LipschitzPath& y, const AlphaField& field);

/// Upper Riemann sum over m uniform strips:
///   sum_i (l/m) [sup_{strip i} alpha(x, y(x))] gamma(m/l (y(i l/m) - y((i-1) l/m))).
/// The sup along the curve is sampled: 16 points per strip plus the path
/// vertices and segment midpoints in the strip, doubling until the sup moves
/// by less than 1e-10. Throws ValidationError if m < 1.
double riemann_upper(const LipschitzPath& y, const AlphaField& field, int m);

/// Discretization of X used by the global search. Columns sit at x = c dx,
/// levels at y = q dy with dx / dy a positive integer r; a step between
/// columns changes the level by k, |k| <= r, so slopes k/r cover [-1, 1].
class DiscretizedPathSpace {
public:
    /// dx = l / n_x and dy = l / n_y for the rectangle being solved; n_y must
    /// be a multiple of n_x.
    static DiscretizedPathSpace counts(int n_x, int n_y);
    /// Absolute steps, shared by every rectangle they are applied to.
    static DiscretizedPathSpace steps(double dx, double dy);

    /// Concrete grid on a rectangle. Throws ValidationError if l is not a
    /// multiple of dx or b is not on a level.
    struct Grid {
        int columns;  ///< number of x-steps
        int ratio;    ///< dx / dy
        int end_level;
        double dx;
        double dy;

        int level_lo(int c) const;
        int level_hi(int c) const;
    };
    Grid resolve(const RectangleDomain& domain) const;

    bool by_counts() const { return by_counts_; }
    int n_x() const { return n_x_; }
    int n_y() const { return n_y_; }
    double dx() const { return dx_; }
    double dy() const { return dy_; }

private:
    DiscretizedPathSpace() = default;

    bool by_counts_ = true;
    int n_x_ = 0;
    int n_y_ = 0;
    double dx_ = 0.0;
    double dy_ = 0.0;
};

struct VariationalSolution {
    double g_star;
    LipschitzPath y_star;
};

/// Exact maximizer of the discretized functional, edge reward
/// alpha(midpoint) gamma(k/r) dx, by a forward pass over columns and a
/// backtrack. Among predecessors whose values agree to 1e-12 (relative) the
/// one with the smallest |y| wins, then the lower one.
VariationalSolution variational_dp(const AlphaField& field, const DiscretizedPathSpace& space);

/// Memo of edge-midpoint alpha values on a fixed (dx, dy) lattice, shareable
/// between rectangles Q(l, b) solved on the same steps. Not thread-safe.
class MidpointCache {
public:
    /// `field` must be defined on every rectangle later solved with the cache.
    MidpointCache(AlphaField field, double dx, double dy);

    /// alpha((c + 1/2) dx, half_level dy / 2).
    double at(int column, int half_level);

    const AlphaField& field() const { return field_; }
    double dx() const { return dx_; }
    double dy() const { return dy_; }

private:
    AlphaField field_;
    double dx_;
    double dy_;
    std::vector<std::vector<double>> columns_;
    std::vector<int> offsets_;
};

/// variational_dp on `domain` with midpoint values drawn from `cache`. The
/// space must resolve to the cache's steps.
VariationalSolution variational_dp(const RectangleDomain& domain, const DiscretizedPathSpace& space,
                                   MidpointCache& cache);

struct RefinementPoint {
    int n_x;
    int n_y;
    double g_star;
};

/// g_star for each (n_x, n_y) resolution, in the given order.
std::vector<RefinementPoint> refinement_study(const AlphaField& field,
                                              std::span<const std::pair<int, int>> resolutions);

}  // namespace ilpp
