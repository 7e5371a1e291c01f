#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ilpp/alpha_field.hpp"

namespace ilpp {

/// One sampled point where an inequality fails. `w` is NaN for checks that
/// do not involve a slope.
struct ConcavityViolation {
    double x;
    double y;
    double w;
    std::string inequality;
    double margin;
};

/// Worst (smallest-margin) sample of one inequality.
struct MarginSummary {
    double min_margin;
    double x;
    double y;
    double w;
};

struct ConcavityReport {
    bool satisfied = true;
    std::vector<ConcavityViolation> violations;
    double min_margin = 0.0;
    std::map<std::string, MarginSummary> margins;
};

// Inequality labels used in reports.
inline const std::string kCurvatureSign = "alpha_yy < 0";
inline const std::string kCurvatureBalance = "-alpha alpha_yy >= alpha_y^2 / 2";
inline const std::string kHessianTrace = "s < 0";
inline const std::string kHessianDet = "p > 0";

/// Samples alpha_yy < 0 and -alpha alpha_yy >= (alpha_y)^2 / 2 on a
/// grid_density x grid_density grid covering Q (rotated coordinates
/// u, v = i / (grid_density - 1)). Margins are -alpha_yy and
/// -alpha alpha_yy - alpha_y^2 / 2.
ConcavityReport check_condition(const AlphaField& field, int grid_density = 256);

/// Slope grid excludes |w| > 1 - 1e-3, where gamma'' diverges.
inline constexpr double kSlopeMargin = 1e-3;

/// Eigenvalue test for z(y, w) = alpha(x0, y) gamma(w) on the column x0 of Q:
/// s = alpha gamma'' + alpha_yy gamma < 0 and
/// p = alpha alpha_yy gamma gamma'' - (alpha_y gamma')^2 > 0 on a
/// grid_density x grid_density grid of (y, w), |w| <= 1 - 1e-3.
ConcavityReport hessian_eigen_check(const AlphaField& field, double x0, int grid_density = 256);

struct RatioMaximum {
    double value;
    double w;
};

/// max over a uniform grid of `samples` slopes in [0, 1 - 1e-3] of
/// (gamma')^2 / (-gamma gamma''); the ratio is even in w.
RatioMaximum gamma_ratio_sup(std::size_t samples = std::size_t{1} << 20);

}  // namespace ilpp
