#include "ilpp/concavity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ilpp/domain.hpp"
#include "ilpp/error.hpp"

namespace ilpp {

namespace {

constexpr double kNoSlope = std::numeric_limits<double>::quiet_NaN();

/// Records one sampled margin; `strict` distinguishes > 0 from >= 0.
void record(ConcavityReport& report, const std::string& name, double margin, bool strict, double x, double y,
            double w) {
    if (!std::isfinite(margin)) {
        throw NumericalError("concavity: non-finite margin for " + name);
    }
    auto [it, inserted] = report.margins.try_emplace(name, MarginSummary{margin, x, y, w});
    if (!inserted && margin < it->second.min_margin) {
        it->second = {margin, x, y, w};
    }
    if (strict ? !(margin > 0.0) : !(margin >= 0.0)) {
        report.violations.push_back({x, y, w, name, margin});
    }
}

void finish(ConcavityReport& report) {
    report.satisfied = report.violations.empty();
    report.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& [name, m] : report.margins) {
        report.min_margin = std::min(report.min_margin, m.min_margin);
    }
}

void check_density(int grid_density) {
    if (grid_density < 2) {
        throw ValidationError("concavity: grid_density must be at least 2");
    }
}

}  // namespace

ConcavityReport check_condition(const AlphaField& field, int grid_density) {
    check_density(grid_density);
    ConcavityReport report;
    const auto& q = field.domain();
    const double denom = grid_density - 1;
    for (int a = 0; a < grid_density; ++a) {
        for (int c = 0; c < grid_density; ++c) {
            const auto [x, y] = q.at(a / denom, c / denom);
            const double alpha = field.value(x, y);
            const double ay = field.gradient(x, y).dy;
            const double ayy = field.dyy(x, y);
            record(report, kCurvatureSign, -ayy, true, x, y, kNoSlope);
            record(report, kCurvatureBalance, -alpha * ayy - 0.5 * ay * ay, false, x, y, kNoSlope);
        }
    }
    finish(report);
    return report;
}

ConcavityReport hessian_eigen_check(const AlphaField& field, double x0, int grid_density) {
    check_density(grid_density);
    const auto& q = field.domain();
    if (!(x0 > 0.0 && x0 < q.l())) {
        throw ValidationError("hessian_eigen_check: x0 must lie in (0, l)");
    }
    ConcavityReport report;
    const auto [ylo, yhi] = q.y_range(x0);
    const double wmax = 1.0 - kSlopeMargin;
    const double denom = grid_density - 1;
    for (int a = 0; a < grid_density; ++a) {
        const double y = ylo + (yhi - ylo) * (a / denom);
        const double alpha = field.value(x0, y);
        const double ay = field.gradient(x0, y).dy;
        const double ayy = field.dyy(x0, y);
        for (int c = 0; c < grid_density; ++c) {
            const double w = -wmax + 2.0 * wmax * (c / denom);
            const double g = gamma(w);
            const auto [g1, g2] = gamma_derivatives(w);
            const double s = alpha * g2 + ayy * g;
            const double p = alpha * ayy * g * g2 - (ay * g1) * (ay * g1);
            record(report, kHessianTrace, -s, true, x0, y, w);
            record(report, kHessianDet, p, true, x0, y, w);
        }
    }
    finish(report);
    return report;
}

RatioMaximum gamma_ratio_sup(std::size_t samples) {
    if (samples < 2) {
        throw ValidationError("gamma_ratio_sup: need at least 2 samples");
    }
    const double wmax = 1.0 - kSlopeMargin;
    RatioMaximum best{-1.0, 0.0};
    for (std::size_t k = 0; k < samples; ++k) {
        const double w = wmax * static_cast<double>(k) / static_cast<double>(samples - 1);
        const double r = gamma_curvature_ratio(w);
        if (r > best.value) {
            best = {r, w};
        }
    }
    return best;
}

}  // namespace ilpp
