#include "ilpp/variational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "ilpp/error.hpp"

namespace ilpp {

namespace {

double clamped_slope(double dy, double dx) { return std::clamp(dy / dx, -1.0, 1.0); }

int checked_ratio(double num, double den, const char* what) {
    const double q = num / den;
    const double r = std::round(q);
    if (r < 1.0 || std::abs(q - r) > 1e-9 * std::max(1.0, q) || r > 1e8) {
        std::ostringstream msg;
        msg << "path space: " << what << " must be a positive integer, got " << q;
        throw ValidationError(msg.str());
    }
    return static_cast<int>(r);
}

}  // namespace

double functional_eval(const LipschitzPath& y, const AlphaField& field) {
    const auto xs = y.x();
    const auto ys = y.y();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double dx = xs[i + 1] - xs[i];
        const double xm = 0.5 * (xs[i] + xs[i + 1]);
        const double ym = 0.5 * (ys[i] + ys[i + 1]);
        total += field.value(xm, ym) * gamma(clamped_slope(ys[i + 1] - ys[i], dx)) * dx;
    }
    return total;
}

double riemann_upper(const LipschitzPath& y, const AlphaField& field, int m) {
    if (m < 1) {
        throw ValidationError("riemann_upper: m must be at least 1");
    }
    const double l = y.domain().l();
    const auto xs = y.x();
    const auto ys = y.y();
    auto alpha_on_curve = [&](double x) { return field.value(x, y.at(x)); };

    double total = 0.0;
    for (int i = 1; i <= m; ++i) {
        const double a = l * (i - 1) / m;
        const double b = i == m ? l : l * i / m;

        double sup = -std::numeric_limits<double>::infinity();
        // Curve vertices and segment midpoints inside the strip.
        for (std::size_t k = 0; k < xs.size(); ++k) {
            if (xs[k] >= a && xs[k] <= b) {
                sup = std::max(sup, field.value(xs[k], ys[k]));
            }
            if (k + 1 < xs.size()) {
                const double xm = 0.5 * (xs[k] + xs[k + 1]);
                if (xm >= a && xm <= b) {
                    sup = std::max(sup, field.value(xm, 0.5 * (ys[k] + ys[k + 1])));
                }
            }
        }
        std::size_t n = 16;
        for (std::size_t k = 0; k <= n; ++k) {
            sup = std::max(sup, alpha_on_curve(a + (b - a) * static_cast<double>(k) / static_cast<double>(n)));
        }
        for (; n < (std::size_t{1} << 20); n *= 2) {
            double refined = sup;
            for (std::size_t k = 1; k < 2 * n; k += 2) {
                refined = std::max(refined, alpha_on_curve(a + (b - a) * static_cast<double>(k) / static_cast<double>(2 * n)));
            }
            const bool settled = refined - sup < 1e-10;
            sup = refined;
            if (settled) {
                break;
            }
        }
        const double w = clamped_slope(y.at(b) - y.at(a), b - a);
        total += (b - a) * sup * gamma(w);
    }
    return total;
}

DiscretizedPathSpace DiscretizedPathSpace::counts(int n_x, int n_y) {
    if (n_x < 1 || n_y < 1 || n_y % n_x != 0) {
        std::ostringstream msg;
        msg << "path space: need n_x >= 1 and n_y a positive multiple of n_x, got " << n_x << ", " << n_y;
        throw ValidationError(msg.str());
    }
    DiscretizedPathSpace s;
    s.by_counts_ = true;
    s.n_x_ = n_x;
    s.n_y_ = n_y;
    return s;
}

DiscretizedPathSpace DiscretizedPathSpace::steps(double dx, double dy) {
    if (!(dx > 0.0) || !(dy > 0.0)) {
        throw ValidationError("path space: steps must be positive");
    }
    checked_ratio(dx, dy, "dx / dy");
    DiscretizedPathSpace s;
    s.by_counts_ = false;
    s.dx_ = dx;
    s.dy_ = dy;
    return s;
}

int DiscretizedPathSpace::Grid::level_lo(int c) const { return std::max(-c * ratio, end_level - (columns - c) * ratio); }

int DiscretizedPathSpace::Grid::level_hi(int c) const { return std::min(c * ratio, end_level + (columns - c) * ratio); }

DiscretizedPathSpace::Grid DiscretizedPathSpace::resolve(const RectangleDomain& domain) const {
    Grid g{};
    if (by_counts_) {
        g.columns = n_x_;
        g.ratio = n_y_ / n_x_;
        g.dx = domain.l() / n_x_;
        g.dy = domain.l() / n_y_;
    } else {
        g.columns = checked_ratio(domain.l(), dx_, "l / dx");
        g.ratio = checked_ratio(dx_, dy_, "dx / dy");
        g.dx = dx_;
        g.dy = dy_;
    }
    const double e = domain.b() / g.dy;
    const double er = std::round(e);
    if (std::abs(e - er) > 1e-9 * std::max(1.0, std::abs(e))) {
        std::ostringstream msg;
        msg << "path space: endpoint b = " << domain.b() << " is not on a level of step " << g.dy;
        throw ValidationError(msg.str());
    }
    g.end_level = static_cast<int>(er);
    if (std::abs(g.end_level) >= g.columns * g.ratio) {
        throw ValidationError("path space: endpoint unreachable under the slope bound");
    }
    return g;
}

MidpointCache::MidpointCache(AlphaField field, double dx, double dy) : field_(std::move(field)), dx_(dx), dy_(dy) {
    if (!(dx > 0.0) || !(dy > 0.0)) {
        throw ValidationError("midpoint cache: steps must be positive");
    }
    checked_ratio(dx, dy, "dx / dy");
}

double MidpointCache::at(int column, int half_level) {
    const auto c = static_cast<std::size_t>(column);
    if (c >= columns_.size()) {
        columns_.resize(c + 1);
        offsets_.resize(c + 1, 0);
    }
    auto& col = columns_[c];
    // |half level| <= (2c + 1) dx/dy for every edge leaving column c.
    const int reach = static_cast<int>(std::lround(dx_ / dy_)) * (2 * column + 1);
    if (col.empty()) {
        col.assign(static_cast<std::size_t>(2 * reach + 1), std::numeric_limits<double>::quiet_NaN());
        offsets_[c] = reach;
    }
    const int idx = half_level + offsets_[c];
    if (idx < 0 || idx >= static_cast<int>(col.size())) {
        throw DomainError("midpoint cache: edge midpoint outside the slope cone");
    }
    double& slot = col[static_cast<std::size_t>(idx)];
    if (std::isnan(slot)) {
        slot = field_.value((column + 0.5) * dx_, 0.5 * half_level * dy_);
        if (!std::isfinite(slot)) {
            throw NumericalError("alpha is not finite at an edge midpoint");
        }
    }
    return slot;
}

VariationalSolution variational_dp(const RectangleDomain& domain, const DiscretizedPathSpace& space,
                                   MidpointCache& cache) {
    const auto g = space.resolve(domain);
    if (std::abs(g.dx - cache.dx()) > 1e-12 * g.dx || std::abs(g.dy - cache.dy()) > 1e-12 * g.dy) {
        throw ValidationError("variational_dp: cache steps do not match the path space");
    }
    const int r = g.ratio;
    std::vector<double> edge_gamma(static_cast<std::size_t>(2 * r + 1));
    for (int k = -r; k <= r; ++k) {
        edge_gamma[static_cast<std::size_t>(k + r)] = gamma(static_cast<double>(k) / r) * g.dx;
    }

    std::vector<std::vector<std::int32_t>> back(static_cast<std::size_t>(g.columns) + 1);
    std::vector<double> prev{0.0};
    std::vector<double> cur;
    for (int c = 0; c < g.columns; ++c) {
        const int plo = g.level_lo(c);
        const int phi = g.level_hi(c);
        const int lo = g.level_lo(c + 1);
        const int hi = g.level_hi(c + 1);
        cur.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
        auto& bk = back[static_cast<std::size_t>(c) + 1];
        bk.assign(cur.size(), 0);
        for (int q = lo; q <= hi; ++q) {
            double best = -std::numeric_limits<double>::infinity();
            int best_from = 0;
            const int from_lo = std::max(plo, q - r);
            const int from_hi = std::min(phi, q + r);
            for (int p = from_lo; p <= from_hi; ++p) {
                const int k = q - p;
                const double v = prev[static_cast<std::size_t>(p - plo)] +
                                 cache.at(c, 2 * p + k) * edge_gamma[static_cast<std::size_t>(k + r)];
                const double eps = 1e-12 * std::max(std::abs(v), std::abs(best));
                if (p == from_lo || v > best + eps) {
                    best = v;
                    best_from = p;
                } else if (v >= best - eps) {
                    const int ap = std::abs(p);
                    const int ab = std::abs(best_from);
                    if (ap < ab || (ap == ab && p < best_from)) {
                        best = std::max(best, v);
                        best_from = p;
                    }
                }
            }
            cur[static_cast<std::size_t>(q - lo)] = best;
            bk[static_cast<std::size_t>(q - lo)] = best_from;
        }
        std::swap(prev, cur);
    }
    const double g_star = prev[0];

    std::vector<double> xs(static_cast<std::size_t>(g.columns) + 1);
    std::vector<double> ys(xs.size());
    int q = g.end_level;
    for (int c = g.columns; c >= 0; --c) {
        xs[static_cast<std::size_t>(c)] = c * g.dx;
        ys[static_cast<std::size_t>(c)] = q * g.dy;
        if (c > 0) {
            q = back[static_cast<std::size_t>(c)][static_cast<std::size_t>(q - g.level_lo(c))];
        }
    }
    xs.back() = domain.l();
    ys.back() = domain.b();
    ys.front() = 0.0;
    return {g_star, LipschitzPath(domain, std::move(xs), std::move(ys))};
}

VariationalSolution variational_dp(const AlphaField& field, const DiscretizedPathSpace& space) {
    const auto g = space.resolve(field.domain());
    MidpointCache cache(field, g.dx, g.dy);
    return variational_dp(field.domain(), space, cache);
}

std::vector<RefinementPoint> refinement_study(const AlphaField& field,
                                              std::span<const std::pair<int, int>> resolutions) {
    std::vector<RefinementPoint> out;
    out.reserve(resolutions.size());
    for (const auto& [nx, ny] : resolutions) {
        out.push_back({nx, ny, variational_dp(field, DiscretizedPathSpace::counts(nx, ny)).g_star});
    }
    return out;
}

}  // namespace ilpp
