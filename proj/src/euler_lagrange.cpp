#include "ilpp/euler_lagrange.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ilpp/error.hpp"

namespace ilpp {

namespace {

double rhs_at(const AlphaField& field, double x, double y, double w) {
    w = std::clamp(w, -1.0, 1.0);
    const double s2 = 1.0 - w * w;
    if (s2 <= 0.0) {
        return 0.0;
    }
    const double alpha = field.value(x, y);
    // alpha_min comes from a finite sample of Q, so allow a small undershoot.
    if (!(alpha > 0.0) || alpha < field.alpha_min() * (1.0 - 1e-3)) {
        std::ostringstream msg;
        msg << "Euler-Lagrange rhs: alpha(" << x << ", " << y << ") = " << alpha << " below alpha_min "
            << field.alpha_min();
        throw NumericalError(msg.str());
    }
    const auto [ax, ay] = field.gradient(x, y);
    const double r = -(ay * s2 * std::sqrt(s2) + (ax * w + ay) * s2) / alpha;
    if (!std::isfinite(r)) {
        throw NumericalError("Euler-Lagrange rhs is not finite");
    }
    return r;
}

}  // namespace

double el_rhs(const AlphaField& field, double x, double y, double w) {
    if (!(std::abs(w) <= 1.0 + kGammaClampBand)) {
        throw DomainError("Euler-Lagrange rhs: need |w| <= 1");
    }
    return rhs_at(field, x, y, w);
}

LipschitzPath ShootingSolution::as_path(const RectangleDomain& domain) const {
    std::vector<double> xs(trajectory.size());
    std::vector<double> ys(trajectory.size());
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        xs[k] = trajectory[k].x;
        ys[k] = trajectory[k].y - endpoint_error * trajectory[k].x / domain.l();
    }
    xs.back() = domain.l();
    ys.back() = domain.b();
    return LipschitzPath(domain, std::move(xs), std::move(ys));
}

ShootingSolution shoot(const AlphaField& field, const RectangleDomain& domain, double w0, double h) {
    const double l = domain.l();
    if (!(std::abs(w0) <= 1.0)) {
        throw ValidationError("shoot: initial slope must lie in [-1, 1]");
    }
    if (!(h > 0.0) || h > l / 100 * (1 + 1e-12)) {
        throw ValidationError("shoot: step must satisfy 0 < h <= l / 100");
    }
    if (!(field.alpha_min() > 0.0)) {
        throw ValidationError("shoot: alpha field must declare alpha_min > 0");
    }
    const AlphaField f = field.domain() == domain ? field : field.with_domain(domain);

    const auto steps = static_cast<std::size_t>(std::ceil(l / h - 1e-9));
    const double dt = l / static_cast<double>(steps);
    auto rhs = [&](double x, double y, double w) {
        const auto [px, py] = domain.project(x, y);
        return rhs_at(f, px, py, w);
    };

    ShootingSolution sol;
    sol.w0 = w0;
    sol.trajectory.reserve(steps + 1);
    double y = 0.0;
    double w = w0;
    sol.trajectory.push_back({0.0, y, w});
    for (std::size_t n = 0; n < steps; ++n) {
        const double x = static_cast<double>(n) * dt;
        const double k1y = w;
        const double k1w = rhs(x, y, w);
        const double w2 = std::clamp(w + 0.5 * dt * k1w, -1.0, 1.0);
        const double k2y = w2;
        const double k2w = rhs(x + 0.5 * dt, y + 0.5 * dt * k1y, w2);
        const double w3 = std::clamp(w + 0.5 * dt * k2w, -1.0, 1.0);
        const double k3y = w3;
        const double k3w = rhs(x + 0.5 * dt, y + 0.5 * dt * k2y, w3);
        const double w4 = std::clamp(w + dt * k3w, -1.0, 1.0);
        const double k4y = w4;
        const double k4w = rhs(x + dt, y + dt * k3y, w4);
        y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        w = std::clamp(w + dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w), -1.0, 1.0);
        sol.trajectory.push_back({n + 1 == steps ? l : static_cast<double>(n + 1) * dt, y, w});
    }
    sol.endpoint_error = y - domain.b();
    return sol;
}

BvpResult solve_bvp(const AlphaField& field, const RectangleDomain& domain, const BvpOptions& options) {
    if (!(options.tol > 0.0)) {
        throw ValidationError("solve_bvp: tol must be positive");
    }
    if (options.scan_points < 16) {
        throw ValidationError("solve_bvp: need at least 16 scan points");
    }
    const double h = options.h > 0.0 ? options.h : domain.l() / kDefaultShootingSteps;
    const int p = options.scan_points;
    const AlphaField f = field.domain() == domain ? field : field.with_domain(domain);

    BvpResult result;
    result.scan_spacing = 2.0 / (p - 1);
    std::vector<double> w(static_cast<std::size_t>(p));
    std::vector<double> err(w.size());
    for (int i = 0; i < p; ++i) {
        w[static_cast<std::size_t>(i)] = i == p - 1 ? 1.0 : -1.0 + 2.0 * i / (p - 1);
        err[static_cast<std::size_t>(i)] = shoot(f, domain, w[static_cast<std::size_t>(i)], h).endpoint_error;
    }

    auto push_root = [&](ShootingSolution s) {
        if (!result.roots.empty() && std::abs(result.roots.back().w0 - s.w0) < 1e-12) {
            return;
        }
        result.roots.push_back(std::move(s));
    };

    for (std::size_t i = 0; i < w.size(); ++i) {
        if (err[i] == 0.0) {
            push_root(shoot(f, domain, w[i], h));
            continue;
        }
        if (i + 1 == w.size() || err[i + 1] == 0.0 || (err[i] < 0.0) == (err[i + 1] < 0.0)) {
            continue;
        }
        // Bracket with F(lo) < 0 < F(hi) in either orientation.
        double lo = w[i];
        double hi = w[i + 1];
        if (err[i] > 0.0) {
            std::swap(lo, hi);
        }
        ShootingSolution best = shoot(f, domain, 0.5 * (lo + hi), h);
        for (int it = 0; it < 200 && std::abs(best.endpoint_error) > options.tol; ++it) {
            if (best.endpoint_error < 0.0) {
                lo = best.w0;
            } else {
                hi = best.w0;
            }
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) {
                break;
            }
            best = shoot(f, domain, mid, h);
        }
        if (std::abs(best.endpoint_error) > options.tol) {
            std::ostringstream msg;
            msg << "bisection near w0 = " << best.w0 << " stalled at |F| = " << std::abs(best.endpoint_error);
            result.warnings.push_back(msg.str());
        }
        push_root(std::move(best));
    }

    for (std::size_t k = 1; k < result.roots.size(); ++k) {
        if (result.roots[k].w0 - result.roots[k - 1].w0 < result.scan_spacing) {
            std::ostringstream msg;
            msg << "roots w0 = " << result.roots[k - 1].w0 << " and " << result.roots[k].w0
                << " are closer than the scan spacing; further roots may be unresolved";
            result.warnings.push_back(msg.str());
        }
    }
    return result;
}

}  // namespace ilpp
