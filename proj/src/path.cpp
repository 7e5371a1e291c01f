#include "ilpp/path.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ilpp/error.hpp"

namespace ilpp {

LipschitzPath::LipschitzPath(const RectangleDomain& domain, std::vector<double> x, std::vector<double> y)
    : domain_(domain), x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() < 2 || x_.size() != y_.size()) {
        throw ValidationError("path: need matching x and y grids with at least 2 points");
    }
    const double l = domain_.l();
    const double tol = 1e-12 * std::max(1.0, l);
    if (std::abs(x_.front()) > tol || std::abs(x_.back() - l) > tol) {
        throw ValidationError("path: x grid must run from 0 to l");
    }
    if (std::abs(y_.front()) > tol || std::abs(y_.back() - domain_.b()) > tol) {
        std::ostringstream msg;
        msg << "path: endpoints must be y(0) = 0 and y(l) = b, got " << y_.front() << " and " << y_.back();
        throw ValidationError(msg.str());
    }
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
        const double dx = x_[i + 1] - x_[i];
        if (!(dx > 0.0)) {
            throw ValidationError("path: x grid must be strictly increasing");
        }
        if (std::abs(y_[i + 1] - y_[i]) > dx + kLipschitzTol) {
            std::ostringstream msg;
            msg << "path: Lipschitz bound violated on [" << x_[i] << ", " << x_[i + 1] << "]";
            throw ValidationError(msg.str());
        }
    }
    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (!domain_.contains(x_[i], y_[i], 1e-9 * std::max(1.0, l))) {
            std::ostringstream msg;
            msg << "path: node (" << x_[i] << ", " << y_[i] << ") outside Q";
            throw ValidationError(msg.str());
        }
    }
}

LipschitzPath LipschitzPath::uniform(const RectangleDomain& domain, std::vector<double> y) {
    if (y.size() < 2) {
        throw ValidationError("path: need at least 2 nodes");
    }
    const std::size_t n = y.size() - 1;
    std::vector<double> x(y.size());
    for (std::size_t i = 0; i <= n; ++i) {
        x[i] = domain.l() * static_cast<double>(i) / static_cast<double>(n);
    }
    x[n] = domain.l();
    return LipschitzPath(domain, std::move(x), std::move(y));
}

LipschitzPath LipschitzPath::sample(const RectangleDomain& domain, std::size_t n,
                                    const std::function<double(double)>& f) {
    if (n < 1) {
        throw ValidationError("path: need at least one segment");
    }
    std::vector<double> y(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        y[i] = f(domain.l() * static_cast<double>(i) / static_cast<double>(n));
    }
    return uniform(domain, std::move(y));
}

double LipschitzPath::at(double x) const {
    if (x <= x_.front()) {
        return y_.front();
    }
    if (x >= x_.back()) {
        return y_.back();
    }
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double t = (x - x_[i]) / (x_[i + 1] - x_[i]);
    return y_[i] + t * (y_[i + 1] - y_[i]);
}

LipschitzPath LipschitzPath::reflected() const {
    std::vector<double> y(y_.size());
    std::transform(y_.begin(), y_.end(), y.begin(), [](double v) { return -v; });
    return LipschitzPath(RectangleDomain(domain_.l(), -domain_.b()), x_, std::move(y));
}

}  // namespace ilpp
