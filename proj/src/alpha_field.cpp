#include "ilpp/alpha_field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <utility>

#include "ilpp/error.hpp"

namespace ilpp {

namespace {

constexpr std::size_t kBoundSamples = 129;

double domain_slack(const RectangleDomain& d) { return 1e-9 * std::max(1.0, d.l()); }

struct Formula {
    AlphaField::ScalarFn value;
    AlphaField::ScalarFn dx;
    AlphaField::ScalarFn dy;
    AlphaField::ScalarFn dyy;
    bool y_only = true;
};

void expect_params(const std::string& name, std::span<const double> params, std::size_t n) {
    if (params.size() != n) {
        std::ostringstream msg;
        msg << "preset '" << name << "' takes " << n << " parameter(s), got " << params.size();
        throw ValidationError(msg.str());
    }
}

Formula preset_formula(const std::string& name, std::span<const double> params) {
    auto zero = [](double, double) { return 0.0; };
    if (name == "constant") {
        expect_params(name, params, 1);
        const double c = params[0];
        return {[c](double, double) { return c; }, zero, zero, zero, true};
    }
    if (name == "linear_x") {
        expect_params(name, params, 2);
        const double a = params[0];
        const double c = params[1];
        return {[a, c](double x, double) { return a + c * x; }, [c](double, double) { return c; }, zero, zero,
                false};
    }
    if (name == "parabolic") {
        expect_params(name, params, 2);
        const double a = params[0];
        const double c = params[1];
        return {[a, c](double, double y) { return a + c * y * y; }, zero,
                [c](double, double y) { return 2.0 * c * y; }, [c](double, double) { return 2.0 * c; }, true};
    }
    if (name == "exp_y") {
        expect_params(name, params, 2);
        const double a = params[0];
        const double c = params[1];
        return {[a, c](double, double y) { return a * std::exp(c * y); }, zero,
                [a, c](double, double y) { return a * c * std::exp(c * y); },
                [a, c](double, double y) { return a * c * c * std::exp(c * y); }, true};
    }
    if (name == "bilinear") {
        expect_params(name, params, 4);
        const double a = params[0];
        const double cx = params[1];
        const double cy = params[2];
        const double cxy = params[3];
        return {[=](double x, double y) { return a + cx * x + cy * y + cxy * x * y; },
                [=](double, double y) { return cx + cxy * y; }, [=](double x, double) { return cy + cxy * x; },
                zero, cx == 0.0 && cxy == 0.0};
    }
    if (name == "bumps") {
        if (params.empty() || (params.size() - 1) % 3 != 0) {
            throw ValidationError("preset 'bumps' takes base followed by (amp, center, width) triples");
        }
        struct Bump {
            double amp, center, width;
        };
        const double base = params[0];
        std::vector<Bump> bumps;
        for (std::size_t i = 1; i < params.size(); i += 3) {
            bumps.push_back({params[i], params[i + 1], params[i + 2]});
        }
        return {[base, bumps](double, double y) {
                    double s = base;
                    for (const auto& b : bumps) {
                        const double d = y - b.center;
                        s += b.amp * std::exp(-b.width * d * d);
                    }
                    return s;
                },
                zero,
                [bumps](double, double y) {
                    double s = 0.0;
                    for (const auto& b : bumps) {
                        const double d = y - b.center;
                        s += -2.0 * b.width * d * b.amp * std::exp(-b.width * d * d);
                    }
                    return s;
                },
                [bumps](double, double y) {
                    double s = 0.0;
                    for (const auto& b : bumps) {
                        const double d = y - b.center;
                        s += b.amp * (4.0 * b.width * b.width * d * d - 2.0 * b.width) * std::exp(-b.width * d * d);
                    }
                    return s;
                },
                true};
    }
    throw ValidationError("unknown alpha preset '" + name + "'");
}

}  // namespace

AlphaField AlphaField::analytic(const RectangleDomain& domain, Analytic spec) {
    if (!spec.value) {
        throw ValidationError("analytic alpha field needs a value function");
    }
    if (!(spec.fd_step > 0.0)) {
        throw ValidationError("analytic alpha field: fd_step must be positive");
    }
    AlphaField f;
    f.kind_ = Kind::Analytic;
    f.name_ = spec.name.empty() ? "analytic" : std::move(spec.name);
    f.domain_ = domain;
    f.value_fn_ = std::move(spec.value);
    f.dx_fn_ = std::move(spec.dx);
    f.dy_fn_ = std::move(spec.dy);
    f.dyy_fn_ = std::move(spec.dyy);
    f.fd_step_ = spec.fd_step;
    f.compute_bounds(spec.declared_min, spec.declared_max);
    return f;
}

AlphaField AlphaField::gridded(const RectangleDomain& domain, std::size_t nx, std::size_t ny,
                               std::vector<double> samples) {
    if (nx < 2 || ny < 2) {
        throw ValidationError("gridded alpha field needs at least 2 samples per direction");
    }
    if (samples.size() != nx * ny) {
        std::ostringstream msg;
        msg << "gridded alpha field: expected " << nx * ny << " samples, got " << samples.size();
        throw ValidationError(msg.str());
    }
    for (double s : samples) {
        if (!std::isfinite(s) || s < 0.0) {
            throw ValidationError("gridded alpha field: samples must be finite and nonnegative");
        }
    }
    AlphaField f;
    f.kind_ = Kind::Gridded;
    f.name_ = "grid";
    f.domain_ = domain;
    f.nx_ = nx;
    f.ny_ = ny;
    f.grid_l_ = domain.l();
    f.grid_y0_ = domain.y_min();
    f.hx_ = domain.l() / static_cast<double>(nx - 1);
    f.hy_ = domain.l() / static_cast<double>(ny - 1);
    f.samples_ = std::move(samples);
    const auto [lo, hi] = std::minmax_element(f.samples_.begin(), f.samples_.end());
    f.alpha_min_ = *lo;
    f.alpha_max_ = *hi;
    return f;
}

AlphaField AlphaField::load_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open alpha grid file " + path.string());
    }
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header);
    long long nx = 0;
    long long ny = 0;
    double l = 0.0;
    double b = 0.0;
    if (!(hs >> nx >> ny >> l >> b) || nx < 2 || ny < 2) {
        throw ValidationError("alpha grid " + path.string() + ": header must be 'nx ny l b' with nx, ny >= 2");
    }
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(nx * ny));
    double v = 0.0;
    while (in >> v) {
        samples.push_back(v);
    }
    if (!in.eof()) {
        throw ValidationError("alpha grid " + path.string() + ": non-numeric sample");
    }
    return gridded(RectangleDomain(l, b), static_cast<std::size_t>(nx), static_cast<std::size_t>(ny),
                   std::move(samples));
}

void AlphaField::save_grid(const std::filesystem::path& path) const {
    if (kind_ != Kind::Gridded) {
        throw ValidationError("save_grid: only gridded fields can be written");
    }
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write alpha grid file " + path.string());
    }
    out << nx_ << ' ' << ny_ << ' ' << std::setprecision(17) << grid_l_ << ' ' << (grid_y0_ + grid_l_ / 2) * 2 << '\n';
    for (std::size_t r = 0; r < ny_; ++r) {
        for (std::size_t c = 0; c < nx_; ++c) {
            out << (c ? " " : "") << samples_[r * nx_ + c];
        }
        out << '\n';
    }
}

AlphaField AlphaField::sample_to_grid(const AlphaField& source, std::size_t nx, std::size_t ny) {
    if (nx < 2 || ny < 2) {
        throw ValidationError("sample_to_grid: need at least 2 samples per direction");
    }
    const RectangleDomain& d = source.domain_;
    const double hx = d.l() / static_cast<double>(nx - 1);
    const double hy = d.l() / static_cast<double>(ny - 1);
    std::vector<double> samples(nx * ny);
    for (std::size_t r = 0; r < ny; ++r) {
        for (std::size_t c = 0; c < nx; ++c) {
            samples[r * nx + c] = source.raw(static_cast<double>(c) * hx, d.y_min() + static_cast<double>(r) * hy);
        }
    }
    return gridded(d, nx, ny, std::move(samples));
}

bool AlphaField::has_exact_derivatives() const {
    return kind_ == Kind::Analytic && dx_fn_ && dy_fn_ && dyy_fn_;
}

double AlphaField::derivative_step() const {
    return kind_ == Kind::Gridded ? std::max(hx_, hy_) : fd_step_;
}

void AlphaField::check_point(double x, double y) const {
    if (!domain_.contains(x, y, domain_slack(domain_))) {
        std::ostringstream msg;
        msg << "alpha queried at (" << x << ", " << y << ") outside Q(l = " << domain_.l() << ", b = " << domain_.b()
            << ")";
        throw DomainError(msg.str());
    }
}

double AlphaField::interpolate(double x, double y) const {
    const double cx = std::clamp(x / hx_, 0.0, static_cast<double>(nx_ - 1));
    const double cy = std::clamp((y - grid_y0_) / hy_, 0.0, static_cast<double>(ny_ - 1));
    const std::size_t i = std::min(static_cast<std::size_t>(cx), nx_ - 2);
    const std::size_t j = std::min(static_cast<std::size_t>(cy), ny_ - 2);
    const double tx = cx - static_cast<double>(i);
    const double ty = cy - static_cast<double>(j);
    const double* row0 = &samples_[j * nx_];
    const double* row1 = &samples_[(j + 1) * nx_];
    const double bottom = row0[i] + tx * (row0[i + 1] - row0[i]);
    const double top = row1[i] + tx * (row1[i + 1] - row1[i]);
    return bottom + ty * (top - bottom);
}

double AlphaField::raw(double x, double y) const {
    return kind_ == Kind::Gridded ? interpolate(x, y) : value_fn_(x, y);
}

double AlphaField::value(double x, double y) const {
    check_point(x, y);
    return raw(x, y);
}

AlphaGradient AlphaField::gradient(double x, double y) const {
    check_point(x, y);
    if (kind_ == Kind::Analytic) {
        const double h = fd_step_;
        const double gx = dx_fn_ ? dx_fn_(x, y) : (value_fn_(x + h, y) - value_fn_(x - h, y)) / (2 * h);
        const double gy = dy_fn_ ? dy_fn_(x, y) : (value_fn_(x, y + h) - value_fn_(x, y - h)) / (2 * h);
        return {gx, gy};
    }
    // Stencils are clipped to the mesh box and divided by the actual spread.
    const double h = derivative_step();
    const double xa = std::max(0.0, x - h);
    const double xc = std::min(grid_l_, x + h);
    const double ya = std::max(grid_y0_, y - h);
    const double yc = std::min(grid_y0_ + grid_l_, y + h);
    return {(interpolate(xc, y) - interpolate(xa, y)) / (xc - xa),
            (interpolate(x, yc) - interpolate(x, ya)) / (yc - ya)};
}

double AlphaField::dyy(double x, double y) const {
    check_point(x, y);
    if (kind_ == Kind::Analytic) {
        if (dyy_fn_) {
            return dyy_fn_(x, y);
        }
        const double h = fd_step_;
        return (value_fn_(x, y + h) - 2 * value_fn_(x, y) + value_fn_(x, y - h)) / (h * h);
    }
    const double h = derivative_step();
    const double yc = std::clamp(y, grid_y0_ + h, grid_y0_ + grid_l_ - h);
    return (interpolate(x, yc + h) - 2 * interpolate(x, yc) + interpolate(x, yc - h)) / (h * h);
}

AlphaField AlphaField::with_domain(const RectangleDomain& domain) const {
    AlphaField f = *this;
    f.domain_ = domain;
    if (kind_ == Kind::Gridded) {
        const RectangleDomain box = domain_;
        const double tol = domain_slack(box);
        for (auto [u, v] : {std::pair{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}) {
            const auto [x, y] = domain.at(u, v);
            if (!box.contains(x, y, tol)) {
                throw ValidationError("gridded alpha field cannot be extended beyond its own rectangle");
            }
        }
        return f;
    }
    f.compute_bounds(std::nullopt, std::nullopt);
    return f;
}

AlphaField AlphaField::scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw ValidationError("alpha scale factor must be positive and finite");
    }
    AlphaField f = *this;
    f.alpha_min_ *= factor;
    f.alpha_max_ *= factor;
    if (kind_ == Kind::Gridded) {
        for (double& s : f.samples_) {
            s *= factor;
        }
        return f;
    }
    auto scale = [factor](const ScalarFn& fn) -> ScalarFn {
        if (!fn) {
            return {};
        }
        return [fn, factor](double x, double y) { return factor * fn(x, y); };
    };
    f.value_fn_ = scale(value_fn_);
    f.dx_fn_ = scale(dx_fn_);
    f.dy_fn_ = scale(dy_fn_);
    f.dyy_fn_ = scale(dyy_fn_);
    return f;
}

void AlphaField::compute_bounds(std::optional<double> declared_min, std::optional<double> declared_max) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < kBoundSamples; ++a) {
        for (std::size_t c = 0; c < kBoundSamples; ++c) {
            const auto [x, y] = domain_.at(static_cast<double>(a) / (kBoundSamples - 1),
                                           static_cast<double>(c) / (kBoundSamples - 1));
            const double v = value_fn_(x, y);
            if (!std::isfinite(v)) {
                throw ValidationError("alpha field '" + name_ + "' is not finite on Q");
            }
            lo = std::min(lo, v);
            hi = std::max(hi, std::abs(v));
        }
    }
    if (lo < 0.0) {
        throw ValidationError("alpha field '" + name_ + "' takes negative values on Q");
    }
    if (declared_min) {
        if (*declared_min > lo) {
            throw ValidationError("alpha field '" + name_ + "': declared alpha_min exceeds sampled minimum");
        }
        lo = *declared_min;
    }
    if (declared_max) {
        if (*declared_max < hi) {
            throw ValidationError("alpha field '" + name_ + "': declared alpha_max below sampled maximum");
        }
        hi = *declared_max;
    }
    alpha_min_ = lo;
    alpha_max_ = hi;
}

AlphaField make_preset(const std::string& name, std::span<const double> params, const RectangleDomain& domain) {
    Formula f = preset_formula(name, params);
    std::ostringstream label;
    label << name;
    for (double p : params) {
        label << ' ' << p;
    }
    AlphaField::Analytic spec;
    spec.name = label.str();
    spec.value = std::move(f.value);
    spec.dx = std::move(f.dx);
    spec.dy = std::move(f.dy);
    spec.dyy = std::move(f.dyy);
    return AlphaField::analytic(domain, std::move(spec));
}

std::vector<std::string> preset_names() {
    return {"constant", "linear_x", "parabolic", "exp_y", "bilinear", "bumps"};
}

std::function<double(double)> preset_profile(const std::string& name, std::span<const double> params) {
    Formula f = preset_formula(name, params);
    if (!f.y_only) {
        throw ValidationError("preset '" + name + "' depends on x; a rate profile must depend on y only");
    }
    return [value = std::move(f.value)](double y) { return value(0.0, y); };
}

}  // namespace ilpp
