#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ilpp/domain.hpp"

namespace ilpp {

struct AlphaGradient {
    double dx;
    double dy;
};

/// Inhomogeneity alpha(x, y) >= 0 on the rectangle Q.
///
/// Two flavours share one interface:
///  - analytic: a closed-form evaluator, optionally with exact alpha_x, alpha_y
///    and alpha_yy. Missing derivatives fall back to central differences with
///    step `fd_step`.
///  - gridded: samples on a uniform nx-by-ny mesh over the bounding box of Q,
///    bilinear interpolation, central differences with step max(h_x, h_y).
///
/// Public evaluators reject points outside Q (with a relative slack of 1e-9
/// for rounding on the boundary). Instances are immutable and cheap to copy.
class AlphaField {
public:
    enum class Kind { Analytic, Gridded };

    using ScalarFn = std::function<double(double x, double y)>;

    struct Analytic {
        std::string name;
        ScalarFn value;
        ScalarFn dx;   ///< optional
        ScalarFn dy;   ///< optional
        ScalarFn dyy;  ///< optional
        double fd_step = 1e-4;
        std::optional<double> declared_min;
        std::optional<double> declared_max;
    };

    static AlphaField analytic(const RectangleDomain& domain, Analytic spec);

    /// `samples` is row-major, row r holding the y-level y_min + r*h_y from bottom
    /// to top, nx values per row at x = c*h_x.
    static AlphaField gridded(const RectangleDomain& domain, std::size_t nx, std::size_t ny,
                              std::vector<double> samples);

    /// Plain-text matrix: first line "nx ny l b", then ny rows of nx samples,
    /// bottom row first.
    static AlphaField load_grid(const std::filesystem::path& path);
    void save_grid(const std::filesystem::path& path) const;

    /// Samples any field at the nodes of an nx-by-ny mesh over its bounding box.
    static AlphaField sample_to_grid(const AlphaField& source, std::size_t nx, std::size_t ny);

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    const RectangleDomain& domain() const { return domain_; }
    double alpha_min() const { return alpha_min_; }
    double alpha_max() const { return alpha_max_; }
    bool has_exact_derivatives() const;
    /// Step used by finite-difference derivatives.
    double derivative_step() const;

    double value(double x, double y) const;
    AlphaGradient gradient(double x, double y) const;
    double dyy(double x, double y) const;

    /// Same evaluator bound to another rectangle. Analytic fields accept any
    /// rectangle; gridded fields only rectangles inside their own.
    AlphaField with_domain(const RectangleDomain& domain) const;

    /// alpha multiplied by a positive constant.
    AlphaField scaled(double factor) const;

    // Mesh access for gridded fields.
    std::size_t grid_nx() const { return nx_; }
    std::size_t grid_ny() const { return ny_; }
    std::span<const double> grid_samples() const { return samples_; }

private:
    AlphaField() = default;

    void check_point(double x, double y) const;
    double raw(double x, double y) const;
    double interpolate(double x, double y) const;
    void compute_bounds(std::optional<double> declared_min, std::optional<double> declared_max);

    Kind kind_ = Kind::Analytic;
    std::string name_;
    RectangleDomain domain_{1.0, 0.0};
    double alpha_min_ = 0.0;
    double alpha_max_ = 0.0;

    // analytic
    ScalarFn value_fn_;
    ScalarFn dx_fn_;
    ScalarFn dy_fn_;
    ScalarFn dyy_fn_;
    double fd_step_ = 1e-4;

    // gridded
    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
    double hx_ = 0.0;
    double hy_ = 0.0;
    double grid_y0_ = 0.0;
    double grid_l_ = 0.0;
    std::vector<double> samples_;
};

/// Named closed-form fields, all with exact derivatives:
///   constant  [c]                        c
///   linear_x  [a, c]                     a + c x
///   parabolic [a, c]                     a + c y^2
///   exp_y     [a, c]                     a exp(c y)
///   bilinear  [a, cx, cy, cxy]           a + cx x + cy y + cxy x y
///   bumps     [base, (amp, center, width)...]
///                                        base + sum amp exp(-width (y - center)^2)
/// Throws ValidationError for unknown names or wrong parameter counts.
AlphaField make_preset(const std::string& name, std::span<const double> params,
                       const RectangleDomain& domain);

/// Names accepted by make_preset.
std::vector<std::string> preset_names();

/// The preset as a function of y alone, for position-dependent exclusion
/// rates. Throws ValidationError if the preset depends on x.
std::function<double(double)> preset_profile(const std::string& name, std::span<const double> params);

}  // namespace ilpp
