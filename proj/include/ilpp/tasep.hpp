#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ilpp/alpha_field.hpp"
#include "ilpp/path.hpp"
#include "ilpp/variational.hpp"

namespace ilpp {

/// Totally asymmetric exclusion on Z with step initial condition (sites s <= 0
/// occupied). Particles are labelled p = 1, 2, ... from the right, particle p
/// starting at 1 - p. A particle at s jumps to s + 1 when that site is empty,
/// after an exponential waiting time of mean alpha(s / N).
struct TasepConfig {
    /// Mean waiting time as a function of the macroscopic position y = s / N.
    std::function<double(double)> alpha;
    int n = 1;
    /// Largest k that may be asked for.
    int particle_budget = 0;
    /// Window [-W, W]; 0 selects W = particle_budget + particle_budget / 2.
    int window = 0;
    /// Optional particle-dependent mean waiting time (site, particle); replaces
    /// alpha when set.
    std::function<double(long, long)> mean_wait;

    int window_half_width() const { return window > 0 ? window : particle_budget + particle_budget / 2; }
};

struct TasepRun {
    /// T_p / N for p = 1..k: the time particle p jumps from site 0 to site 1.
    std::vector<double> crossing_times;
    std::size_t events = 0;
    int window = 0;
};

/// Called after every event with the time and the current positions of all
/// simulated particles (index p - 1). Particles that left through the right
/// edge report window + 1.
using TasepObserver = std::function<void(double, std::span<const long>)>;

/// Event-driven simulation up to the k-th crossing of the origin.
///
/// Sites left of -W carry particles that can never affect particles 1..k and
/// are not simulated. The right edge W is open: a particle there leaves the
/// system at its own rate. T_k only depends on jumps from sites <= k - 1, so
/// the result is exact whenever W >= k; a smaller window is an overrun and
/// throws NumericalError, as do non-positive rates.
///
/// Clocks are drawn per (particle p, jump m) from the same counter-based
/// exponentials as the lattice rewards, at lattice site (p + m - 2, m - p).
/// With alpha independent of x, T_{Nl/2+1} / N therefore equals the last
/// passage time to (l, 0) for the same seed.
TasepRun tasep_simulate(const TasepConfig& config, int k, std::uint64_t seed,
                        const TasepObserver& observer = {});

/// T_k / N.
double tasep_crossing_time(const TasepConfig& config, int k, std::uint64_t seed);

/// G*[l] for endpoints (l, 0).
struct GStarCurve {
    std::vector<double> l_values;
    std::vector<double> g_values;
    std::vector<LipschitzPath> maximizers;

    /// Forward difference quotients, one per consecutive pair.
    std::vector<double> slopes() const;
};

/// Runs the discrete variational problem on Q(l, 0) for each l (strictly
/// increasing). A counts-based space is converted to steps relative to the
/// largest l, so every rectangle shares one lattice and one cache of alpha
/// values. `field` must be defined on Q(l_max, 0).
GStarCurve gstar_curve(const AlphaField& field, std::span<const double> l_values, const DiscretizedPathSpace& space);

struct ConvexityReport {
    bool convex = true;
    std::vector<double> second_differences;
    double min_second_difference = 0.0;
    std::size_t worst_index = 0;  ///< centre index of the smallest second difference
};

/// G[l + d] - 2 G[l] + G[l - d] >= -tol for every interior l. Needs at least
/// three uniformly spaced l values; throws ValidationError otherwise.
ConvexityReport convexity_check(const GStarCurve& curve, double tol);

struct LowerBoundReport {
    bool holds = true;
    double worst_slack = 0.0;
    std::size_t worst_from = 0;
    std::size_t worst_to = 0;
};

/// For every pair l0 < l of the curve, G*[l] >= G*[l0] + 2 abar (l - l0) - tol,
/// abar the largest alpha on the nodes of the maximizer at l0.
LowerBoundReport lower_bound_check(const GStarCurve& curve, const AlphaField& field, double tol);

struct Plateau {
    std::size_t first;  ///< index into the slope sequence
    std::size_t length;
    double mean;
};

/// Maximal runs of at least `min_length` slopes staying within `tol` of the
/// run's first slope; runs whose means are within `tol` of the previous
/// plateau are merged into it.
std::vector<Plateau> find_plateaus(std::span<const double> slopes, double tol, std::size_t min_length);

}  // namespace ilpp
