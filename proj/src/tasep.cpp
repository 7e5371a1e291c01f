#include "ilpp/tasep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <tuple>

#include "ilpp/error.hpp"
#include "ilpp/lattice.hpp"

namespace ilpp {

TasepRun tasep_simulate(const TasepConfig& config, int k, std::uint64_t seed, const TasepObserver& observer) {
    if (config.n < 1) {
        throw ValidationError("tasep: N must be positive");
    }
    if (!config.alpha && !config.mean_wait) {
        throw ValidationError("tasep: no rate profile");
    }
    if (k < 1 || k > config.particle_budget) {
        std::ostringstream msg;
        msg << "tasep: k = " << k << " outside [1, particle_budget = " << config.particle_budget << "]";
        throw ValidationError(msg.str());
    }
    const int w = config.window_half_width();
    if (w < k) {
        std::ostringstream msg;
        msg << "tasep: window overrun, half-width " << w << " < k = " << k;
        throw NumericalError(msg.str());
    }

    const long count = w + 1;
    const long exited = w + 1;
    std::vector<long> pos(static_cast<std::size_t>(count));
    std::vector<long> jumps(pos.size(), 0);
    std::vector<long> occupant(static_cast<std::size_t>(2 * w + 1), 0);  // particle label or 0
    auto cell = [&](long s) -> long& { return occupant[static_cast<std::size_t>(s + w)]; };
    for (long p = 1; p <= count; ++p) {
        pos[static_cast<std::size_t>(p - 1)] = 1 - p;
        cell(1 - p) = p;
    }

    auto mean_wait = [&](long site, long p) {
        const double m = config.mean_wait ? config.mean_wait(site, p)
                                          : config.alpha(static_cast<double>(site) / config.n);
        if (!(m > 0.0) || !std::isfinite(m)) {
            std::ostringstream msg;
            msg << "tasep: non-positive or non-finite mean waiting time " << m << " at site " << site;
            throw NumericalError(msg.str());
        }
        return m;
    };

    using Clock = std::tuple<double, long>;
    std::priority_queue<Clock, std::vector<Clock>, std::greater<>> clocks;
    auto arm = [&](long p, double now) {
        const long m = jumps[static_cast<std::size_t>(p - 1)] + 1;
        const long site = pos[static_cast<std::size_t>(p - 1)];
        const double e = site_exponential(seed, static_cast<int>(p + m - 2), static_cast<int>(m - p));
        clocks.emplace(now + mean_wait(site, p) * e, p);
    };
    arm(1, 0.0);

    TasepRun run;
    run.window = w;
    run.crossing_times.reserve(static_cast<std::size_t>(k));
    while (static_cast<int>(run.crossing_times.size()) < k) {
        if (clocks.empty()) {
            throw NumericalError("tasep: no enabled particle before the k-th crossing");
        }
        const auto [t, p] = clocks.top();
        clocks.pop();
        ++run.events;
        const auto pi = static_cast<std::size_t>(p - 1);
        const long s = pos[pi];
        cell(s) = 0;
        ++jumps[pi];
        if (s == w) {
            pos[pi] = exited;
        } else {
            pos[pi] = s + 1;
            cell(s + 1) = p;
            if (s + 1 == w || cell(s + 2) == 0) {
                arm(p, t);
            }
        }
        if (s == 0) {
            if (p != static_cast<long>(run.crossing_times.size()) + 1) {
                throw NumericalError("tasep: particles crossed the origin out of order");
            }
            run.crossing_times.push_back(t / config.n);
        }
        if (p < count && pos[pi + 1] == s - 1) {
            arm(p + 1, t);
        }
        if (observer) {
            observer(t, pos);
        }
    }
    return run;
}

double tasep_crossing_time(const TasepConfig& config, int k, std::uint64_t seed) {
    return tasep_simulate(config, k, seed).crossing_times.back();
}

std::vector<double> GStarCurve::slopes() const {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < l_values.size(); ++i) {
        out.push_back((g_values[i + 1] - g_values[i]) / (l_values[i + 1] - l_values[i]));
    }
    return out;
}

GStarCurve gstar_curve(const AlphaField& field, std::span<const double> l_values, const DiscretizedPathSpace& space) {
    if (l_values.empty()) {
        throw ValidationError("gstar_curve: no l values");
    }
    for (std::size_t i = 0; i < l_values.size(); ++i) {
        if (!(l_values[i] > 0.0) || (i > 0 && !(l_values[i] > l_values[i - 1]))) {
            throw ValidationError("gstar_curve: l values must be positive and strictly increasing");
        }
    }
    const double l_max = l_values.back();
    const RectangleDomain largest(l_max, 0.0);
    const DiscretizedPathSpace steps = space.by_counts()
                                           ? DiscretizedPathSpace::steps(l_max / space.n_x(), l_max / space.n_y())
                                           : space;
    MidpointCache cache(field.domain() == largest ? field : field.with_domain(largest), steps.dx(), steps.dy());

    GStarCurve curve;
    for (double l : l_values) {
        auto sol = variational_dp(RectangleDomain(l, 0.0), steps, cache);
        curve.l_values.push_back(l);
        curve.g_values.push_back(sol.g_star);
        curve.maximizers.push_back(std::move(sol.y_star));
    }
    return curve;
}

ConvexityReport convexity_check(const GStarCurve& curve, double tol) {
    const auto& l = curve.l_values;
    if (l.size() < 3 || curve.g_values.size() != l.size()) {
        throw ValidationError("convexity_check: need at least three points");
    }
    const double d = l[1] - l[0];
    for (std::size_t i = 1; i + 1 < l.size(); ++i) {
        if (std::abs((l[i + 1] - l[i]) - d) > 1e-9 * std::max(1.0, std::abs(d))) {
            throw ValidationError("convexity_check: l values must be uniformly spaced");
        }
    }
    ConvexityReport report;
    report.min_second_difference = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < l.size(); ++i) {
        const double sd = curve.g_values[i + 1] - 2.0 * curve.g_values[i] + curve.g_values[i - 1];
        report.second_differences.push_back(sd);
        if (sd < report.min_second_difference) {
            report.min_second_difference = sd;
            report.worst_index = i;
        }
    }
    report.convex = report.min_second_difference >= -tol;
    return report;
}

LowerBoundReport lower_bound_check(const GStarCurve& curve, const AlphaField& field, double tol) {
    LowerBoundReport report;
    report.worst_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < curve.l_values.size(); ++i) {
        const auto& y = curve.maximizers[i];
        double abar = 0.0;
        for (std::size_t n = 0; n < y.size(); ++n) {
            abar = std::max(abar, field.value(y.x()[n], y.y()[n]));
        }
        for (std::size_t j = i + 1; j < curve.l_values.size(); ++j) {
            const double slack =
                curve.g_values[j] - (curve.g_values[i] + 2.0 * abar * (curve.l_values[j] - curve.l_values[i]));
            if (slack < report.worst_slack) {
                report.worst_slack = slack;
                report.worst_from = i;
                report.worst_to = j;
            }
        }
    }
    report.holds = report.worst_slack >= -tol;
    return report;
}

std::vector<Plateau> find_plateaus(std::span<const double> slopes, double tol, std::size_t min_length) {
    std::vector<Plateau> out;
    std::size_t i = 0;
    while (i < slopes.size()) {
        std::size_t j = i + 1;
        while (j < slopes.size() && std::abs(slopes[j] - slopes[i]) <= tol) {
            ++j;
        }
        if (j - i >= min_length) {
            double sum = 0.0;
            for (std::size_t n = i; n < j; ++n) {
                sum += slopes[n];
            }
            const Plateau run{i, j - i, sum / static_cast<double>(j - i)};
            if (!out.empty() && std::abs(out.back().mean - run.mean) <= tol) {
                auto& prev = out.back();
                const double total = prev.mean * static_cast<double>(prev.length) + sum;
                prev.length = j - prev.first;
                prev.mean = total / static_cast<double>(prev.length);
            } else {
                out.push_back(run);
            }
            i = j;
        } else {
            ++i;
        }
    }
    return out;
}

}  // namespace ilpp
