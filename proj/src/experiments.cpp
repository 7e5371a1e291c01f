#include "ilpp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "ilpp/error.hpp"
#include "ilpp/lattice.hpp"
#include "ilpp/variational.hpp"

namespace ilpp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs f(0..count-1) on up to `threads` workers. Results go to
// caller-owned slots, so the output order does not depend on scheduling.
template <typename F>
void parallel_for(std::size_t count, int threads, F&& f) {
    const auto workers = static_cast<std::size_t>(std::clamp<long>(threads, 1, std::max<long>(1, static_cast<long>(count))));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                f(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(count);
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back(work);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

struct Task {
    int n;
    std::uint64_t seed;
};

std::vector<Task> replica_tasks(const std::vector<int>& n_values, const std::vector<std::uint64_t>& seeds) {
    std::vector<Task> tasks;
    for (int n : n_values) {
        for (auto s : seeds) {
            tasks.push_back({n, s});
        }
    }
    std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) {
        return a.n != b.n ? a.n < b.n : a.seed < b.seed;
    });
    tasks.erase(std::unique(tasks.begin(), tasks.end(),
                            [](const Task& a, const Task& b) { return a.n == b.n && a.seed == b.seed; }),
                tasks.end());
    return tasks;
}

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<NSummary> summarize(const std::vector<ConvergenceRecord>& records, const std::vector<int>& n_values,
                                double g_star, double delta) {
    std::vector<NSummary> out;
    for (int n : n_values) {
        NSummary s{n, 0, kNaN, kNaN, kNaN, kNaN, std::nullopt};
        double sum = 0.0;
        double dist = 0.0;
        std::size_t exceed = 0;
        bool have_dist = false;
        for (const auto& r : records) {
            if (r.n != n) {
                continue;
            }
            ++s.replicas;
            sum += r.g;
            exceed += std::abs(r.g - g_star) > delta ? 1 : 0;
            if (r.sup_distance) {
                have_dist = true;
                dist += *r.sup_distance;
            }
        }
        if (s.replicas > 0) {
            const double count = static_cast<double>(s.replicas);
            s.mean_g = sum / count;
            double ss = 0.0;
            for (const auto& r : records) {
                if (r.n == n) {
                    ss += (r.g - s.mean_g) * (r.g - s.mean_g);
                }
            }
            s.std_g = s.replicas > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
            s.abs_error = std::abs(s.mean_g - g_star);
            s.exceedance = static_cast<double>(exceed) / count;
            if (have_dist) {
                s.mean_sup_distance = dist / count;
            }
        }
        out.push_back(s);
    }
    return out;
}

ConvergenceResult run_replicas(const ExperimentConfig& config, const LipschitzPath* y_star, double g_star) {
    const auto n_values = sorted_unique(effective_n_values(config));
    const auto field = config.field();
    std::vector<LatticeSpec> specs;
    for (int n : n_values) {
        specs.emplace_back(config.domain(), n);
    }
    const auto tasks = replica_tasks(n_values, config.seeds);

    ConvergenceResult result;
    result.g_star = g_star;
    result.delta = config.delta.value_or(0.1 * g_star);
    result.records.resize(tasks.size());
    parallel_for(tasks.size(), config.threads, [&](std::size_t i) {
        const auto t0 = Clock::now();
        const auto& task = tasks[i];
        const auto spec_it = std::find_if(specs.begin(), specs.end(), [&](const auto& s) { return s.n() == task.n; });
        const auto rewards = sample_rewards(*spec_it, field, task.seed);
        const auto sol = lpp_solve(rewards);
        ConvergenceRecord rec{task.n, task.seed, sol.passage_time, std::nullopt, 0.0};
        if (y_star) {
            rec.sup_distance = path_sup_distance(sol.path, *y_star);
        }
        rec.wall_seconds = seconds_since(t0);
        result.records[i] = rec;
    });
    result.summary = summarize(result.records, n_values, g_star, result.delta);
    return result;
}

AlphaField field_on(const ExperimentConfig& config, const RectangleDomain& domain) {
    if (!config.grid_file.empty()) {
        auto f = AlphaField::load_grid(config.grid_file);
        return f.domain() == domain ? f : f.with_domain(domain);
    }
    return make_preset(config.preset, config.params, domain);
}

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw ValidationError("cannot write " + path.string());
    }
}

}  // namespace

ConvergenceResult run_theorem1(const ExperimentConfig& config) {
    const auto field = config.field();
    const double g_star = variational_dp(field, DiscretizedPathSpace::counts(config.n_x, config.n_y)).g_star;
    return run_replicas(config, nullptr, g_star);
}

ConvergenceResult run_theorem2(const ExperimentConfig& config) {
    const auto field = config.field();
    const auto domain = config.domain();
    std::vector<std::string> warnings;
    const auto concavity = check_condition(field, config.concavity_density);
    if (!concavity.satisfied) {
        warnings.push_back(
            "alpha fails the concavity condition; the maximizer may not be unique and distances may not converge");
    }
    const auto dp = variational_dp(field, DiscretizedPathSpace::counts(config.n_x, config.n_y));

    nlohmann::json extra = nlohmann::json::object();
    extra["concavity_satisfied"] = concavity.satisfied;
    if (field.alpha_min() > 0.0) {
        BvpOptions opt;
        opt.tol = config.bvp_tol;
        opt.scan_points = config.scan_points;
        opt.h = config.h;
        const auto bvp = solve_bvp(field, domain, opt);
        extra["bvp_roots"] = bvp.roots.size();
        if (bvp.roots.size() != 1) {
            warnings.push_back("Euler-Lagrange problem has " + std::to_string(bvp.roots.size()) +
                               " roots; the maximizer may not be unique");
        }
        double best = -std::numeric_limits<double>::infinity();
        double dist = kNaN;
        for (const auto& r : bvp.roots) {
            const auto path = r.as_path(domain);
            const double g = functional_eval(path, field);
            if (g > best) {
                best = g;
                dist = sup_distance(path, dp.y_star);
            }
        }
        extra["dp_vs_ode_sup_distance"] = dist;
        for (const auto& w : bvp.warnings) {
            warnings.push_back(w);
        }
    } else {
        warnings.push_back("alpha_min is not positive; Euler-Lagrange cross-check skipped");
    }

    auto result = run_replicas(config, &dp.y_star, dp.g_star);
    result.warnings = std::move(warnings);
    result.extra = std::move(extra);
    return result;
}

double sup_distance(const LipschitzPath& a, const LipschitzPath& b) {
    if (!(a.domain() == b.domain())) {
        throw ValidationError("sup_distance: paths live on different domains");
    }
    // Both are piecewise linear, so the difference peaks at a breakpoint.
    double d = 0.0;
    for (const auto* p : {&a, &b}) {
        for (double x : p->x()) {
            d = std::max(d, std::abs(a.at(x) - b.at(x)));
        }
    }
    return d;
}

CrossvalReport run_crossval(const ExperimentConfig& config) {
    const auto field = config.field();
    const auto domain = config.domain();
    const auto dp = variational_dp(field, DiscretizedPathSpace::counts(config.n_x, config.n_y));
    BvpOptions opt;
    opt.tol = config.bvp_tol;
    opt.scan_points = config.scan_points;
    opt.h = config.h;
    const auto bvp = solve_bvp(field, domain, opt);
    if (bvp.roots.empty()) {
        throw NumericalError("crossval: shooting found no root");
    }

    std::vector<CrossvalRoot> roots;
    std::size_t best = 0;
    for (std::size_t i = 0; i < bvp.roots.size(); ++i) {
        const auto& r = bvp.roots[i];
        roots.push_back({r.w0, r.endpoint_error, functional_eval(r.as_path(domain), field)});
        if (roots[i].functional > roots[best].functional) {
            best = i;
        }
    }
    auto ode_path = bvp.roots[best].as_path(domain);
    const double dist = sup_distance(dp.y_star, ode_path);
    return CrossvalReport{dp.g_star,          roots,          best, roots[best].functional, dist, bvp.warnings,
                          dp.y_star,          std::move(ode_path)};
}

CurveResult run_curve(const ExperimentConfig& config) {
    if (config.curve_l.size() < 3) {
        throw ValidationError("curve: need at least three l values");
    }
    const RectangleDomain largest(config.curve_l.back(), 0.0);
    const auto field = field_on(config, largest);
    const auto space = DiscretizedPathSpace::steps(config.curve_dx, config.curve_dy);
    const auto half = DiscretizedPathSpace::steps(config.curve_dx / 2, config.curve_dy / 2);

    CurveResult r{};
    r.curve = gstar_curve(field, config.curve_l, space);
    r.half_step_g = gstar_curve(field, config.curve_l, half).g_values;
    r.error_estimate = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < r.half_step_g.size(); ++i) {
        r.error_estimate = std::max(r.error_estimate, std::abs(r.half_step_g[i] - r.curve.g_values[i]));
        scale = std::max(scale, std::abs(r.curve.g_values[i]));
    }
    r.tol = config.curve_tol > 0.0 ? config.curve_tol : std::max(5.0 * r.error_estimate, 1e-12 * scale);
    r.convexity = convexity_check(r.curve, r.tol);
    r.lower_bound = lower_bound_check(r.curve, field, r.tol);

    const auto slopes = r.curve.slopes();
    const double dl = config.curve_l[1] - config.curve_l[0];
    r.slope_bound = 2.0 * field.alpha_max();
    r.plateau_tol = 2.0 * r.tol / dl + 1e-6 * r.slope_bound;
    r.plateaus = find_plateaus(slopes, r.plateau_tol, 2);
    r.slopes_non_decreasing = true;
    r.max_slope = slopes.empty() ? kNaN : *std::max_element(slopes.begin(), slopes.end());
    for (std::size_t i = 1; i < slopes.size(); ++i) {
        if (slopes[i] < slopes[i - 1] - r.plateau_tol) {
            r.slopes_non_decreasing = false;
        }
    }
    return r;
}

TasepResult run_tasep(const ExperimentConfig& config) {
    if (!config.grid_file.empty()) {
        throw ValidationError("tasep: needs a preset field depending on y only");
    }
    if (config.b != 0.0) {
        throw ValidationError("tasep: crossing times correspond to endpoints (l, 0); set b = 0");
    }
    const auto profile = preset_profile(config.preset, config.params);
    const auto field = config.field();
    const auto n_values = sorted_unique(effective_n_values(config));
    const auto tasks = replica_tasks(n_values, config.seeds);

    auto k_for = [&](int n) {
        return config.tasep_k > 0 ? config.tasep_k : static_cast<int>(std::floor(config.l * n / 2.0 + 1e-9));
    };

    TasepResult result;
    result.records.resize(tasks.size());
    parallel_for(tasks.size(), config.threads, [&](std::size_t i) {
        const auto t0 = Clock::now();
        const auto& task = tasks[i];
        TasepConfig tc;
        tc.alpha = profile;
        tc.n = task.n;
        tc.particle_budget = k_for(task.n);
        tc.window = config.tasep_window;
        const double t = tasep_crossing_time(tc, tc.particle_budget, task.seed);
        const auto rewards = sample_rewards(LatticeSpec(config.domain(), task.n), field, task.seed);
        const double g = lpp_solve(rewards).passage_time;
        result.records[i] = {task.n, task.seed, tc.particle_budget, t, g, seconds_since(t0)};
    });

    for (int n : n_values) {
        TasepNSummary s{n, k_for(n), 0, 0.0, 0.0, kNaN};
        for (const auto& r : result.records) {
            if (r.n == n) {
                ++s.replicas;
                s.mean_crossing += r.crossing_time;
                s.mean_lpp += r.lpp_time;
            }
        }
        if (s.replicas > 0) {
            s.mean_crossing /= static_cast<double>(s.replicas);
            s.mean_lpp /= static_cast<double>(s.replicas);
            s.discrepancy = std::abs(s.mean_crossing - s.mean_lpp);
        } else {
            s.mean_crossing = s.mean_lpp = kNaN;
        }
        result.summary.push_back(s);
    }
    if (!config.curve_l.empty()) {
        result.curve = run_curve(config);
    }
    return result;
}

nlohmann::json to_json(const ConcavityReport& report) {
    nlohmann::json margins = nlohmann::json::object();
    nlohmann::json worst = nlohmann::json::object();
    for (const auto& [label, m] : report.margins) {
        margins[label] = m.min_margin;
        worst[label] = {{"x", m.x}, {"y", m.y}, {"w", m.w}};
    }
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : report.violations) {
        violations.push_back({{"x", v.x}, {"y", v.y}, {"w", v.w}, {"inequality", v.inequality}, {"margin", v.margin}});
    }
    return {{"satisfied", report.satisfied},
            {"min_margin", report.min_margin},
            {"min_margins", margins},
            {"worst_points", worst},
            {"violations", violations}};
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string git_blob_hash(const std::string& content) {
    const std::string data = "blob " + std::to_string(content.size()) + '\0' + content;
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
        throw NumericalError("sha1 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

OutputWriter::OutputWriter(const ExperimentConfig& config) : config_(config) {
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) {
        throw ValidationError("cannot create output directory " + config.out_dir.string() + ": " + ec.message());
    }
}

std::filesystem::path OutputWriter::path(const std::string& suffix, const std::string& ext) const {
    return config_.out_dir / (config_.name + suffix + ext);
}

void OutputWriter::csv(const std::string& suffix, const std::string& header, const std::vector<std::string>& rows) const {
    std::string text = header + "\n";
    for (const auto& r : rows) {
        text += r;
        text += '\n';
    }
    write_text(path(suffix, ".csv"), text);
}

void OutputWriter::json(const std::string& suffix, const nlohmann::json& value) const {
    write_text(path(suffix, ".json"), value.dump(2) + "\n");
}

void OutputWriter::timings(const std::vector<std::string>& rows) const {
    csv("_timings", "key,wall_seconds", rows);
}

void OutputWriter::manifest(const std::string& command) const {
    nlohmann::json m;
    m["command"] = command;
    m["experiment"] = config_.name;
    m["config"] = config_.source;
    m["config_hash"] = git_blob_hash(config_.source);
    if (!config_.grid_file.empty()) {
        std::ifstream in(config_.grid_file, std::ios::binary);
        std::ostringstream text;
        text << in.rdbuf();
        m["grid_file"] = config_.grid_file.filename().string();
        m["grid_hash"] = git_blob_hash(text.str());
    }
    m["seeds"] = config_.seeds;
    m["n_values"] = config_.n_values.empty() ? std::vector<int>{} : effective_n_values(config_);
    write_text(config_.out_dir / (config_.name + "_manifest.json"), m.dump(2) + "\n");
}

void write_theorem(const OutputWriter& out, const ConvergenceResult& result, bool with_distance) {
    std::vector<std::string> rows;
    std::vector<std::string> times;
    for (const auto& r : result.records) {
        std::string row = std::to_string(r.n) + "," + std::to_string(r.seed) + "," + fmt(r.g);
        if (with_distance) {
            row += "," + (r.sup_distance ? fmt(*r.sup_distance) : std::string());
        }
        rows.push_back(row);
        times.push_back(std::to_string(r.n) + ":" + std::to_string(r.seed) + "," + fmt(r.wall_seconds));
    }
    out.csv("", with_distance ? "n,seed,g,sup_distance" : "n,seed,g", rows);
    out.timings(times);

    nlohmann::json per_n = nlohmann::json::array();
    for (const auto& s : result.summary) {
        per_n.push_back({{"n", s.n},
                         {"replicas", s.replicas},
                         {"mean_g", s.mean_g},
                         {"std_g", s.std_g},
                         {"abs_error", s.abs_error},
                         {"exceedance", s.exceedance},
                         {"mean_sup_distance", optional_json(s.mean_sup_distance)}});
    }
    out.json("_summary", {{"g_star", result.g_star},
                          {"delta", result.delta},
                          {"replicas", result.records.size()},
                          {"per_n", per_n},
                          {"warnings", result.warnings},
                          {"extra", result.extra}});
}

void write_curve(const OutputWriter& out, const CurveResult& r) {
    const auto slopes = r.curve.slopes();
    std::vector<std::string> rows;
    for (std::size_t i = 0; i < r.curve.l_values.size(); ++i) {
        rows.push_back(fmt(r.curve.l_values[i]) + "," + fmt(r.curve.g_values[i]) + "," +
                       (i < slopes.size() ? fmt(slopes[i]) : std::string()));
    }
    out.csv("_curve", "l,g_star,slope", rows);

    nlohmann::json plateaus = nlohmann::json::array();
    for (const auto& p : r.plateaus) {
        plateaus.push_back({{"first", p.first}, {"length", p.length}, {"mean", p.mean}});
    }
    out.json("_curve_summary", {{"error_estimate", r.error_estimate},
                                {"tol", r.tol},
                                {"convex", r.convexity.convex},
                                {"min_second_difference", r.convexity.min_second_difference},
                                {"lower_bound_holds", r.lower_bound.holds},
                                {"lower_bound_worst_slack", r.lower_bound.worst_slack},
                                {"slopes_non_decreasing", r.slopes_non_decreasing},
                                {"max_slope", r.max_slope},
                                {"slope_bound", r.slope_bound},
                                {"plateau_tol", r.plateau_tol},
                                {"plateaus", plateaus}});
}

void write_tasep(const OutputWriter& out, const TasepResult& result) {
    std::vector<std::string> rows;
    std::vector<std::string> times;
    for (const auto& r : result.records) {
        rows.push_back(std::to_string(r.n) + "," + std::to_string(r.seed) + "," + std::to_string(r.k) + "," +
                       fmt(r.crossing_time) + "," + fmt(r.lpp_time));
        times.push_back(std::to_string(r.n) + ":" + std::to_string(r.seed) + "," + fmt(r.wall_seconds));
    }
    out.csv("", "n,seed,k,crossing_time,lpp_time", rows);
    out.timings(times);
    nlohmann::json per_n = nlohmann::json::array();
    for (const auto& s : result.summary) {
        per_n.push_back({{"n", s.n},
                         {"k", s.k},
                         {"replicas", s.replicas},
                         {"mean_crossing", s.mean_crossing},
                         {"mean_lpp", s.mean_lpp},
                         {"discrepancy", s.discrepancy}});
    }
    out.json("_summary", {{"per_n", per_n}});
    if (result.curve) {
        write_curve(out, *result.curve);
    }
}

void write_crossval(const OutputWriter& out, const CrossvalReport& report) {
    nlohmann::json roots = nlohmann::json::array();
    for (const auto& r : report.roots) {
        roots.push_back({{"w0", r.w0}, {"endpoint_error", r.endpoint_error}, {"functional", r.functional}});
    }
    out.json("_summary", {{"g_star", report.g_star},
                          {"roots", roots},
                          {"best_root", report.best_root},
                          {"best_functional", report.best_functional},
                          {"gap", std::abs(report.g_star - report.best_functional)},
                          {"sup_distance", report.sup_distance},
                          {"warnings", report.warnings}});
    std::vector<std::string> rows;
    for (std::size_t i = 0; i < report.dp_path.size(); ++i) {
        const double x = report.dp_path.x()[i];
        rows.push_back(fmt(x) + "," + fmt(report.dp_path.y()[i]) + "," + fmt(report.ode_path.at(x)));
    }
    out.csv("", "x,y_dp,y_ode", rows);
}

}  // namespace ilpp
