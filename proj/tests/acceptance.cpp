// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ilpp/concavity.hpp"
#include "ilpp/euler_lagrange.hpp"
#include "ilpp/experiments.hpp"
#include "ilpp/lattice.hpp"
#include "ilpp/variational.hpp"
#include "oracles.hpp"

using namespace ilpp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::string num(double v, int digits = 6) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

ExperimentConfig config(const std::string& text) {
    auto c = parse_config(text);
    c.threads = threads();
    return c;
}

Outcome anchor(double b, double limit) {
    std::ostringstream text;
    text << "[domain]\nl = 1\nb = " << b << "\n[lattice]\nn = 50 100 200 400\nseed_count = 100\nauto_adjust_n = true\n";
    const auto r = run_theorem1(config(text.str()));
    bool decreasing = true;
    std::ostringstream d;
    double prev = INFINITY;
    double last_mean = 0.0;
    double last_err = 0.0;
    d << "|mean G - " << num(limit) << "| over N =";
    for (const auto& s : r.summary) {
        d << " " << s.n;
    }
    d << ":";
    for (const auto& s : r.summary) {
        const double err = std::abs(s.mean_g - limit);
        decreasing = decreasing && err < prev;
        prev = err;
        last_mean = s.mean_g;
        last_err = err;
        d << " " << num(err, 4);
    }
    d << (decreasing ? " (strictly decreasing)" : " (NOT strictly decreasing)") << "; mean G at N = 400 is "
      << num(last_mean) << ", tolerance 0.05";
    return {decreasing && last_err <= 0.05, d.str()};
}

Outcome brute_force() {
    const int seeds = 50;
    std::size_t cases = 0;
    std::size_t mismatches = 0;
    for (int n = 1; n <= 12; ++n) {
        for (int big_l = 1; big_l <= 12; ++big_l) {
            for (int big_b = -big_l + 1; big_b < big_l; ++big_b) {
                if ((big_l + big_b) % 2 != 0) {
                    continue;
                }
                const RectangleDomain q(static_cast<double>(big_l) / n, static_cast<double>(big_b) / n);
                const LatticeSpec spec(q, n);
                const auto field = make_preset("exp_y", std::vector<double>{1.0, 0.3}, q);
                for (int s = 0; s < seeds; ++s) {
                    const auto r = sample_rewards(spec, field, static_cast<std::uint64_t>(s));
                    const auto sol = lpp_solve(r);
                    const auto brute = oracle::enumerate_lpp(r);
                    const std::vector<Site> got(sol.path.sites().begin(), sol.path.sites().end());
                    const bool ok = sol.passage_time == brute.best && sol.path.reward_sum(r) == sol.passage_time &&
                                    std::find(brute.argmax.begin(), brute.argmax.end(), got) != brute.argmax.end();
                    mismatches += ok ? 0 : 1;
                    ++cases;
                }
            }
        }
    }
    return {mismatches == 0, std::to_string(cases) + " (l, b, N, seed) cases with N l <= 12, " +
                                 std::to_string(mismatches) + " mismatches against exhaustive enumeration"};
}

Outcome jensen() {
    const RectangleDomain q(1.0, 0.25);
    const std::vector<AlphaField> fields{make_preset("parabolic", std::vector<double>{2.0, -1.0}, q),
                                         make_preset("bumps", std::vector<double>{1.0, 2.0, 0.2, 10.0}, q),
                                         make_preset("bilinear", std::vector<double>{2.0, 0.5, -0.7, 0.3}, q)};
    const std::vector<int> ms{2, 4, 8, 16, 64};
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t nodes = 40;
    const double h = q.l() / nodes;
    double worst = INFINITY;
    int paths = 0;
    while (paths < 200) {
        std::vector<double> y{0.0};
        bool ok = true;
        for (std::size_t i = 1; i < nodes && ok; ++i) {
            const double next = y.back() + u(rng) * h;
            const auto [lo, hi] = q.y_range(static_cast<double>(i) * h);
            ok = next >= lo && next <= hi;
            y.push_back(next);
        }
        if (!ok || std::abs(q.b() - y.back()) > h) {
            continue;
        }
        y.push_back(q.b());
        const auto path = LipschitzPath::uniform(q, y);
        ++paths;
        for (const auto& f : fields) {
            const double g = functional_eval(path, f);
            for (int m : ms) {
                worst = std::min(worst, riemann_upper(path, f, m) - g);
            }
        }
    }

    bool monotone = true;
    int smooth = 0;
    for (double amp : {0.05, 0.1, 0.2}) {
        for (int k : {1, 2, 3}) {
            const auto path =
                LipschitzPath::sample(q, 512, [&](double x) { return 0.25 * x + amp * std::sin(k * M_PI * x) / k; });
            ++smooth;
            for (const auto& f : fields) {
                const double g = functional_eval(path, f);
                double prev = INFINITY;
                for (int m : ms) {
                    const double gap = riemann_upper(path, f, m) - g;
                    monotone = monotone && gap <= prev + 1e-9;
                    prev = gap;
                }
            }
        }
    }
    return {worst >= -1e-9 && monotone,
            "min (G_m - G) over 200 random paths x 3 fields x m in {2,4,8,16,64} = " + num(worst) +
                " (>= -1e-9); gap non-increasing in m on " + std::to_string(smooth) + " smooth paths: " +
                (monotone ? "yes" : "no")};
}

Outcome stationarity() {
    const RectangleDomain q(1.0, 0.0);
    const auto f = make_preset("parabolic", std::vector<double>{2.0, -1.0}, q);
    BvpOptions opt;
    opt.h = q.l() / 2000;
    const auto bvp = solve_bvp(f, q, opt);
    if (bvp.roots.size() != 1) {
        return {false, std::to_string(bvp.roots.size()) + " roots, expected 1"};
    }
    const auto y0 = bvp.roots[0].as_path(q);
    const double eps = 1e-4;
    double worst = 0.0;
    for (int k = 1; k <= 4; ++k) {
        std::vector<double> xs(y0.x().begin(), y0.x().end());
        std::vector<double> up(xs.size());
        std::vector<double> down(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double h = std::sin(k * M_PI * xs[i]);
            up[i] = y0.y()[i] + eps * h;
            down[i] = y0.y()[i] - eps * h;
        }
        up.front() = down.front() = 0.0;
        up.back() = down.back() = 0.0;
        const double d =
            (functional_eval(LipschitzPath(q, xs, up), f) - functional_eval(LipschitzPath(q, xs, down), f)) / (2 * eps);
        worst = std::max(worst, std::abs(d));
    }
    const double g0 = functional_eval(y0, f);
    const double g_star = variational_dp(f, DiscretizedPathSpace::counts(800, 800)).g_star;
    const double gap = std::abs(g0 - g_star);
    return {worst <= 1e-3 && gap <= 1e-3, "one root w0 = " + num(bvp.roots[0].w0) +
                                              "; max |first variation| over sin(k pi x), k = 1..4: " + num(worst) +
                                              " (<= 1e-3); |G(y0) - g_star(800, 800)| = " + num(gap) + " (<= 1e-3)"};
}

Outcome concavity() {
    const RectangleDomain q(1.0, 0.0);
    const bool good = check_condition(make_preset("parabolic", std::vector<double>{2.0, -1.0}, q)).satisfied;
    const bool flat = check_condition(make_preset("constant", std::vector<double>{1.0}, q)).satisfied;
    const bool convex = check_condition(make_preset("parabolic", std::vector<double>{2.0, 1.0}, q)).satisfied;
    const auto ratio = gamma_ratio_sup();
    const bool ratio_ok = std::abs(ratio.value - 0.25) <= 1e-6;
    return {good && !flat && !convex && ratio_ok,
            std::string("2 - y^2 ") + (good ? "passes" : "fails") + ", constant " + (flat ? "passes" : "fails") +
                ", 2 + y^2 " + (convex ? "passes" : "fails") + "; sup (gamma')^2/(-gamma gamma'') = " +
                num(ratio.value, 10) + " at w = " + num(ratio.w)};
}

Outcome path_convergence() {
    const auto r = run_theorem2(
        config("[field]\npreset = parabolic\nparams = 2 -1\n[lattice]\nn = 100 200 400\nseed_count = 50\n"));
    bool decreasing = true;
    double prev = INFINITY;
    std::ostringstream d;
    d << "mean sup-distance at N = 100, 200, 400:";
    for (const auto& s : r.summary) {
        decreasing = decreasing && *s.mean_sup_distance < prev;
        prev = *s.mean_sup_distance;
        d << " " << num(prev, 4);
    }
    d << (decreasing ? " (decreasing)" : " (NOT decreasing)") << ", tolerance 0.1 at N = 400";
    return {decreasing && prev < 0.1, d.str()};
}

Outcome tasep_coupling() {
    const auto homog = run_tasep(config("[lattice]\nn = 400\nseed_count = 50\n"));
    const double mean = homog.summary.at(0).mean_crossing;
    const bool homog_ok = std::abs(mean - 2.0) <= 0.1;

    const auto inhomog = run_tasep(config("[field]\npreset = exp_y\nparams = 1 0.8\n[lattice]\nn = 100 200 400\nseed_count = 50\n"));
    bool decreasing = true;
    double prev = INFINITY;
    std::ostringstream d;
    d << "alpha = 1: mean T_200/400 = " << num(mean) << " (2 +- 0.1); alpha = exp(0.8 y): |mean T/N - mean G| at N = "
         "100, 200, 400:";
    for (const auto& s : inhomog.summary) {
        decreasing = decreasing && s.discrepancy < prev;
        prev = s.discrepancy;
        d << " " << num(prev, 4);
    }
    d << (decreasing ? " (decreasing)" : " (NOT decreasing)");
    return {homog_ok && decreasing, d.str()};
}

Outcome curve_convexity() {
    const auto r = run_curve(config(
        "[field]\npreset = bumps\nparams = 1, 3 1 50, 6 2 50\n[curve]\nl_start = 0.5\nl_stop = 8\nl_step = 0.25\n"));
    const bool bounded = r.max_slope <= r.slope_bound + 1e-9;
    const bool ok = r.convexity.convex && r.lower_bound.holds && r.slopes_non_decreasing && r.plateaus.size() >= 2 &&
                    bounded;
    std::ostringstream d;
    d << "min second difference " << num(r.convexity.min_second_difference, 3) << " vs -tol = " << num(-r.tol, 3)
      << " (5 x error estimate " << num(r.error_estimate, 3) << "); lower bound worst slack "
      << num(r.lower_bound.worst_slack, 3) << "; slopes non-decreasing: " << (r.slopes_non_decreasing ? "yes" : "no")
      << "; plateaus at";
    for (const auto& p : r.plateaus) {
        d << " " << num(p.mean, 4);
    }
    d << "; max slope " << num(r.max_slope) << " <= 2 max alpha = " << num(r.slope_bound);
    return {ok, d.str()};
}

Outcome determinism() {
    const auto root = fs::temp_directory_path() / "ilpp_acceptance_determinism";
    fs::remove_all(root);
    const std::vector<std::pair<std::string, std::string>> experiments{
        {"theorem1", "[experiment]\nname = t1\n[lattice]\nn = 50 100\nseed_count = 20\n"},
        {"theorem2", "[experiment]\nname = t2\n[field]\npreset = parabolic\nparams = 2 -1\n[lattice]\nn = 50 100\nseed_count = 10\n"},
        {"tasep", "[experiment]\nname = tp\n[field]\npreset = exp_y\nparams = 1 0.8\n[lattice]\nn = 50 100\nseed_count = 10\n"
                  "[curve]\nl_start = 0.5\nl_stop = 2\nl_step = 0.25\n"},
        {"crossval", "[experiment]\nname = cv\n[field]\npreset = parabolic\nparams = 2 -1\n"},
    };
    std::size_t files = 0;
    std::vector<std::string> differing;
    for (const auto& [kind, text] : experiments) {
        std::vector<std::vector<std::pair<std::string, std::string>>> runs;
        for (int rep = 0; rep < 2; ++rep) {
            auto c = config(text);
            c.threads = rep == 0 ? 1 : 3;
            c.out_dir = root / (kind + std::to_string(rep));
            const OutputWriter out(c);
            if (kind == "theorem1") {
                write_theorem(out, run_theorem1(c), false);
            } else if (kind == "theorem2") {
                write_theorem(out, run_theorem2(c), true);
            } else if (kind == "tasep") {
                write_tasep(out, run_tasep(c));
            } else {
                write_crossval(out, run_crossval(c));
            }
            out.manifest(kind);
            std::vector<std::pair<std::string, std::string>> contents;
            for (const auto& e : fs::directory_iterator(c.out_dir)) {
                const auto name = e.path().filename().string();
                if (name.find("_timings") != std::string::npos) {
                    continue;
                }
                std::ifstream in(e.path(), std::ios::binary);
                std::ostringstream s;
                s << in.rdbuf();
                contents.emplace_back(name, s.str());
            }
            std::sort(contents.begin(), contents.end());
            runs.push_back(std::move(contents));
        }
        files += runs[0].size();
        if (runs[0] != runs[1]) {
            differing.push_back(kind);
        }
    }
    fs::remove_all(root);
    std::string d = std::to_string(files) + " data files from theorem1, theorem2, tasep, crossval rerun with 1 vs 3 threads: ";
    if (differing.empty()) {
        d += "all byte-identical";
    } else {
        d += "differences in";
        for (const auto& k : differing) {
            d += " " + k;
        }
    }
    return {differing.empty(), d};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 homogeneous anchor (b = 0)", [] { return anchor(0.0, 2.0); }},
        {"2 off-axis anchor (b = 0.5)", [] { return anchor(0.5, oracle::gamma(0.5)); }},
        {"3 brute-force oracle equivalence", brute_force},
        {"4 Jensen upper bound", jensen},
        {"5 Euler-Lagrange stationarity", stationarity},
        {"6 concavity machinery", concavity},
        {"7 path convergence", path_convergence},
        {"8 TASEP coupling", tasep_coupling},
        {"9 convexity of G*[l]", curve_convexity},
        {"10 determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail << "  [" << num(secs, 3)
                  << " s]" << std::endl;
        failed += o.pass ? 0 : 1;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
