// Experiment driver: one subcommand per module plus the convergence studies.
// Exit status: 0 success, 2 invalid input, 3 numerical failure.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ilpp/concavity.hpp"
#include "ilpp/error.hpp"
#include "ilpp/euler_lagrange.hpp"
#include "ilpp/experiments.hpp"
#include "ilpp/lattice.hpp"
#include "ilpp/variational.hpp"

namespace {

using namespace ilpp;

struct Globals {
    std::string config_path;
    std::optional<int> seed_count;
    std::string out_dir;
    int threads = 1;
    bool auto_adjust_n = false;
};

ExperimentConfig load(const Globals& g) {
    if (g.config_path.empty()) {
        throw ValidationError("--config is required");
    }
    auto c = load_config(g.config_path);
    if (g.seed_count) {
        if (*g.seed_count < 0) {
            throw ValidationError("--seed-count must be non-negative");
        }
        c.seeds.clear();
        for (int s = 0; s < *g.seed_count; ++s) {
            c.seeds.push_back(static_cast<std::uint64_t>(s));
        }
    }
    if (!g.out_dir.empty()) {
        c.out_dir = g.out_dir;
    }
    if (g.threads < 1) {
        throw ValidationError("--threads must be at least 1");
    }
    c.threads = g.threads;
    c.auto_adjust_n = c.auto_adjust_n || g.auto_adjust_n;
    return c;
}

void print_summary(const ConvergenceResult& r) {
    std::cout << "g_star = " << fmt(r.g_star) << ", delta = " << fmt(r.delta) << "\n";
    for (const auto& s : r.summary) {
        std::cout << "N = " << s.n << ": replicas " << s.replicas << ", mean G " << s.mean_g << ", |error| "
                  << s.abs_error << ", exceedance " << s.exceedance;
        if (s.mean_sup_distance) {
            std::cout << ", mean sup-distance " << *s.mean_sup_distance;
        }
        std::cout << "\n";
    }
    for (const auto& w : r.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
}

int cmd_lpp(const ExperimentConfig& c, const std::string& dump_dir) {
    OutputWriter out(c);
    const auto field = c.field();
    std::vector<std::string> rows;
    std::vector<std::string> paths;
    for (int n : effective_n_values(c)) {
        const LatticeSpec spec(c.domain(), n);
        for (auto seed : c.seeds) {
            const auto rewards = sample_rewards(spec, field, seed);
            const auto sol = lpp_solve(rewards);
            rows.push_back(std::to_string(n) + "," + std::to_string(seed) + "," + fmt(sol.passage_time));
            for (const auto& s : sol.path.sites()) {
                paths.push_back(std::to_string(n) + "," + std::to_string(seed) + "," + std::to_string(s.i) + "," +
                                std::to_string(s.j));
            }
            if (!dump_dir.empty()) {
                std::filesystem::create_directories(dump_dir);
                rewards.write_binary(std::filesystem::path(dump_dir) /
                                     ("rewards_n" + std::to_string(n) + "_s" + std::to_string(seed) + ".bin"));
            }
        }
    }
    out.csv("", "n,seed,g", rows);
    out.csv("_paths", "n,seed,i,j", paths);
    out.manifest("lpp");
    std::cout << rows.size() << " replicas written to " << out.path("", ".csv").string() << "\n";
    return 0;
}

int cmd_variational(const ExperimentConfig& c) {
    OutputWriter out(c);
    const auto field = c.field();
    const auto sol = variational_dp(field, DiscretizedPathSpace::counts(c.n_x, c.n_y));
    std::vector<std::string> rows;
    for (std::size_t i = 0; i < sol.y_star.size(); ++i) {
        rows.push_back(fmt(sol.y_star.x()[i]) + "," + fmt(sol.y_star.y()[i]));
    }
    out.csv("", "x,y", rows);
    nlohmann::json upper = nlohmann::json::object();
    for (int m : c.m_values) {
        upper[std::to_string(m)] = riemann_upper(sol.y_star, field, m);
    }
    out.json("_summary", {{"g_star", sol.g_star},
                          {"n_x", c.n_x},
                          {"n_y", c.n_y},
                          {"functional", functional_eval(sol.y_star, field)},
                          {"riemann_upper", upper}});
    out.manifest("variational");
    std::cout << "g_star = " << fmt(sol.g_star) << "\n";
    return 0;
}

int cmd_ode(const ExperimentConfig& c) {
    OutputWriter out(c);
    const auto field = c.field();
    const auto domain = c.domain();
    BvpOptions opt;
    opt.tol = c.bvp_tol;
    opt.scan_points = c.scan_points;
    opt.h = c.h;
    const auto bvp = solve_bvp(field, domain, opt);
    nlohmann::json roots = nlohmann::json::array();
    std::vector<std::string> rows;
    for (std::size_t r = 0; r < bvp.roots.size(); ++r) {
        const auto& root = bvp.roots[r];
        roots.push_back({{"w0", root.w0},
                         {"endpoint_error", root.endpoint_error},
                         {"functional", functional_eval(root.as_path(domain), field)}});
        for (const auto& s : root.trajectory) {
            rows.push_back(std::to_string(r) + "," + fmt(s.x) + "," + fmt(s.y) + "," + fmt(s.w));
        }
    }
    out.csv("", "root,x,y,w", rows);
    out.json("_summary", {{"roots", roots}, {"scan_spacing", bvp.scan_spacing}, {"warnings", bvp.warnings}});
    out.manifest("ode");
    std::cout << bvp.roots.size() << " root(s)\n";
    for (const auto& w : bvp.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    return 0;
}

int cmd_concavity(const ExperimentConfig& c) {
    OutputWriter out(c);
    const auto report = check_condition(c.field(), c.concavity_density);
    out.json("_summary", to_json(report));
    out.manifest("concavity");
    std::cout << (report.satisfied ? "condition satisfied" : "condition violated") << ", min margin "
              << report.min_margin << "\n";
    return 0;
}

int cmd_tasep(const ExperimentConfig& c) {
    OutputWriter out(c);
    const auto r = run_tasep(c);
    write_tasep(out, r);
    out.manifest("tasep");
    for (const auto& s : r.summary) {
        std::cout << "N = " << s.n << ", k = " << s.k << ": mean T_k/N " << s.mean_crossing << ", mean G "
                  << s.mean_lpp << ", discrepancy " << s.discrepancy << "\n";
    }
    if (r.curve) {
        std::cout << "curve: convex " << r.curve->convexity.convex << ", lower bound " << r.curve->lower_bound.holds
                  << ", plateaus " << r.curve->plateaus.size() << "\n";
    }
    return 0;
}

int cmd_crossval(const ExperimentConfig& c) {
    OutputWriter out(c);
    const auto r = run_crossval(c);
    write_crossval(out, r);
    out.manifest("crossval");
    std::cout << "g_star = " << fmt(r.g_star) << ", best root functional = " << fmt(r.best_functional)
              << ", roots " << r.roots.size() << ", sup-distance " << r.sup_distance << "\n";
    return 0;
}

int cmd_theorem(const ExperimentConfig& c, bool second) {
    OutputWriter out(c);
    const auto r = second ? run_theorem2(c) : run_theorem1(c);
    write_theorem(out, r, second);
    out.manifest(second ? "theorem2" : "theorem1");
    print_summary(r);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inhomogeneous last-passage percolation experiments"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "experiment config file");
    app.add_option("--seed-count", g.seed_count, "use seeds 0 .. count-1");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--threads", g.threads, "replica worker threads");
    app.add_flag("--auto-adjust-n", g.auto_adjust_n, "replace inadmissible N by the next admissible one");
    app.fallthrough();

    std::string dump_dir;
    auto* lpp = app.add_subcommand("lpp", "sample rewards and solve last-passage percolation");
    lpp->add_option("--dump-rewards", dump_dir, "write reward fields to this directory");
    auto* variational = app.add_subcommand("variational", "discretized variational maximizer");
    auto* ode = app.add_subcommand("ode", "Euler-Lagrange shooting");
    auto* concavity = app.add_subcommand("concavity", "check the concavity condition on alpha");
    auto* tasep = app.add_subcommand("tasep", "exclusion-process crossing times and G*[l] curves");
    auto* crossval = app.add_subcommand("crossval", "compare the variational DP with the ODE roots");
    auto* theorem1 = app.add_subcommand("theorem1", "convergence of passage times");
    auto* theorem2 = app.add_subcommand("theorem2", "convergence of maximal paths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const auto c = load(g);
        if (lpp->parsed()) return cmd_lpp(c, dump_dir);
        if (variational->parsed()) return cmd_variational(c);
        if (ode->parsed()) return cmd_ode(c);
        if (concavity->parsed()) return cmd_concavity(c);
        if (tasep->parsed()) return cmd_tasep(c);
        if (crossval->parsed()) return cmd_crossval(c);
        if (theorem1->parsed()) return cmd_theorem(c, false);
        if (theorem2->parsed()) return cmd_theorem(c, true);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
