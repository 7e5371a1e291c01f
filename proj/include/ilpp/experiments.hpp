#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ilpp/alpha_field.hpp"
#include "ilpp/concavity.hpp"
#include "ilpp/domain.hpp"
#include "ilpp/euler_lagrange.hpp"
#include "ilpp/path.hpp"
#include "ilpp/tasep.hpp"

namespace ilpp {

/// Parsed experiment configuration. The file is INI-style: `key = value`
/// lines under `[section]` headers, lists separated by spaces or commas.
///
///   [experiment] name
///   [field]      preset, params | grid_file
///   [domain]     l, b
///   [lattice]    n, seeds | seed_count (+ seed_base), auto_adjust_n
///   [solver]     n_x, n_y, h, m, scan_points, bvp_tol, concavity_density
///   [tasep]      k, window
///   [curve]      l_start, l_stop, l_step, dx, dy, tol
///   [output]     dir
///   [tolerance]  delta
struct ExperimentConfig {
    std::string name = "experiment";
    std::string preset = "constant";
    std::vector<double> params{1.0};
    std::filesystem::path grid_file;
    double l = 1.0;
    double b = 0.0;
    std::vector<int> n_values;
    std::vector<std::uint64_t> seeds;
    bool auto_adjust_n = false;

    int n_x = 200;
    int n_y = 1600;
    double h = 0.0;
    std::vector<int> m_values{2, 4, 8, 16, 64};
    int scan_points = 512;
    double bvp_tol = 1e-10;
    int concavity_density = 256;

    int tasep_k = 0;  ///< 0 selects floor(l N / 2)
    int tasep_window = 0;

    std::vector<double> curve_l;
    double curve_dx = 0.025;
    double curve_dy = 0.00625;
    double curve_tol = 0.0;  ///< 0 selects 5x the half-step error estimate

    std::filesystem::path out_dir = "out";
    std::optional<double> delta;  ///< default 0.1 g_star
    int threads = 1;

    std::string source;  ///< text the config was parsed from
    std::filesystem::path source_dir;

    RectangleDomain domain() const { return {l, b}; }
    AlphaField field() const;
};

/// Throws ValidationError on syntax errors, unknown keys, bad values or
/// missing grid files.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks N values against the lattice rules, replacing them by the next
/// admissible value when auto_adjust_n is set. Returns the effective list.
std::vector<int> effective_n_values(const ExperimentConfig& config);

struct ConvergenceRecord {
    int n;
    std::uint64_t seed;
    double g;
    std::optional<double> sup_distance;
    double wall_seconds;
};

struct NSummary {
    int n;
    std::size_t replicas;
    double mean_g;
    double std_g;
    double abs_error;   ///< |mean_g - g_star|
    double exceedance;  ///< fraction with |G - g_star| > delta
    std::optional<double> mean_sup_distance;
};

struct ConvergenceResult {
    double g_star = 0.0;
    double delta = 0.0;
    std::vector<ConvergenceRecord> records;  ///< sorted by (N, seed)
    std::vector<NSummary> summary;
    std::vector<std::string> warnings;
    nlohmann::json extra = nlohmann::json::object();
};

ConvergenceResult run_theorem1(const ExperimentConfig& config);
ConvergenceResult run_theorem2(const ExperimentConfig& config);

struct CrossvalRoot {
    double w0;
    double endpoint_error;
    double functional;
};

struct CrossvalReport {
    double g_star;
    std::vector<CrossvalRoot> roots;
    std::size_t best_root;
    double best_functional;
    double sup_distance;  ///< DP maximizer vs best ODE trajectory
    std::vector<std::string> warnings;
    LipschitzPath dp_path;
    LipschitzPath ode_path;
};

CrossvalReport run_crossval(const ExperimentConfig& config);

/// sup over x of |a(x) - b(x)|; both must live on the same domain.
double sup_distance(const LipschitzPath& a, const LipschitzPath& b);

struct TasepRecord {
    int n;
    std::uint64_t seed;
    int k;
    double crossing_time;  ///< T_k / N
    double lpp_time;       ///< G to (l, 0) on the same seed
    double wall_seconds;
};

struct TasepNSummary {
    int n;
    int k;
    std::size_t replicas;
    double mean_crossing;
    double mean_lpp;
    double discrepancy;  ///< |mean_crossing - mean_lpp|
};

struct CurveResult {
    GStarCurve curve;
    std::vector<double> half_step_g;  ///< same l values at (dx/2, dy/2)
    double error_estimate;
    double tol;
    ConvexityReport convexity;
    LowerBoundReport lower_bound;
    std::vector<Plateau> plateaus;
    bool slopes_non_decreasing;
    double max_slope;
    double slope_bound;  ///< 2 max alpha
    double plateau_tol;
};

struct TasepResult {
    std::vector<TasepRecord> records;
    std::vector<TasepNSummary> summary;
    std::optional<CurveResult> curve;
};

/// Crossing times for every (N, seed), compared with LPP on the same seeds.
/// The field must not depend on x. Runs the G*[l] curve when curve_l is set.
TasepResult run_tasep(const ExperimentConfig& config);
CurveResult run_curve(const ExperimentConfig& config);

nlohmann::json to_json(const ConcavityReport& report);

/// Writes `<name>.csv`, `<name>_summary.json`, `<name>_timings.csv` and
/// `<name>_manifest.json` under config.out_dir. Data files carry no timing
/// information, so identical configs give byte-identical data files.
class OutputWriter {
public:
    explicit OutputWriter(const ExperimentConfig& config);

    void csv(const std::string& suffix, const std::string& header, const std::vector<std::string>& rows) const;
    void json(const std::string& suffix, const nlohmann::json& value) const;
    void timings(const std::vector<std::string>& rows) const;
    /// Config echo plus git-style blob hashes of the config and any grid file.
    void manifest(const std::string& command) const;

    std::filesystem::path path(const std::string& suffix, const std::string& ext) const;

private:
    const ExperimentConfig& config_;
};

/// Formats a double so that it reads back exactly.
std::string fmt(double v);

/// SHA-1 of "blob <size>\0<content>", as git computes object ids.
std::string git_blob_hash(const std::string& content);

void write_theorem(const OutputWriter& out, const ConvergenceResult& result, bool with_distance);
void write_tasep(const OutputWriter& out, const TasepResult& result);
void write_curve(const OutputWriter& out, const CurveResult& result);
void write_crossval(const OutputWriter& out, const CrossvalReport& report);

}  // namespace ilpp
