#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ilpp/error.hpp"
#include "ilpp/experiments.hpp"
#include "ilpp/lattice.hpp"

namespace ilpp {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"experiment", {"name"}},
        {"field", {"preset", "params", "grid_file"}},
        {"domain", {"l", "b"}},
        {"lattice", {"n", "seeds", "seed_count", "seed_base", "auto_adjust_n"}},
        {"solver", {"n_x", "n_y", "h", "m", "scan_points", "bvp_tol", "concavity_density"}},
        {"tasep", {"k", "window"}},
        {"curve", {"l_start", "l_stop", "l_step", "dx", "dy", "tol"}},
        {"output", {"dir"}},
        {"tolerance", {"delta"}},
    };
    return keys;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) {
        out.push_back(cur);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ValidationError("config: " + key + ": cannot parse '" + text + "'");
    }
    return v;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
    std::vector<T> out;
    for (const auto& item : split_list(text)) {
        out.push_back(parse_number<T>(key, item));
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no") {
        return false;
    }
    throw ValidationError("config: " + key + ": expected a boolean, got '" + text + "'");
}

// The INI reader only knows whole-line comments; drop trailing "; ..." and
// "# ..." so values can be annotated.
std::string strip_inline_comments(const std::string& text) {
    std::istringstream in(text);
    std::string out;
    std::string line;
    while (std::getline(in, line)) {
        for (std::size_t i = 1; i < line.size(); ++i) {
            if ((line[i] == ';' || line[i] == '#') && std::isspace(static_cast<unsigned char>(line[i - 1]))) {
                line.erase(i);
                break;
            }
        }
        out += line;
        out += '\n';
    }
    return out;
}

}  // namespace

AlphaField ExperimentConfig::field() const {
    if (!grid_file.empty()) {
        auto f = AlphaField::load_grid(grid_file);
        return f.domain() == domain() ? f : f.with_domain(domain());
    }
    return make_preset(preset, params, domain());
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    std::istringstream in(strip_inline_comments(text));
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }

    ExperimentConfig c;
    c.source = text;
    c.source_dir = base_dir;
    std::optional<int> seed_count;
    std::uint64_t seed_base = 0;
    std::optional<double> l_start, l_stop, l_step;

    for (const auto& [section, body] : tree) {
        const auto known = known_keys().find(section);
        if (known == known_keys().end() || body.data().size() != 0) {
            throw ValidationError("config: unknown section or top-level key '" + section + "'");
        }
        for (const auto& [key, node] : body) {
            if (!known->second.contains(key)) {
                throw ValidationError("config: unknown key '" + section + "." + key + "'");
            }
            const std::string name = section + "." + key;
            const std::string& v = node.data();
            if (name == "experiment.name") {
                c.name = v;
            } else if (name == "field.preset") {
                c.preset = v;
            } else if (name == "field.params") {
                c.params = parse_list<double>(name, v);
            } else if (name == "field.grid_file") {
                c.grid_file = base_dir / v;
            } else if (name == "domain.l") {
                c.l = parse_number<double>(name, v);
            } else if (name == "domain.b") {
                c.b = parse_number<double>(name, v);
            } else if (name == "lattice.n") {
                c.n_values = parse_list<int>(name, v);
            } else if (name == "lattice.seeds") {
                c.seeds = parse_list<std::uint64_t>(name, v);
            } else if (name == "lattice.seed_count") {
                seed_count = parse_number<int>(name, v);
            } else if (name == "lattice.seed_base") {
                seed_base = parse_number<std::uint64_t>(name, v);
            } else if (name == "lattice.auto_adjust_n") {
                c.auto_adjust_n = parse_bool(name, v);
            } else if (name == "solver.n_x") {
                c.n_x = parse_number<int>(name, v);
            } else if (name == "solver.n_y") {
                c.n_y = parse_number<int>(name, v);
            } else if (name == "solver.h") {
                c.h = parse_number<double>(name, v);
            } else if (name == "solver.m") {
                c.m_values = parse_list<int>(name, v);
            } else if (name == "solver.scan_points") {
                c.scan_points = parse_number<int>(name, v);
            } else if (name == "solver.bvp_tol") {
                c.bvp_tol = parse_number<double>(name, v);
            } else if (name == "solver.concavity_density") {
                c.concavity_density = parse_number<int>(name, v);
            } else if (name == "tasep.k") {
                c.tasep_k = parse_number<int>(name, v);
            } else if (name == "tasep.window") {
                c.tasep_window = parse_number<int>(name, v);
            } else if (name == "curve.l_start") {
                l_start = parse_number<double>(name, v);
            } else if (name == "curve.l_stop") {
                l_stop = parse_number<double>(name, v);
            } else if (name == "curve.l_step") {
                l_step = parse_number<double>(name, v);
            } else if (name == "curve.dx") {
                c.curve_dx = parse_number<double>(name, v);
            } else if (name == "curve.dy") {
                c.curve_dy = parse_number<double>(name, v);
            } else if (name == "curve.tol") {
                c.curve_tol = parse_number<double>(name, v);
            } else if (name == "output.dir") {
                c.out_dir = v;
            } else if (name == "tolerance.delta") {
                c.delta = parse_number<double>(name, v);
            }
        }
    }

    if (seed_count) {
        if (!c.seeds.empty()) {
            throw ValidationError("config: give either lattice.seeds or lattice.seed_count");
        }
        if (*seed_count < 0) {
            throw ValidationError("config: lattice.seed_count must be non-negative");
        }
        for (int s = 0; s < *seed_count; ++s) {
            c.seeds.push_back(seed_base + static_cast<std::uint64_t>(s));
        }
    }
    if (l_start || l_stop || l_step) {
        if (!(l_start && l_stop && l_step) || !(*l_step > 0.0) || !(*l_stop >= *l_start)) {
            throw ValidationError("config: curve needs l_start <= l_stop and l_step > 0");
        }
        const auto count = static_cast<int>(std::floor((*l_stop - *l_start) / *l_step + 1e-9));
        for (int i = 0; i <= count; ++i) {
            c.curve_l.push_back(*l_start + i * *l_step);
        }
    }

    // Domain and field checks up front, so a bad config fails before any work.
    (void)c.domain();
    if (!c.grid_file.empty() && !std::filesystem::exists(c.grid_file)) {
        throw ValidationError("config: grid file not found: " + c.grid_file.string());
    }
    for (int n : c.n_values) {
        if (n < 1) {
            throw ValidationError("config: lattice.n values must be positive");
        }
    }
    if (c.delta && !(*c.delta > 0.0)) {
        throw ValidationError("config: tolerance.delta must be positive");
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("config: cannot read " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

std::vector<int> effective_n_values(const ExperimentConfig& config) {
    const auto domain = config.domain();
    std::vector<int> out;
    for (int n : config.n_values) {
        if (LatticeSpec::admissible(domain, n)) {
            out.push_back(n);
        } else if (config.auto_adjust_n) {
            out.push_back(LatticeSpec::auto_adjusted(domain, n).n());
        } else {
            std::ostringstream msg;
            msg << "N = " << n << " is not admissible for l = " << config.l << ", b = " << config.b
                << " (N l, N b must be integers with N (l + b) even); use --auto-adjust-n";
            throw ValidationError(msg.str());
        }
    }
    return out;
}

}  // namespace ilpp
