#include "ilpp/lattice.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <climits>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ilpp/error.hpp"
#include "ilpp/rng.hpp"

namespace ilpp {

namespace {

bool near_integer(double v, long long& out) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9 * std::max(1.0, std::abs(v)) || std::abs(r) > INT_MAX / 4) {
        return false;
    }
    out = static_cast<long long>(r);
    return true;
}

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> bytes{};
    for (int k = 0; k < 8; ++k) {
        bytes[static_cast<std::size_t>(k)] = static_cast<char>((v >> (8 * k)) & 0xffU);
    }
    out.write(bytes.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), 8);
    if (!in) {
        throw ValidationError("reward dump truncated");
    }
    std::uint64_t v = 0;
    for (int k = 7; k >= 0; --k) {
        v = (v << 8) | bytes[static_cast<std::size_t>(k)];
    }
    return v;
}

}  // namespace

bool LatticeSpec::admissible(const RectangleDomain& domain, int n) {
    if (n < 1) {
        return false;
    }
    long long li = 0;
    long long bi = 0;
    if (!near_integer(n * domain.l(), li) || !near_integer(n * domain.b(), bi)) {
        return false;
    }
    return (li + bi) % 2 == 0;
}

LatticeSpec::LatticeSpec(const RectangleDomain& domain, int n) : domain_(domain), n_(n) {
    if (!admissible(domain, n)) {
        std::ostringstream msg;
        msg << "lattice: (l, b) = (" << domain.l() << ", " << domain.b() << ") is not a vertex of the N = " << n
            << " lattice (need N l, N b integers and N (l + b) even)";
        throw ValidationError(msg.str());
    }
    end_i_ = static_cast<int>(std::lround(n * domain.l()));
    end_j_ = static_cast<int>(std::lround(n * domain.b()));
    offsets_.resize(static_cast<std::size_t>(end_i_) + 2);
    offsets_[0] = 0;
    for (int i = 0; i <= end_i_; ++i) {
        offsets_[static_cast<std::size_t>(i) + 1] = offsets_[static_cast<std::size_t>(i)] + slice_size(i);
    }
}

LatticeSpec LatticeSpec::auto_adjusted(const RectangleDomain& domain, int n) {
    const long long limit = static_cast<long long>(std::max(n, 1)) + 1000000;
    for (long long m = std::max(n, 1); m <= limit && m <= INT_MAX; ++m) {
        if (admissible(domain, static_cast<int>(m))) {
            return LatticeSpec(domain, static_cast<int>(m));
        }
    }
    throw ValidationError("lattice: no admissible N found near the requested value");
}

int LatticeSpec::slice_lo(int i) const { return std::max(-i, end_j_ - (end_i_ - i)); }

int LatticeSpec::slice_hi(int i) const { return std::min(i, end_j_ + (end_i_ - i)); }

bool LatticeSpec::contains_site(int i, int j) const {
    return i >= 0 && i <= end_i_ && ((i + j) % 2 == 0) && j >= slice_lo(i) && j <= slice_hi(i);
}

double site_exponential(std::uint64_t seed, int i, int j) {
    return rng::standard_exponential(rng::key(seed, i, j));
}

RewardField::RewardField(LatticeSpec spec, std::uint64_t seed, std::vector<double> rewards)
    : spec_(std::move(spec)), seed_(seed), rewards_(std::move(rewards)) {
    if (rewards_.size() != spec_.site_count()) {
        throw ValidationError("reward field: one reward per lattice site required");
    }
    for (double r : rewards_) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
            throw ValidationError("reward field: rewards must be finite and nonnegative");
        }
    }
}

void RewardField::write_binary(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write reward dump " + path.string());
    }
    put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(spec_.n())));
    put_u64(out, std::bit_cast<std::uint64_t>(spec_.domain().l()));
    put_u64(out, std::bit_cast<std::uint64_t>(spec_.domain().b()));
    put_u64(out, seed_);
    for (double r : rewards_) {
        put_u64(out, std::bit_cast<std::uint64_t>(r));
    }
}

RewardField RewardField::read_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open reward dump " + path.string());
    }
    const auto n = static_cast<std::int64_t>(get_u64(in));
    const double l = std::bit_cast<double>(get_u64(in));
    const double b = std::bit_cast<double>(get_u64(in));
    const std::uint64_t seed = get_u64(in);
    if (n < 1 || n > INT_MAX) {
        throw ValidationError("reward dump: invalid N");
    }
    LatticeSpec spec(RectangleDomain(l, b), static_cast<int>(n));
    std::vector<double> rewards(spec.site_count());
    for (double& r : rewards) {
        r = std::bit_cast<double>(get_u64(in));
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw ValidationError("reward dump: trailing bytes");
    }
    return RewardField(std::move(spec), seed, std::move(rewards));
}

RewardField sample_rewards(const LatticeSpec& spec, const AlphaField& field, std::uint64_t seed) {
    std::vector<double> rewards(spec.site_count());
    const double inv_n = 1.0 / spec.n();
    for (int i = 0; i <= spec.end_i(); ++i) {
        const double x = static_cast<double>(i) / spec.n();
        std::size_t k = spec.slice_offset(i);
        for (int j = spec.slice_lo(i); j <= spec.slice_hi(i); j += 2, ++k) {
            const double alpha = field.value(x, static_cast<double>(j) / spec.n());
            rewards[k] = alpha * inv_n * site_exponential(seed, i, j);
        }
    }
    return RewardField(spec, seed, std::move(rewards));
}

DirectedPath::DirectedPath(const LatticeSpec& spec, std::vector<Site> sites) : sites_(std::move(sites)), n_(spec.n()) {
    if (sites_.empty() || sites_.front() != Site{0, 0} || sites_.back() != Site{spec.end_i(), spec.end_j()}) {
        throw ValidationError("directed path must run from (0, 0) to (N l, N b)");
    }
    for (std::size_t k = 0; k < sites_.size(); ++k) {
        if (!spec.contains_site(sites_[k].i, sites_[k].j)) {
            throw ValidationError("directed path leaves the lattice");
        }
        if (k > 0 && (sites_[k].i != sites_[k - 1].i + 1 || std::abs(sites_[k].j - sites_[k - 1].j) != 1)) {
            throw ValidationError("directed path increments must be (1, +-1)");
        }
    }
}

double DirectedPath::reward_sum(const RewardField& rewards) const {
    double acc = rewards.at(sites_.front().i, sites_.front().j);
    for (std::size_t k = 1; k < sites_.size(); ++k) {
        acc = rewards.at(sites_[k].i, sites_[k].j) + acc;
    }
    return acc;
}

LipschitzPath DirectedPath::as_curve(const RectangleDomain& domain) const {
    std::vector<double> x(sites_.size());
    std::vector<double> y(sites_.size());
    for (std::size_t k = 0; k < sites_.size(); ++k) {
        x[k] = static_cast<double>(sites_[k].i) / n_;
        y[k] = static_cast<double>(sites_[k].j) / n_;
    }
    return LipschitzPath(domain, std::move(x), std::move(y));
}

DirectedPath DirectedPath::reflected(const LatticeSpec& mirrored_spec) const {
    std::vector<Site> sites(sites_.size());
    std::transform(sites_.begin(), sites_.end(), sites.begin(), [](Site s) { return Site{s.i, -s.j}; });
    return DirectedPath(mirrored_spec, std::move(sites));
}

LppSolution lpp_solve(const RewardField& rewards) {
    const LatticeSpec& spec = rewards.spec();
    const auto r = rewards.rewards();
    std::vector<std::uint64_t> from_upper((spec.site_count() + 63) / 64, 0);

    std::vector<double> prev{r[0]};
    std::vector<double> cur;
    for (int i = 1; i <= spec.end_i(); ++i) {
        const int plo = spec.slice_lo(i - 1);
        const int phi = spec.slice_hi(i - 1);
        const int lo = spec.slice_lo(i);
        const int hi = spec.slice_hi(i);
        cur.assign(spec.slice_size(i), 0.0);
        std::size_t site = spec.slice_offset(i);
        for (int j = lo; j <= hi; j += 2, ++site) {
            const bool has_up = j + 1 <= phi;
            const bool has_down = j - 1 >= plo;
            double best;
            bool up;
            if (has_up && has_down) {
                const double vu = prev[static_cast<std::size_t>((j + 1 - plo) / 2)];
                const double vd = prev[static_cast<std::size_t>((j - 1 - plo) / 2)];
                up = vu >= vd;
                best = up ? vu : vd;
            } else if (has_up) {
                up = true;
                best = prev[static_cast<std::size_t>((j + 1 - plo) / 2)];
            } else {
                up = false;
                best = prev[static_cast<std::size_t>((j - 1 - plo) / 2)];
            }
            cur[static_cast<std::size_t>((j - lo) / 2)] = r[site] + best;
            if (up) {
                from_upper[site / 64] |= std::uint64_t{1} << (site % 64);
            }
        }
        std::swap(prev, cur);
    }
    const double g = prev[0];

    std::vector<Site> sites(static_cast<std::size_t>(spec.end_i()) + 1);
    int j = spec.end_j();
    for (int i = spec.end_i(); i >= 0; --i) {
        sites[static_cast<std::size_t>(i)] = {i, j};
        if (i > 0) {
            const std::size_t site = spec.index(i, j);
            j += ((from_upper[site / 64] >> (site % 64)) & 1U) ? 1 : -1;
        }
    }
    return {g, DirectedPath(spec, std::move(sites))};
}

double path_sup_distance(const DirectedPath& path, const LipschitzPath& y) {
    const auto sites = path.sites();
    const double n = path.n();
    const double l = static_cast<double>(sites.back().i) / n;
    const double b = static_cast<double>(sites.back().j) / n;
    const double tol = 1e-9 * std::max(1.0, l);
    if (std::abs(l - y.domain().l()) > tol || std::abs(b - y.domain().b()) > tol) {
        throw ValidationError("path_sup_distance: lattice path and curve have different endpoints");
    }
    double dist = 0.0;
    for (const Site& s : sites) {
        dist = std::max(dist, std::abs(static_cast<double>(s.j) / n - y.at(static_cast<double>(s.i) / n)));
    }
    return dist;
}

}  // namespace ilpp
