#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ilpp/alpha_field.hpp"
#include "ilpp/domain.hpp"
#include "ilpp/path.hpp"

namespace ilpp {

/// The lattice S_N = Q cap (1/N) Z~^2, with Z~^2 the even sublattice.
/// Sites are integer pairs (i, j), x = i/N, y = j/N, i + j even. Slice i holds
/// the sites with that abscissa; they are stored in slice order, j increasing.
class LatticeSpec {
public:
    /// Rejects (ValidationError) unless N l and N b are integers with N(l + b) even.
    LatticeSpec(const RectangleDomain& domain, int n);

    static bool admissible(const RectangleDomain& domain, int n);
    /// Smallest admissible N' >= n.
    static LatticeSpec auto_adjusted(const RectangleDomain& domain, int n);

    const RectangleDomain& domain() const { return domain_; }
    int n() const { return n_; }
    /// Integer endpoint (N l, N b).
    int end_i() const { return end_i_; }
    int end_j() const { return end_j_; }

    int slice_lo(int i) const;
    int slice_hi(int i) const;
    std::size_t slice_size(int i) const { return static_cast<std::size_t>((slice_hi(i) - slice_lo(i)) / 2 + 1); }
    std::size_t slice_offset(int i) const { return offsets_[static_cast<std::size_t>(i)]; }
    std::size_t site_count() const { return offsets_.back(); }

    bool contains_site(int i, int j) const;
    /// Position of (i, j) in slice order; the site must exist.
    std::size_t index(int i, int j) const {
        return offsets_[static_cast<std::size_t>(i)] + static_cast<std::size_t>((j - slice_lo(i)) / 2);
    }

    bool operator==(const LatticeSpec& other) const {
        return n_ == other.n_ && domain_ == other.domain_;
    }

private:
    RectangleDomain domain_;
    int n_;
    int end_i_;
    int end_j_;
    std::vector<std::size_t> offsets_;
};

/// Unit-mean exponential attached to site (i, j) under `seed`. Rewards and
/// the coupled exclusion-process clocks are both derived from it.
double site_exponential(std::uint64_t seed, int i, int j);

/// One realization of the rewards xi_p = (alpha(p)/N) E_p, E_p ~ Exp(1) i.i.d.
class RewardField {
public:
    RewardField(LatticeSpec spec, std::uint64_t seed, std::vector<double> rewards);

    const LatticeSpec& spec() const { return spec_; }
    std::uint64_t seed() const { return seed_; }
    std::span<const double> rewards() const { return rewards_; }
    double at(int i, int j) const { return rewards_[spec_.index(i, j)]; }

    /// Little-endian dump: int64 N, f64 l, f64 b, u64 seed, then the rewards in
    /// slice order as f64.
    void write_binary(const std::filesystem::path& path) const;
    static RewardField read_binary(const std::filesystem::path& path);

private:
    LatticeSpec spec_;
    std::uint64_t seed_;
    std::vector<double> rewards_;
};

/// Draws one reward per site with mean alpha(p)/N. Deterministic in `seed`
/// and independent of enumeration order.
RewardField sample_rewards(const LatticeSpec& spec, const AlphaField& field, std::uint64_t seed);

struct Site {
    int i;
    int j;
    bool operator==(const Site&) const = default;
};

/// Directed lattice path from (0,0) to (N l, N b) with increments (1, +-1).
class DirectedPath {
public:
    /// Validates the path against `spec`; throws ValidationError otherwise.
    DirectedPath(const LatticeSpec& spec, std::vector<Site> sites);

    std::span<const Site> sites() const { return sites_; }
    int n() const { return n_; }

    /// Sum of rewards along the path, accumulated from the origin outwards.
    double reward_sum(const RewardField& rewards) const;

    /// The path as a macroscopic curve, x = i/N, y = j/N.
    LipschitzPath as_curve(const RectangleDomain& domain) const;

    /// Mirror image j -> -j (on the rectangle with endpoint (l, -b)).
    DirectedPath reflected(const LatticeSpec& mirrored_spec) const;

private:
    std::vector<Site> sites_;
    int n_;
};

struct LppSolution {
    double passage_time;
    DirectedPath path;
};

/// Last passage value G = max over directed paths of the reward sum (both
/// endpoints included) and the maximal path. Forward pass over x-slices with
/// two resident value slices and a one-bit backpointer per site. Ties go to the
/// upper predecessor (i-1, j+1).
LppSolution lpp_solve(const RewardField& rewards);

/// max over the lattice abscissae i/N of |path(x) - y(x)|, y linearly
/// interpolated. Throws ValidationError if the endpoints differ.
double path_sup_distance(const DirectedPath& path, const LipschitzPath& y);

}  // namespace ilpp
