#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "phlab/fibred.hpp"
#include "phlab/holonomy.hpp"

namespace phlab::projective {

// Direction angle of a line in R^2, reduced mod pi into [0, pi).
double projectivize(const Mat2& m, double theta);

inline int angle_bin(double theta, int n_bins) {
    int b = int(mod_pi(theta) / M_PI * n_bins);
    return std::min(b, n_bins - 1);
}

// Conditional measure on the projective fibre, as a normalised histogram
// over [0, pi).
struct FibreConditional {
    std::vector<double> mass;
    long long samples = 0;

    int n_bins() const { return int(mass.size()); }
    double total() const {
        double s = 0.0;
        for (double m : mass) s += m;
        return s;
    }
};

struct Atom {
    double theta = 0.0;
    double mass = 0.0;
};

// Clusters narrow mass concentrations; reports at most two atoms with mass
// >= threshold - slack each.
std::vector<Atom> detect_atoms(const FibreConditional& c, double threshold = 0.5,
                               double slack = 0.1);

struct DisintegrationParams {
    int base_n = 12;
    int fibre_n = 12;
    int n_bins = 64;
    int n_particles = 16384;
    long long n_steps = 3000;
    long long burn_in = 1000;
    std::uint64_t seed = 1;
    int workers = 1;
    long long min_samples = 50;
    bool theta_fixed = false;  // seed all directions at theta0 instead of uniformly
    double theta0 = 0.0;
};

class DisintegrationField {
  public:
    DisintegrationField(int base_n, int fibre_n, int n_bins);

    int base_n() const { return base_n_; }
    int fibre_n() const { return fibre_n_; }
    int n_bins() const { return n_bins_; }
    int n_cells() const { return base_n_ * base_n_ * fibre_n_ * fibre_n_; }

    int cell_of(const fibred::SystemPoint& p) const;
    // cell index decomposition: ((bi * base_n + bj) * fibre_n + fi) * fibre_n + fj
    fibred::SystemPoint cell_centre(int cell, fibred::FibreKind kind) const;

    void record(int cell, int bin) { counts_[std::size_t(cell) * n_bins_ + bin]++; }
    void merge(const DisintegrationField& other);

    FibreConditional conditional(int cell) const;
    long long cell_count(int cell) const;
    bool sparse(int cell, long long min_samples) const;
    long long total_samples() const;

    // chi^2 statistic of the base marginal against uniformity (diagnostic)
    double base_marginal_chi2() const;

    std::uint64_t seed = 0;

    // Deterministic negative control: permutes the cells' conditionals.
    DisintegrationField scrambled(std::uint64_t seed) const;

  private:
    int base_n_, fibre_n_, n_bins_;
    std::vector<std::uint32_t> counts_;
};

DisintegrationField empirical_disintegration(const fibred::FibredSystem& f,
                                             const DisintegrationParams& params);

struct InvarianceResiduals {
    double dynamics = 0.0;
    double stable = 0.0;
    double unstable = 0.0;
    int n_pairs = 0;
    int skipped = 0;  // sparse or failed pairs
    double bin_width() const { return 0.0; }
};

struct InvarianceParams {
    int n_pairs = 64;
    std::uint64_t seed = 7;
    // leaf displacement range; must exceed the base cell size so pushed
    // conditionals are compared across genuinely different cells
    double max_leaf_t = 0.25;
    long long min_samples = 50;
    holonomy::HolonomyParams holonomy;
};

InvarianceResiduals test_su_invariance(const DisintegrationField& field,
                                       const fibred::FibredSystem& f,
                                       const InvarianceParams& params = {});

// W1 distance between conditionals on the circle of doubled angles; metrizes
// weak* convergence and is the bounded-Lipschitz dual pairing at this diameter.
double conditional_distance(const FibreConditional& a, const FibreConditional& b);

}  // namespace phlab::projective
