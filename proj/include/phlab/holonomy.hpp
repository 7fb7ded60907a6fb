#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "phlab/fibred.hpp"

namespace phlab::holonomy {

// Backward (unstable) or forward (stable) orbit of x together with the
// same-leaf companion orbit of y, transported by the exact leaf offset.
struct OrbitPair {
    std::vector<base::ToralPoint> xs, ys;
    base::LeafKind kind = base::LeafKind::Unstable;
};

// One short-hop holonomy with its chosen truncation depth.
struct HopHolonomy {
    OrbitPair pair;
    int n = 0;
    double tail = 0.0;
};

struct FibreHolonomy {
    base::ToralPoint x, y;
    base::LeafKind kind = base::LeafKind::Unstable;
    double leaf_t = 0.0;
    int n_trunc = 0;
    double tail_bound = 0.0;
    std::vector<HopHolonomy> hops;
    std::vector<std::pair<fibred::FibrePoint, fibred::FibrePoint>> samples;
    std::optional<Vec2> translation;  // best translation fit, torus group extensions
    double translation_max_dev = 0.0;

    fibred::FibrePoint apply(const fibred::FibredSystem& f, const fibred::FibrePoint& v) const;
};

struct HolonomyParams {
    double tol = 1e-10;
    double max_hop = 0.1;
    int max_trunc = 200;
    int sample_grid = 5;  // sample_grid^2 fibre sample points
};

// Leaf parameter t with y = x + t e_kind mod 1, if y lies on the leaf within tol.
std::optional<double> find_leaf_parameter(const base::ToralAutomorphism& g,
                                          const base::ToralPoint& x, const base::ToralPoint& y,
                                          base::LeafKind kind, double tol = 1e-9);

FibreHolonomy fibre_holonomy(const fibred::FibredSystem& f, const base::ToralPoint& x,
                             const base::ToralPoint& y, base::LeafKind kind,
                             const HolonomyParams& params = {});

// Successive truncation gaps sup_probes |h_n - h_{n-1}| of a single-hop
// holonomy, for convergence diagnostics.
std::vector<std::pair<int, double>> truncation_gap_sequence(const fibred::FibredSystem& f,
                                                            const base::ToralPoint& x, double t,
                                                            base::LeafKind kind, int n_max);

// Same for the derivative holonomy matrices at a fibre point.
std::vector<std::pair<int, double>> derivative_gap_sequence(const fibred::FibredSystem& f,
                                                            const fibred::SystemPoint& p, double t,
                                                            base::LeafKind kind, int n_max);

struct DerivativeHolonomy {
    fibred::SystemPoint p, q;
    Mat2 matrix;
    int n_trunc = 0;
    double cauchy_gap = 0.0;
};

DerivativeHolonomy derivative_holonomy(const fibred::FibredSystem& f, const fibred::SystemPoint& p,
                                       const base::ToralPoint& y, base::LeafKind kind,
                                       const HolonomyParams& params = {});

struct SuLoop {
    base::SuPath path;
};

// Closed four-leg loop through a nearby point z: unstable/stable to z, then
// unstable/stable back.
SuLoop four_leg_loop(const base::ToralAutomorphism& g, const base::ToralPoint& x,
                     const base::ToralPoint& z);

SuLoop reverse_loop(const base::ToralAutomorphism& g, const SuLoop& loop);

struct LoopHolonomy {
    std::vector<FibreHolonomy> legs;
    std::optional<Vec2> element;  // h_gamma(e) for torus group extensions

    fibred::FibrePoint apply(const fibred::FibredSystem& f, const fibred::FibrePoint& v) const;
};

LoopHolonomy loop_holonomy(const fibred::FibredSystem& f, const SuLoop& loop,
                           const HolonomyParams& params = {});

struct HolonomyGroupSample {
    std::vector<Vec2> elements;
    double covering_radius = 0.0;
    std::vector<double> radius_per_round;  // covering radius after each closure round
    int n_loops = 0;
};

struct GroupSampleParams {
    int n_loops = 16;
    int max_period = 4;
    double search_radius = 0.35;
    int closure_cap = 100000;
    int closure_rounds = 8;
    HolonomyParams holonomy;
};

HolonomyGroupSample holonomy_group_sample(const fibred::FibredSystem& f,
                                          const base::ToralPoint& x, std::uint64_t rng_seed,
                                          const GroupSampleParams& params = {});

}  // namespace phlab::holonomy
