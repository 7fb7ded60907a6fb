#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "phlab/linalg.hpp"

namespace phlab::base {

// Point of T^2 = R^2/Z^2 with coordinates reduced into [0,1).
struct ToralPoint {
    double x1 = 0.0, x2 = 0.0;

    ToralPoint() = default;
    ToralPoint(double a, double b) : x1(mod1(a)), x2(mod1(b)) {}

    Vec2 vec() const { return {x1, x2}; }
    static ToralPoint from_vec(const Vec2& v) { return {v.x, v.y}; }
};

inline double dist(const ToralPoint& p, const ToralPoint& q) {
    return torus_dist(p.vec(), q.vec());
}

enum class LeafKind { Stable, Unstable };

// Hyperbolic element of GL(2,Z) with |det| = 1, together with its eigendata.
struct ToralAutomorphism {
    std::array<std::array<long long, 2>, 2> entries{};   // A
    std::array<std::array<long long, 2>, 2> inverse{};   // A^{-1}, exact
    double lambda_u = 0.0, lambda_s = 0.0;
    Vec2 e_u, e_s;  // unit eigenvectors

    const Vec2& leaf_dir(LeafKind k) const { return k == LeafKind::Unstable ? e_u : e_s; }
    double leaf_rate(LeafKind k) const { return k == LeafKind::Unstable ? lambda_u : lambda_s; }
};

struct SuLeg {
    LeafKind kind = LeafKind::Unstable;
    ToralPoint start;
    double signed_length = 0.0;
};

struct SuPath {
    std::vector<SuLeg> legs;
};

ToralAutomorphism make_hyperbolic_automorphism(const std::array<std::array<long long, 2>, 2>& m);

ToralPoint iterate(const ToralAutomorphism& g, const ToralPoint& x, long long n);

ToralPoint leaf_point(const ToralAutomorphism& g, const ToralPoint& x, LeafKind kind, double t);

// Two-leg path (unstable then stable) from x to y; lattice lift minimising |a|+|b|.
SuPath connect_su(const ToralAutomorphism& g, const ToralPoint& x, const ToralPoint& y);

ToralPoint path_endpoint(const ToralAutomorphism& g, const SuPath& path);

std::vector<ToralPoint> periodic_points(const ToralAutomorphism& g, int period,
                                        long long count_cap = 200000);

// |det(A^period - I)|, the exact number of period-`period` points.
long long periodic_point_count(const ToralAutomorphism& g, int period);

}  // namespace phlab::base
