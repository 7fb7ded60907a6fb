#include "phlab/base.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "phlab/errors.hpp"

namespace phlab::base {

namespace {

using IMat = std::array<std::array<long long, 2>, 2>;

IMat imul(const IMat& p, const IMat& q) {
    return {{{p[0][0] * q[0][0] + p[0][1] * q[1][0], p[0][0] * q[0][1] + p[0][1] * q[1][1]},
             {p[1][0] * q[0][0] + p[1][1] * q[1][0], p[1][0] * q[0][1] + p[1][1] * q[1][1]}}};
}

long long idet(const IMat& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

// Unit eigenvector of A for eigenvalue lam, sign fixed so the first nonzero
// component is positive.
Vec2 eigenvector(const IMat& a, double lam) {
    // (A - lam I) v = 0. Use the row with the larger residual content.
    Vec2 v1{-double(a[0][1]), double(a[0][0]) - lam};   // orthogonal to row 1
    Vec2 v2{-(double(a[1][1]) - lam), double(a[1][0])}; // orthogonal to row 2... sign handled below
    Vec2 v = (v1.norm() >= v2.norm()) ? v1 : Vec2{double(a[1][1]) - lam, -double(a[1][0])};
    double n = v.norm();
    v = v * (1.0 / n);
    if (v.x < 0 || (v.x == 0 && v.y < 0)) v = -v;
    return v;
}

}  // namespace

ToralAutomorphism make_hyperbolic_automorphism(const IMat& m) {
    long long det = idet(m);
    if (det != 1 && det != -1)
        throw Error(ErrorCode::NotUnimodular, "|det| must be 1, got " + std::to_string(det));
    long long tr = m[0][0] + m[1][1];
    double disc = double(tr) * double(tr) - 4.0 * double(det);
    // Unit-modulus spectrum: complex pair (disc < 0), or parabolic/involutive cases.
    if (disc < 0) throw Error(ErrorCode::NotHyperbolic, "complex (elliptic) spectrum");
    if (det == 1 && (tr == 2 || tr == -2))
        throw Error(ErrorCode::NotHyperbolic, "parabolic spectrum");
    if (det == -1 && tr == 0)
        throw Error(ErrorCode::NotHyperbolic, "spectrum {1,-1}");

    double s = std::sqrt(disc);
    double l1 = (double(tr) + s) / 2.0;
    double l2 = (double(tr) - s) / 2.0;
    // Refine the smaller root through the product relation for accuracy.
    if (std::abs(l1) > std::abs(l2)) l2 = double(det) / l1; else l1 = double(det) / l2;

    ToralAutomorphism g;
    g.entries = m;
    long long sgn = det;  // adj(A)/det
    g.inverse = {{{sgn * m[1][1], -sgn * m[0][1]}, {-sgn * m[1][0], sgn * m[0][0]}}};
    if (std::abs(l1) > 1.0) {
        g.lambda_u = l1;
        g.lambda_s = l2;
    } else {
        g.lambda_u = l2;
        g.lambda_s = l1;
    }
    g.e_u = eigenvector(m, g.lambda_u);
    g.e_s = eigenvector(m, g.lambda_s);
    return g;
}

ToralPoint iterate(const ToralAutomorphism& g, const ToralPoint& x, long long n) {
    const IMat& m = (n >= 0) ? g.entries : g.inverse;
    long long steps = (n >= 0) ? n : -n;
    double x1 = x.x1, x2 = x.x2;
    for (long long i = 0; i < steps; ++i) {
        double y1 = double(m[0][0]) * x1 + double(m[0][1]) * x2;
        double y2 = double(m[1][0]) * x1 + double(m[1][1]) * x2;
        x1 = mod1(y1);
        x2 = mod1(y2);
    }
    return ToralPoint{x1, x2};
}

ToralPoint leaf_point(const ToralAutomorphism& g, const ToralPoint& x, LeafKind kind, double t) {
    Vec2 e = g.leaf_dir(kind);
    return ToralPoint{x.x1 + t * e.x, x.x2 + t * e.y};
}

SuPath connect_su(const ToralAutomorphism& g, const ToralPoint& x, const ToralPoint& y) {
    Vec2 d{y.x1 - x.x1, y.x2 - x.x2};
    // Solve a e_u + b e_s = d + k over lattice lifts k, minimising |a|+|b|.
    Mat2 basis{g.e_u.x, g.e_s.x, g.e_u.y, g.e_s.y};
    Mat2 inv = basis.inverse();
    double best = 1e300;
    double best_a = 0.0, best_b = 0.0;
    for (int k1 = -3; k1 <= 3; ++k1) {
        for (int k2 = -3; k2 <= 3; ++k2) {
            Vec2 target{d.x + k1, d.y + k2};
            Vec2 ab = inv * target;
            double cost = std::abs(ab.x) + std::abs(ab.y);
            if (cost < best) {
                best = cost;
                best_a = ab.x;
                best_b = ab.y;
            }
        }
    }
    SuPath path;
    ToralPoint mid = leaf_point(g, x, LeafKind::Unstable, best_a);
    path.legs.push_back({LeafKind::Unstable, x, best_a});
    path.legs.push_back({LeafKind::Stable, mid, best_b});
    return path;
}

ToralPoint path_endpoint(const ToralAutomorphism& g, const SuPath& path) {
    if (path.legs.empty()) return ToralPoint{};
    ToralPoint p = path.legs.front().start;
    for (const auto& leg : path.legs) p = leaf_point(g, p, leg.kind, leg.signed_length);
    return p;
}

long long periodic_point_count(const ToralAutomorphism& g, int period) {
    IMat p{{{1, 0}, {0, 1}}};
    for (int i = 0; i < period; ++i) p = imul(p, g.entries);
    IMat b{{{p[0][0] - 1, p[0][1]}, {p[1][0], p[1][1] - 1}}};
    return std::llabs(idet(b));
}

std::vector<ToralPoint> periodic_points(const ToralAutomorphism& g, int period,
                                        long long count_cap) {
    if (period < 1) throw Error(ErrorCode::ConfigInvalid, "period must be >= 1");
    IMat p{{{1, 0}, {0, 1}}};
    for (int i = 0; i < period; ++i) p = imul(p, g.entries);
    IMat b{{{p[0][0] - 1, p[0][1]}, {p[1][0], p[1][1] - 1}}};
    long long dd = idet(b);
    long long count = std::llabs(dd);
    if (count == 0) throw Error(ErrorCode::InternalError, "degenerate A^p - I");
    if (count > count_cap)
        throw Error(ErrorCode::PeriodTooLarge,
                    std::to_string(count) + " points exceeds cap " + std::to_string(count_cap));

    // Solutions are (B^{-1} Z^2)/Z^2, a subgroup of the (1/|det B|)-rational
    // points generated by the columns of adj(B)/det(B).
    long long adj[2][2] = {{b[1][1], -b[0][1]}, {-b[1][0], b[0][0]}};
    auto modd = [&](long long v) {
        long long r = v % count;
        return (r < 0) ? r + count : r;
    };
    // Generator columns as integer pairs mod count (denominator = count, sign of det absorbed).
    long long sign = (dd > 0) ? 1 : -1;
    std::array<std::array<long long, 2>, 2> gen{
        {{modd(sign * adj[0][0]), modd(sign * adj[1][0])},
         {modd(sign * adj[0][1]), modd(sign * adj[1][1])}}};

    std::set<std::pair<long long, long long>> seen;
    std::vector<std::pair<long long, long long>> frontier{{0, 0}};
    seen.insert({0, 0});
    while (!frontier.empty()) {
        auto [u, v] = frontier.back();
        frontier.pop_back();
        for (const auto& c : gen) {
            std::pair<long long, long long> nxt{modd(u + c[0]), modd(v + c[1])};
            if (seen.insert(nxt).second) frontier.push_back(nxt);
        }
    }
    if (static_cast<long long>(seen.size()) != count)
        throw Error(ErrorCode::InternalError, "periodic point enumeration mismatch");

    std::vector<ToralPoint> out;
    out.reserve(seen.size());
    for (const auto& [u, v] : seen)
        out.emplace_back(double(u) / double(count), double(v) / double(count));
    return out;
}

}  // namespace phlab::base
