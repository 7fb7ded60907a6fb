#include "phlab/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "phlab/errors.hpp"
#include "phlab/rng.hpp"

namespace phlab::holonomy {

using base::LeafKind;
using base::ToralAutomorphism;
using base::ToralPoint;
using fibred::FibredSystem;
using fibred::FibrePoint;

namespace {

// Orbits of x and y = x + t e mod 1 in the contracting direction of the pair:
// backward for unstable leaves, forward for stable ones. The companion orbit
// is reconstructed from the exact leaf offset, not by iterating y.
OrbitPair build_orbit_pair(const ToralAutomorphism& g, const ToralPoint& x, double t,
                           LeafKind kind, int n) {
    OrbitPair pair;
    pair.kind = kind;
    pair.xs.resize(n + 1);
    pair.ys.resize(n + 1);
    Vec2 e = g.leaf_dir(kind);
    int dir = (kind == LeafKind::Unstable) ? -1 : 1;
    double rate = (kind == LeafKind::Unstable) ? 1.0 / g.lambda_u : g.lambda_s;
    pair.xs[0] = x;
    double offset = t;
    pair.ys[0] = ToralPoint{x.x1 + offset * e.x, x.x2 + offset * e.y};
    for (int k = 1; k <= n; ++k) {
        pair.xs[k] = base::iterate(g, pair.xs[k - 1], dir);
        offset *= rate;
        pair.ys[k] = ToralPoint{pair.xs[k].x1 + offset * e.x, pair.xs[k].x2 + offset * e.y};
    }
    return pair;
}

// Truncated holonomy through an orbit pair: along the contracting direction of
// the pair on the x side, across, and back on the y side. Unstable pairs use
// backward orbits (h^u = lim G^n_{g^{-n}y} o G^{-n}_x), stable pairs forward
// ones (h^s = lim G^{-n}_{g^n y} o G^n_x).
FibrePoint apply_truncated(const FibredSystem& f, const OrbitPair& pair, int n,
                           const FibrePoint& v) {
    FibrePoint cur = v;
    if (pair.kind == LeafKind::Unstable) {
        for (int k = 1; k <= n; ++k) cur = f.fibre_map_inverse(pair.xs[k], cur);
        for (int k = n; k >= 1; --k) cur = f.fibre_map(pair.ys[k], cur);
    } else {
        for (int k = 0; k < n; ++k) cur = f.fibre_map(pair.xs[k], cur);
        for (int k = n - 1; k >= 0; --k) cur = f.fibre_map_inverse(pair.ys[k], cur);
    }
    return cur;
}

std::vector<FibrePoint> probe_points(const FibredSystem& f) {
    std::vector<FibrePoint> probes;
    if (f.fibre_kind() == fibred::FibreKind::Torus) {
        for (double a : {0.15, 0.65})
            for (double b : {0.25, 0.8}) probes.push_back(Vec2{a, b});
    } else {
        probes.push_back(fibred::SpherePoint{1.0, 0.0, 0.0});
        probes.push_back(fibred::SpherePoint{0.0, 0.6, 0.8});
        probes.push_back(fibred::SpherePoint{-0.48, 0.6, -0.64});
        probes.push_back(fibred::SpherePoint{0.0, -0.28, -0.96});
    }
    return probes;
}

HopHolonomy make_hop(const FibredSystem& f, const ToralPoint& x, double t, LeafKind kind,
                     const HolonomyParams& params) {
    const auto& g = f.base();
    auto probes = probe_points(f);
    const int inc = 4;
    HopHolonomy hop;
    hop.pair = build_orbit_pair(g, x, t, kind, inc);
    hop.n = inc;
    std::vector<FibrePoint> prev;
    prev.reserve(probes.size());
    for (const auto& p : probes) prev.push_back(apply_truncated(f, hop.pair, hop.n, p));

    double last_gap = 1e300;
    int worse_streak = 0;
    for (int n = 2 * inc; n <= params.max_trunc; n += inc) {
        hop.pair = build_orbit_pair(g, x, t, kind, n);
        double gap = 0.0;
        std::vector<FibrePoint> cur;
        cur.reserve(probes.size());
        for (std::size_t i = 0; i < probes.size(); ++i) {
            cur.push_back(apply_truncated(f, hop.pair, n, probes[i]));
            gap = std::max(gap, fibred::fibre_dist(cur[i], prev[i]));
        }
        hop.n = n;
        hop.tail = gap;
        if (gap < params.tol) return hop;
        if (gap > last_gap) {
            if (++worse_streak >= 3)
                throw Error(ErrorCode::NoConvergence,
                            "holonomy truncation gap not decreasing (bunching failure?)");
        } else {
            worse_streak = 0;
        }
        last_gap = gap;
        prev = std::move(cur);
    }
    throw Error(ErrorCode::NoConvergence, "holonomy truncation cap reached");
}

bool is_group_extension(const FibredSystem& f) {
    return std::holds_alternative<fibred::AffineSpec>(f.spec());
}

}  // namespace

std::vector<std::pair<int, double>> truncation_gap_sequence(const FibredSystem& f,
                                                            const ToralPoint& x, double t,
                                                            LeafKind kind, int n_max) {
    auto probes = probe_points(f);
    std::vector<std::pair<int, double>> out;
    std::vector<FibrePoint> prev;
    for (int n = 1; n <= n_max; ++n) {
        OrbitPair pair = build_orbit_pair(f.base(), x, t, kind, n);
        std::vector<FibrePoint> cur;
        cur.reserve(probes.size());
        for (const auto& p : probes) cur.push_back(apply_truncated(f, pair, n, p));
        if (!prev.empty()) {
            double gap = 0.0;
            for (std::size_t i = 0; i < probes.size(); ++i)
                gap = std::max(gap, fibred::fibre_dist(cur[i], prev[i]));
            out.emplace_back(n, gap);
        }
        prev = std::move(cur);
    }
    return out;
}

namespace {
Mat2 truncated_derivative(const FibredSystem& f, const OrbitPair& pair, int n,
                          const FibrePoint& v, FibrePoint* image_out);
}

std::vector<std::pair<int, double>> derivative_gap_sequence(const FibredSystem& f,
                                                            const fibred::SystemPoint& p, double t,
                                                            LeafKind kind, int n_max) {
    std::vector<std::pair<int, double>> out;
    bool have_prev = false;
    Mat2 prev;
    for (int n = 1; n <= n_max; ++n) {
        OrbitPair pair = build_orbit_pair(f.base(), p.x, t, kind, n);
        Mat2 m = truncated_derivative(f, pair, n, p.v, nullptr);
        if (have_prev) out.emplace_back(n, (m - prev).max_abs_entry());
        prev = m;
        have_prev = true;
    }
    return out;
}

std::optional<double> find_leaf_parameter(const ToralAutomorphism& g, const ToralPoint& x,
                                          const ToralPoint& y, LeafKind kind, double tol) {
    Vec2 e = g.leaf_dir(kind);
    Vec2 d{y.x1 - x.x1, y.x2 - x.x2};
    std::optional<double> best;
    for (int k1 = -3; k1 <= 3; ++k1) {
        for (int k2 = -3; k2 <= 3; ++k2) {
            Vec2 lift{d.x + k1, d.y + k2};
            double t = lift.dot(e);
            Vec2 res{lift.x - t * e.x, lift.y - t * e.y};
            if (res.norm() < tol && (!best || std::abs(t) < std::abs(*best))) best = t;
        }
    }
    return best;
}

FibrePoint FibreHolonomy::apply(const FibredSystem& f, const FibrePoint& v) const {
    FibrePoint cur = v;
    for (const auto& hop : hops) cur = apply_truncated(f, hop.pair, hop.n, cur);
    return cur;
}

FibreHolonomy fibre_holonomy(const FibredSystem& f, const ToralPoint& x, const ToralPoint& y,
                             LeafKind kind, const HolonomyParams& params) {
    auto t = find_leaf_parameter(f.base(), x, y, kind);
    if (!t) throw Error(ErrorCode::NotOnLeaf, "points are not on a common leaf");

    FibreHolonomy h;
    h.x = x;
    h.y = y;
    h.kind = kind;
    h.leaf_t = *t;

    int n_hops = std::max(1, int(std::ceil(std::abs(*t) / params.max_hop)));
    double step = *t / n_hops;
    ToralPoint cur = x;
    for (int i = 0; i < n_hops; ++i) {
        h.hops.push_back(make_hop(f, cur, step, kind, params));
        cur = base::leaf_point(f.base(), cur, kind, step);
        h.n_trunc = std::max(h.n_trunc, h.hops.back().n);
        h.tail_bound += h.hops.back().tail;
    }
    h.tail_bound = std::max(h.tail_bound, params.tol);

    // samples over a coarse fibre grid
    if (f.fibre_kind() == fibred::FibreKind::Torus) {
        int m = params.sample_grid;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                FibrePoint v = Vec2{(i + 0.5) / m, (j + 0.5) / m};
                h.samples.emplace_back(v, h.apply(f, v));
            }
    } else {
        int m = params.sample_grid;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double Z = -1.0 + 2.0 * (i + 0.5) / m;
                double phi = 2.0 * M_PI * (j + 0.5) / m;
                double r = std::sqrt(std::max(0.0, 1.0 - Z * Z));
                FibrePoint v = fibred::SpherePoint{r * std::cos(phi), r * std::sin(phi), Z};
                h.samples.emplace_back(v, h.apply(f, v));
            }
    }

    if (is_group_extension(f)) {
        // best-fit translation: circular mean of h(v) - v
        Vec2 ref = std::get<Vec2>(h.samples[0].second) - std::get<Vec2>(h.samples[0].first);
        double sx = 0.0, sy = 0.0;
        for (const auto& [v, hv] : h.samples) {
            Vec2 d = std::get<Vec2>(hv) - std::get<Vec2>(v);
            sx += ref.x + wrap_half(d.x - ref.x);
            sy += ref.y + wrap_half(d.y - ref.y);
        }
        Vec2 fit{mod1(sx / h.samples.size()), mod1(sy / h.samples.size())};
        double dev = 0.0;
        for (const auto& [v, hv] : h.samples) {
            Vec2 d = std::get<Vec2>(hv) - std::get<Vec2>(v);
            dev = std::max(dev, torus_dist(Vec2{mod1(d.x), mod1(d.y)}, fit));
        }
        h.translation = fit;
        h.translation_max_dev = dev;
    }
    return h;
}

namespace {

// Truncated derivative holonomy through one orbit pair at fibre point v,
// the ordered product D(G^{+-n}_{y-side}) * D(G^{-+n}_x) along the matched
// fibre streams.
Mat2 truncated_derivative(const FibredSystem& f, const OrbitPair& pair, int n, const FibrePoint& v,
                          FibrePoint* image_out) {
    FibrePoint cur = v;
    Mat2 total = Mat2::identity();
    if (pair.kind == LeafKind::Unstable) {
        for (int k = 1; k <= n; ++k) {
            cur = f.fibre_map_inverse(pair.xs[k], cur);
            total = f.centre_jacobian({pair.xs[k], cur}).inverse() * total;
        }
        for (int k = n; k >= 1; --k) {
            total = f.centre_jacobian({pair.ys[k], cur}) * total;
            cur = f.fibre_map(pair.ys[k], cur);
        }
    } else {
        for (int k = 0; k < n; ++k) {
            total = f.centre_jacobian({pair.xs[k], cur}) * total;
            cur = f.fibre_map(pair.xs[k], cur);
        }
        for (int k = n - 1; k >= 0; --k) {
            cur = f.fibre_map_inverse(pair.ys[k], cur);
            total = f.centre_jacobian({pair.ys[k], cur}).inverse() * total;
        }
    }
    if (image_out) *image_out = cur;
    return total;
}

}  // namespace

DerivativeHolonomy derivative_holonomy(const FibredSystem& f, const fibred::SystemPoint& p,
                                       const ToralPoint& y, LeafKind kind,
                                       const HolonomyParams& params) {
    auto t = find_leaf_parameter(f.base(), p.x, y, kind);
    if (!t) throw Error(ErrorCode::NotOnLeaf, "points are not on a common leaf");

    int n_hops = std::max(1, int(std::ceil(std::abs(*t) / params.max_hop)));
    double step = *t / n_hops;

    DerivativeHolonomy out;
    out.p = p;
    Mat2 total = Mat2::identity();
    FibrePoint v = p.v;
    ToralPoint cur = p.x;
    const int inc = 4;
    for (int i = 0; i < n_hops; ++i) {
        Mat2 prev{0, 0, 0, 0};
        bool have_prev = false;
        double last_gap = 1e300;
        int worse_streak = 0;
        bool done = false;
        for (int n = inc; n <= params.max_trunc; n += inc) {
            OrbitPair pair = build_orbit_pair(f.base(), cur, step, kind, n);
            FibrePoint img;
            Mat2 m = truncated_derivative(f, pair, n, v, &img);
            if (have_prev) {
                double gap = (m - prev).max_abs_entry();
                out.cauchy_gap = gap;
                out.n_trunc = std::max(out.n_trunc, n);
                if (gap < params.tol) {
                    total = m * total;
                    v = img;
                    done = true;
                    break;
                }
                if (gap > last_gap) {
                    if (++worse_streak >= 3)
                        throw Error(ErrorCode::NoConvergence,
                                    "derivative holonomy gap not decreasing");
                } else {
                    worse_streak = 0;
                }
                last_gap = gap;
            }
            prev = m;
            have_prev = true;
        }
        if (!done) throw Error(ErrorCode::NoConvergence, "derivative holonomy cap reached");
        cur = base::leaf_point(f.base(), cur, kind, step);
    }
    out.matrix = total;
    out.q = {cur, v};
    return out;
}

SuLoop four_leg_loop(const ToralAutomorphism& g, const ToralPoint& x, const ToralPoint& z) {
    SuLoop loop;
    auto first = base::connect_su(g, x, z);
    auto second = base::connect_su(g, z, x);
    loop.path.legs = first.legs;
    loop.path.legs.insert(loop.path.legs.end(), second.legs.begin(), second.legs.end());
    return loop;
}

SuLoop reverse_loop(const ToralAutomorphism& g, const SuLoop& loop) {
    SuLoop rev;
    for (auto it = loop.path.legs.rbegin(); it != loop.path.legs.rend(); ++it) {
        base::SuLeg leg;
        leg.kind = it->kind;
        leg.start = base::leaf_point(g, it->start, it->kind, it->signed_length);
        leg.signed_length = -it->signed_length;
        rev.path.legs.push_back(leg);
    }
    return rev;
}

FibrePoint LoopHolonomy::apply(const FibredSystem& f, const FibrePoint& v) const {
    FibrePoint cur = v;
    for (const auto& leg : legs) cur = leg.apply(f, cur);
    return cur;
}

LoopHolonomy loop_holonomy(const FibredSystem& f, const SuLoop& loop,
                           const HolonomyParams& params) {
    if (!loop.path.legs.empty()) {
        ToralPoint end = base::path_endpoint(f.base(), loop.path);
        if (base::dist(end, loop.path.legs.front().start) > 1e-9)
            throw Error(ErrorCode::ConfigInvalid, "su-loop is not closed");
    }
    LoopHolonomy out;
    for (const auto& leg : loop.path.legs) {
        ToralPoint to = base::leaf_point(f.base(), leg.start, leg.kind, leg.signed_length);
        out.legs.push_back(fibre_holonomy(f, leg.start, to, leg.kind, params));
    }
    if (is_group_extension(f)) {
        FibrePoint img = out.apply(f, FibrePoint{Vec2{0.0, 0.0}});
        out.element = std::get<Vec2>(img);
    }
    return out;
}

HolonomyGroupSample holonomy_group_sample(const FibredSystem& f, const ToralPoint& x,
                                          std::uint64_t rng_seed,
                                          const GroupSampleParams& params) {
    if (!is_group_extension(f))
        throw Error(ErrorCode::ConfigInvalid, "holonomy groups require a torus group extension");

    // candidate periodic points near x
    std::vector<ToralPoint> candidates;
    for (int period = 1; period <= params.max_period; ++period) {
        for (const auto& p : base::periodic_points(f.base(), period)) {
            if (base::dist(p, x) > 1e-6 && base::dist(p, x) <= params.search_radius)
                candidates.push_back(p);
        }
    }
    if (candidates.empty()) {
        for (const auto& p : base::periodic_points(f.base(), params.max_period))
            if (base::dist(p, x) > 1e-6) candidates.push_back(p);
    }
    if (candidates.empty())
        throw Error(ErrorCode::InternalError, "no periodic points available for loops");

    HolonomyGroupSample out;
    Rng rng(rng_seed);
    std::vector<Vec2> generators;
    for (int i = 0; i < params.n_loops; ++i) {
        const ToralPoint& z = candidates[rng.uniform_int(int(candidates.size()))];
        auto loop = four_leg_loop(f.base(), x, z);
        auto h = loop_holonomy(f, loop, params.holonomy);
        generators.push_back(Vec2{mod1(h.element->x), mod1(h.element->y)});
        generators.push_back(Vec2{mod1(-h.element->x), mod1(-h.element->y)});
    }
    out.n_loops = params.n_loops;

    // max over the 64x64 probe grid of the distance to the nearest element;
    // elements are bucketed so the search stays fast at large populations
    auto covering_radius = [&](const std::vector<Vec2>& els) {
        const int B = 64;
        std::vector<std::vector<Vec2>> buckets(B * B);
        for (const auto& e : els) {
            int bi = std::min(B - 1, int(e.x * B)), bj = std::min(B - 1, int(e.y * B));
            buckets[bi * B + bj].push_back(e);
        }
        double worst = 0.0;
        for (int i = 0; i < 64; ++i) {
            for (int j = 0; j < 64; ++j) {
                Vec2 gpt{(i + 0.5) / 64.0, (j + 0.5) / 64.0};
                double best = 1e300;
                for (int ring = 0; ring < B && best > (ring - 1) * (1.0 / B); ++ring) {
                    for (int di = -ring; di <= ring; ++di) {
                        for (int dj = -ring; dj <= ring; ++dj) {
                            if (std::max(std::abs(di), std::abs(dj)) != ring) continue;
                            int bi = ((i + di) % B + B) % B, bj = ((j + dj) % B + B) % B;
                            for (const auto& e : buckets[bi * B + bj])
                                best = std::min(best, torus_dist(gpt, e));
                        }
                    }
                }
                worst = std::max(worst, best);
            }
        }
        return worst;
    };

    // Cayley-graph BFS over the generated subgroup, one representative per
    // 1/256-cell. Elements remain exact sums of loop elements; the dedup only
    // drops redundant representatives.
    const int D = 256;
    std::set<std::pair<int, int>> seen;
    auto key = [&](const Vec2& v) {
        return std::pair<int, int>{std::min(D - 1, int(mod1(v.x) * D)),
                                   std::min(D - 1, int(mod1(v.y) * D))};
    };
    std::vector<Vec2> elements;
    std::vector<Vec2> frontier;
    auto push = [&](const Vec2& v, std::vector<Vec2>& dst) {
        Vec2 r{mod1(v.x), mod1(v.y)};
        if (seen.insert(key(r)).second) {
            elements.push_back(r);
            dst.push_back(r);
        }
    };
    push(Vec2{0.0, 0.0}, frontier);
    out.radius_per_round.push_back(covering_radius(elements));
    int layers = 0;
    while (!frontier.empty() && int(elements.size()) < params.closure_cap && layers < 64) {
        std::vector<Vec2> next;
        for (const auto& e : frontier) {
            for (const auto& g : generators) {
                if (int(elements.size()) >= params.closure_cap) break;
                push(Vec2{e.x + g.x, e.y + g.y}, next);
            }
        }
        frontier = std::move(next);
        ++layers;
        if (layers <= params.closure_rounds || frontier.empty())
            out.radius_per_round.push_back(covering_radius(elements));
    }
    out.elements = std::move(elements);
    out.covering_radius = covering_radius(out.elements);
    if (out.radius_per_round.empty() || out.covering_radius < out.radius_per_round.back())
        out.radius_per_round.push_back(out.covering_radius);
    return out;
}

}  // namespace phlab::holonomy
