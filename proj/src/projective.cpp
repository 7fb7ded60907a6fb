#include "phlab/projective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phlab/errors.hpp"
#include "phlab/parallel.hpp"
#include "phlab/rng.hpp"

namespace phlab::projective {

using fibred::FibredSystem;
using fibred::FibrePoint;
using fibred::SystemPoint;

double projectivize(const Mat2& m, double theta) {
    if (m.det() == 0.0) throw Error(ErrorCode::SingularMatrix, "projectivize");
    Vec2 u{std::cos(theta), std::sin(theta)};
    Vec2 w = m * u;
    return mod_pi(std::atan2(w.y, w.x));
}

std::vector<Atom> detect_atoms(const FibreConditional& c, double threshold, double slack) {
    const int n = c.n_bins();
    const double gate = threshold - slack;
    // 3-bin windows separate point masses from smooth peaked densities
    std::vector<double> window(n);
    for (int b = 0; b < n; ++b)
        window[b] = c.mass[(b + n - 1) % n] + c.mass[b] + c.mass[(b + 1) % n];

    std::vector<Atom> atoms;
    std::vector<bool> used(n, false);
    for (int pass = 0; pass < 2; ++pass) {
        int best = -1;
        for (int b = 0; b < n; ++b) {
            if (used[b] || used[(b + n - 1) % n] || used[(b + 1) % n]) continue;
            if (window[b] >= gate && (best < 0 || window[b] > window[best])) best = b;
        }
        if (best < 0) break;
        // circular mass-weighted mean over the window
        double cx = 0.0, sx = 0.0;
        for (int d = -1; d <= 1; ++d) {
            int b = (best + d + n) % n;
            double th = (b + 0.5) * M_PI / n;
            cx += c.mass[b] * std::cos(2.0 * th);
            sx += c.mass[b] * std::sin(2.0 * th);
        }
        Atom a;
        a.theta = mod_pi(0.5 * std::atan2(sx, cx));
        a.mass = window[best];
        atoms.push_back(a);
        for (int d = -2; d <= 2; ++d) used[(best + d + n) % n] = true;
    }
    return atoms;
}

DisintegrationField::DisintegrationField(int base_n, int fibre_n, int n_bins)
    : base_n_(base_n), fibre_n_(fibre_n), n_bins_(n_bins) {
    counts_.assign(std::size_t(n_cells()) * n_bins_, 0);
}

int DisintegrationField::cell_of(const SystemPoint& p) const {
    int bi = std::min(base_n_ - 1, int(p.x.x1 * base_n_));
    int bj = std::min(base_n_ - 1, int(p.x.x2 * base_n_));
    int fi, fj;
    if (std::holds_alternative<Vec2>(p.v)) {
        const auto& v = std::get<Vec2>(p.v);
        fi = std::min(fibre_n_ - 1, int(mod1(v.x) * fibre_n_));
        fj = std::min(fibre_n_ - 1, int(mod1(v.y) * fibre_n_));
    } else {
        const auto& s = std::get<fibred::SpherePoint>(p.v);
        double lon = mod1(std::atan2(s.Y, s.X) / (2.0 * M_PI));
        double lat = std::clamp((s.Z + 1.0) / 2.0, 0.0, 1.0);
        fi = std::min(fibre_n_ - 1, int(lon * fibre_n_));
        fj = std::min(fibre_n_ - 1, int(lat * fibre_n_));
    }
    return ((bi * base_n_ + bj) * fibre_n_ + fi) * fibre_n_ + fj;
}

SystemPoint DisintegrationField::cell_centre(int cell, fibred::FibreKind kind) const {
    int fj = cell % fibre_n_;
    int fi = (cell / fibre_n_) % fibre_n_;
    int bj = (cell / (fibre_n_ * fibre_n_)) % base_n_;
    int bi = cell / (fibre_n_ * fibre_n_ * base_n_);
    SystemPoint p;
    p.x = base::ToralPoint{(bi + 0.5) / base_n_, (bj + 0.5) / base_n_};
    if (kind == fibred::FibreKind::Torus) {
        p.v = Vec2{(fi + 0.5) / fibre_n_, (fj + 0.5) / fibre_n_};
    } else {
        double lon = 2.0 * M_PI * (fi + 0.5) / fibre_n_;
        double Z = -1.0 + 2.0 * (fj + 0.5) / fibre_n_;
        double r = std::sqrt(std::max(0.0, 1.0 - Z * Z));
        p.v = fibred::SpherePoint{r * std::cos(lon), r * std::sin(lon), Z};
    }
    return p;
}

void DisintegrationField::merge(const DisintegrationField& other) {
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

FibreConditional DisintegrationField::conditional(int cell) const {
    FibreConditional c;
    c.mass.resize(n_bins_);
    const std::uint32_t* row = counts_.data() + std::size_t(cell) * n_bins_;
    long long total = 0;
    for (int b = 0; b < n_bins_; ++b) total += row[b];
    c.samples = total;
    if (total > 0)
        for (int b = 0; b < n_bins_; ++b) c.mass[b] = double(row[b]) / double(total);
    return c;
}

long long DisintegrationField::cell_count(int cell) const {
    const std::uint32_t* row = counts_.data() + std::size_t(cell) * n_bins_;
    long long total = 0;
    for (int b = 0; b < n_bins_; ++b) total += row[b];
    return total;
}

bool DisintegrationField::sparse(int cell, long long min_samples) const {
    return cell_count(cell) < min_samples;
}

long long DisintegrationField::total_samples() const {
    long long total = 0;
    for (auto c : counts_) total += c;
    return total;
}

double DisintegrationField::base_marginal_chi2() const {
    int nb = base_n_ * base_n_;
    std::vector<double> marg(nb, 0.0);
    for (int cell = 0; cell < n_cells(); ++cell)
        marg[cell / (fibre_n_ * fibre_n_)] += double(cell_count(cell));
    double total = std::accumulate(marg.begin(), marg.end(), 0.0);
    if (total <= 0) return 0.0;
    double expect = total / nb, chi2 = 0.0;
    for (double m : marg) chi2 += (m - expect) * (m - expect) / expect;
    return chi2;
}

DisintegrationField DisintegrationField::scrambled(std::uint64_t seed) const {
    // negative control: shuffle the cells and rotate each conditional by a
    // random angle, so even fields that are constant across cells lose their
    // invariance
    DisintegrationField out(base_n_, fibre_n_, n_bins_);
    std::vector<int> perm(n_cells());
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    for (int i = n_cells() - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
    for (int cell = 0; cell < n_cells(); ++cell) {
        int shift = rng.uniform_int(n_bins_);
        for (int b = 0; b < n_bins_; ++b)
            out.counts_[std::size_t(perm[cell]) * n_bins_ + (b + shift) % n_bins_] =
                counts_[std::size_t(cell) * n_bins_ + b];
    }
    return out;
}

DisintegrationField empirical_disintegration(const FibredSystem& f,
                                             const DisintegrationParams& params) {
    const int chunks = std::max(1, std::min(params.workers, 16));
    std::vector<DisintegrationField> partial(
        std::size_t(chunks), DisintegrationField(params.base_n, params.fibre_n, params.n_bins));

    auto run_chunk = [&](int chunk) {
        DisintegrationField& field = partial[chunk];
        int lo = int(std::int64_t(params.n_particles) * chunk / chunks);
        int hi = int(std::int64_t(params.n_particles) * (chunk + 1) / chunks);
        for (int pi = lo; pi < hi; ++pi) {
            Rng rng(derive_seed(params.seed, pi));
            SystemPoint p{{rng.uniform(), rng.uniform()}, f.random_fibre_point(rng)};
            double theta = params.theta_fixed ? params.theta0 : rng.uniform() * M_PI;
            for (long long i = 0; i < params.burn_in; ++i) {
                auto [next, jac] = f.step(p);
                theta = projectivize(jac, theta);
                p = next;
            }
            for (long long i = 0; i < params.n_steps; ++i) {
                field.record(field.cell_of(p), angle_bin(theta, params.n_bins));
                auto [next, jac] = f.step(p);
                theta = projectivize(jac, theta);
                p = next;
            }
        }
    };
    parallel_for(chunks, params.workers, run_chunk);
    for (int c = 1; c < chunks; ++c) partial[0].merge(partial[c]);
    partial[0].seed = params.seed;
    return std::move(partial[0]);
}

double conditional_distance(const FibreConditional& a, const FibreConditional& b) {
    // exact W1 on the circle (doubled angles, circumference 2 pi): shift the
    // CDF difference by its weighted median
    const int n = a.n_bins();
    std::vector<double> diff(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += a.mass[i] - b.mass[i];
        diff[i] = acc;
    }
    std::vector<double> sorted = diff;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted[n / 2];
    double w1 = 0.0;
    for (double d : diff) w1 += std::abs(d - median);
    return w1 * (2.0 * M_PI / n);
}

namespace {

FibreConditional push_conditional(const FibreConditional& c, const Mat2& m) {
    FibreConditional out;
    out.mass.assign(c.mass.size(), 0.0);
    out.samples = c.samples;
    const int n = c.n_bins();
    for (int b = 0; b < n; ++b) {
        if (c.mass[b] == 0.0) continue;
        double theta = (b + 0.5) * M_PI / n;
        out.mass[angle_bin(projectivize(m, theta), n)] += c.mass[b];
    }
    return out;
}

}  // namespace

InvarianceResiduals test_su_invariance(const DisintegrationField& field, const FibredSystem& f,
                                       const InvarianceParams& params) {
    InvarianceResiduals out;
    Rng rng(params.seed);
    double dyn = 0.0, st = 0.0, un = 0.0;
    int n_dyn = 0, n_st = 0, n_un = 0;
    for (int i = 0; i < params.n_pairs; ++i) {
        int cell = rng.uniform_int(field.n_cells());
        if (field.sparse(cell, params.min_samples)) {
            out.skipped++;
            continue;
        }
        SystemPoint q = field.cell_centre(cell, f.fibre_kind());
        FibreConditional mq = field.conditional(cell);

        // dynamics invariance
        {
            auto [img, jac] = f.step(q);
            int target = field.cell_of(img);
            if (!field.sparse(target, params.min_samples)) {
                dyn += conditional_distance(push_conditional(mq, jac), field.conditional(target));
                ++n_dyn;
            }
        }
        // holonomy invariance; displacement bounded away from zero so the
        // comparison crosses cells
        for (auto kind : {base::LeafKind::Stable, base::LeafKind::Unstable}) {
            double t = (0.5 + 0.5 * rng.uniform()) * params.max_leaf_t;
            if (rng.uniform() < 0.5) t = -t;
            base::ToralPoint y = base::leaf_point(f.base(), q.x, kind, t);
            try {
                auto dh = holonomy::derivative_holonomy(f, q, y, kind, params.holonomy);
                int target = field.cell_of(dh.q);
                if (field.sparse(target, params.min_samples)) {
                    out.skipped++;
                    continue;
                }
                double d =
                    conditional_distance(push_conditional(mq, dh.matrix), field.conditional(target));
                if (kind == base::LeafKind::Stable) {
                    st += d;
                    ++n_st;
                } else {
                    un += d;
                    ++n_un;
                }
            } catch (const Error&) {
                out.skipped++;
            }
        }
    }
    out.dynamics = n_dyn ? dyn / n_dyn : 0.0;
    out.stable = n_st ? st / n_st : 0.0;
    out.unstable = n_un ? un / n_un : 0.0;
    out.n_pairs = params.n_pairs;
    return out;
}

}  // namespace phlab::projective
