#include "phlab/trichotomy.hpp"

#include <cmath>

#include "phlab/errors.hpp"

namespace phlab::projective {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::DistinctExponents: return "DistinctExponents";
        case Verdict::LineField: return "LineField";
        case Verdict::ConformalStructure: return "ConformalStructure";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Unknown";
}

TrichotomyReport classify_from_field(const fibred::FibredSystem& f,
                                     const DisintegrationField& field,
                                     const lyap::ExponentEstimate& est,
                                     const ClassifyConfig& config) {
    TrichotomyReport rep;
    rep.exponents = est;
    rep.gates = config.gates;
    rep.area_preserving = f.fibre_volume_preserving();
    rep.angle_bin_width = M_PI / field.n_bins();

    // (i) significant exponent gap
    double gap = est.gap();
    double gate = std::max(config.gates.gap_sigma * est.combined_stderr(), config.gates.gap_abs);
    if (gap > gate) {
        rep.verdict = Verdict::DistinctExponents;
        if (rep.area_preserving) {
            double centre = est.lambda_plus + est.lambda_minus;
            rep.gap_centred_at_zero = std::abs(centre) <= 3.0 * est.combined_stderr() + 1e-9;
        }
        return rep;
    }

    // (ii) atoms across cells -> invariant line field(s)
    int considered = 0, ones = 0, twos = 0;
    double top_mass = 0.0;
    for (int cell = 0; cell < field.n_cells(); ++cell) {
        if (field.sparse(cell, config.disintegration.min_samples)) continue;
        auto atoms = detect_atoms(field.conditional(cell), config.gates.atom_threshold,
                                  config.gates.atom_slack);
        ++considered;
        if (atoms.size() == 1) ++ones;
        if (atoms.size() == 2) ++twos;
        if (!atoms.empty()) top_mass += atoms.front().mass;
    }
    rep.atoms.cells_considered = considered;
    if (considered > 0) {
        rep.atoms.fraction_one = double(ones) / considered;
        rep.atoms.fraction_two = double(twos) / considered;
        rep.atoms.mean_top_mass = (ones + twos) ? top_mass / (ones + twos) : 0.0;
    }
    if (considered > 0 && rep.atoms.fraction_two >= config.gates.atom_cell_fraction) {
        rep.verdict = Verdict::LineField;
        rep.line_field_count = 2;
        return rep;
    }
    if (considered > 0 &&
        rep.atoms.fraction_one + rep.atoms.fraction_two >= config.gates.atom_cell_fraction) {
        rep.verdict = Verdict::LineField;
        rep.line_field_count = 1;
        return rep;
    }

    // (iii) atom-free conditionals -> conformal structure via the barycentre
    double atom_fraction = rep.atoms.fraction_one + rep.atoms.fraction_two;
    if (considered == 0) {
        rep.notes = "no populated cells";
        return rep;
    }
    if (atom_fraction > 0.05) {
        rep.notes = "mixed atom pattern: " + std::to_string(atom_fraction);
        return rep;
    }
    try {
        rep.structure_field = conformal::barycentre_field(field, config.barycentre);
    } catch (const Error& e) {
        rep.notes = std::string("barycentre field failed: ") + e.what();
        return rep;
    }
    auto residuals = test_su_invariance(field, f, config.invariance);
    rep.invariance = residuals;
    double residual_gate = config.gates.invariance_gate_bins * rep.angle_bin_width;
    bool invariant = residuals.dynamics < residual_gate && residuals.stable < residual_gate &&
                     residuals.unstable < residual_gate;
    if (invariant) {
        rep.verdict = Verdict::ConformalStructure;
    } else {
        rep.notes = "su-invariance residuals exceed the gate";
    }
    return rep;
}

TrichotomyReport classify_trichotomy(const fibred::FibredSystem& f, const ClassifyConfig& config) {
    TrichotomyReport rep;
    if (!config.skip_bunching) {
        rep.bunching = lyap::certify_bunching(f, config.bunching);
        rep.bunching_checked = true;
    }
    auto est = lyap::centre_exponents(f, config.exponents);
    auto field = empirical_disintegration(f, config.disintegration);
    auto full = classify_from_field(f, field, est, config);
    full.bunching = rep.bunching;
    full.bunching_checked = rep.bunching_checked;
    if (full.bunching_checked && !full.bunching.passed && full.notes.empty())
        full.notes = "warning: bunching certificate failed";
    return full;
}

}  // namespace phlab::projective
