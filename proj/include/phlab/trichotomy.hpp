#pragma once

#include <optional>
#include <string>

#include "phlab/conformal.hpp"
#include "phlab/lyapunov.hpp"
#include "phlab/projective.hpp"

namespace phlab::projective {

enum class Verdict { DistinctExponents, LineField, ConformalStructure, Inconclusive };

const char* verdict_name(Verdict v);

struct ClassifyGates {
    double gap_sigma = 10.0;   // exponent gap significant beyond this many stderr
    double gap_abs = 1e-3;     // and beyond this absolute floor
    double atom_threshold = 0.5;
    double atom_slack = 0.1;
    double atom_cell_fraction = 0.9;  // fraction of cells that must agree on atoms
    double invariance_gate_bins = 3.0;  // residual gate in angle-bin widths
    double heavy_slack = 0.05;
};

struct ClassifyConfig {
    lyap::ExponentParams exponents;
    lyap::BunchingParams bunching;
    DisintegrationParams disintegration;
    InvarianceParams invariance;
    conformal::BarycentreFieldParams barycentre;
    ClassifyGates gates;
    bool skip_bunching = false;
};

struct AtomSummary {
    double fraction_one = 0.0;   // cells reporting exactly one atom
    double fraction_two = 0.0;   // cells reporting an atom pair
    double mean_top_mass = 0.0;
    int cells_considered = 0;
};

struct TrichotomyReport {
    Verdict verdict = Verdict::Inconclusive;
    int line_field_count = 0;

    lyap::ExponentEstimate exponents;
    lyap::BunchingCertificate bunching;
    bool bunching_checked = false;

    AtomSummary atoms;
    std::optional<InvarianceResiduals> invariance;
    std::optional<conformal::BarycentreField> structure_field;

    // symplectic strengthening: exponent gap centred at zero (3 sigma check)
    bool area_preserving = false;
    bool gap_centred_at_zero = false;

    ClassifyGates gates;
    double angle_bin_width = 0.0;
    std::string notes;
};

// Decision cascade over a prebuilt field (testable with synthetic fields).
TrichotomyReport classify_from_field(const fibred::FibredSystem& f,
                                     const DisintegrationField& field,
                                     const lyap::ExponentEstimate& est,
                                     const ClassifyConfig& config);

TrichotomyReport classify_trichotomy(const fibred::FibredSystem& f, const ClassifyConfig& config);

}  // namespace phlab::projective
