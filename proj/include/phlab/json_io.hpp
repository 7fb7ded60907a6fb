#pragma once

#include <exception>
#include <set>
#include <string>

#include "json.hpp"
#include "phlab/conformal.hpp"
#include "phlab/fibred.hpp"
#include "phlab/holonomy.hpp"
#include "phlab/lyapunov.hpp"
#include "phlab/projective.hpp"
#include "phlab/trichotomy.hpp"
#include "phlab/uniformize.hpp"

namespace phlab::json_io {

using nlohmann::json;

// Strict parsing: unknown keys anywhere in the document are rejected.
fibred::FibredSystem parse_system(const json& j);
json system_to_json(const fibred::FibredSystem& f);

json exponent_estimate_to_json(const lyap::ExponentEstimate& est);
json bunching_certificate_to_json(const lyap::BunchingCertificate& cert);
json invariance_residuals_to_json(const projective::InvarianceResiduals& r);
json trichotomy_report_to_json(const projective::TrichotomyReport& rep);
json barycentre_field_summary_to_json(const conformal::BarycentreField& field);
json affine_model_to_json(const uniformize::AffineModelReport& rep);
json moebius_model_to_json(const uniformize::MoebiusModelReport& rep);
json group_sample_to_json(const holonomy::HolonomyGroupSample& s);

// Helper for strict object access.
class StrictObject {
  public:
    StrictObject(const json& j, const std::string& context);
    ~StrictObject() noexcept(false);
    StrictObject(const StrictObject&) = delete;

    bool has(const std::string& key);
    const json& at(const std::string& key);
    const json* find(const std::string& key);

    double number(const std::string& key, double fallback);
    double require_number(const std::string& key);
    long long integer(const std::string& key, long long fallback);
    std::string str(const std::string& key, const std::string& fallback);
    bool boolean(const std::string& key, bool fallback);

    void finish();  // throws ConfigInvalid if unvisited keys remain

  private:
    const json& j_;
    std::string context_;
    std::set<std::string> visited_;
    bool finished_ = false;
};

}  // namespace phlab::json_io
