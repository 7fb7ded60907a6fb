#pragma once

#include <stdexcept>
#include <string>

namespace phlab {

// Error families map to CLI exit codes: config -> 2, numerical -> 3, gate -> 4.
enum class ErrorCode {
    NotUnimodular,
    NotHyperbolic,
    NotElliptic,
    TrivialAction,
    PeriodTooLarge,
    NewtonDivergence,
    SingularMatrix,
    NotOnLeaf,
    NoConvergence,
    HeavyAtom,
    SupMuTooLarge,
    DegenerateLattice,
    NotConformalVerdict,
    NonConstantA,
    NotInteger,
    FitDefectExceeded,
    ConfigInvalid,
    GateInconclusive,
    InternalError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotUnimodular: return "NotUnimodular";
        case ErrorCode::NotHyperbolic: return "NotHyperbolic";
        case ErrorCode::NotElliptic: return "NotElliptic";
        case ErrorCode::TrivialAction: return "TrivialAction";
        case ErrorCode::PeriodTooLarge: return "PeriodTooLarge";
        case ErrorCode::NewtonDivergence: return "NewtonDivergence";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::NotOnLeaf: return "NotOnLeaf";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::HeavyAtom: return "HeavyAtom";
        case ErrorCode::SupMuTooLarge: return "SupMuTooLarge";
        case ErrorCode::DegenerateLattice: return "DegenerateLattice";
        case ErrorCode::NotConformalVerdict: return "NotConformalVerdict";
        case ErrorCode::NonConstantA: return "NonConstantA";
        case ErrorCode::NotInteger: return "NotInteger";
        case ErrorCode::FitDefectExceeded: return "FitDefectExceeded";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::GateInconclusive: return "GateInconclusive";
        case ErrorCode::InternalError: return "InternalError";
    }
    return "UnknownError";
}

}  // namespace phlab
