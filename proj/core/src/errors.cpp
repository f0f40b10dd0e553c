#include "anosov/errors.hpp"

#include "anosov/types.hpp"

namespace anosov {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::NoRealNormalization: return "NoRealNormalization";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::RationalResonance: return "RationalResonance";
    case ErrorCode::ConeViolation: return "ConeViolation";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::NoDecay: return "NoDecay";
    case ErrorCode::HolonomyEscape: return "HolonomyEscape";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::NonzeroMean: return "NonzeroMean";
    case ErrorCode::SmallDivisorFloor: return "SmallDivisorFloor";
    case ErrorCode::DirectionNotConverged: return "DirectionNotConverged";
    case ErrorCode::StepCollapse: return "StepCollapse";
    case ErrorCode::TruncationBoundExceeded: return "TruncationBoundExceeded";
    case ErrorCode::InverseConjugacyAccuracy: return "InverseConjugacyAccuracy";
    case ErrorCode::StencilOffLeaf: return "StencilOffLeaf";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

std::string_view to_string(Bundle b) {
  switch (b) {
    case Bundle::Stable: return "s";
    case Bundle::WeakUnstable: return "wu";
    case Bundle::StrongUnstable: return "uu";
  }
  return "?";
}

Bundle parse_bundle(std::string_view tag) {
  if (tag == "s") return Bundle::Stable;
  if (tag == "wu") return Bundle::WeakUnstable;
  if (tag == "uu") return Bundle::StrongUnstable;
  throw Error(ErrorCode::InvalidConfig, "unknown bundle tag '" + std::string(tag) + "'");
}

}  // namespace anosov
