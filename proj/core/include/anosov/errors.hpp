#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace anosov {

enum class ErrorCode {
  NotHyperbolic,
  NotUnimodular,
  NoRealNormalization,
  DegenerateSpectrum,
  RationalResonance,
  ConeViolation,
  NotInvertible,
  NoConvergence,
  ResolutionTooCoarse,
  NoDecay,
  HolonomyEscape,
  DegenerateFit,
  NewtonDiverged,
  SingularJacobian,
  NonzeroMean,
  SmallDivisorFloor,
  DirectionNotConverged,
  StepCollapse,
  TruncationBoundExceeded,
  InverseConjugacyAccuracy,
  StencilOffLeaf,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the pipeline report) can branch on it without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace anosov
