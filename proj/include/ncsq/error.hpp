#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ncsq {

enum class Errc {
  NonPositiveParameter,
  NonFinite,
  CutoffOutOfRange,
  SaturatedOrSuperCritical,
  SqueezeTooLargeForCutoff,
  PopulationOverflow,
  SpaceMismatch,
  NonHermitianOperator,
  ThetaAtOrAboveOne,
  SamplesTooFew,
  GridTooLarge,
  InvalidArgument,
};

constexpr std::string_view to_string(Errc e) noexcept {
  switch (e) {
    case Errc::NonPositiveParameter: return "NonPositiveParameter";
    case Errc::NonFinite: return "NonFinite";
    case Errc::CutoffOutOfRange: return "CutoffOutOfRange";
    case Errc::SaturatedOrSuperCritical: return "SaturatedOrSuperCritical";
    case Errc::SqueezeTooLargeForCutoff: return "SqueezeTooLargeForCutoff";
    case Errc::PopulationOverflow: return "PopulationOverflow";
    case Errc::SpaceMismatch: return "SpaceMismatch";
    case Errc::NonHermitianOperator: return "NonHermitianOperator";
    case Errc::ThetaAtOrAboveOne: return "ThetaAtOrAboveOne";
    case Errc::SamplesTooFew: return "SamplesTooFew";
    case Errc::GridTooLarge: return "GridTooLarge";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ncsq
