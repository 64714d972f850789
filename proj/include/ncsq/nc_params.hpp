#pragma once

#include <cmath>
#include <optional>
#include <string_view>

#include "ncsq/error.hpp"

namespace ncsq {

/// Relative tolerance on mu*nu/hbar^2 - 1 for the saturated class.
inline constexpr double kSaturationTolerance = 1e-12;

enum class ConstraintClass { SubCritical, Saturated, SuperCritical };

constexpr std::string_view to_string(ConstraintClass c) noexcept {
  switch (c) {
    case ConstraintClass::SubCritical: return "SubCritical";
    case ConstraintClass::Saturated: return "Saturated";
    case ConstraintClass::SuperCritical: return "SuperCritical";
  }
  return "Unknown";
}

/// Noncommutative phase-space parameters.
///
/// mu = [x, y]/i (length^2), nu = [px, py]/i (momentum^2), hbar = [x, px]/i.
/// theta = sqrt(mu nu)/hbar is the only dimensionless control. kappa and
/// lambda_denom belong to the map onto ordinary bosons and exist only while
/// mu nu <= hbar^2.
struct NcParams {
  double mu = 0;
  double nu = 0;
  double hbar = 0;
  double theta = 0;
  std::optional<double> kappa;
  std::optional<double> lambda_denom;

  /// mu nu / hbar^2, i.e. theta squared without the rounding of the sqrt.
  [[nodiscard]] double ratio() const noexcept { return (mu * nu) / (hbar * hbar); }
};

/// Class from the ratio mu nu / hbar^2 alone.
[[nodiscard]] inline ConstraintClass classify_ratio(double ratio) noexcept {
  const double excess = ratio - 1.0;
  if (std::abs(excess) <= kSaturationTolerance) return ConstraintClass::Saturated;
  return excess < 0 ? ConstraintClass::SubCritical : ConstraintClass::SuperCritical;
}

[[nodiscard]] inline ConstraintClass classify_constraint(const NcParams& p) noexcept {
  return classify_ratio(p.ratio());
}

[[nodiscard]] inline NcParams make_params(double mu, double nu, double hbar) {
  if (!std::isfinite(mu) || !std::isfinite(nu) || !std::isfinite(hbar))
    throw Error(Errc::NonFinite, "mu, nu and hbar must be finite");
  if (mu <= 0 || nu <= 0 || hbar <= 0)
    throw Error(Errc::NonPositiveParameter, "mu, nu and hbar must be strictly positive");

  NcParams p;
  p.mu = mu;
  p.nu = nu;
  p.hbar = hbar;
  p.theta = std::sqrt(mu * nu) / hbar;

  const double ratio = p.ratio();
  if (classify_ratio(ratio) != ConstraintClass::SuperCritical) {
    // Saturated inputs may sit a hair above 1; clamp so the root stays real.
    const double kappa = 0.5 * (1.0 + std::sqrt(std::fmax(0.0, 1.0 - ratio)));
    p.kappa = kappa;
    p.lambda_denom = kappa - ratio / (4.0 * kappa);
  }
  return p;
}

}  // namespace ncsq
