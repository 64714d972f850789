#pragma once

// Closed-form quantities for two-mode coherent and squeezed states built on the
// deformed boson algebra [a, a+] = [b, b+] = 1, [a, b+] = i theta.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "ncsq/error.hpp"
#include "ncsq/nc_params.hpp"

namespace ncsq::analytic {

using cplx = std::complex<double>;
inline constexpr cplx kI{0.0, 1.0};

/// Relative tolerance for declaring an uncertainty product saturated.
inline constexpr double kBoundSaturationTolerance = 1e-10;
/// Relative tolerance for m^2 omega^2 == mu/nu.
inline constexpr double kOscillatorTolerance = 1e-12;

struct ModeAmplitudes {
  cplx alpha{};
  cplx beta{};

  friend bool operator==(const ModeAmplitudes&, const ModeAmplitudes&) = default;
};

/// Maps an angle into (-pi, pi].
[[nodiscard]] inline double canonical_angle(double phi) noexcept {
  double c = std::remainder(phi, 2.0 * std::numbers::pi);
  if (c <= -std::numbers::pi) c += 2.0 * std::numbers::pi;
  return c;
}

/// z = r e^{i phi}, r >= 0, phi in (-pi, pi].
class SqueezeParam {
 public:
  SqueezeParam() = default;
  SqueezeParam(double r, double phi) : r_(r), phi_(canonical_angle(phi)) {
    if (!std::isfinite(r) || !std::isfinite(phi))
      throw Error(Errc::NonFinite, "squeeze parameter must be finite");
    if (r < 0) throw Error(Errc::InvalidArgument, "squeeze magnitude r must be >= 0");
  }

  [[nodiscard]] double r() const noexcept { return r_; }
  [[nodiscard]] double phi() const noexcept { return phi_; }
  [[nodiscard]] cplx z() const noexcept { return std::polar(r_, phi_); }
  /// -z, i.e. the inverse squeeze.
  [[nodiscard]] SqueezeParam inverse() const {
    return {r_, phi_ > 0 ? phi_ - std::numbers::pi : phi_ + std::numbers::pi};
  }

 private:
  double r_ = 0;
  double phi_ = 0;
};

/// Coefficients of S O S+ on the basis (a, b, a+, b+).
struct ModeMap {
  cplx a{};
  cplx b{};
  cplx a_dag{};
  cplx b_dag{};

  [[nodiscard]] std::array<cplx, 4> as_array() const { return {a, b, a_dag, b_dag}; }
};

struct BogoliubovCoeffs {
  ModeMap a_out;  // S a S+
  ModeMap b_out;  // S b S+
};

struct OscillatorParams {
  double m = 0;
  double omega = 0;
};

// ---------------------------------------------------------------------------
// Eigenvalues and overlaps
// ---------------------------------------------------------------------------

/// Eigenvalues of (a, b) on |alpha, beta> (equally of (A, B) on |alpha, beta; z>).
[[nodiscard]] inline std::pair<cplx, cplx> coherent_eigenvalues(const NcParams& p,
                                                                const ModeAmplitudes& m) {
  return {m.alpha + kI * p.theta * m.beta, m.beta - kI * p.theta * m.alpha};
}

/// <bra|ket> for two deformed coherent states.
///
/// The exponent is assembled so that swapping bra and ket conjugates every
/// partial sum, which makes overlap(A, B) == conj(overlap(B, A)) hold exactly.
[[nodiscard]] inline cplx coherent_overlap(const NcParams& p, const ModeAmplitudes& bra,
                                           const ModeAmplitudes& ket) {
  const double th = p.theta;
  const cplx a = ket.alpha, b = ket.beta, ap = bra.alpha, bp = bra.beta;

  const double norms = (std::norm(a) + std::norm(b)) + (std::norm(ap) + std::norm(bp));
  const cplx direct = std::conj(ap) * a + std::conj(bp) * b;
  // (i theta / 2)(b* a - a* b) == -theta Im(b* a), likewise for the bra.
  const double self_phase = std::imag(std::conj(b) * a) + std::imag(std::conj(bp) * ap);
  const cplx cross = std::conj(ap) * b - std::conj(bp) * a;

  const double re = -0.5 * norms + direct.real() - th * self_phase - th * cross.imag();
  const double im = direct.imag() + th * cross.real();
  return std::polar(std::exp(re), im);
}

/// <bra|ket; z>: coherent bra against the squeezed state S(z)|ket>.
[[nodiscard]] inline cplx squeezed_overlap(const NcParams& p, const ModeAmplitudes& bra,
                                           const ModeAmplitudes& ket, const SqueezeParam& z) {
  if (z.r() == 0.0) return coherent_overlap(p, bra, ket);

  const double th = p.theta;
  const double r = z.r();
  const cplx a = ket.alpha, b = ket.beta;
  const cplx apc = std::conj(bra.alpha), bpc = std::conj(bra.beta);
  const double rp = r * (1.0 + th), rm = r * (1.0 - th);
  const double chp = std::cosh(rp), chm = std::cosh(rm);
  const double thp = std::tanh(rp), thm = std::tanh(rm);

  const double prefactor = 1.0 / std::sqrt(chp * chm);

  const double norms = std::norm(a) + std::norm(b) + std::norm(bra.alpha) + std::norm(bra.beta);
  const cplx twist = std::conj(a) * b - std::conj(b) * a + apc * bra.beta - bpc * bra.alpha;
  const cplx gauss = -0.5 * (norms + kI * th * twist);

  const cplx direct = apc * a + bpc * b;
  const cplx cross = apc * b - bpc * a;
  const cplx mixing = (1.0 + th) * (direct + kI * cross) / (2.0 * chp) +
                      (1.0 - th) * (direct - kI * cross) / (2.0 * chm);

  const cplx plus_ket = a + kI * b, minus_ket = a - kI * b;
  const cplx plus_bra = apc - kI * bpc, minus_bra = apc + kI * bpc;
  const cplx e_m = std::polar(1.0, -z.phi()), e_p = std::polar(1.0, z.phi());
  const cplx pairing =
      -kI * e_m * ((1.0 + th) / 4.0 * thp * plus_ket * plus_ket -
                   (1.0 - th) / 4.0 * thm * minus_ket * minus_ket) -
      kI * e_p * ((1.0 + th) / 4.0 * thp * plus_bra * plus_bra -
                  (1.0 - th) / 4.0 * thm * minus_bra * minus_bra);

  return prefactor * std::exp(gauss + mixing + pairing);
}

// ---------------------------------------------------------------------------
// Generalized Bogoliubov transformation
// ---------------------------------------------------------------------------

[[nodiscard]] inline BogoliubovCoeffs bogoliubov_coefficients(const NcParams& p,
                                                              const SqueezeParam& z) {
  const double r = z.r(), rt = z.r() * p.theta;
  const double cc = std::cosh(r) * std::cosh(rt);
  const double ss = std::sinh(r) * std::sinh(rt);
  const double sc = std::sinh(r) * std::cosh(rt);
  const double cs = std::cosh(r) * std::sinh(rt);
  const cplx e = std::polar(1.0, z.phi());

  BogoliubovCoeffs out;
  out.a_out = {cc, kI * ss, kI * e * cs, e * sc};
  out.b_out = {-kI * ss, cc, e * sc, -kI * e * cs};
  return out;
}

// ---------------------------------------------------------------------------
// Variances and uncertainty products
// ---------------------------------------------------------------------------

/// Squeezed over coherent variance ratios for x (== py) and px (== y).
struct Gains {
  double x = 1;
  double px = 1;
};

[[nodiscard]] inline Gains single_mode_gains(double theta, const SqueezeParam& z) {
  const double r = z.r(), s = std::sin(z.phi());
  const double c2 = std::cosh(2 * r), s2 = std::sinh(2 * r);
  const double c2t = std::cosh(2 * r * theta), s2t = std::sinh(2 * r * theta);
  return {c2 * (c2t + s * s2t) + theta * s2 * (s2t + s * c2t),
          c2 * (c2t - s * s2t) + theta * s2 * (s2t - s * c2t)};
}

struct TwoModeReport {
  double dX2 = 0;
  double dP2 = 0;
  double prod_XP = 0;
  double min_XP = 0;
  double argmin_phi = 0;
};

[[nodiscard]] inline TwoModeReport two_mode_report(const NcParams& p, const SqueezeParam& z) {
  const double th = p.theta, r = z.r();
  const double c = std::cos(z.phi()), s = std::sin(z.phi());
  const double c2 = std::cosh(2 * r), s2 = std::sinh(2 * r);
  const double c2t = std::cosh(2 * r * th), s2t = std::sinh(2 * r * th);
  const double h = p.hbar;

  TwoModeReport out;
  out.dX2 = h / 4 * std::sqrt(p.mu / p.nu) * (c2t * (c2 - c * s2) + th * s2t * (s2 - c * c2));
  out.dP2 = h / 4 * std::sqrt(p.nu / p.mu) * (c2t * (c2 + c * s2) + th * s2t * (s2 + c * c2));
  out.prod_XP = h * h / 16 *
                ((c2 * c2 - c * c * s2 * s2) +
                 th / 2 * s * s * std::sinh(4 * r) * std::sinh(4 * r * th) +
                 ((c2 * c2 + th * th * s2 * s2) - c * c * (th * th * c2 * c2 + s2 * s2)) * s2t * s2t);
  out.min_XP = h * h / 16 * (1 + (1 - p.ratio()) * s2t * s2t);
  out.argmin_phi = 0.0;
  return out;
}

struct ProductReport {
  double prod_xpx = 0;
  double min_xpx = 0;
  double min_xy = 0;
  double min_pxpy = 0;
  double argmin_phi = 0;  // +pi/2; -pi/2 attains the same value
};

[[nodiscard]] inline ProductReport variance_products(const NcParams& p, const SqueezeParam& z) {
  const double th = p.theta, r = z.r();
  const double c = std::cos(z.phi()), s = std::sin(z.phi());
  const double c2 = std::cosh(2 * r), s2 = std::sinh(2 * r);
  const double c2t = std::cosh(2 * r * th), s2t = std::sinh(2 * r * th);
  const double h2 = p.hbar * p.hbar;

  ProductReport out;
  out.prod_xpx = h2 / 4 *
                 (c2 * c2 * (c2t * c2t - s * s * s2t * s2t) +
                  0.5 * th * c * c * std::sinh(4 * r) * std::sinh(4 * r * th) +
                  th * th * s2 * s2 * (s2t * s2t - s * s * c2t * c2t));
  const double bracket = 1 + (1 - p.ratio()) * s2 * s2;
  out.min_xpx = h2 / 4 * bracket;
  out.min_xy = h2 * p.mu / (4 * p.nu) * bracket;
  out.min_pxpy = h2 * p.nu / (4 * p.mu) * bracket;
  out.argmin_phi = std::numbers::pi / 2;
  return out;
}

/// One uncertainty relation Delta A Delta B >= rhs.
struct UncertaintyBound {
  std::string_view name;
  double lhs = 0;  // product of standard deviations; negative if the variance product is
  double rhs = 0;
  bool satisfied = false;
  bool saturated = false;
};

[[nodiscard]] inline UncertaintyBound evaluate_bound(std::string_view name, double var_a,
                                                     double var_b, double floor) {
  // A variance can turn negative once mu nu > hbar^2; keep the sign so the
  // bound reads as violated instead of NaN.
  const double prod = var_a * var_b;
  UncertaintyBound b{name, std::copysign(std::sqrt(std::abs(prod)), prod), floor, false, false};
  b.saturated = std::abs(b.lhs - b.rhs) <= kBoundSaturationTolerance * b.rhs;
  b.satisfied = b.saturated || b.lhs > b.rhs;
  return b;
}

struct VarianceReport {
  double dx2 = 0, dy2 = 0, dpx2 = 0, dpy2 = 0;
  double prod_xpx = 0, prod_ypy = 0, prod_xy = 0, prod_pxpy = 0;
  double dX2 = 0, dP2 = 0, prod_XP = 0;
  double gain_x = 1, gain_px = 1;
  bool squeezing = false;  // some single-mode variance below its coherent value
  bool saturated_xpx = false, saturated_ypy = false, saturated_xy = false,
       saturated_pxpy = false, saturated_XP = false;
};

/// Variances on |alpha, beta; z> (or on |alpha, beta> when z is absent).
/// Independent of (alpha, beta), which is why the amplitudes are not inputs.
[[nodiscard]] inline VarianceReport single_mode_report(const NcParams& p,
                                                       const std::optional<SqueezeParam>& z) {
  const double h = p.hbar;
  const double rx = std::sqrt(p.mu / p.nu), rp = std::sqrt(p.nu / p.mu);
  const Gains g = z ? single_mode_gains(p.theta, *z) : Gains{};

  VarianceReport v;
  v.gain_x = g.x;
  v.gain_px = g.px;
  v.dx2 = h / 2 * rx * g.x;
  v.dpx2 = h / 2 * rp * g.px;
  // Exchange identities: y behaves as px, py as x, with the prefactors swapped.
  v.dy2 = h / 2 * rx * g.px;
  v.dpy2 = h / 2 * rp * g.x;
  v.squeezing = z && (g.x < 1.0 || g.px < 1.0);

  v.prod_xpx = v.dx2 * v.dpx2;
  v.prod_ypy = v.dy2 * v.dpy2;
  v.prod_xy = v.dx2 * v.dy2;
  v.prod_pxpy = v.dpx2 * v.dpy2;

  const TwoModeReport t = two_mode_report(p, z.value_or(SqueezeParam{}));
  v.dX2 = t.dX2;
  v.dP2 = t.dP2;
  v.prod_XP = v.dX2 * v.dP2;

  v.saturated_xpx = evaluate_bound("x_px", v.dx2, v.dpx2, h / 2).saturated;
  v.saturated_ypy = evaluate_bound("y_py", v.dy2, v.dpy2, h / 2).saturated;
  v.saturated_xy = evaluate_bound("x_y", v.dx2, v.dy2, p.mu / 2).saturated;
  v.saturated_pxpy = evaluate_bound("px_py", v.dpx2, v.dpy2, p.nu / 2).saturated;
  v.saturated_XP = evaluate_bound("X_P", v.dX2, v.dP2, h / 4).saturated;
  return v;
}

struct HeisenbergReport {
  std::array<UncertaintyBound, 5> bounds;

  [[nodiscard]] bool all_satisfied() const {
    for (const auto& b : bounds)
      if (!b.satisfied) return false;
    return true;
  }
  [[nodiscard]] const UncertaintyBound& operator[](std::string_view name) const {
    for (const auto& b : bounds)
      if (b.name == name) return b;
    throw Error(Errc::InvalidArgument, "unknown bound " + std::string(name));
  }
};

/// Delta x Delta y >= mu/2, Delta px Delta py >= nu/2, Delta x Delta px >= hbar/2,
/// Delta y Delta py >= hbar/2 and Delta X Delta P >= hbar/4.
[[nodiscard]] inline HeisenbergReport heisenberg_report(const NcParams& p,
                                                        const std::optional<SqueezeParam>& z) {
  const VarianceReport v = single_mode_report(p, z);
  return {{evaluate_bound("x_y", v.dx2, v.dy2, p.mu / 2),
           evaluate_bound("px_py", v.dpx2, v.dpy2, p.nu / 2),
           evaluate_bound("x_px", v.dx2, v.dpx2, p.hbar / 2),
           evaluate_bound("y_py", v.dy2, v.dpy2, p.hbar / 2),
           evaluate_bound("X_P", v.dX2, v.dP2, p.hbar / 4)}};
}

// ---------------------------------------------------------------------------
// Isotropic oscillator
// ---------------------------------------------------------------------------

struct OscillatorConsistency {
  double lhs = 0;  // m^2 omega^2
  double rhs = 0;  // mu / nu
  bool consistent = false;
};

[[nodiscard]] inline OscillatorConsistency oscillator_consistency(const OscillatorParams& osc,
                                                                  const NcParams& p) {
  if (!std::isfinite(osc.m) || !std::isfinite(osc.omega))
    throw Error(Errc::NonFinite, "oscillator parameters must be finite");
  if (osc.m <= 0 || osc.omega <= 0)
    throw Error(Errc::NonPositiveParameter, "mass and frequency must be positive");
  OscillatorConsistency out;
  out.lhs = osc.m * osc.m * osc.omega * osc.omega;
  out.rhs = p.mu / p.nu;
  out.consistent =
      std::abs(out.lhs - out.rhs) < kOscillatorTolerance * std::max(out.lhs, out.rhs);
  return out;
}

}  // namespace ncsq::analytic
