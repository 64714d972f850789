#pragma once

// Matrix exponentials: dense scaling-and-squaring with Pade approximants, and
// the action exp(A) v of a sparse generator on a vector by scaled Taylor steps.

#include <array>
#include <cmath>
#include <limits>

#include "ncsq/fock/space.hpp"

namespace ncsq::fock {

inline constexpr double kDefaultExpmTolerance = 1e-12;

namespace detail {

inline double norm1(const DenseMat& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

inline double norm1(const SparseMat& a) {
  double worst = 0;
  for (Index j = 0; j < a.outerSize(); ++j) {
    double col = 0;
    for (SparseMat::InnerIterator it(a, j); it; ++it) col += std::abs(it.value());
    worst = std::max(worst, col);
  }
  return worst;
}

// Pade coefficients and 1-norm thresholds for backward error below 2^-53.
inline constexpr std::array<double, 4> kPade3 = {120., 60., 12., 1.};
inline constexpr std::array<double, 6> kPade5 = {30240., 15120., 3360., 420., 30., 1.};
inline constexpr std::array<double, 8> kPade7 = {17297280., 8648640., 1995840., 277200.,
                                                 25200.,    1512.,    56.,      1.};
inline constexpr std::array<double, 10> kPade9 = {17643225600., 8821612800., 2075673600.,
                                                  302702400.,   30270240.,   2162160.,
                                                  110880.,      3960.,       90.,
                                                  1.};
inline constexpr std::array<double, 14> kPade13 = {
    64764752532480000., 32382376266240000., 7771770303897600., 1187353796428800.,
    129060195264000.,   10559470521600.,    670442572800.,     33522128640.,
    1323241920.,        40840800.,          960960.,           16380.,
    182.,               1.};
inline constexpr std::array<double, 4> kTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                                 9.504178996162932e-1, 2.097847961257068e0};
inline constexpr double kTheta13 = 5.371920351148152;

template <std::size_t N>
DenseMat pade_low(const DenseMat& a, const std::array<double, N>& b) {
  const Index n = a.rows();
  const DenseMat a2 = a * a;
  DenseMat power = DenseMat::Identity(n, n);
  DenseMat u_inner = b[1] * power;
  DenseMat v = b[0] * power;
  for (std::size_t k = 2; k + 1 < N + 1; k += 2) {
    power = power * a2;
    v += b[k] * power;
    if (k + 1 < N) u_inner += b[k + 1] * power;
  }
  const DenseMat u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

inline DenseMat pade13(const DenseMat& a) {
  const auto& b = kPade13;
  const Index n = a.rows();
  const DenseMat id = DenseMat::Identity(n, n);
  const DenseMat a2 = a * a, a4 = a2 * a2, a6 = a4 * a2;
  const DenseMat u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                          b[3] * a2 + b[1] * id);
  const DenseMat v =
      a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace detail

/// exp(M) by scaling and squaring. The degree/scaling thresholds bound the
/// backward error by the unit roundoff, which is below any admissible `tol`.
[[nodiscard]] inline DenseMat matrix_exp(const DenseMat& m, double tol = kDefaultExpmTolerance) {
  if (!(tol > 0)) throw Error(Errc::InvalidArgument, "matrix_exp tolerance must be positive");
  if (!m.allFinite()) throw Error(Errc::NonFinite, "matrix_exp input has non-finite entries");
  if (m.rows() != m.cols()) throw Error(Errc::InvalidArgument, "matrix_exp needs a square matrix");
  if (m.rows() == 0) return m;

  const double norm = detail::norm1(m);
  if (norm <= detail::kTheta[0]) return detail::pade_low(m, detail::kPade3);
  if (norm <= detail::kTheta[1]) return detail::pade_low(m, detail::kPade5);
  if (norm <= detail::kTheta[2]) return detail::pade_low(m, detail::kPade7);
  if (norm <= detail::kTheta[3]) return detail::pade_low(m, detail::kPade9);

  const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / detail::kTheta13))));
  DenseMat r = detail::pade13(m / std::ldexp(1.0, squarings));
  for (int k = 0; k < squarings; ++k) r = r * r;
  return r;
}

template <class Storage>
[[nodiscard]] DenseOperator matrix_exp(const TaggedMatrix<Storage>& m,
                                       double tol = kDefaultExpmTolerance) {
  return {m.space(), matrix_exp(m.dense(), tol)};
}

/// exp(A) v without forming exp(A). A is split into steps with ||A/steps||_1 <= 1
/// and each step is a Taylor series truncated once two consecutive terms fall
/// below tol relative to the running sum.
[[nodiscard]] inline Vec expm_action(const SparseMat& a, const Vec& v,
                                     double tol = std::numeric_limits<double>::epsilon() / 2) {
  if (!v.allFinite()) throw Error(Errc::NonFinite, "expm_action input vector is not finite");
  const double norm = detail::norm1(a);
  if (!std::isfinite(norm)) throw Error(Errc::NonFinite, "expm_action generator is not finite");
  if (norm == 0) return v;

  const int steps = std::max(1, static_cast<int>(std::ceil(norm)));
  const double h = 1.0 / steps;
  constexpr int kMaxTerms = 60;

  Vec out = v;
  for (int s = 0; s < steps; ++s) {
    Vec term = out;
    Vec acc = out;
    double prev = term.norm();
    for (int k = 1; k <= kMaxTerms; ++k) {
      term = (a * term) * (h / k);
      acc += term;
      const double now = term.norm();
      if (now + prev <= tol * acc.norm()) break;
      prev = now;
    }
    out = std::move(acc);
  }
  return out;
}

}  // namespace ncsq::fock
