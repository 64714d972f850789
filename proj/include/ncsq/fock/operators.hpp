#pragma once

// Matrix realization of the noncommutative phase space on a truncated Fock space.
//
// The Fock ladders (c1, c2) are ordinary bosons whose vacuum is annihilated by
// the deformed pair (a, b). They are the annihilator-only combinations
// (c1, c2) = G^{-1/2} (a, b) with G = [[1, i theta], [-i theta, 1]] the
// commutator Gram matrix, which exists for theta < 1. The quadratures follow
// from inverting the deformed boson definition, and the deformed and kappa-map
// operators are then rebuilt from the quadratures, so every commutator below
// is a numerical result rather than an input.

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "ncsq/analytic.hpp"
#include "ncsq/error.hpp"
#include "ncsq/fock/expm.hpp"
#include "ncsq/fock/space.hpp"
#include "ncsq/nc_params.hpp"

namespace ncsq::fock {

/// Smallest lambda_denom the kappa-map inversion accepts.
inline constexpr double kMinLambdaDenom = 1e-8;
/// Default largest squeeze magnitude accepted without a population check.
inline constexpr double kDefaultMaxSqueeze = 0.7;

inline void require_subcritical(const NcParams& p) {
  const ConstraintClass c = classify_constraint(p);
  if (c != ConstraintClass::SubCritical || !p.lambda_denom || *p.lambda_denom <= kMinLambdaDenom)
    throw Error(Errc::SaturatedOrSuperCritical,
                "the Fock realization needs mu*nu < hbar^2 (theta = " + std::to_string(p.theta) +
                    ", class " + std::string(to_string(c)) + ")");
}

/// Standard ladder matrices on the two modes of the space.
[[nodiscard]] inline std::pair<OperatorMatrix, OperatorMatrix> ordinary_mode_ops(
    const FockSpace& space) {
  std::vector<Eigen::Triplet<cplx>> ta, tb;
  ta.reserve(space.dim());
  tb.reserve(space.dim());
  for (int na = 0; na <= space.cutoff(); ++na) {
    for (int nb = 0; nb <= space.cutoff(); ++nb) {
      if (na > 0) ta.emplace_back(space.index(na - 1, nb), space.index(na, nb), std::sqrt(double(na)));
      if (nb > 0) tb.emplace_back(space.index(na, nb - 1), space.index(na, nb), std::sqrt(double(nb)));
    }
  }
  SparseMat a(space.dim(), space.dim()), b(space.dim(), space.dim());
  a.setFromTriplets(ta.begin(), ta.end());
  b.setFromTriplets(tb.begin(), tb.end());
  return {OperatorMatrix(space, std::move(a)), OperatorMatrix(space, std::move(b))};
}

/// Real 4x4 map taking the Fock quadratures (q1, p1, q2, p2), q = c + c+,
/// p = -i(c - c+), to (x, y, px, py).
[[nodiscard]] inline Eigen::Matrix4d quadrature_map(const NcParams& params) {
  require_subcritical(params);
  const double th = params.theta;
  const double p = 0.5 * (std::sqrt(1 + th) + std::sqrt(1 - th));
  const double q = 0.5 * (std::sqrt(1 + th) - std::sqrt(1 - th));
  const double sigma = std::sqrt(params.hbar / 2);
  const double s = std::sqrt(std::sqrt(params.mu / params.nu));

  Eigen::Matrix4d m;
  // clang-format off
  m << sigma * s * p,  0,             0,             -sigma * s * q,
       0,              sigma * s * q, sigma * s * p,  0,
       0,              sigma / s * p, sigma / s * q,  0,
      -sigma / s * q,  0,             0,              sigma / s * p;
  // clang-format on
  return m;
}

struct Quadratures {
  OperatorMatrix x, y, px, py;
};

[[nodiscard]] inline Quadratures phase_space_ops(const NcParams& params, const FockSpace& space) {
  const Eigen::Matrix4d m = quadrature_map(params);
  auto [c1, c2] = ordinary_mode_ops(space);
  const OperatorMatrix c1d = c1.adjoint(), c2d = c2.adjoint();
  const cplx mi{0, -1};
  const std::array<OperatorMatrix, 4> fock = {c1 + c1d, mi * (c1 - c1d), c2 + c2d, mi * (c2 - c2d)};

  auto row = [&](int k) {
    SparseMat acc(space.dim(), space.dim());
    for (int j = 0; j < 4; ++j)
      if (m(k, j) != 0) acc += cplx(m(k, j)) * fock[j].data();
    return OperatorMatrix(space, std::move(acc));
  };
  return {row(0), row(1), row(2), row(3)};
}

/// a = (2 hbar)^{-1/2} ((nu/mu)^{1/4} x + i (mu/nu)^{1/4} px), b likewise from (y, py).
[[nodiscard]] inline std::pair<OperatorMatrix, OperatorMatrix> deformed_ops(const NcParams& params,
                                                                            const Quadratures& q) {
  const double norm = 1.0 / std::sqrt(2 * params.hbar);
  const double lx = std::sqrt(std::sqrt(params.nu / params.mu));
  const double lp = std::sqrt(std::sqrt(params.mu / params.nu));
  const cplx cx = norm * lx, cp = cplx(0, norm * lp);
  return {cx * q.x + cp * q.px, cx * q.y + cp * q.py};
}

[[nodiscard]] inline std::pair<OperatorMatrix, OperatorMatrix> deformed_ops(const NcParams& params,
                                                                            const FockSpace& space) {
  return deformed_ops(params, phase_space_ops(params, space));
}

/// The alternative map onto ordinary bosons using kappa and lambda_denom.
[[nodiscard]] inline std::pair<OperatorMatrix, OperatorMatrix> kappa_map_ops(const NcParams& params,
                                                                             const Quadratures& q) {
  require_subcritical(params);
  const double k = *params.kappa, h = params.hbar;
  const double pre = 1.0 / (std::sqrt(2 * h) * *params.lambda_denom);
  const cplx i{0, 1};
  const OperatorMatrix a =
      pre * (cplx(k) * q.x + cplx(params.mu / (2 * h)) * q.py +
             i * (cplx(-params.nu / (2 * k * h)) * q.y + q.px));
  const OperatorMatrix b =
      pre * (cplx(k) * q.y + cplx(-params.mu / (2 * h)) * q.px +
             i * (cplx(params.nu / (2 * k * h)) * q.x + q.py));
  return {a, b};
}

/// Every operator the verifier needs, built once per (params, space).
struct OperatorSet {
  NcParams params;
  FockSpace space;
  OperatorMatrix x, y, px, py;
  OperatorMatrix X, P;           // (x + y)/2, (px + py)/2
  OperatorMatrix a_def, b_def;   // deformed bosons
  OperatorMatrix a_ord, b_ord;   // kappa-map ordinary bosons
  OperatorMatrix ladder_a, ladder_b;  // Fock basis ladders
};

[[nodiscard]] inline OperatorSet make_operator_set(const NcParams& params, const FockSpace& space) {
  Quadratures q = phase_space_ops(params, space);
  auto [a, b] = deformed_ops(params, q);
  auto [ao, bo] = kappa_map_ops(params, q);
  auto [la, lb] = ordinary_mode_ops(space);
  OperatorMatrix X = cplx(0.5) * (q.x + q.y);
  OperatorMatrix P = cplx(0.5) * (q.px + q.py);
  return {params, space, q.x, q.y, q.px, q.py, X, P, a, b, ao, bo, la, lb};
}

/// alpha a+ + beta b+ - alpha* a - beta* b.
[[nodiscard]] inline OperatorMatrix displacement_generator(const OperatorSet& ops,
                                                           const analytic::ModeAmplitudes& m) {
  return m.alpha * ops.a_def.adjoint() + m.beta * ops.b_def.adjoint() -
         (std::conj(m.alpha) * ops.a_def + std::conj(m.beta) * ops.b_def);
}

/// z* a b - z a+ b+.
[[nodiscard]] inline OperatorMatrix squeeze_generator(const OperatorSet& ops,
                                                      const analytic::SqueezeParam& z) {
  const cplx zz = z.z();
  return std::conj(zz) * (ops.a_def * ops.b_def) -
         zz * (ops.a_def.adjoint() * ops.b_def.adjoint());
}

[[nodiscard]] inline DenseOperator displacement_op(const OperatorSet& ops,
                                                   const analytic::ModeAmplitudes& m,
                                                   double tol = kDefaultExpmTolerance) {
  return matrix_exp(displacement_generator(ops, m), tol);
}

[[nodiscard]] inline DenseOperator displacement_op(const NcParams& params, const FockSpace& space,
                                                   const analytic::ModeAmplitudes& m) {
  return displacement_op(make_operator_set(params, space), m);
}

enum class SqueezeGuard {
  MagnitudeLimit,   // r <= kDefaultMaxSqueeze
  PopulationCheck,  // any r, provided S|0> keeps its weight inside the safe subspace
};

}  // namespace ncsq::fock
