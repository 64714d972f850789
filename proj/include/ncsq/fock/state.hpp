#pragma once

#include <cmath>
#include <optional>
#include <sstream>

#include "ncsq/analytic.hpp"
#include "ncsq/fock/expm.hpp"
#include "ncsq/fock/operators.hpp"
#include "ncsq/fock/space.hpp"

namespace ncsq::fock {

inline constexpr int kDefaultBuffer = 5;
inline constexpr double kMaxLeak = 1e-10;
inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kVarianceFloor = 1e-12;

/// Probability on basis states with total occupation > cutoff - buffer.
[[nodiscard]] inline double safe_norm_fraction(const StateVector& state, int buffer) {
  const FockSpace& s = state.space();
  if (buffer < 0 || buffer > s.cutoff())
    throw Error(Errc::InvalidArgument, "buffer must lie in [0, cutoff]");
  const int limit = s.cutoff() - buffer;
  double mass = 0;
  for (Index i = 0; i < s.dim(); ++i)
    if (s.total(i) > limit) mass += std::norm(state.data()[i]);
  return mass;
}

struct StateOptions {
  int buffer = kDefaultBuffer;
  double max_leak = kMaxLeak;
  bool enforce_guard = true;
};

[[nodiscard]] inline StateVector vacuum(const FockSpace& space) {
  Vec v = Vec::Zero(space.dim());
  v[0] = 1.0;
  return {space, std::move(v)};
}

inline void check_population(const StateVector& state, const StateOptions& opt,
                             const char* what) {
  if (!opt.enforce_guard) return;
  const double leak = safe_norm_fraction(state, opt.buffer);
  if (!(leak < opt.max_leak)) {
    std::ostringstream msg;
    msg << what << " puts " << leak << " of its norm above total occupation "
        << state.space().cutoff() - opt.buffer << " (cutoff " << state.space().cutoff()
        << "); increase the cutoff";
    throw Error(Errc::PopulationOverflow, msg.str());
  }
}

/// S(z) D(alpha, beta) |0>, or D(alpha, beta) |0> when z is absent.
[[nodiscard]] inline StateVector make_state(const OperatorSet& ops,
                                            const analytic::ModeAmplitudes& amps,
                                            const std::optional<analytic::SqueezeParam>& z,
                                            const StateOptions& opt = {}) {
  Vec v = vacuum(ops.space).data();
  if (amps.alpha != cplx{} || amps.beta != cplx{})
    v = expm_action(displacement_generator(ops, amps).data(), v);
  if (z && z->r() > 0) v = expm_action(squeeze_generator(ops, *z).data(), v);

  const double norm = v.norm();
  if (std::abs(norm - 1.0) > kNormTolerance)
    throw Error(Errc::PopulationOverflow, "state lost normalization (norm " +
                                              std::to_string(norm) + "); increase the cutoff");
  StateVector state(ops.space, std::move(v));
  check_population(state, opt, "state");
  return state;
}

[[nodiscard]] inline StateVector make_state(const NcParams& params, const FockSpace& space,
                                            const analytic::ModeAmplitudes& amps,
                                            const std::optional<analytic::SqueezeParam>& z,
                                            const StateOptions& opt = {}) {
  return make_state(make_operator_set(params, space), amps, z, opt);
}

[[nodiscard]] inline cplx expectation(const StateVector& state, const OperatorMatrix& op) {
  require_same_space(state.space(), op.space());
  return state.data().dot(op.apply(state.data()));
}

struct Moments {
  cplx mean;
  double variance = 0;
};

/// <Op> and <Op^2> - <Op>^2 for a Hermitian Op.
[[nodiscard]] inline Moments expectation_and_variance(const StateVector& state,
                                                      const OperatorMatrix& op) {
  require_same_space(state.space(), op.space());
  const double herm = hermiticity_residual(op);
  if (herm > kHermitianTolerance)
    throw Error(Errc::NonHermitianOperator,
                "variance requested for an operator with Hermiticity residual " +
                    std::to_string(herm));
  const Vec once = op.apply(state.data());
  const cplx mean = state.data().dot(once);
  const cplx second = state.data().dot(op.apply(once));
  double var = (second - mean * mean).real();
  if (var < 0 && var >= -kVarianceFloor) var = 0;
  return {mean, var};
}

/// Dense S(z) = exp(z* a b - z a+ b+).
[[nodiscard]] inline DenseOperator squeeze_op(const OperatorSet& ops,
                                              const analytic::SqueezeParam& z,
                                              SqueezeGuard guard = SqueezeGuard::MagnitudeLimit,
                                              const StateOptions& opt = {}) {
  if (guard == SqueezeGuard::MagnitudeLimit && z.r() > kDefaultMaxSqueeze)
    throw Error(Errc::SqueezeTooLargeForCutoff,
                "r = " + std::to_string(z.r()) + " exceeds the default limit " +
                    std::to_string(kDefaultMaxSqueeze) + "; request a population check instead");
  if (guard == SqueezeGuard::PopulationCheck) {
    StateOptions strict = opt;
    strict.enforce_guard = false;
    const StateVector probe = make_state(ops, {}, z, strict);
    if (!(safe_norm_fraction(probe, opt.buffer) < opt.max_leak))
      throw Error(Errc::SqueezeTooLargeForCutoff,
                  "S(z)|0> leaks beyond the safe subspace at cutoff " +
                      std::to_string(ops.space.cutoff()));
  }
  return matrix_exp(squeeze_generator(ops, z));
}

[[nodiscard]] inline DenseOperator squeeze_op(const NcParams& params, const FockSpace& space,
                                              const analytic::SqueezeParam& z,
                                              SqueezeGuard guard = SqueezeGuard::MagnitudeLimit) {
  return squeeze_op(make_operator_set(params, space), z, guard);
}

}  // namespace ncsq::fock
