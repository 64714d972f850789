#pragma once

// Analytic-vs-oracle crosschecks, Monte-Carlo resolution of the identity and
// cutoff convergence probes. Every check yields a report whose pass flag is a
// pure function of (residual, tolerance).

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ncsq/analytic.hpp"
#include "ncsq/fock/expm.hpp"
#include "ncsq/fock/operators.hpp"
#include "ncsq/fock/space.hpp"
#include "ncsq/fock/state.hpp"
#include "ncsq/nc_params.hpp"

namespace ncsq::verify {

using analytic::ModeAmplitudes;
using analytic::SqueezeParam;
using fock::cplx;

inline constexpr double kHermiticityTolerance = 1e-12;
inline constexpr double kIdentityTolerance = 1e-8;
inline constexpr double kCrosscheckTolerance = 1e-6;
inline constexpr double kConvergenceTolerance = 1e-8;
inline constexpr double kMaxZScore = 4.0;
inline constexpr std::int64_t kMinSamples = 1000;
/// Successive differences below this are roundoff and exempt from the monotone test.
inline constexpr double kConvergenceFloor = 1e-13;
/// Largest cutoff the escalating crosscheck will try.
inline constexpr int kMaxEscalatedCutoff = 80;

struct Metadata {
  NcParams params;
  int cutoff = 0;
  int buffer = fock::kDefaultBuffer;
  std::optional<std::uint64_t> seed;
  std::optional<double> leak;  // safe_norm_fraction of the state the check used
};

struct ResidualReport {
  std::string id;
  double residual = 0;
  double tolerance = 0;
  bool passed = false;
  Metadata meta;
};

[[nodiscard]] inline ResidualReport make_report(std::string id, double residual, double tolerance,
                                                Metadata meta) {
  const bool ok = residual <= tolerance;  // NaN fails
  return {std::move(id), residual, tolerance, ok, std::move(meta)};
}

[[nodiscard]] inline bool all_passed(const std::vector<ResidualReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
}

struct McReport {
  cplx estimate;
  cplx reference;
  double stderr_ = 0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  double z_score = 0;

  [[nodiscard]] bool passed() const { return z_score <= kMaxZScore; }
};

// ---------------------------------------------------------------------------
// Bogoliubov fit
// ---------------------------------------------------------------------------

namespace detail {

inline fock::Vec basis_vector(const fock::FockSpace& s, fock::Index i) {
  fock::Vec e = fock::Vec::Zero(s.dim());
  e[i] = 1.0;
  return e;
}

inline std::vector<fock::Index> block_indices(const fock::FockSpace& s, int max_total) {
  std::vector<fock::Index> out;
  for (fock::Index i = 0; i < s.dim(); ++i)
    if (s.total(i) <= max_total) out.push_back(i);
  return out;
}

}  // namespace detail

/// S(z) O S(z)+ expanded on (a, b, a+, b+), fitted from the oracle.
///
/// A single conjugation by S(z) pushes low states far up the ladder, so the
/// fit is done for the short step S(z/m) on states with at most one quantum
/// (where truncation is invisible) and the 4x4 transfer matrix is raised to
/// the m-th power. The group property S(z) = S(z/m)^m makes this exact.
[[nodiscard]] inline analytic::BogoliubovCoeffs fit_bogoliubov(const fock::OperatorSet& ops,
                                                               const SqueezeParam& z) {
  const fock::FockSpace& s = ops.space;
  const int m = std::max(1, static_cast<int>(std::ceil(z.r() * (1 + ops.params.theta) / 0.1)));
  const fock::SparseMat g = fock::squeeze_generator(ops, SqueezeParam(z.r() / m, z.phi())).data();
  const fock::SparseMat minus_g = -g;

  const fock::SparseMat ad = ops.a_def.adjoint().data(), bd = ops.b_def.adjoint().data();
  const std::array<const fock::SparseMat*, 4> ops4 = {&ops.a_def.data(), &ops.b_def.data(), &ad, &bd};

  const auto probes = detail::block_indices(s, 1);
  const auto keep = detail::block_indices(s, 2);
  const auto rows = static_cast<fock::Index>(probes.size() * keep.size());

  // Design matrix: columns are O_j e_n restricted to the kept rows.
  fock::DenseMat design(rows, 4);
  std::vector<fock::Vec> conj_probe;  // S+ e_n
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const fock::Vec e = detail::basis_vector(s, probes[p]);
    for (int j = 0; j < 4; ++j) {
      const fock::Vec col = *ops4[j] * e;
      for (std::size_t k = 0; k < keep.size(); ++k)
        design(static_cast<fock::Index>(p * keep.size() + k), j) = col[keep[k]];
    }
    conj_probe.push_back(fock::expm_action(minus_g, e));
  }
  const auto qr = design.colPivHouseholderQr();

  Eigen::Matrix4cd step;
  for (int i = 0; i < 4; ++i) {
    fock::Vec rhs(rows);
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const fock::Vec out = fock::expm_action(g, *ops4[i] * conj_probe[p]);
      for (std::size_t k = 0; k < keep.size(); ++k)
        rhs[static_cast<fock::Index>(p * keep.size() + k)] = out[keep[k]];
    }
    step.row(i) = qr.solve(rhs).transpose();
  }

  Eigen::Matrix4cd total = Eigen::Matrix4cd::Identity();
  for (int k = 0; k < m; ++k) total = step * total;

  auto row = [&](int i) { return analytic::ModeMap{total(i, 0), total(i, 1), total(i, 2), total(i, 3)}; };
  return {row(0), row(1)};
}

[[nodiscard]] inline double coefficient_residual(const analytic::BogoliubovCoeffs& a,
                                                 const analytic::BogoliubovCoeffs& b) {
  double worst = 0;
  const auto x = a.a_out.as_array(), y = b.a_out.as_array();
  const auto u = a.b_out.as_array(), v = b.b_out.as_array();
  for (int k = 0; k < 4; ++k)
    worst = std::max({worst, std::abs(x[k] - y[k]), std::abs(u[k] - v[k])});
  return worst;
}

// ---------------------------------------------------------------------------
// Identity suite
// ---------------------------------------------------------------------------

namespace detail {

/// Max over block rows of |(U+ O U - O - shift) e_j| for basis e_j in the block,
/// with U = exp(gen). Works from the action on vectors, never forming U.
inline double conjugation_residual(const fock::SparseMat& gen, const fock::SparseMat& op,
                                   cplx shift, const fock::FockSpace& s, int max_total) {
  const auto block = block_indices(s, max_total);
  const fock::SparseMat minus_gen = -gen;
  double worst = 0;
  for (const fock::Index j : block) {
    const fock::Vec e = basis_vector(s, j);
    const fock::Vec lhs = fock::expm_action(minus_gen, op * fock::expm_action(gen, e));
    const fock::Vec rhs = op * e + shift * e;
    for (const fock::Index i : block) worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
  }
  return worst;
}

/// Max over safe components of |O psi - lambda psi|.
inline double eigen_residual(const fock::SparseMat& op, const fock::StateVector& psi, cplx lambda,
                             int max_total) {
  const fock::Vec diff = op * psi.data() - lambda * psi.data();
  const fock::FockSpace& s = psi.space();
  double worst = 0;
  for (fock::Index i = 0; i < s.dim(); ++i)
    if (s.total(i) <= max_total) worst = std::max(worst, std::abs(diff[i]));
  return worst;
}

inline fock::OperatorMatrix combine(const analytic::ModeMap& c, const fock::OperatorSet& ops) {
  return c.a * ops.a_def + c.b * ops.b_def + c.a_dag * ops.a_def.adjoint() +
         c.b_dag * ops.b_def.adjoint();
}

}  // namespace detail

/// Basis states used for the conjugation identities: a third of the cutoff.
/// Displacing a state near the safe edge pushes weight past the cutoff, so the
/// conjugation block is kept well inside the safe subspace.
[[nodiscard]] inline int conjugation_block(const fock::FockSpace& s) { return s.cutoff() / 3; }

[[nodiscard]] inline std::vector<ResidualReport> identity_suite(
    const NcParams& params, const fock::FockSpace& space, const ModeAmplitudes& amps,
    const std::optional<SqueezeParam>& z, int buffer = fock::kDefaultBuffer) {
  fock::require_subcritical(params);
  if (buffer < 0 || buffer >= space.cutoff())
    throw Error(Errc::InvalidArgument, "buffer must lie in [0, cutoff)");
  const fock::OperatorSet ops = fock::make_operator_set(params, space);
  const int safe = space.cutoff() - buffer;
  const cplx i{0, 1};
  const double th = params.theta;
  Metadata meta{params, space.cutoff(), buffer, std::nullopt, std::nullopt};

  std::vector<ResidualReport> out;
  using fock::commutator;
  using fock::safe_residual;

  double herm = 0;
  for (const auto* op : {&ops.x, &ops.y, &ops.px, &ops.py, &ops.X, &ops.P})
    herm = std::max(herm, fock::hermiticity_residual(*op));
  out.push_back(make_report("hermiticity", herm, kHermiticityTolerance, meta));

  const double hw = std::max({safe_residual(commutator(ops.x, ops.y), i * params.mu, buffer),
                              safe_residual(commutator(ops.px, ops.py), i * params.nu, buffer),
                              safe_residual(commutator(ops.x, ops.px), i * params.hbar, buffer),
                              safe_residual(commutator(ops.y, ops.py), i * params.hbar, buffer),
                              safe_residual(commutator(ops.x, ops.py), 0.0, buffer),
                              safe_residual(commutator(ops.y, ops.px), 0.0, buffer)});
  out.push_back(make_report("heisenberg_weyl", hw, kIdentityTolerance, meta));

  const auto ad = ops.a_def.adjoint(), bd = ops.b_def.adjoint();
  const double deformed = std::max({safe_residual(commutator(ops.a_def, ad), 1.0, buffer),
                                    safe_residual(commutator(ops.b_def, bd), 1.0, buffer),
                                    safe_residual(commutator(ops.a_def, bd), i * th, buffer),
                                    safe_residual(commutator(ops.a_def, ops.b_def), 0.0, buffer)});
  out.push_back(make_report("deformed_algebra", deformed, kIdentityTolerance, meta));

  const auto aod = ops.a_ord.adjoint(), bod = ops.b_ord.adjoint();
  const double ordinary = std::max({safe_residual(commutator(ops.a_ord, aod), 1.0, buffer),
                                    safe_residual(commutator(ops.b_ord, bod), 1.0, buffer),
                                    safe_residual(commutator(ops.a_ord, bod), 0.0, buffer),
                                    safe_residual(commutator(ops.a_ord, ops.b_ord), 0.0, buffer)});
  out.push_back(make_report("ordinary_algebra", ordinary, kIdentityTolerance, meta));

  out.push_back(make_report("two_mode_commutator",
                            safe_residual(commutator(ops.X, ops.P), i * params.hbar / 2.0, buffer),
                            kIdentityTolerance, meta));

  const auto [la, lb] = analytic::coherent_eigenvalues(params, amps);
  const fock::SparseMat dgen = fock::displacement_generator(ops, amps).data();
  const int block = conjugation_block(space);
  const double disp =
      std::max(detail::conjugation_residual(dgen, ops.a_def.data(), la, space, block),
               detail::conjugation_residual(dgen, ops.b_def.data(), lb, space, block));
  out.push_back(make_report("displacement_property", disp, kIdentityTolerance, meta));

  const SqueezeParam zz = z.value_or(SqueezeParam{});
  const double bog = coefficient_residual(fit_bogoliubov(ops, zz),
                                          analytic::bogoliubov_coefficients(params, zz));
  out.push_back(make_report("bogoliubov", bog, kIdentityTolerance, meta));

  // The eigenvalue residuals measure truncation damage directly, so the
  // population guard is reported here rather than enforced.
  fock::StateOptions loose;
  loose.buffer = buffer;
  loose.enforce_guard = false;
  const fock::StateVector coh = fock::make_state(ops, amps, std::nullopt, loose);
  Metadata coh_meta = meta;
  coh_meta.leak = fock::safe_norm_fraction(coh, buffer);
  out.push_back(make_report("eigenvalue_coherent",
                            std::max(detail::eigen_residual(ops.a_def.data(), coh, la, safe),
                                     detail::eigen_residual(ops.b_def.data(), coh, lb, safe)),
                            kIdentityTolerance, coh_meta));

  if (z && z->r() > 0) {
    // A = S a S+, B = S b S+ from the closed-form coefficients.
    const fock::StateVector sq = fock::make_state(ops, amps, z, loose);
    const auto c = analytic::bogoliubov_coefficients(params, *z);
    Metadata sq_meta = meta;
    sq_meta.leak = fock::safe_norm_fraction(sq, buffer);
    out.push_back(make_report(
        "eigenvalue_squeezed",
        std::max(detail::eigen_residual(detail::combine(c.a_out, ops).data(), sq, la, safe),
                 detail::eigen_residual(detail::combine(c.b_out, ops).data(), sq, lb, safe)),
        kIdentityTolerance, sq_meta));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Analytic vs oracle
// ---------------------------------------------------------------------------

struct CrossCase {
  ModeAmplitudes bra;  // coherent bra for the overlap check
  ModeAmplitudes ket;
  std::optional<SqueezeParam> z;
};

[[nodiscard]] inline double relative_residual(double oracle, double exact) {
  return std::abs(oracle - exact) / std::abs(exact);
}

[[nodiscard]] inline double relative_residual(cplx oracle, cplx exact) {
  return std::abs(oracle - exact) / std::abs(exact);
}

/// Oracle variances of (x, y, px, py, X, P).
[[nodiscard]] inline std::array<double, 6> oracle_variances(const fock::OperatorSet& ops,
                                                            const fock::StateVector& psi) {
  std::array<double, 6> v{};
  const std::array<const fock::OperatorMatrix*, 6> q = {&ops.x,  &ops.y, &ops.px,
                                                        &ops.py, &ops.X, &ops.P};
  for (std::size_t k = 0; k < 6; ++k) v[k] = fock::expectation_and_variance(psi, *q[k]).variance;
  return v;
}

[[nodiscard]] inline std::array<double, 6> analytic_variances(const NcParams& p,
                                                              const std::optional<SqueezeParam>& z) {
  const analytic::VarianceReport r = analytic::single_mode_report(p, z);
  return {r.dx2, r.dy2, r.dpx2, r.dpy2, r.dX2, r.dP2};
}

inline constexpr std::array<const char*, 6> kQuadratureNames = {"x", "y", "px", "py", "X", "P"};

namespace detail {

inline void crosscheck_case(const fock::OperatorSet& ops, const CrossCase& c, std::size_t index,
                            int buffer, std::vector<ResidualReport>& out) {
  fock::StateOptions guard;
  guard.buffer = buffer;
  const fock::StateVector ket = fock::make_state(ops, c.ket, c.z, guard);
  const fock::StateVector bra = fock::make_state(ops, c.bra, std::nullopt, guard);
  Metadata meta{ops.params, ops.space.cutoff(), buffer, std::nullopt,
                fock::safe_norm_fraction(ket, buffer)};
  const std::string tag = "case" + std::to_string(index) + "/";

  const cplx exact = c.z ? analytic::squeezed_overlap(ops.params, c.bra, c.ket, *c.z)
                         : analytic::coherent_overlap(ops.params, c.bra, c.ket);
  out.push_back(make_report(tag + "overlap", relative_residual(bra.inner(ket), exact),
                            kCrosscheckTolerance, meta));

  const auto oracle = oracle_variances(ops, ket);
  const auto closed = analytic_variances(ops.params, c.z);
  for (std::size_t k = 0; k < 6; ++k)
    out.push_back(make_report(tag + "var_" + kQuadratureNames[k],
                              relative_residual(oracle[k], closed[k]), kCrosscheckTolerance, meta));
}

}  // namespace detail

/// Overlaps and variances at a fixed cutoff. Each case must pass the
/// population guard (PopulationOverflow otherwise).
[[nodiscard]] inline std::vector<ResidualReport> crosscheck_suite(
    const NcParams& params, const fock::FockSpace& space, const std::vector<CrossCase>& cases,
    int buffer = fock::kDefaultBuffer) {
  const fock::OperatorSet ops = fock::make_operator_set(params, space);
  std::vector<ResidualReport> out;
  for (std::size_t k = 0; k < cases.size(); ++k) detail::crosscheck_case(ops, cases[k], k, buffer, out);
  return out;
}

/// As crosscheck_suite, but a case that overflows the guard is retried at
/// cutoffs start + 10, start + 20, ... up to kMaxEscalatedCutoff. Each report
/// records the cutoff it ran at.
[[nodiscard]] inline std::vector<ResidualReport> crosscheck_escalating(
    const NcParams& params, int start_cutoff, const std::vector<CrossCase>& cases,
    int buffer = fock::kDefaultBuffer, int max_cutoff = kMaxEscalatedCutoff) {
  std::map<int, fock::OperatorSet> cache;
  auto ops_at = [&](int n) -> const fock::OperatorSet& {
    auto it = cache.find(n);
    if (it == cache.end())
      it = cache.emplace(n, fock::make_operator_set(params, fock::FockSpace(n))).first;
    return it->second;
  };

  std::vector<ResidualReport> out;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    for (int n = start_cutoff;; n += 10) {
      try {
        detail::crosscheck_case(ops_at(n), cases[k], k, buffer, out);
        break;
      } catch (const Error& e) {
        if (e.code() != Errc::PopulationOverflow || n + 10 > max_cutoff) throw;
      }
    }
  }
  return out;
}

/// Largest relative drift of the oracle variances across amplitude sets at fixed z.
[[nodiscard]] inline ResidualReport amplitude_independence(const NcParams& params,
                                                           const fock::FockSpace& space,
                                                           const std::optional<SqueezeParam>& z,
                                                           const std::vector<ModeAmplitudes>& amps,
                                                           int buffer = fock::kDefaultBuffer) {
  if (amps.size() < 2) throw Error(Errc::InvalidArgument, "need at least two amplitude sets");
  const fock::OperatorSet ops = fock::make_operator_set(params, space);
  fock::StateOptions guard;
  guard.buffer = buffer;
  std::array<double, 6> ref{};
  double drift = 0, leak = 0;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    const fock::StateVector psi = fock::make_state(ops, amps[k], z, guard);
    leak = std::max(leak, fock::safe_norm_fraction(psi, buffer));
    const auto v = oracle_variances(ops, psi);
    if (k == 0) {
      ref = v;
      continue;
    }
    for (std::size_t q = 0; q < 6; ++q) drift = std::max(drift, relative_residual(v[q], ref[q]));
  }
  return make_report("amplitude_independence", drift, kIdentityTolerance,
                     {params, space.cutoff(), buffer, std::nullopt, leak});
}

// ---------------------------------------------------------------------------
// Monte-Carlo resolution of the identity
// ---------------------------------------------------------------------------

struct ProbePair {
  ModeAmplitudes first;
  ModeAmplitudes second;
};

namespace detail {

inline cplx to_amp(double re, double im) { return {re, im}; }

/// Quadratic form Q with |<0|u; z>| = prefactor * exp(-x^T Q x), x = (Re a, Im a, Re b, Im b).
inline Eigen::Matrix4d vacuum_metric(const NcParams& p, const std::optional<SqueezeParam>& z) {
  const SqueezeParam zz = z.value_or(SqueezeParam{});
  const double pre = 1.0 / std::sqrt(std::cosh(zz.r() * (1 + p.theta)) *
                                     std::cosh(zz.r() * (1 - p.theta)));
  auto f = [&](const Eigen::Vector4d& x) {
    const ModeAmplitudes u{to_amp(x[0], x[1]), to_amp(x[2], x[3])};
    return -std::log(std::abs(analytic::squeezed_overlap(p, {}, u, zz)) / pre);
  };
  Eigen::Matrix4d q;
  const Eigen::Matrix4d e = Eigen::Matrix4d::Identity();
  for (int i = 0; i < 4; ++i) {
    q(i, i) = f(e.col(i));
    for (int j = 0; j < i; ++j)
      q(i, j) = q(j, i) = 0.5 * (f(e.col(i) + e.col(j)) - f(e.col(i)) - f(e.col(j)));
  }
  return q;
}

}  // namespace detail

/// Per-case seed derived from (master seed, case index).
[[nodiscard]] inline std::uint64_t case_seed(std::uint64_t master, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

/// Estimates <p1| (1 - theta^2) Int d^2a d^2b / pi^2 |a, b; z><a, b; z| |p2>.
///
/// Points are drawn from the Gaussian exp(-x^T Q x) that |<0|u; z>|^2 itself
/// decays with, so the weighted integrand stays bounded. An isotropic
/// exp(-|a|^2 - |b|^2) weight has infinite variance once theta >= 0.5.
[[nodiscard]] inline McReport mc_single(const NcParams& p, const ProbePair& probe,
                                        std::int64_t samples, std::uint64_t seed,
                                        const std::optional<SqueezeParam>& z) {
  const SqueezeParam zz = z.value_or(SqueezeParam{});
  const Eigen::Matrix4d q = detail::vacuum_metric(p, z);
  const Eigen::Matrix4d cov = (2.0 * q).inverse();
  const Eigen::Matrix4d chol = cov.llt().matrixL();
  const double norm = std::sqrt(q.determinant()) / (std::numbers::pi * std::numbers::pi);
  const double weight = (1.0 - p.ratio()) / (std::numbers::pi * std::numbers::pi);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;

  // Welford running mean and squared deviation.
  cplx mean{};
  double m2 = 0, scale = 0;
  for (std::int64_t n = 1; n <= samples; ++n) {
    Eigen::Vector4d g;
    for (int k = 0; k < 4; ++k) g[k] = gauss(rng);
    const Eigen::Vector4d x = chol * g;
    const double density = norm * std::exp(-x.dot(q * x));
    const ModeAmplitudes u{detail::to_amp(x[0], x[1]), detail::to_amp(x[2], x[3])};
    const cplx f = weight * analytic::squeezed_overlap(p, probe.first, u, zz) *
                   std::conj(analytic::squeezed_overlap(p, probe.second, u, zz)) / density;
    const cplx delta = f - mean;
    mean += delta / static_cast<double>(n);
    m2 += std::real(std::conj(delta) * (f - mean));
    scale += (std::abs(f) - scale) / static_cast<double>(n);
  }

  McReport r;
  r.estimate = mean;
  r.reference = analytic::coherent_overlap(p, probe.first, probe.second);
  r.samples = samples;
  r.seed = seed;
  const double sd = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
  // A constant integrand (vacuum against vacuum) has zero sample variance;
  // floor the error at the roundoff of the running sum.
  r.stderr_ = std::max(sd, 1e-12 * scale);
  r.z_score = std::abs(r.estimate - r.reference) / r.stderr_;
  return r;
}

[[nodiscard]] inline std::vector<McReport> overcompleteness_mc(
    const NcParams& params, const std::vector<ProbePair>& probes, std::int64_t samples,
    std::uint64_t seed, const std::optional<SqueezeParam>& z = std::nullopt) {
  if (!(params.ratio() < 1.0) || classify_constraint(params) != ConstraintClass::SubCritical)
    throw Error(Errc::ThetaAtOrAboveOne,
                "the resolution of the identity needs theta < 1 (theta = " +
                    std::to_string(params.theta) + ")");
  if (samples < kMinSamples)
    throw Error(Errc::SamplesTooFew, "at least " + std::to_string(kMinSamples) + " samples needed");
  std::vector<McReport> out;
  out.reserve(probes.size());
  for (std::size_t k = 0; k < probes.size(); ++k)
    out.push_back(mc_single(params, probes[k], samples, case_seed(seed, k), z));
  return out;
}

// ---------------------------------------------------------------------------
// Convergence in the cutoff
// ---------------------------------------------------------------------------

/// Oracle quantities tracked across cutoffs: the six quadrature variances and
/// the overlap of the state with the unsqueezed coherent state of equal amplitudes.
struct TrackedQuantities {
  std::array<double, 6> variances{};
  cplx overlap;
  double leak = 0;
};

[[nodiscard]] inline TrackedQuantities tracked_quantities(const NcParams& params, int cutoff,
                                                          const ModeAmplitudes& amps,
                                                          const std::optional<SqueezeParam>& z,
                                                          int buffer = fock::kDefaultBuffer) {
  const fock::OperatorSet ops = fock::make_operator_set(params, fock::FockSpace(cutoff));
  fock::StateOptions loose;
  loose.buffer = buffer;
  loose.enforce_guard = false;
  const fock::StateVector psi = fock::make_state(ops, amps, z, loose);
  const fock::StateVector coh = fock::make_state(ops, amps, std::nullopt, loose);
  return {oracle_variances(ops, psi), coh.inner(psi), fock::safe_norm_fraction(psi, buffer)};
}

/// Two reports per tracked quantity: the last relative change against
/// kConvergenceTolerance, and "<id>/monotone" whose residual is the largest
/// growth between successive changes (changes at the roundoff floor exempt).
[[nodiscard]] inline std::vector<ResidualReport> convergence_probe(
    const NcParams& params, const ModeAmplitudes& amps, const std::optional<SqueezeParam>& z,
    const std::vector<int>& cutoffs, int buffer = fock::kDefaultBuffer) {
  if (cutoffs.size() < 2) throw Error(Errc::InvalidArgument, "need at least two cutoffs");
  for (std::size_t k = 1; k < cutoffs.size(); ++k)
    if (cutoffs[k] <= cutoffs[k - 1])
      throw Error(Errc::InvalidArgument, "cutoffs must increase");

  std::vector<TrackedQuantities> runs;
  for (int n : cutoffs) runs.push_back(tracked_quantities(params, n, amps, z, buffer));

  auto value = [](const TrackedQuantities& t, std::size_t q) -> cplx {
    return q < 6 ? cplx(t.variances[q]) : t.overlap;
  };
  Metadata meta{params, cutoffs.back(), buffer, std::nullopt, runs.back().leak};
  std::vector<ResidualReport> out;
  for (std::size_t q = 0; q < 7; ++q) {
    std::vector<double> diffs;
    for (std::size_t k = 1; k < runs.size(); ++k)
      diffs.push_back(relative_residual(value(runs[k - 1], q), value(runs[k], q)));
    double growth = 0;
    for (std::size_t k = 1; k < diffs.size(); ++k)
      if (diffs[k] > kConvergenceFloor) growth = std::max(growth, diffs[k] - diffs[k - 1]);
    const std::string id = q < 6 ? std::string("var_") + kQuadratureNames[q] : "overlap";
    out.push_back(make_report(id, diffs.back(), kConvergenceTolerance, meta));
    out.push_back(make_report(id + "/monotone", growth, 0.0, meta));
  }
  return out;
}

}  // namespace ncsq::verify
