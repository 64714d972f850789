#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ncsq/verifier.hpp"
#include "oracles.hpp"

using namespace ncsq;
using namespace ncsq::verify;
using analytic::ModeAmplitudes;
using analytic::SqueezeParam;
using std::numbers::pi;

namespace {

const cplx I{0, 1};

NcParams theta_params(double theta) { return make_params(theta, theta, 1.0); }

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::InvalidArgument;
}

const ResidualReport& find(const std::vector<ResidualReport>& reports, const std::string& id) {
  for (const auto& r : reports)
    if (r.id == id) return r;
  throw std::runtime_error("no report " + id);
}

bool has(const std::vector<ResidualReport>& reports, const std::string& id) {
  for (const auto& r : reports)
    if (r.id == id) return true;
  return false;
}

void expect_consistent(const std::vector<ResidualReport>& reports) {
  for (const auto& r : reports) EXPECT_EQ(r.passed, r.residual <= r.tolerance) << r.id;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(Reports, PassedIsRecomputable) {
  const Metadata meta{theta_params(0.5), 10};
  EXPECT_TRUE(make_report("a", 1e-9, 1e-8, meta).passed);
  EXPECT_TRUE(make_report("a", 1e-8, 1e-8, meta).passed);
  EXPECT_FALSE(make_report("a", 2e-8, 1e-8, meta).passed);
  EXPECT_FALSE(make_report("a", NAN, 1e-8, meta).passed);
}

TEST(IdentitySuite, ReferenceCase) {
  const auto reports = identity_suite(theta_params(0.5), fock::FockSpace(30),
                                      {0.5, cplx(0, 0.2)}, SqueezeParam(0.3, pi / 4));
  for (const char* id : {"hermiticity", "heisenberg_weyl", "deformed_algebra", "ordinary_algebra",
                         "two_mode_commutator", "displacement_property", "bogoliubov",
                         "eigenvalue_coherent", "eigenvalue_squeezed"})
    EXPECT_TRUE(has(reports, id)) << id;
  for (const auto& r : reports) {
    EXPECT_LT(r.residual, 1e-8) << r.id;
    EXPECT_TRUE(r.passed) << r.id;
    EXPECT_EQ(r.meta.cutoff, 30);
    EXPECT_EQ(r.meta.buffer, 5);
  }
  EXPECT_TRUE(find(reports, "eigenvalue_squeezed").meta.leak.has_value());
  expect_consistent(reports);
}

TEST(IdentitySuite, NoSqueeze) {
  const auto reports =
      identity_suite(theta_params(0.3), fock::FockSpace(20), {0.4, 0.1}, std::nullopt);
  EXPECT_FALSE(has(reports, "eigenvalue_squeezed"));
  EXPECT_TRUE(has(reports, "eigenvalue_coherent"));
  EXPECT_TRUE(has(reports, "displacement_property"));
  EXPECT_TRUE(all_passed(reports));

  const auto zero = identity_suite(theta_params(0.3), fock::FockSpace(20), {}, SqueezeParam{});
  EXPECT_FALSE(has(zero, "eigenvalue_squeezed"));

  const auto ops = fock::make_operator_set(theta_params(0.3), fock::FockSpace(12));
  const auto fit = fit_bogoliubov(ops, SqueezeParam{});
  const analytic::BogoliubovCoeffs id{{1, 0, 0, 0}, {0, 1, 0, 0}};
  EXPECT_LT(coefficient_residual(fit, id), 1e-14);
}

TEST(IdentitySuite, RefusesSuperCritical) {
  EXPECT_EQ(code_of([] {
              (void)identity_suite(make_params(2, 2, 1), fock::FockSpace(10), {}, std::nullopt);
            }),
            Errc::SaturatedOrSuperCritical);
}

// ---------------------------------------------------------------------------

TEST(Bogoliubov, FitMatchesClosedForm) {
  for (double theta : {0.2, 0.6, 0.9}) {
    const auto ops = fock::make_operator_set(theta_params(theta), fock::FockSpace(20));
    const SqueezeParam z(0.35, -1.2);
    EXPECT_LT(coefficient_residual(fit_bogoliubov(ops, z),
                                   analytic::bogoliubov_coefficients(ops.params, z)),
              1e-8)
        << theta;
  }
}

TEST(Bogoliubov, SmallThetaIsTextbook) {
  // S a S+ = a cosh r + e^{i phi} b+ sinh r for ordinary two-mode squeezing.
  const NcParams p = make_params(1e-6, 1e-6, 1);
  const SqueezeParam z(0.3, 0.7);
  const auto ops = fock::make_operator_set(p, fock::FockSpace(20));
  const cplx e = std::polar(1.0, z.phi());
  const analytic::BogoliubovCoeffs textbook{{std::cosh(z.r()), 0, 0, e * std::sinh(z.r())},
                                            {0, std::cosh(z.r()), e * std::sinh(z.r()), 0}};
  EXPECT_LT(coefficient_residual(fit_bogoliubov(ops, z), textbook), 1e-6);
}

// ---------------------------------------------------------------------------

TEST(Crosscheck, SqueezedVacuumOverlap) {
  const auto reports = crosscheck_suite(theta_params(0.5), fock::FockSpace(30),
                                        {{{}, {}, SqueezeParam(0.3, pi / 4)}});
  EXPECT_LT(find(reports, "case0/overlap").residual, 1e-8);
  EXPECT_TRUE(all_passed(reports));
  EXPECT_EQ(reports.size(), 7u);
}

TEST(Crosscheck, OrdinaryRegression) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.7, 0.7), r(0.0, 0.4), phi(-pi, pi);
  std::vector<CrossCase> cases;
  for (int k = 0; k < 5; ++k) {
    const ModeAmplitudes amps{cplx(u(rng), u(rng)), cplx(u(rng), u(rng))};
    cases.push_back({amps, amps, SqueezeParam(r(rng), phi(rng))});
  }
  // theta = 0 exactly is outside the realization; mu nu at the smallest normal scale is not.
  const NcParams p = make_params(1e-9, 1e-9, 1);
  const auto reports = crosscheck_escalating(p, 30, cases);
  for (const auto& rep : reports)
    if (rep.id.find("/var_") != std::string::npos) EXPECT_LT(rep.residual, 1e-8) << rep.id;
  EXPECT_TRUE(all_passed(reports));
}

TEST(Crosscheck, NearSingularMap) {
  const auto reports = crosscheck_suite(theta_params(0.9), fock::FockSpace(60),
                                        {{{0.3, 0.1}, {0.2, cplx(0, 0.3)}, SqueezeParam(0.2, 1.0)}});
  for (const auto& r : reports) EXPECT_LT(r.residual, 1e-6) << r.id;
}

TEST(Crosscheck, GuardAndEscalation) {
  const CrossCase c{{0.5, cplx(0, 0.2)}, {0.5, cplx(0, 0.2)}, SqueezeParam(0.3, pi / 4)};
  EXPECT_EQ(code_of([&] { (void)crosscheck_suite(theta_params(0.5), fock::FockSpace(30), {c}); }),
            Errc::PopulationOverflow);
  const auto reports = crosscheck_escalating(theta_params(0.5), 30, {c});
  EXPECT_TRUE(all_passed(reports));
  for (const auto& r : reports) {
    EXPECT_EQ(r.meta.cutoff, 40);
    ASSERT_TRUE(r.meta.leak.has_value());
    EXPECT_LT(*r.meta.leak, fock::kMaxLeak);
  }
}

TEST(Crosscheck, AmplitudeIndependence) {
  const auto r = amplitude_independence(theta_params(0.4), fock::FockSpace(40),
                                        SqueezeParam(0.25, 0.3),
                                        {{}, {0.5, 0.2}, {cplx(0, -0.4), cplx(0.3, 0.3)}});
  EXPECT_TRUE(r.passed) << r.residual;
  EXPECT_LT(r.residual, 1e-8);
}

// ---------------------------------------------------------------------------

TEST(MonteCarlo, VacuumResolution) {
  const auto reps = overcompleteness_mc(theta_params(0.5), {{{}, {}}}, 1'000'000, 42);
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_TRUE(reps[0].passed()) << reps[0].z_score;
  EXPECT_NEAR(std::abs(reps[0].estimate - 1.0), 0, 1e-2);
  EXPECT_EQ(reps[0].samples, 1'000'000);
}

TEST(MonteCarlo, OrdinaryLimit) {
  const auto reps = overcompleteness_mc(make_params(1e-9, 1e-9, 1),
                                        {{{}, {}}, {{0.5, 0.1}, {cplx(0, 0.3), -0.2}}}, 200'000, 7);
  for (const auto& r : reps) EXPECT_TRUE(r.passed()) << r.z_score;
}

TEST(MonteCarlo, OffDiagonalMatchesOverlap) {
  const NcParams p = theta_params(0.5);
  const auto reps = overcompleteness_mc(p, {{{1.0, 0.0}, {0.0, 1.0}}}, 1'000'000, 42);
  EXPECT_TRUE(reps[0].passed()) << reps[0].z_score;
  const cplx want = oracle::deformed_coherent_overlap(0.5, {1.0, 0.0}, {0.0, 1.0});
  EXPECT_NEAR(std::abs(reps[0].reference - want), 0, 1e-14);
  EXPECT_NEAR(reps[0].z_score, std::abs(reps[0].estimate - reps[0].reference) / reps[0].stderr_,
              1e-12);
}

TEST(MonteCarlo, SqueezedResolution) {
  const auto reps = overcompleteness_mc(theta_params(0.6), {{{0.3, 0.0}, {0.0, cplx(0, 0.4)}}},
                                        300'000, 3, SqueezeParam(0.3, 0.5));
  EXPECT_TRUE(reps[0].passed()) << reps[0].z_score;
}

TEST(MonteCarlo, Deterministic) {
  const std::vector<ProbePair> probes{{{0.2, 0.1}, {0.0, 0.3}}, {{}, {0.5, 0.0}}};
  const auto a = overcompleteness_mc(theta_params(0.7), probes, 20'000, 99);
  const auto b = overcompleteness_mc(theta_params(0.7), probes, 20'000, 99);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].estimate, b[k].estimate);
    EXPECT_EQ(a[k].stderr_, b[k].stderr_);
    EXPECT_EQ(a[k].seed, b[k].seed);
  }
  EXPECT_NE(a[0].seed, a[1].seed);
  EXPECT_EQ(a[0].seed, case_seed(99, 0));
}

TEST(MonteCarlo, Errors) {
  EXPECT_EQ(code_of([] { (void)overcompleteness_mc(make_params(1, 1, 1), {{}}, 5000, 1); }),
            Errc::ThetaAtOrAboveOne);
  EXPECT_EQ(code_of([] { (void)overcompleteness_mc(make_params(2, 3, 1), {{}}, 5000, 1); }),
            Errc::ThetaAtOrAboveOne);
  EXPECT_EQ(code_of([] { (void)overcompleteness_mc(theta_params(0.5), {{}}, 999, 1); }),
            Errc::SamplesTooFew);
}

// ---------------------------------------------------------------------------

TEST(Convergence, ReferenceCutoffs) {
  const auto reports = convergence_probe(theta_params(0.5), {0.5, cplx(0, 0.2)},
                                         SqueezeParam(0.3, pi / 4), {20, 30, 40});
  EXPECT_EQ(reports.size(), 14u);
  for (const auto& r : reports) EXPECT_TRUE(r.passed) << r.id << " " << r.residual;
  expect_consistent(reports);
}

TEST(Convergence, CoherentAtFloor) {
  const auto reports = convergence_probe(theta_params(0.5), {0.6, 0.3}, std::nullopt, {21, 30});
  for (const auto& r : reports) EXPECT_LT(r.residual, 1e-12) << r.id;
}

TEST(Convergence, StrongSqueezeIsReported) {
  const auto reports =
      convergence_probe(theta_params(0.5), {}, SqueezeParam(0.65, 0.0), {20, 30, 40});
  EXPECT_EQ(reports.size(), 14u);
  expect_consistent(reports);
  for (const auto& r : reports) {
    EXPECT_TRUE(std::isfinite(r.residual)) << r.id;
    ASSERT_TRUE(r.meta.leak.has_value());
  }
}

TEST(Convergence, Errors) {
  EXPECT_EQ(code_of([] { (void)convergence_probe(theta_params(0.5), {}, std::nullopt, {20}); }),
            Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { (void)convergence_probe(theta_params(0.5), {}, std::nullopt, {30, 20}); }),
            Errc::InvalidArgument);
}

// ---------------------------------------------------------------------------

TEST(Witness, SuperCriticalViolatesABound) {
  const NcParams p = make_params(2, 2, 1);
  bool violated = false;
  for (double r : {0.05, 0.3, 0.6}) {
    const auto h = analytic::heisenberg_report(p, SqueezeParam(r, pi / 2));
    violated = violated || !h.all_satisfied();
  }
  EXPECT_TRUE(violated);
  EXPECT_TRUE(analytic::heisenberg_report(theta_params(0.5), SqueezeParam(0.6, pi / 2)).all_satisfied());
}
