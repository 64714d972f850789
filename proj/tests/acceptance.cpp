// End-to-end acceptance run: one line per criterion, non-zero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ncsq/ncsq.hpp"
#include "oracles.hpp"

using namespace ncsq;
using analytic::cplx;
using analytic::ModeAmplitudes;
using analytic::SqueezeParam;
using std::numbers::pi;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s — %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

NcParams theta_params(double theta) { return make_params(theta, theta, 1.0); }

// |a - b| in units of the spacing of doubles at |b|.
double complex_ulps(cplx a, cplx b) {
  const double m = std::abs(b);
  if (a == b) return 0;
  return std::abs(a - b) / (std::nextafter(m, INFINITY) - m);
}

struct Case {
  NcParams params;
  verify::CrossCase cc;
};

std::vector<Case> random_cases(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  auto amp = [&] { return std::polar(u(rng), 2 * pi * u(rng)); };  // |amp| <= 1
  std::vector<Case> out;
  for (int k = 0; k < n; ++k) {
    const double theta = 0.02 + 0.78 * u(rng);
    const double aspect = std::pow(10.0, u(rng) - 0.5);
    const NcParams p = make_params(theta * aspect, theta / aspect, 1.0);
    const ModeAmplitudes ket{amp(), amp()}, bra{amp(), amp()};
    out.push_back({p, {bra, ket, SqueezeParam(0.4 * u(rng), 2 * pi * u(rng) - pi)}});
  }
  return out;
}

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  for (double theta : {0.1, 0.5, 0.9}) {
    const auto reports =
        verify::identity_suite(theta_params(theta), fock::FockSpace(30), {}, std::nullopt);
    for (const auto& r : reports)
      if (r.id == "heisenberg_weyl" || r.id == "deformed_algebra" || r.id == "ordinary_algebra" ||
          r.id == "two_mode_commutator")
        worst = std::max(worst, r.residual);
  }
  const double dt = seconds_since(t0);
  report(1, worst < 1e-10 && dt < 10.0,
         fmt("max commutator residual %.3e (< 1e-10), %.2f s (< 10 s)", worst, dt));
}

void criterion2() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> phi(-pi, pi);
  double worst = 0;
  int n = 0;
  for (double theta : {0.1, 0.5, 0.9}) {
    const auto ops = fock::make_operator_set(theta_params(theta), fock::FockSpace(40));
    for (double r : {0.1, 0.3, 0.5}) {
      const SqueezeParam z(r, phi(rng));
      worst = std::max(worst, verify::coefficient_residual(
                                  verify::fit_bogoliubov(ops, z),
                                  analytic::bogoliubov_coefficients(ops.params, z)));
      ++n;
    }
  }
  report(2, worst < 1e-8, fmt("%d (theta, r) points at cutoff 40, max coefficient residual %.3e", n, worst));
}

void criteria3and4(const std::vector<Case>& cases) {
  double overlap = 0, var = 0, reduction = 0, exchange = 0;
  int max_cutoff = 0;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto reports = verify::crosscheck_escalating(cases[k].params, 40, {cases[k].cc});
    for (const auto& r : reports) {
      max_cutoff = std::max(max_cutoff, r.meta.cutoff);
      if (r.id.ends_with("/overlap")) overlap = std::max(overlap, r.residual);
      else var = std::max(var, r.residual);
    }
    const NcParams& p = cases[k].params;
    const auto& c = cases[k].cc;
    const cplx zero = analytic::squeezed_overlap(p, c.bra, c.ket, SqueezeParam{});
    const cplx plain = analytic::coherent_overlap(p, c.bra, c.ket);
    reduction = std::max(reduction, complex_ulps(zero, plain));
    const auto v = analytic::single_mode_report(p, c.z);
    const double a = std::sqrt(p.nu / p.mu), b = std::sqrt(p.mu / p.nu);
    exchange = std::max({exchange, oracle::ulp_distance(a * v.dx2, b * v.dpy2),
                         oracle::ulp_distance(a * v.dy2, b * v.dpx2)});
  }
  report(3, overlap < 1e-6 && reduction <= 4,
         fmt("%zu cases (cutoff up to %d), max overlap rel. error %.3e; z=0 reduction %.1f ulp",
             cases.size(), max_cutoff, overlap, reduction));

  double drift = 0;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (double theta : {0.2, 0.5, 0.8}) {
    std::vector<ModeAmplitudes> amps{{}};
    for (int k = 0; k < 3; ++k) amps.push_back({cplx(u(rng), u(rng)), cplx(u(rng), u(rng))});
    const auto r = verify::amplitude_independence(theta_params(theta), fock::FockSpace(60),
                                                  SqueezeParam(0.3, 0.4 * theta), amps);
    drift = std::max(drift, r.residual);
  }
  report(4, var < 1e-6 && exchange <= 4 && drift < 1e-8,
         fmt("max variance rel. error %.3e; exchange identities %.1f ulp; amplitude drift %.3e",
             var, exchange, drift));
}

void criterion5() {
  const auto grid = oracle::phi_grid();
  double worst = 0, worst_loc = 0, saturation = 0;
  for (double theta : {0.1, 0.4, 0.7, 0.95}) {
    for (double r : {0.1, 0.3, 0.6}) {
      const NcParams p = theta_params(theta);
      double best = INFINITY, at = 0;
      for (double phi : grid) {
        const double v = analytic::single_mode_report(p, SqueezeParam(r, phi)).prod_xpx;
        if (v < best) best = v, at = phi;
      }
      const double s = std::sinh(2 * r);
      const double want = 0.25 * (1 + (1 - theta * theta) * s * s);
      worst = std::max(worst, std::abs(best - want));
      worst_loc = std::max(worst_loc, std::abs(std::abs(at) - pi / 2));
    }
  }
  for (double r : {0.1, 0.3, 0.6, 1.0}) {
    const NcParams p = make_params(1, 1, 1);
    double best = INFINITY;
    for (double phi : grid)
      best = std::min(best, analytic::single_mode_report(p, SqueezeParam(r, phi)).prod_xpx);
    saturation = std::max(saturation, std::abs(best - 0.25));
  }
  // Witness beyond the constraint.
  const NcParams sup = make_params(2, 2, 1);
  double witness_r = -1, witness_prod = 0;
  for (double r : {0.05, 0.1, 0.2, 0.3, 0.5}) {
    const double prod = analytic::single_mode_report(sup, SqueezeParam(r, pi / 2)).prod_xpx;
    if (prod < 0.25) {
      witness_r = r;
      witness_prod = prod;
      break;
    }
  }
  report(5, worst < 1e-10 && worst_loc < 2 * pi / 6284 && saturation < 1e-10 && witness_r > 0,
         fmt("grid minimum error %.3e at |phi| - pi/2 <= %.1e; theta=1 minimum deviation %.3e; "
             "witness mu=nu=2, r=%.2f, phi=pi/2: product %.4f < 0.25",
             worst, worst_loc, saturation, witness_r, witness_prod));
}

void criterion6() {
  const auto grid = oracle::phi_grid();
  double worst = 0;
  for (double theta : {0.1, 0.4, 0.7, 0.95}) {
    for (double r : {0.1, 0.3, 0.6}) {
      const NcParams p = theta_params(theta);
      double best = INFINITY;
      for (double phi : grid)
        best = std::min(best, analytic::two_mode_report(p, SqueezeParam(r, phi)).prod_XP);
      const double s = std::sinh(2 * r * theta);
      worst = std::max(worst, std::abs(best - (1 + (1 - theta * theta) * s * s) / 16));
    }
  }
  report(6, worst < 1e-10, fmt("grid minimum vs closed form, max error %.3e", worst));
}

void criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<verify::ProbePair> probes = {
      {{}, {}},
      {{1.0, 0.0}, {0.0, 1.0}},
      {{cplx(0.5, 0.2), 0.3}, {cplx(0, -0.4), cplx(0.2, 0.6)}},
      {{0.8, cplx(0, 0.5)}, {0.8, cplx(0, 0.5)}},
      {{cplx(-0.3, 0.7), 0.0}, {0.0, cplx(0.9, -0.1)}},
  };
  double zmax = 0;
  int n = 0, passed = 0;
  for (double theta : {0.3, 0.6}) {
    for (const auto& r : verify::overcompleteness_mc(theta_params(theta), probes, 1'000'000, 42)) {
      zmax = std::max(zmax, r.z_score);
      passed += r.passed();
      ++n;
    }
  }
  const double dt = seconds_since(t0);
  report(7, passed == n && dt < 60.0,
         fmt("%d/%d probe pairs within 4 sigma (max z %.2f), 1e6 samples, seed 42, %.1f s (< 60 s)",
             passed, n, zmax, dt));
}

void criterion8() {
  const SqueezeParam z(0.3, pi / 2);
  int region = 0, px_region = 0, x_mirror = 0, total = 0;
  double min_gain = INFINITY;
  for (int k = 5; k <= 95; ++k) {
    const double theta = k / 100.0;
    const auto v = analytic::single_mode_report(theta_params(theta), z);
    region += v.gain_x < 1.0;
    px_region += v.gain_px < 1.0;
    x_mirror += analytic::single_mode_gains(theta, SqueezeParam(0.3, -pi / 2)).x < 1.0;
    min_gain = std::min(min_gain, v.gain_x);
    ++total;
  }
  const bool zero_slice_none = !(analytic::single_mode_gains(0.0, z).x < 1.0) &&
                               !(analytic::single_mode_gains(0.0, z).px < 1.0);
  report(8, region > 0 && zero_slice_none,
         fmt("x-variance reduction at r=0.3, phi=pi/2 on %d of %d theta points in [0.05, 0.95] "
             "(smallest gain %.4f); theta=0 slice has none: %s",
             region, total, min_gain, zero_slice_none ? "yes" : "no"));
  std::printf("  note: at phi=pi/2 the px variance is reduced on %d of %d points; "
              "x is reduced at phi=-pi/2 on %d of %d points\n",
              px_region, total, x_mirror, total);
}

void criterion9(const std::vector<Case>& cases) {
  double worst = 0;
  int guarded = 0;
  for (const auto& c : cases) {
    const auto lo = verify::tracked_quantities(c.params, 30, c.cc.ket, c.cc.z);
    if (!(lo.leak < fock::kMaxLeak)) continue;
    const auto hi = verify::tracked_quantities(c.params, 40, c.cc.ket, c.cc.z);
    ++guarded;
    for (std::size_t q = 0; q < 6; ++q)
      worst = std::max(worst, verify::relative_residual(lo.variances[q], hi.variances[q]));
    worst = std::max(worst, verify::relative_residual(lo.overlap, hi.overlap));
  }
  report(9, guarded > 0 && worst < 1e-8,
         fmt("%d of %zu cases pass the guard at cutoff 30; max relative change 30 -> 40 is %.3e",
             guarded, cases.size(), worst));
}

}  // namespace

int main() {
  try {
    const auto cases = random_cases(60, 2024);
    criterion1();
    criterion2();
    criteria3and4(cases);
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9(cases);
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d criterion failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
