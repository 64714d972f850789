#pragma once

// The ncsq command line. run() is the whole program; tools/ncsq.cpp only
// forwards argv and the standard streams.
//
// Output is line-delimited JSON by default: a header line (schema, tool,
// version, command, parameter echo, seed) followed by one line per row.
// --out path.csv writes the rows as CSV instead, 17 significant digits.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ncsq/analytic.hpp"
#include "ncsq/error.hpp"
#include "ncsq/fock/operators.hpp"
#include "ncsq/fock/space.hpp"
#include "ncsq/nc_params.hpp"
#include "ncsq/verifier.hpp"

namespace ncsq::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSchema = 1;
inline constexpr int kDefaultCutoff = 40;
inline constexpr std::int64_t kDefaultSamples = 1'000'000;
inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr double kMaxGridPoints = 1e7;

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2 };

using Row = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Parsing helpers
// ---------------------------------------------------------------------------

namespace detail {

inline bool parse_real(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace detail

/// "a+bi", "a-bi", "a", "bi" with no spaces. Throws InvalidArgument.
[[nodiscard]] inline analytic::cplx parse_complex(std::string_view s) {
  auto fail = [&] {
    return Error(Errc::InvalidArgument,
                 "cannot parse complex literal '" + std::string(s) + "' (expected a+bi)");
  };
  if (s.empty()) throw fail();
  if (s.back() != 'i') {
    double re = 0;
    if (!detail::parse_real(s, re)) throw fail();
    return {re, 0};
  }
  const std::string_view body = s.substr(0, s.size() - 1);
  // Split at the last sign that is neither leading nor part of an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  double re = 0, im = 0;
  if (split == std::string_view::npos) {
    if (body.empty() || body == "+" || body == "-") {
      im = body == "-" ? -1 : 1;
    } else if (!detail::parse_real(body, im)) {
      throw fail();
    }
    return {0, im};
  }
  const std::string_view re_s = body.substr(0, split), im_s = body.substr(split);
  if (!detail::parse_real(re_s, re)) throw fail();
  if (im_s == "+" || im_s == "-") {
    im = im_s == "-" ? -1 : 1;
  } else if (!detail::parse_real(im_s, im)) {
    throw fail();
  }
  return {re, im};
}

[[nodiscard]] inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[nodiscard]] inline std::string csv_cell(const Row& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return format_real(v.get<double>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : s) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    return quoted + "\"";
  }
  return s;
}

inline void write_csv(std::ostream& os, const std::vector<Row>& rows) {
  if (rows.empty()) return;
  bool first = true;
  for (const auto& [key, _] : rows.front().items()) {
    os << (first ? "" : ",") << key;
    first = false;
  }
  os << '\n';
  for (const Row& row : rows) {
    first = true;
    for (const auto& [_, value] : row.items()) {
      os << (first ? "" : ",") << csv_cell(value);
      first = false;
    }
    os << '\n';
  }
}

[[nodiscard]] inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

[[nodiscard]] inline Row params_json(const NcParams& p) {
  Row j;
  j["mu"] = p.mu;
  j["nu"] = p.nu;
  j["hbar"] = p.hbar;
  j["theta"] = p.theta;
  return j;
}

// ---------------------------------------------------------------------------
// Options shared by the subcommands
// ---------------------------------------------------------------------------

struct Options {
  std::optional<double> mu, nu;
  double hbar = 1.0;
  bool natural = false;
  std::optional<double> r;
  double phi = 0.0;
  std::string alpha = "0", beta = "0", alpha2 = "0", beta2 = "0";
  int cutoff = kDefaultCutoff;
  int buffer = fock::kDefaultBuffer;
  std::int64_t samples = kDefaultSamples;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  bool json = false;
  // sweep
  std::string var = "r";
  double start = 0, stop = 0, step = 0;
  std::string quantity = "prod_xpx";
  // oscillator
  double mass = 0, omega = 0;
};

struct Result {
  std::string command;
  std::optional<NcParams> params;
  std::optional<std::uint64_t> seed;
  std::vector<Row> rows;
  int code = kOk;
};

[[nodiscard]] inline NcParams resolve_params(const Options& o) {
  if (o.natural) {
    if (o.mu || o.nu)
      throw Error(Errc::InvalidArgument, "--natural fixes mu = nu = hbar = 1; drop --mu/--nu");
    return make_params(1.0, 1.0, 1.0);
  }
  if (!o.mu || !o.nu) throw Error(Errc::InvalidArgument, "--mu and --nu are required");
  return make_params(*o.mu, *o.nu, o.hbar);
}

[[nodiscard]] inline std::optional<analytic::SqueezeParam> resolve_squeeze(const Options& o) {
  if (!o.r) return std::nullopt;
  return analytic::SqueezeParam(*o.r, o.phi);
}

[[nodiscard]] inline analytic::ModeAmplitudes ket_amps(const Options& o) {
  return {parse_complex(o.alpha), parse_complex(o.beta)};
}

[[nodiscard]] inline analytic::ModeAmplitudes bra_amps(const Options& o) {
  return {parse_complex(o.alpha2), parse_complex(o.beta2)};
}

inline void put_complex(Row& row, const std::string& key, analytic::cplx v) {
  row[key + "_re"] = v.real();
  row[key + "_im"] = v.imag();
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

[[nodiscard]] inline Row params_row(const NcParams& p) {
  Row row = params_json(p);
  row["ratio"] = p.ratio();
  row["class"] = std::string(to_string(classify_constraint(p)));
  row["kappa"] = p.kappa ? Row(*p.kappa) : Row(nullptr);
  row["lambda_denom"] = p.lambda_denom ? Row(*p.lambda_denom) : Row(nullptr);
  return row;
}

[[nodiscard]] inline Row variance_row(const NcParams& p, const std::optional<analytic::SqueezeParam>& z) {
  const analytic::VarianceReport v = analytic::single_mode_report(p, z);
  const analytic::SqueezeParam zz = z.value_or(analytic::SqueezeParam{});
  const analytic::ProductReport pr = analytic::variance_products(p, zz);
  const analytic::TwoModeReport tm = analytic::two_mode_report(p, zz);
  const analytic::HeisenbergReport hb = analytic::heisenberg_report(p, z);

  Row row;
  row["theta"] = p.theta;
  row["r"] = zz.r();
  row["phi"] = zz.phi();
  row["dx2"] = v.dx2;
  row["dy2"] = v.dy2;
  row["dpx2"] = v.dpx2;
  row["dpy2"] = v.dpy2;
  row["prod_xpx"] = v.prod_xpx;
  row["prod_ypy"] = v.prod_ypy;
  row["prod_xy"] = v.prod_xy;
  row["prod_pxpy"] = v.prod_pxpy;
  row["dX2"] = v.dX2;
  row["dP2"] = v.dP2;
  row["prod_XP"] = v.prod_XP;
  row["min_xpx"] = pr.min_xpx;
  row["min_xy"] = pr.min_xy;
  row["min_pxpy"] = pr.min_pxpy;
  row["min_XP"] = tm.min_XP;
  row["gain_x"] = v.gain_x;
  row["gain_px"] = v.gain_px;
  row["squeeze_x"] = z.has_value() && v.gain_x < 1.0;
  row["squeeze_px"] = z.has_value() && v.gain_px < 1.0;
  row["squeezing"] = v.squeezing;
  for (const auto& b : hb.bounds) row["bound_" + std::string(b.name)] = b.satisfied;
  return row;
}

inline constexpr std::array<const char*, 17> kSweepQuantities = {
    "dx2",     "dy2",   "dpx2", "dpy2",    "prod_xpx", "prod_ypy", "prod_xy", "prod_pxpy", "dX2",
    "dP2",     "prod_XP", "min_xpx", "min_xy", "min_pxpy", "min_XP", "gain_x", "gain_px"};

[[nodiscard]] inline std::size_t grid_size(double start, double stop, double step) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
    throw Error(Errc::NonFinite, "sweep bounds must be finite");
  if (!(step > 0)) throw Error(Errc::InvalidArgument, "--step must be positive");
  if (start > stop) throw Error(Errc::InvalidArgument, "--start must not exceed --stop");
  // The tolerance admits the end point despite rounding in (stop - start)/step.
  const double n = std::floor((stop - start) / step * (1 + 1e-12) + 1e-9) + 1;
  if (n > kMaxGridPoints)
    throw Error(Errc::GridTooLarge, "sweep would produce " + format_real(n) + " points (limit 1e7)");
  return static_cast<std::size_t>(n);
}

[[nodiscard]] inline unsigned worker_count(std::size_t points) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NCSQ_THREADS")) {
    unsigned cap = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (ec != std::errc{} || ptr != s.data() + s.size() || cap == 0)
      throw Error(Errc::InvalidArgument, "NCSQ_THREADS must be a positive integer");
    n = std::min(n, cap);
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, points)));
}

[[nodiscard]] inline Result run_sweep(const Options& o) {
  const std::string& var = o.var;
  if (var != "r" && var != "phi" && var != "theta" && var != "mu" && var != "nu")
    throw Error(Errc::InvalidArgument, "--var must be one of r, phi, theta, mu, nu");
  if (std::find_if(kSweepQuantities.begin(), kSweepQuantities.end(),
                   [&](const char* q) { return o.quantity == q; }) == kSweepQuantities.end())
    throw Error(Errc::InvalidArgument, "unknown --quantity '" + o.quantity + "'");
  const std::size_t n = grid_size(o.start, o.stop, o.step);

  // A theta sweep keeps mu/nu fixed (1 unless both are given) and hbar fixed.
  double mu0 = 1, nu0 = 1;
  NcParams echo;
  if (var == "theta") {
    if (o.natural) throw Error(Errc::InvalidArgument, "--natural fixes theta; sweep r or phi");
    if (o.mu.has_value() != o.nu.has_value())
      throw Error(Errc::InvalidArgument, "give both --mu and --nu (their ratio is kept) or neither");
    if (o.mu) {
      mu0 = *o.mu;
      nu0 = *o.nu;
    }
    echo = make_params(mu0, nu0, o.hbar);
  } else {
    echo = resolve_params(o);
  }
  if (var == "r" && o.start < 0) throw Error(Errc::InvalidArgument, "r sweep must start at >= 0");
  if (var == "theta" && o.start <= 0)
    throw Error(Errc::InvalidArgument, "theta sweep must start above 0");
  if ((var == "mu" || var == "nu") && o.start <= 0)
    throw Error(Errc::InvalidArgument, "mu/nu sweeps must start above 0");

  const double r = o.r.value_or(0.0);
  auto point = [&](std::size_t k) {
    const double v = o.start + static_cast<double>(k) * o.step;
    NcParams p = echo;
    double rr = r, phi = o.phi;
    if (var == "r") rr = v;
    if (var == "phi") phi = v;
    if (var == "mu") p = make_params(v, echo.nu, echo.hbar);
    if (var == "nu") p = make_params(echo.mu, v, echo.hbar);
    if (var == "theta") {
      const double s = std::sqrt(mu0 / nu0);
      p = make_params(v * o.hbar * s, v * o.hbar / s, o.hbar);
    }
    const analytic::SqueezeParam z(rr, phi);
    Row full = variance_row(p, z);
    Row row;
    row["index"] = k;
    if (var == "mu" || var == "nu") row[var] = v;
    row["theta"] = p.theta;
    row["r"] = z.r();
    row["phi"] = z.phi();
    row[o.quantity] = full[o.quantity];
    row["gain_x"] = full["gain_x"];
    row["gain_px"] = full["gain_px"];
    row["squeeze_x"] = full["squeeze_x"];
    row["squeeze_px"] = full["squeeze_px"];
    row["squeezing"] = full["squeezing"];
    return row;
  };

  Result res{"sweep", echo, std::nullopt, std::vector<Row>(n), kOk};
  const unsigned workers = worker_count(n);
  if (workers == 1) {
    for (std::size_t k = 0; k < n; ++k) res.rows[k] = point(k);
  } else {
    // Strided split; every row lands at its grid index.
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          try {
            for (std::size_t k = w; k < n; k += workers) res.rows[k] = point(k);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return res;
}

[[nodiscard]] inline Row report_row(const verify::ResidualReport& r) {
  Row row;
  row["id"] = r.id;
  row["residual"] = r.residual;
  row["tolerance"] = r.tolerance;
  row["passed"] = r.passed;
  row["cutoff"] = r.meta.cutoff;
  row["buffer"] = r.meta.buffer;
  row["leak"] = r.meta.leak ? Row(*r.meta.leak) : Row(nullptr);
  return row;
}

[[nodiscard]] inline Row bound_row(const analytic::UncertaintyBound& b) {
  Row row;
  row["id"] = "bound/" + std::string(b.name);
  // Relative shortfall below the bound; zero when satisfied.
  row["residual"] = b.satisfied ? 0.0 : (b.rhs - b.lhs) / b.rhs;
  row["tolerance"] = 0.0;
  row["passed"] = b.satisfied;
  row["cutoff"] = nullptr;
  row["buffer"] = nullptr;
  row["leak"] = nullptr;
  return row;
}

[[nodiscard]] inline Result run_check(const Options& o, std::ostream& err) {
  const NcParams p = resolve_params(o);
  const auto z = resolve_squeeze(o);
  const auto amps = ket_amps(o);
  Result res{"check", p, std::nullopt, {}, kOk};

  // A witness at phi = pi/2 exposes the violated bound when mu nu > hbar^2.
  const analytic::SqueezeParam witness(z && z->r() > 0 ? z->r() : 0.3, std::numbers::pi / 2);
  for (const auto& b : analytic::heisenberg_report(p, z).bounds) res.rows.push_back(bound_row(b));
  if (classify_constraint(p) != ConstraintClass::SubCritical) {
    for (const auto& b : analytic::heisenberg_report(p, witness).bounds) {
      Row row = bound_row(b);
      row["id"] = "witness/" + std::string(b.name);
      res.rows.push_back(row);
    }
    err << "ncsq: SaturatedOrSuperCritical: mu*nu/hbar^2 = " << format_real(p.ratio())
        << "; the Fock realization needs mu*nu < hbar^2";
    if (classify_constraint(p) == ConstraintClass::SuperCritical)
      err << ", and the uncertainty bounds fail at (r = " << witness.r() << ", phi = pi/2)";
    err << '\n';
    res.code = kCheckFailed;
    return res;
  }

  const fock::FockSpace space(o.cutoff);
  for (const auto& r : verify::identity_suite(p, space, amps, z, o.buffer))
    res.rows.push_back(report_row(r));
  for (const auto& r :
       verify::crosscheck_escalating(p, o.cutoff, {{amps, amps, z}}, o.buffer,
                                     std::max(o.cutoff, verify::kMaxEscalatedCutoff)))
    res.rows.push_back(report_row(r));

  for (const Row& row : res.rows)
    if (!row["passed"].get<bool>()) res.code = kCheckFailed;
  return res;
}

[[nodiscard]] inline Result run_bogoliubov(const Options& o) {
  const NcParams p = resolve_params(o);
  const analytic::SqueezeParam z = resolve_squeeze(o).value_or(analytic::SqueezeParam{});
  const analytic::BogoliubovCoeffs c = analytic::bogoliubov_coefficients(p, z);
  Result res{"bogoliubov", p, std::nullopt, {}, kOk};

  std::optional<analytic::BogoliubovCoeffs> fit;
  if (classify_constraint(p) == ConstraintClass::SubCritical)
    fit = verify::fit_bogoliubov(fock::make_operator_set(p, fock::FockSpace(o.cutoff)), z);

  const std::array<const char*, 4> names = {"a", "b", "a_dag", "b_dag"};
  auto emit = [&](const char* out_name, const analytic::ModeMap& closed,
                  const analytic::ModeMap* fitted) {
    const auto cv = closed.as_array();
    for (int k = 0; k < 4; ++k) {
      Row row;
      row["operator"] = out_name;
      row["term"] = names[k];
      row["re"] = cv[k].real();
      row["im"] = cv[k].imag();
      if (fitted) {
        const auto fv = fitted->as_array();
        row["fit_re"] = fv[k].real();
        row["fit_im"] = fv[k].imag();
        row["residual"] = std::abs(fv[k] - cv[k]);
        row["passed"] = std::abs(fv[k] - cv[k]) <= verify::kIdentityTolerance;
        if (!row["passed"].get<bool>()) res.code = kCheckFailed;
      } else {
        row["fit_re"] = nullptr;
        row["fit_im"] = nullptr;
        row["residual"] = nullptr;
        row["passed"] = nullptr;
      }
      res.rows.push_back(row);
    }
  };
  emit("S a S+", c.a_out, fit ? &fit->a_out : nullptr);
  emit("S b S+", c.b_out, fit ? &fit->b_out : nullptr);
  return res;
}

[[nodiscard]] inline Result run_overlap(const Options& o) {
  const NcParams p = resolve_params(o);
  const auto z = resolve_squeeze(o);
  const auto ket = ket_amps(o), bra = bra_amps(o);
  const analytic::cplx v = z ? analytic::squeezed_overlap(p, bra, ket, *z)
                             : analytic::coherent_overlap(p, bra, ket);
  Row row;
  put_complex(row, "bra_alpha", bra.alpha);
  put_complex(row, "bra_beta", bra.beta);
  put_complex(row, "ket_alpha", ket.alpha);
  put_complex(row, "ket_beta", ket.beta);
  row["r"] = z ? z->r() : 0.0;
  row["phi"] = z ? z->phi() : 0.0;
  put_complex(row, "overlap", v);
  row["overlap_abs"] = std::abs(v);
  return {"overlap", p, std::nullopt, {row}, kOk};
}

[[nodiscard]] inline Result run_overcompleteness(const Options& o) {
  const NcParams p = resolve_params(o);
  const auto z = resolve_squeeze(o);
  const std::vector<verify::ProbePair> probes = {{ket_amps(o), bra_amps(o)}};
  Result res{"overcompleteness", p, o.seed, {}, kOk};
  for (const auto& m : verify::overcompleteness_mc(p, probes, o.samples, o.seed, z)) {
    Row row;
    put_complex(row, "estimate", m.estimate);
    put_complex(row, "reference", m.reference);
    row["stderr"] = m.stderr_;
    row["z_score"] = m.z_score;
    row["samples"] = m.samples;
    row["seed"] = m.seed;
    row["passed"] = m.passed();
    if (!m.passed()) res.code = kCheckFailed;
    res.rows.push_back(row);
  }
  return res;
}

[[nodiscard]] inline Result run_oscillator(const Options& o) {
  const NcParams p = resolve_params(o);
  const auto c = analytic::oscillator_consistency({o.mass, o.omega}, p);
  Row row;
  row["mass"] = o.mass;
  row["omega"] = o.omega;
  row["m2_omega2"] = c.lhs;
  row["mu_over_nu"] = c.rhs;
  row["consistent"] = c.consistent;
  return {"oscillator", p, std::nullopt, {row}, c.consistent ? kOk : kCheckFailed};
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

inline void write_json(std::ostream& os, const Result& r) {
  Row head;
  head["schema"] = kSchema;
  head["tool"] = "ncsq";
  head["version"] = kVersion;
  head["command"] = r.command;
  head["timestamp"] = utc_timestamp();
  if (r.params) head["params"] = params_json(*r.params);
  if (r.seed) head["seed"] = *r.seed;
  head["rows"] = r.rows.size();
  os << head.dump() << '\n';
  for (const Row& row : r.rows) os << row.dump() << '\n';
}

[[nodiscard]] inline bool ends_with_csv(const std::string& path) {
  if (path.size() < 4) return false;
  std::string tail = path.substr(path.size() - 4);
  std::transform(tail.begin(), tail.end(), tail.begin(), [](unsigned char c) { return std::tolower(c); });
  return tail == ".csv";
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_usage_error(Errc c) {
  switch (c) {
    case Errc::NonPositiveParameter:
    case Errc::NonFinite:
    case Errc::CutoffOutOfRange:
    case Errc::ThetaAtOrAboveOne:
    case Errc::SamplesTooFew:
    case Errc::GridTooLarge:
    case Errc::InvalidArgument:
      return true;
    default:
      return false;
  }
}

}  // namespace detail

[[nodiscard]] inline int run(int argc, const char* const* argv, std::ostream& out,
                             std::ostream& err) {
  CLI::App app{"Squeezed states on noncommutative phase space", "ncsq"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;

  auto physics = [&](CLI::App* s) {
    s->add_option("--mu", o.mu, "[x, y] = i mu");
    s->add_option("--nu", o.nu, "[px, py] = i nu");
    s->add_option("--hbar", o.hbar, "[x, px] = i hbar")->capture_default_str();
    s->add_flag("--natural", o.natural, "hbar = mu = nu = 1");
  };
  auto squeeze = [&](CLI::App* s) {
    s->add_option("--r", o.r, "squeeze magnitude (omit for coherent states)");
    s->add_option("--phi", o.phi, "squeeze phase in radians")->capture_default_str();
  };
  auto amplitudes = [&](CLI::App* s, bool bra) {
    s->add_option("--alpha", o.alpha, "ket amplitude alpha, a+bi")->capture_default_str();
    s->add_option("--beta", o.beta, "ket amplitude beta, a+bi")->capture_default_str();
    if (bra) {
      s->add_option("--alpha2", o.alpha2, "second amplitude alpha, a+bi")->capture_default_str();
      s->add_option("--beta2", o.beta2, "second amplitude beta, a+bi")->capture_default_str();
    }
  };
  auto fock_opts = [&](CLI::App* s) {
    s->add_option("--cutoff", o.cutoff, "quanta per mode")->capture_default_str();
    s->add_option("--buffer", o.buffer, "levels kept clear below the cutoff")->capture_default_str();
  };
  auto output = [&](CLI::App* s) {
    s->add_option("--out", o.out, "write to a file; a .csv suffix selects CSV");
    s->add_flag("--json", o.json, "JSON even when --out ends in .csv");
  };

  CLI::App* params = app.add_subcommand("params", "theta, kappa, lambda and the constraint class");
  physics(params);
  output(params);

  CLI::App* variance = app.add_subcommand(
      "variance",
      "quadrature variances, products, minima and bounds\n"
      "columns: theta r phi dx2 dy2 dpx2 dpy2 prod_xpx prod_ypy prod_xy prod_pxpy dX2 dP2 prod_XP "
      "min_xpx min_xy min_pxpy min_XP gain_x gain_px squeeze_x squeeze_px squeezing bound_*");
  physics(variance);
  squeeze(variance);
  output(variance);

  CLI::App* overlap = app.add_subcommand("overlap", "<alpha2, beta2 | alpha, beta; z>");
  physics(overlap);
  squeeze(overlap);
  amplitudes(overlap, true);
  output(overlap);

  CLI::App* bogoliubov =
      app.add_subcommand("bogoliubov", "S a S+ and S b S+ closed form and oracle fit");
  physics(bogoliubov);
  squeeze(bogoliubov);
  fock_opts(bogoliubov);
  output(bogoliubov);

  CLI::App* check = app.add_subcommand(
      "check", "operator identities and analytic-vs-oracle crosschecks\n"
               "columns: id residual tolerance passed cutoff buffer leak");
  physics(check);
  squeeze(check);
  amplitudes(check, false);
  fock_opts(check);
  output(check);

  CLI::App* mc = app.add_subcommand(
      "overcompleteness", "Monte-Carlo resolution of the identity between two coherent probes");
  physics(mc);
  squeeze(mc);
  amplitudes(mc, true);
  mc->add_option("--samples", o.samples, "Monte-Carlo samples")->capture_default_str();
  mc->add_option("--seed", o.seed, "master seed")->capture_default_str();
  output(mc);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "scan one variable; rows keep grid order\n"
               "columns: index <var> theta r phi <quantity> gain_x gain_px squeeze_x squeeze_px "
               "squeezing");
  physics(sweep);
  squeeze(sweep);
  sweep->add_option("--var", o.var, "r, phi, theta, mu or nu")->capture_default_str();
  sweep->add_option("--start", o.start)->required();
  sweep->add_option("--stop", o.stop)->required();
  sweep->add_option("--step", o.step)->required();
  sweep->add_option("--quantity", o.quantity, "a variance-report field")->capture_default_str();
  output(sweep);

  CLI::App* osc = app.add_subcommand("oscillator", "m^2 omega^2 == mu/nu consistency");
  physics(osc);
  osc->add_option("--mass", o.mass)->required();
  osc->add_option("--omega", o.omega)->required();
  output(osc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "ncsq: " << e.what() << '\n';
    return kUsage;
  }

  Result res;
  try {
    if (o.cutoff < 1 || o.cutoff > fock::FockSpace::kMaxCutoff)
      throw Error(Errc::CutoffOutOfRange, "cutoff must lie in [1, 200]");
    if (o.buffer < 0 || o.buffer >= o.cutoff)
      throw Error(Errc::InvalidArgument, "--buffer must lie in [0, cutoff)");

    if (params->parsed()) {
      const NcParams p = resolve_params(o);
      res = {"params", p, std::nullopt, {params_row(p)}, kOk};
    } else if (variance->parsed()) {
      const NcParams p = resolve_params(o);
      res = {"variance", p, std::nullopt, {variance_row(p, resolve_squeeze(o))}, kOk};
    } else if (overlap->parsed()) {
      res = run_overlap(o);
    } else if (bogoliubov->parsed()) {
      res = run_bogoliubov(o);
    } else if (check->parsed()) {
      res = run_check(o, err);
    } else if (mc->parsed()) {
      res = run_overcompleteness(o);
    } else if (sweep->parsed()) {
      res = run_sweep(o);
    } else {
      res = run_oscillator(o);
    }
  } catch (const Error& e) {
    err << "ncsq: " << e.what() << '\n';
    return detail::is_usage_error(e.code()) ? kUsage : kCheckFailed;
  }

  const bool csv = !o.out.empty() && ends_with_csv(o.out) && !o.json;
  if (o.out.empty()) {
    write_json(out, res);
  } else {
    std::ofstream file(o.out);
    if (!file) {
      err << "ncsq: cannot open '" << o.out << "' for writing\n";
      return kUsage;
    }
    csv ? write_csv(file, res.rows) : write_json(file, res);
  }
  return res.code;
}

}  // namespace ncsq::cli
