// Config-driven experiments: classification, simulation and verification runs
// with report, CSV and plot-data output.
#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "symlab/catalog.hpp"
#include "symlab/classifier.hpp"
#include "symlab/solver.hpp"
#include "symlab/symmetry.hpp"

namespace symlab {

namespace fs = std::filesystem;

enum class ExperimentKind { Classify, Simulate, Verify };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Classify: return "classify";
    case ExperimentKind::Simulate: return "simulate";
    default: return "verify";
  }
}

/// Stable process exit codes.
namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kViolation = 2;
inline constexpr int kInconclusive = 3;
inline constexpr int kConfig = 64;
inline constexpr int kValidation = 65;
}  // namespace exit_code

/// Malformed or unreadable configuration (exit 64).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed configuration that fails validation (exit 65).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> v)
      : std::runtime_error(v.empty() ? "validation failed" : v.front()), violations(std::move(v)) {}
  std::vector<std::string> violations;
};

struct ExperimentConfig {
  EquationSpec equation;
  std::size_t n = 256;
  double length = 2.0 * M_PI;
  IntegratorConfig integrator;
  std::vector<std::string> ic;
  ExperimentKind kind = ExperimentKind::Verify;
  Tolerances tolerances;
  std::string output_dir = "out";
  bool dump_coefficients = false;
};

namespace detail {

template <class T>
T get_field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

inline Scheme parse_scheme(const std::string& s) {
  if (s == "ETDRK4") return Scheme::ETDRK4;
  if (s == "IFRK4") return Scheme::IFRK4;
  throw ConfigError("unknown scheme '" + s + "'");
}

inline ExperimentKind parse_kind(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (s == "classify") return ExperimentKind::Classify;
  if (s == "simulate") return ExperimentKind::Simulate;
  if (s == "verify") return ExperimentKind::Verify;
  throw ConfigError("unknown experiment '" + s + "'");
}

}  // namespace detail

inline ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be an object");
  ExperimentConfig cfg;
  if (!j.contains("equation")) throw ConfigError("missing 'equation'");
  const auto& je = j["equation"];
  if (je.is_string()) {
    auto found = find_equation(je.get<std::string>());
    if (!found) throw ConfigError("unknown equation '" + je.get<std::string>() + "'");
    cfg.equation = *found;
  } else {
    try {
      cfg.equation = equation_from_json(je);
    } catch (const SpecError& e) {
      throw ConfigError(std::string("equation: ") + e.what());
    } catch (const json::exception& e) {
      throw ConfigError(std::string("equation: ") + e.what());
    }
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    cfg.n = detail::get_field<std::size_t>(g, "N", cfg.n);
    cfg.length = detail::get_field<double>(g, "L", cfg.length);
  }
  if (j.contains("integrator")) {
    const auto& ji = j["integrator"];
    auto& in = cfg.integrator;
    in.dt = detail::get_field<double>(ji, "dt", in.dt);
    in.t_end = detail::get_field<double>(ji, "t_end", in.t_end);
    in.snapshot_stride = detail::get_field<std::size_t>(ji, "snapshot_stride", in.snapshot_stride);
    in.dealias_fraction = detail::get_field<double>(ji, "dealias_fraction", in.dealias_fraction);
    in.scheme = detail::parse_scheme(detail::get_field<std::string>(ji, "scheme", "ETDRK4"));
  }
  if (j.contains("ic")) {
    const auto& ji = j["ic"];
    if (ji.is_string()) {
      cfg.ic.push_back(ji.get<std::string>());
    } else if (ji.is_array()) {
      for (const auto& s : ji) {
        if (!s.is_string()) throw ConfigError("ic entries must be strings");
        cfg.ic.push_back(s.get<std::string>());
      }
    } else {
      throw ConfigError("ic must be a string or a list of strings");
    }
  }
  cfg.kind = detail::parse_kind(detail::get_field<std::string>(j, "experiment", "verify"));
  if (j.contains("tolerances")) {
    cfg.tolerances.sym_tol = detail::get_field<double>(j["tolerances"], "sym_tol", cfg.tolerances.sym_tol);
    cfg.tolerances.pred_tol = detail::get_field<double>(j["tolerances"], "pred_tol", cfg.tolerances.pred_tol);
  }
  cfg.output_dir = detail::get_field<std::string>(j, "output_dir", cfg.output_dir);
  cfg.dump_coefficients = detail::get_field<bool>(j, "dump_coefficients", false);
  return cfg;
}

inline ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

/// Output directory after applying the SYMLAB_OUTPUT override.
inline fs::path resolve_output_dir(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("SYMLAB_OUTPUT"); env && *env) return fs::path(env);
  return fs::path(cfg.output_dir);
}

/// Samples the initial-condition expressions on the grid and projects to real fields.
inline SpectralState make_initial_state(const Grid& grid, const std::vector<std::string>& ic) {
  std::vector<RealArray> values;
  Bindings b;
  b.period = grid.period();
  for (std::size_t c = 0; c < ic.size(); ++c) {
    SymbolExpr e;
    try {
      e = parse_expression(ic[c], Dialect::initial_condition());
    } catch (const ParseError& ex) {
      throw ConfigError("ic[" + std::to_string(c) + "]: " + ex.what());
    }
    RealArray row(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      try {
        cplx v = eval_expression(e, grid.x(j), b);
        if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v.real())))
          throw ValidationError({"ic[" + std::to_string(c) + "] is not real at x=" + std::to_string(grid.x(j))});
        row[j] = v.real();
      } catch (const ValidationError&) {
        throw;
      } catch (const std::exception& ex) {
        throw ValidationError({"ic[" + std::to_string(c) + "]: " + ex.what() + " at x=" + std::to_string(grid.x(j))});
      }
    }
    values.push_back(std::move(row));
  }
  SpectralState s = transform_forward(grid, values, 0.0);
  project_hermitian(s);
  return s;
}

struct ExperimentResult {
  ClassificationReport classification;
  ValidationReport validation;
  std::optional<Trajectory> trajectory;
  std::optional<VerificationReport> verification;
  int exit_code = exit_code::kOk;
};

inline int exit_code_for(const ExperimentResult& r) {
  if (r.trajectory && r.trajectory->blowup) return exit_code::kInconclusive;
  if (!r.verification) return exit_code::kOk;
  switch (r.verification->verdict) {
    case Verdict::ConsistentSymmetricPrediction:
    case Verdict::ConsistentSymmetryLost: return exit_code::kOk;
    case Verdict::TheoremViolation: return exit_code::kViolation;
    default: return exit_code::kInconclusive;
  }
}

/// Validates and runs the experiment. Throws ValidationError before any
/// integration when the equation or initial condition is unusable.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult r;
  Grid grid = [&] {
    try {
      return Grid(cfg.n, cfg.length);
    } catch (const std::invalid_argument& e) {
      throw ValidationError({std::string("grid: ") + e.what()});
    }
  }();
  const bool simulate = cfg.kind != ExperimentKind::Classify;
  r.validation = validate_spec(cfg.equation, grid,
                               simulate ? ValidationPurpose::Simulate : ValidationPurpose::Classify,
                               cfg.integrator.dealias_fraction);
  if (!r.validation.ok()) throw ValidationError(r.validation.violations);
  r.classification = classify(cfg.equation);
  if (!simulate) return r;

  try {
    cfg.integrator.check();
  } catch (const std::invalid_argument& e) {
    throw ValidationError({std::string("integrator: ") + e.what()});
  }
  if (cfg.ic.size() != cfg.equation.dimension)
    throw ValidationError({"expected " + std::to_string(cfg.equation.dimension) +
                           " initial-condition expressions, got " + std::to_string(cfg.ic.size())});
  SpectralState ic = make_initial_state(grid, cfg.ic);
  r.trajectory = integrate(cfg.equation, ic, cfg.integrator);
  if (cfg.kind == ExperimentKind::Verify)
    r.verification = verify(cfg.equation, r.classification, *r.trajectory, cfg.tolerances,
                            cfg.integrator.dealias_fraction);
  r.exit_code = exit_code_for(r);
  return r;
}

// ---------------------------------------------------------------------------
// writers

namespace detail {

inline std::string num(double v) { return format_number(v); }

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

}  // namespace detail

/// One CSV per component: header t,x_0,...,x_{N-1}, one row of physical values per snapshot.
inline std::vector<std::string> trajectory_csv(const Trajectory& traj) {
  std::vector<std::string> out;
  if (traj.snapshots.empty()) return out;
  const std::size_t dim = traj.snapshots.front().dimension();
  const std::size_t n = traj.snapshots.front().grid.size();
  for (std::size_t c = 0; c < dim; ++c) {
    std::string s = "t";
    for (std::size_t j = 0; j < n; ++j) s += ",x_" + std::to_string(j);
    s += '\n';
    for (const auto& snap : traj.snapshots) {
      RealArray u = to_physical(snap.coeffs[c]);
      s += detail::num(snap.time);
      for (double v : u) s += "," + detail::num(v);
      s += '\n';
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline std::string axis_csv(const std::vector<AxisSample>& track) {
  std::string s = "t,lambda,defect\n";
  for (const auto& a : track)
    s += detail::num(a.t) + "," + (a.valid ? detail::num(a.lambda) : std::string("nan")) + "," +
         detail::num(a.defect) + "\n";
  return s;
}

/// Gnuplot-style blocks: "# t=..." then "x u" rows, blocks separated by two blank lines.
inline std::string plot_data(const Trajectory& traj, std::size_t component) {
  std::string s;
  for (const auto& snap : traj.snapshots) {
    RealArray u = to_physical(snap.coeffs[component]);
    s += "# t=" + detail::num(snap.time) + "\n";
    for (std::size_t j = 0; j < u.size(); ++j) s += detail::num(snap.grid.x(j)) + " " + detail::num(u[j]) + "\n";
    s += "\n\n";
  }
  return s;
}

inline constexpr std::string_view kPlotScript = R"py(#!/usr/bin/env python3
"""Plot the snapshot blocks in u<c>.dat files of this directory."""
import glob
import sys

import matplotlib.pyplot as plt


def blocks(path):
    t, xs, us = None, [], []
    for line in open(path):
        line = line.strip()
        if line.startswith("# t="):
            if xs:
                yield t, xs, us
            t, xs, us = float(line[4:]), [], []
        elif line:
            x, u = line.split()
            xs.append(float(x))
            us.append(float(u))
    if xs:
        yield t, xs, us


for path in sorted(glob.glob("u*.dat")):
    fig, ax = plt.subplots()
    for t, xs, us in blocks(path):
        ax.plot(xs, us, lw=0.8, label=f"t={t:g}")
    ax.set_xlabel("x")
    ax.set_title(path)
    if len(ax.lines) <= 12:
        ax.legend(fontsize="small")
    fig.savefig(path.replace(".dat", ".png"), dpi=120)
    if "--show" in sys.argv:
        plt.show()
)py";

inline json result_document(const ExperimentConfig& cfg, const ExperimentResult& r) {
  json j;
  j["equation"] = to_json(cfg.equation);
  j["experiment"] = to_string(cfg.kind);
  j["grid"] = {{"N", cfg.n}, {"L", cfg.length}};
  j["integrator"] = {{"dt", cfg.integrator.dt},
                     {"t_end", cfg.integrator.t_end},
                     {"snapshot_stride", cfg.integrator.snapshot_stride},
                     {"dealias_fraction", cfg.integrator.dealias_fraction},
                     {"scheme", to_string(cfg.integrator.scheme)}};
  j["ic"] = cfg.ic;
  j["classification"] = to_json(r.classification);
  j["warnings"] = r.validation.warnings;
  if (r.trajectory) {
    j["steps"] = r.trajectory->steps;
    j["snapshots"] = r.trajectory->snapshots.size();
    j["max_hermitian_residual"] = r.trajectory->max_hermitian_residual;
    if (r.trajectory->blowup)
      j["blowup"] = {{"time", r.trajectory->blowup->time}, {"norm_ratio", r.trajectory->blowup->norm_ratio}};
  }
  if (r.verification) j["verification"] = to_json(*r.verification);
  j["exit_code"] = r.exit_code;
  return j;
}

/// Writes every artifact of a run into dir, replacing earlier outputs.
inline void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& r, const fs::path& dir) {
  fs::create_directories(dir);
  detail::write_text(dir / "report.json", result_document(cfg, r).dump(2) + "\n");
  if (!r.trajectory) return;
  const auto& traj = *r.trajectory;
  auto csvs = trajectory_csv(traj);
  for (std::size_t c = 0; c < csvs.size(); ++c) {
    detail::write_text(dir / ("u" + std::to_string(c) + ".csv"), csvs[c]);
    detail::write_text(dir / ("u" + std::to_string(c) + ".dat"), plot_data(traj, c));
  }
  detail::write_text(dir / "plot.py", std::string(kPlotScript));
  if (r.verification) detail::write_text(dir / "axis.csv", axis_csv(r.verification->track));
  if (cfg.dump_coefficients) {
    fs::create_directories(dir / "coeffs");
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
      const auto& snap = traj.snapshots[i];
      for (std::size_t c = 0; c < snap.dimension(); ++c) {
        std::string s = "k,re,im\n";
        for (std::size_t j = 0; j < snap.grid.size(); ++j)
          s += std::to_string(snap.grid.wavenumber(j)) + "," + detail::num(snap.coeffs[c][j].real()) + "," +
               detail::num(snap.coeffs[c][j].imag()) + "\n";
        std::ostringstream name;
        name << "snap" << std::setw(5) << std::setfill('0') << i << "_u" << c << ".csv";
        detail::write_text(dir / "coeffs" / name.str(), s);
      }
    }
  }
}

/// Runs several configs on worker threads. Each run writes into its own
/// directory; under SYMLAB_OUTPUT the config file stem becomes a subdirectory.
struct BatchItem {
  fs::path config;
  fs::path output;
  int exit_code = exit_code::kOk;
  std::string message;
};

inline int run_one_config(const fs::path& path, const fs::path& out_override, std::string& message,
                          fs::path& out_dir) {
  try {
    ExperimentConfig cfg = load_config(path);
    out_dir = out_override.empty() ? resolve_output_dir(cfg) : out_override;
    ExperimentResult r = run_experiment(cfg);
    write_outputs(cfg, r, out_dir);
    message = r.verification ? to_string(r.verification->verdict) : one_line(r.classification);
    if (r.trajectory && r.trajectory->blowup) message = "blow-up at t=" + std::to_string(r.trajectory->blowup->time);
    return r.exit_code;
  } catch (const ConfigError& e) {
    message = std::string("config error: ") + e.what();
    return exit_code::kConfig;
  } catch (const ValidationError& e) {
    message = "validation failed: ";
    for (std::size_t i = 0; i < e.violations.size(); ++i) message += (i ? "; " : "") + e.violations[i];
    return exit_code::kValidation;
  }
}

inline std::vector<BatchItem> run_batch(const std::vector<fs::path>& configs) {
  std::vector<std::future<BatchItem>> jobs;
  const char* env = std::getenv("SYMLAB_OUTPUT");
  for (const auto& p : configs) {
    fs::path forced = (env && *env) ? fs::path(env) / p.stem() : fs::path();
    jobs.push_back(std::async(std::launch::async, [p, forced] {
      BatchItem item;
      item.config = p;
      item.exit_code = run_one_config(p, forced, item.message, item.output);
      return item;
    }));
  }
  std::vector<BatchItem> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

// ---------------------------------------------------------------------------
// embedded self-test

struct SelfTestCase {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline SpectralState random_band_limited(const Grid& g, std::size_t dim, long kmax, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  SpectralState s(g, dim);
  for (auto& c : s.coeffs) {
    c[0] = {nd(rng), 0.0};
    for (long k = 1; k <= kmax; ++k) {
      cplx v(nd(rng), nd(rng));
      c[g.index(k)] = v;
      c[g.index(-k)] = std::conj(v);
    }
  }
  return s;
}

/// Direct convolution of two coefficient sequences with wavenumbers wrapped
/// onto the grid (the aliasing pattern of a pointwise product).
inline CoeffArray direct_product(const Grid& g, const CoeffArray& a, const CoeffArray& b) {
  CoeffArray out(g.size(), cplx(0.0, 0.0));
  for (std::size_t p = 0; p < g.size(); ++p)
    for (std::size_t q = 0; q < g.size(); ++q) out[(p + q) % g.size()] += a[p] * b[q];
  return out;
}

}  // namespace detail

inline std::vector<SelfTestCase> run_selftest() {
  std::vector<SelfTestCase> out;
  std::mt19937_64 rng(20240611);

  {  // every catalog parity verdict agrees with sampling
    SelfTestCase t{"parity soundness (catalog symbols vs sampling)", false, {}};
    std::size_t checked = 0, bad = 0;
    auto probe = [&](const SymbolExpr& e) {
      Parity s = parity_symbolic(e);
      if (s == Parity::Indefinite) return;
      ++checked;
      if (parity_numeric(e, 256, 20.0) != s) ++bad;
    };
    for (const auto& eq : build_catalog())
      for (std::size_t c = 0; c < eq.dimension; ++c) {
        probe(eq.left[c]);
        for (const auto& term : eq.terms[c]) {
          probe(term.outer);
          for (const auto& f : term.factors) probe(f.inner);
        }
      }
    t.passed = bad == 0 && checked > 0;
    t.detail = std::to_string(checked) + " symbols, " + std::to_string(bad) + " mismatches";
    out.push_back(t);
  }

  {  // pseudospectral product against direct convolution
    SelfTestCase t{"convolution oracle, N=32", false, {}};
    Grid g(32, 2.0 * M_PI);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      auto a = detail::random_band_limited(g, 1, 10, rng);
      auto b = detail::random_band_limited(g, 1, 10, rng);
      RealArray pa = to_physical(a.coeffs[0]), pb = to_physical(b.coeffs[0]);
      RealArray prod(g.size());
      for (std::size_t j = 0; j < g.size(); ++j) prod[j] = pa[j] * pb[j];
      auto fast = transform_forward(g, {prod}, 0.0);
      auto slow = detail::direct_product(g, a.coeffs[0], b.coeffs[0]);
      double scale = norm2(a.coeffs[0]) * norm2(b.coeffs[0]);
      for (std::size_t j = 0; j < g.size(); ++j) worst = std::max(worst, std::abs(fast.coeffs[0][j] - slow[j]) / scale);
    }
    t.passed = worst < 1e-12;
    std::ostringstream os;
    os << "max relative error " << worst;
    t.detail = os.str();
    out.push_back(t);
  }

  {  // reflect twice about the same axis
    SelfTestCase t{"reflect involution at random lambda", false, {}};
    Grid g(64, 10.0);
    std::uniform_real_distribution<double> ud(-20.0, 20.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      auto s = detail::random_band_limited(g, 2, 20, rng);
      double lam = ud(rng);
      worst = std::max(worst, distance2(reflect(reflect(s, lam), lam), s) / norm2(s));
    }
    t.passed = worst < 1e-13;
    std::ostringstream os;
    os << "max relative error " << worst;
    t.detail = os.str();
    out.push_back(t);
  }

  {  // heat flow from a random state, compared with exp(-xi^2 t)
    SelfTestCase t{"linear-flow exactness (heat, t=1)", false, {}};
    Grid g(64, 2.0 * M_PI);
    auto s = detail::random_band_limited(g, 1, 8, rng);
    IntegratorConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 1.0;
    cfg.snapshot_stride = 1000;
    auto traj = integrate(*find_equation("heat"), s, cfg);
    SpectralState exact = s;
    exact.time = 1.0;
    for (std::size_t j = 0; j < g.size(); ++j) exact.coeffs[0][j] *= std::exp(-g.xi(j) * g.xi(j));
    double err = distance2(traj.snapshots.back(), exact) / norm2(s);
    t.passed = err < 1e-10;
    std::ostringstream os;
    os << "relative error " << err;
    t.detail = os.str();
    out.push_back(t);
  }
  return out;
}

}  // namespace symlab
