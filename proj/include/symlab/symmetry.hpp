// Axis-of-symmetry detection, symmetry defect, speed estimation and the
// verification of principle predictions against a computed trajectory.
//
// A state is symmetric about lambda when u_hat_k = exp(-2 i lambda xi_k) u_hat_{-k}.
// On a torus of period L the reflections about lambda and lambda + L/2 coincide,
// so axes are reported modulo L/2 and unwrapped along a trajectory.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "symlab/classifier.hpp"
#include "symlab/solver.hpp"
#include "symlab/spectral.hpp"

namespace symlab {

/// Reflection x -> 2*lambda - x applied to every component. The Nyquist mode
/// has no reflected partner on the grid and is dropped.
inline SpectralState reflect(const SpectralState& s, double lambda) {
  SpectralState out = s;
  const auto& g = s.grid;
  for (std::size_t j = 0; j < g.size(); ++j) {
    double cycles = 2.0 * lambda * static_cast<double>(g.wavenumber(j)) / g.period();
    double phase = -2.0 * M_PI * (cycles - std::round(cycles));
    cplx rot(std::cos(phase), std::sin(phase));
    for (std::size_t c = 0; c < s.dimension(); ++c) out.coeffs[c][j] = rot * s.coeffs[c][g.mirror(j)];
  }
  for (auto& c : out.coeffs) c[g.nyquist()] = {0.0, 0.0};
  return out;
}

namespace detail {

/// Squared unnormalized defect, computed term by term so that small defects
/// are not lost to cancellation.
inline double defect_squared(const SpectralState& s, double lambda) {
  const auto& g = s.grid;
  double acc = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (j == g.nyquist()) {
      for (const auto& c : s.coeffs) acc += std::norm(c[j]);
      continue;
    }
    double cycles = 2.0 * lambda * static_cast<double>(g.wavenumber(j)) / g.period();
    double phase = -2.0 * M_PI * (cycles - std::round(cycles));
    cplx rot(std::cos(phase), std::sin(phase));
    for (const auto& c : s.coeffs) acc += std::norm(c[j] - rot * c[g.mirror(j)]);
  }
  return acc;
}

/// Derivative of defect_squared with respect to lambda.
inline double defect_slope(const SpectralState& s, double lambda) {
  const auto& g = s.grid;
  double acc = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (j == g.nyquist()) continue;
    double cycles = 2.0 * lambda * static_cast<double>(g.wavenumber(j)) / g.period();
    double phase = -2.0 * M_PI * (cycles - std::round(cycles));
    cplx rot(std::cos(phase), std::sin(phase));
    cplx d_rot = cplx(0.0, 2.0 * g.xi(j)) * rot;
    for (const auto& c : s.coeffs) {
      cplx mirrored = c[g.mirror(j)];
      acc += 2.0 * std::real(std::conj(c[j] - rot * mirrored) * d_rot * mirrored);
    }
  }
  return acc;
}

inline double wrap(double v, double period) {
  v = std::fmod(v, period);
  if (v < 0) v += period;
  if (v >= period) v -= period;
  return v;
}

}  // namespace detail

/// ||u_hat - reflect(u_hat, lambda)|| / ||u_hat||, summed over components.
/// Returns 0 for the zero state.
inline double symmetry_defect(const SpectralState& s, double lambda) {
  double nrm = norm2(s);
  if (nrm == 0.0) return 0.0;
  return std::sqrt(detail::defect_squared(s, lambda)) / nrm;
}

struct AxisEstimate {
  double lambda = 0.0;
  double defect = 0.0;
  bool valid = false;
};

inline constexpr double kFlatNormFloor = 1e-12;
inline constexpr double kFlatEnergyFraction = 1e-12;

/// True when the state has no spatial structure to define an axis by.
inline bool is_flat(const SpectralState& s) {
  double total = 0.0, mean = 0.0;
  for (const auto& c : s.coeffs) {
    for (const auto& v : c) total += std::norm(v);
    mean += std::norm(c[0]);
  }
  if (std::sqrt(total) < kFlatNormFloor) return true;
  return (total - mean) < kFlatEnergyFraction * total;
}

/// Global minimizer of the defect over [0, L/2): coarse scan on 4N points,
/// then golden-section refinement of the squared defect, finished by bisection
/// on its derivative (golden section alone stalls near sqrt(eps)).
inline AxisEstimate estimate_axis(const SpectralState& s) {
  AxisEstimate est;
  if (is_flat(s)) return est;
  const double half = 0.5 * s.grid.period();
  const std::size_t scan = 4 * s.grid.size();
  const double step = half / static_cast<double>(scan);
  double best = std::numeric_limits<double>::infinity();
  double best_lambda = 0.0;
  for (std::size_t i = 0; i < scan; ++i) {
    double lam = step * static_cast<double>(i);
    double d = detail::defect_squared(s, lam);
    if (d < best) {
      best = d;
      best_lambda = lam;
    }
  }
  constexpr double kInvPhi = 0.6180339887498949;
  double a = best_lambda - step, b = best_lambda + step;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = detail::defect_squared(s, x1), f2 = detail::defect_squared(s, x2);
  const double tol = 1e-10 * s.grid.period();
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = detail::defect_squared(s, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = detail::defect_squared(s, x2);
    }
  }
  double lam = 0.5 * (a + b);
  double lo = lam - 4.0 * tol, hi = lam + 4.0 * tol;
  double slo = detail::defect_slope(s, lo), shi = detail::defect_slope(s, hi);
  if (slo < 0.0 && shi > 0.0) {
    for (int it = 0; it < 80 && hi - lo > 0.0; ++it) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (detail::defect_slope(s, mid) < 0.0 ? lo : hi) = mid;
    }
    double fl_root = detail::defect_squared(s, 0.5 * (lo + hi));
    if (fl_root <= detail::defect_squared(s, lam)) lam = 0.5 * (lo + hi);
  }
  double fl = detail::defect_squared(s, lam);
  if (best < fl) {  // refinement never does worse than the scan
    lam = best_lambda;
    fl = best;
  }
  est.lambda = detail::wrap(lam, half);
  est.defect = std::sqrt(fl) / norm2(s);
  est.valid = true;
  return est;
}

struct AxisSample {
  double t = 0.0;
  double lambda = 0.0;  // unwrapped; NaN when the snapshot is flat
  double defect = 0.0;
  bool valid = false;
};

class UnwrapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Shifts each valid lambda by multiples of L/2 towards its predecessor.
/// Throws when a step lands close to the L/4 ambiguity.
inline void unwrap_axes(std::vector<AxisSample>& track, double period) {
  const double half = 0.5 * period;
  std::optional<double> prev;
  for (auto& s : track) {
    if (!s.valid) continue;
    if (prev) {
      double diff = s.lambda - *prev;
      double m = std::round(diff / half);
      s.lambda -= m * half;
      double moved = std::abs(s.lambda - *prev);
      if (moved > 0.9 * 0.25 * period)
        throw UnwrapError("axis moved by about L/4 between snapshots; reduce snapshot_stride");
    }
    prev = s.lambda;
  }
}

inline std::vector<AxisSample> raw_axes(const Trajectory& traj) {
  std::vector<AxisSample> out;
  for (const auto& snap : traj.snapshots) {
    AxisEstimate e = estimate_axis(snap);
    out.push_back({snap.time, e.valid ? e.lambda : std::nan(""), e.defect, e.valid});
  }
  return out;
}

}  // namespace detail

inline std::vector<AxisSample> track_axis(const Trajectory& traj) {
  if (traj.snapshots.size() < 2) throw std::invalid_argument("track_axis needs at least two snapshots");
  auto track = detail::raw_axes(traj);
  detail::unwrap_axes(track, traj.snapshots.front().grid.period());
  return track;
}

enum class SpeedMethod { AxisSlope, PhaseRegression };

inline const char* to_string(SpeedMethod m) {
  return m == SpeedMethod::AxisSlope ? "AxisSlope" : "PhaseRegression";
}

struct SpeedEstimate {
  double c = 0.0;
  double residual = 0.0;
  SpeedMethod method = SpeedMethod::PhaseRegression;
};

struct SpeedEstimates {
  std::optional<SpeedEstimate> axis_slope;
  SpeedEstimate phase;
  std::size_t modes_used = 0;
};

class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// max_t ||u(t) - shift(u(t0), c (t - t0))|| / ||u(t0)||.
inline double traveling_residual(const Trajectory& traj, double c) {
  const auto& u0 = traj.snapshots.front();
  double n0 = norm2(u0);
  double worst = 0.0;
  for (const auto& s : traj.snapshots) {
    double d = distance2(s, shift(u0, c * (s.time - u0.time)));
    worst = std::max(worst, n0 > 0 ? d / n0 : d);
  }
  return worst;
}

/// Least-squares slope of the valid entries of an unwrapped axis track.
inline std::optional<double> axis_slope(const std::vector<AxisSample>& track) {
  double st = 0, sl = 0, n = 0;
  for (const auto& s : track)
    if (s.valid) {
      st += s.t;
      sl += s.lambda;
      n += 1;
    }
  if (n < 2) return std::nullopt;
  double mt = st / n, ml = sl / n, num = 0, den = 0;
  for (const auto& s : track)
    if (s.valid) {
      num += (s.t - mt) * (s.lambda - ml);
      den += (s.t - mt) * (s.t - mt);
    }
  if (den == 0) return std::nullopt;
  return num / den;
}

/// Phase regression: for a translating state arg(u_hat_k(t)/u_hat_k(t0)) = -xi_k c (t - t0).
/// Modes are taken in increasing |xi| and each one is unwrapped against the
/// speed implied by the modes before it.
inline double phase_speed(const Trajectory& traj, std::size_t* modes_used = nullptr) {
  const auto& u0 = traj.snapshots.front();
  const auto& g = u0.grid;
  double peak = 0.0;
  for (const auto& c : u0.coeffs)
    for (std::size_t j = 1; j < g.size() / 2; ++j) peak = std::max(peak, std::abs(c[j]));
  struct Mode {
    std::size_t comp, j;
    double xi, weight;
  };
  std::vector<Mode> modes;
  for (std::size_t c = 0; c < u0.dimension(); ++c)
    for (std::size_t j = 1; j < g.size() / 2; ++j) {
      double a = std::abs(u0.coeffs[c][j]);
      if (peak > 0 && a > 1e-6 * peak) modes.push_back({c, j, g.xi(j), a * a});
    }
  if (modes.size() < 3) throw EstimationError("fewer than 3 usable modes for phase regression");
  std::stable_sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) { return a.xi < b.xi; });
  if (modes_used) *modes_used = modes.size();

  double num = 0.0, den = 0.0;
  std::optional<double> c_est;
  for (const auto& m : modes) {
    const cplx ref = u0.coeffs[m.comp][m.j];
    double prev_phase = 0.0;
    for (std::size_t i = 1; i < traj.snapshots.size(); ++i) {
      const auto& s = traj.snapshots[i];
      double tau = s.time - u0.time;
      double raw = std::arg(s.coeffs[m.comp][m.j] / ref);
      double target = c_est ? -m.xi * *c_est * tau : prev_phase;
      double phase = raw + 2.0 * M_PI * std::round((target - raw) / (2.0 * M_PI));
      prev_phase = phase;
      num += m.weight * m.xi * tau * phase;
      den += m.weight * m.xi * m.xi * tau * tau;
    }
    if (den > 0) c_est = -num / den;
  }
  return c_est.value_or(0.0);
}

inline SpeedEstimates estimate_speed(const Trajectory& traj) {
  if (traj.snapshots.size() < 3) throw std::invalid_argument("estimate_speed needs at least three snapshots");
  SpeedEstimates out;
  double c = phase_speed(traj, &out.modes_used);
  out.phase = {c, traveling_residual(traj, c), SpeedMethod::PhaseRegression};
  try {
    auto track = track_axis(traj);
    if (auto slope = axis_slope(track))
      out.axis_slope = SpeedEstimate{*slope, traveling_residual(traj, *slope), SpeedMethod::AxisSlope};
  } catch (const UnwrapError&) {
  }
  return out;
}

// ---------------------------------------------------------------------------
// verification

enum class Verdict { ConsistentSymmetricPrediction, ConsistentSymmetryLost, TheoremViolation, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::ConsistentSymmetricPrediction: return "ConsistentSymmetricPrediction";
    case Verdict::ConsistentSymmetryLost: return "ConsistentSymmetryLost";
    case Verdict::TheoremViolation: return "TheoremViolation";
    default: return "Inconclusive";
  }
}

struct Tolerances {
  double sym_tol = 1e-6;
  double pred_tol = 1e-4;
};

struct VerificationReport {
  ClassificationReport classification;
  std::vector<AxisSample> track;
  std::optional<SpeedEstimates> speed;
  double max_defect = 0.0;
  std::optional<double> traveling_residual;
  std::optional<double> axis_drift;             // max |lambda(t) - lambda(0)|
  std::optional<double> spatial_variation;      // max over t of std(u)/||u||
  std::optional<double> temporal_change;        // max over t of ||u - u0|| / ||u0||
  std::vector<double> sub_equation_residuals;   // P3_weak, per snapshot
  std::optional<InvertibilityCheck> flux_check;
  Tolerances tolerances;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<std::string> diagnostics;
};

/// Residual of the steady sub-equation -speed * P(D) u_x = F1(D, u) for the
/// terms listed in the classification, relative to ||F1(u)||.
inline double sub_equation_residual(const EquationSpec& spec, const ClassificationReport& cls,
                                    const SpectralState& s, double speed,
                                    double dealias_fraction = 2.0 / 3.0) {
  CompiledEquation eq(spec, s.grid, dealias_fraction);
  std::vector<std::vector<std::size_t>> sel(spec.dimension);
  for (const auto& t : cls.sub_equation_terms) sel[t.component].push_back(t.term);
  auto f1 = eq.apply_terms(s.coeffs, sel);
  double num = 0.0, den = 0.0;
  for (std::size_t c = 0; c < spec.dimension; ++c)
    for (std::size_t j = 0; j < s.grid.size(); ++j) {
      cplx p = eval_symbol(spec.left[c], s.grid.xi(j));
      cplx lhs = speed * p * cplx(0.0, s.grid.xi(j)) * s.coeffs[c][j];
      num += std::norm(lhs + f1[c][j]);
      den += std::norm(f1[c][j]);
    }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

namespace detail {

inline double spatial_variation(const SpectralState& s) {
  double total = 0.0, mean = 0.0;
  for (const auto& c : s.coeffs) {
    for (const auto& v : c) total += std::norm(v);
    mean += std::norm(c[0]);
  }
  return total > 0 ? std::sqrt(std::max(0.0, total - mean) / total) : 0.0;
}

inline std::pair<double, double> physical_range(const Trajectory& traj) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : traj.snapshots)
    for (const auto& comp : transform_inverse(s))
      for (double v : comp) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  return {lo, hi};
}

}  // namespace detail

inline VerificationReport verify(const EquationSpec& spec, const ClassificationReport& cls,
                                 const Trajectory& traj, const Tolerances& tol = {},
                                 double dealias_fraction = 2.0 / 3.0) {
  if (traj.snapshots.empty() || traj.snapshots.front().dimension() != spec.dimension ||
      cls.equation != spec.name || cls.dimension != spec.dimension)
    throw std::invalid_argument("trajectory, classification and equation do not match");

  VerificationReport r;
  r.classification = cls;
  r.tolerances = tol;
  r.diagnostics.push_back("symmetry defect is the relative L2 distance between the state and its "
                          "reflection about the tracked axis");
  if (traj.blowup) {
    r.diagnostics.push_back("integration blew up at t=" + std::to_string(traj.blowup->time));
    return r;
  }

  r.track = detail::raw_axes(traj);
  for (const auto& s : r.track)
    if (s.valid) r.max_defect = std::max(r.max_defect, s.defect);
  bool unwrapped = true;
  try {
    detail::unwrap_axes(r.track, traj.snapshots.front().grid.period());
  } catch (const UnwrapError& e) {
    unwrapped = false;
    r.diagnostics.push_back(e.what());
  }

  if (cls.label == Principle::Unclassified) {
    r.diagnostics.push_back("equation is unclassified; nothing to verify");
    return r;
  }
  const bool symmetric = r.max_defect < tol.sym_tol;
  if (!symmetric) {
    r.verdict = Verdict::ConsistentSymmetryLost;
    r.diagnostics.push_back("symmetry lost (max defect " + std::to_string(r.max_defect) +
                            "): the principle's hypothesis does not hold on the whole interval");
    return r;
  }

  const double period = traj.snapshots.front().grid.period();
  auto first_valid = std::find_if(r.track.begin(), r.track.end(), [](const AxisSample& s) { return s.valid; });

  switch (cls.label) {
    case Principle::P1: {
      if (traj.snapshots.size() >= 3) {
        try {
          r.speed = estimate_speed(traj);
          r.traveling_residual = r.speed->phase.residual;
        } catch (const EstimationError& e) {
          r.diagnostics.push_back(e.what());
        }
      }
      if (!r.traveling_residual) {
        auto slope = unwrapped ? axis_slope(r.track) : std::nullopt;
        r.traveling_residual = traveling_residual(traj, slope.value_or(0.0));
      }
      r.verdict = *r.traveling_residual < tol.pred_tol ? Verdict::ConsistentSymmetricPrediction
                                                        : Verdict::TheoremViolation;
      break;
    }
    case Principle::P2: {
      if (!unwrapped) return r;
      double drift = 0.0;
      if (first_valid != r.track.end())
        for (const auto& s : r.track)
          if (s.valid) drift = std::max(drift, std::abs(s.lambda - first_valid->lambda));
      r.axis_drift = drift;
      r.verdict = drift < tol.pred_tol * period ? Verdict::ConsistentSymmetricPrediction
                                                : Verdict::TheoremViolation;
      break;
    }
    case Principle::P3_strong: {
      auto [lo, hi] = detail::physical_range(traj);
      r.flux_check = check_flux_invertibility(cls.flux, lo, hi);
      double var = 0.0, change = 0.0;
      const auto& u0 = traj.snapshots.front();
      double n0 = norm2(u0);
      for (const auto& s : traj.snapshots) {
        var = std::max(var, detail::spatial_variation(s));
        double d = distance2(s, u0);
        change = std::max(change, n0 > 0 ? d / n0 : d);
      }
      r.spatial_variation = var;
      bool ok = var < tol.pred_tol;
      if (cls.predicted == Prediction::ConstantInSpaceTime) {
        r.temporal_change = change;
        ok = ok && change < tol.pred_tol;
      }
      if (ok) {
        r.verdict = Verdict::ConsistentSymmetricPrediction;
      } else if (!r.flux_check->invertible) {
        r.verdict = Verdict::Inconclusive;
        r.diagnostics.push_back("F1' not invertible on the solution range: " + r.flux_check->note);
      } else {
        r.verdict = Verdict::TheoremViolation;
      }
      break;
    }
    case Principle::P3_weak: {
      if (!unwrapped) return r;
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < r.track.size(); ++i)
        if (r.track[i].valid) idx.push_back(i);
      if (idx.size() < 2) {
        r.diagnostics.push_back("too few valid axis samples for the axis velocity");
        return r;
      }
      bool ok = true;
      for (std::size_t q = 0; q < idx.size(); ++q) {
        std::size_t lo = idx[q == 0 ? 0 : q - 1], hi = idx[q + 1 == idx.size() ? q : q + 1];
        double speed = (r.track[hi].lambda - r.track[lo].lambda) / (r.track[hi].t - r.track[lo].t);
        double res = sub_equation_residual(spec, cls, traj.snapshots[idx[q]], speed, dealias_fraction);
        r.sub_equation_residuals.push_back(res);
        ok = ok && res < tol.pred_tol;
      }
      r.verdict = ok ? Verdict::ConsistentSymmetricPrediction : Verdict::TheoremViolation;
      break;
    }
    default:
      break;
  }
  return r;
}

inline json to_json(const VerificationReport& r) {
  json j;
  j["classification"] = to_json(r.classification);
  j["verdict"] = to_string(r.verdict);
  j["defect_norm"] = "relative L2 (coefficient space, summed over components)";
  j["max_defect"] = r.max_defect;
  j["tolerances"] = {{"sym_tol", r.tolerances.sym_tol}, {"pred_tol", r.tolerances.pred_tol}};
  json track = json::array();
  for (const auto& s : r.track)
    track.push_back({{"t", s.t}, {"lambda", s.valid ? json(s.lambda) : json(nullptr)},
                     {"defect", s.defect}, {"valid", s.valid}});
  j["axis_track"] = track;
  if (r.speed) {
    json js;
    js["phase_regression"] = {{"c", r.speed->phase.c}, {"residual", r.speed->phase.residual}};
    if (r.speed->axis_slope)
      js["axis_slope"] = {{"c", r.speed->axis_slope->c}, {"residual", r.speed->axis_slope->residual}};
    js["modes_used"] = r.speed->modes_used;
    j["speed"] = js;
  }
  if (r.traveling_residual) j["traveling_residual"] = *r.traveling_residual;
  if (r.axis_drift) j["axis_drift"] = *r.axis_drift;
  if (r.spatial_variation) j["spatial_variation"] = *r.spatial_variation;
  if (r.temporal_change) j["temporal_change"] = *r.temporal_change;
  if (!r.sub_equation_residuals.empty()) j["sub_equation_residuals"] = r.sub_equation_residuals;
  if (r.flux_check) {
    j["flux_invertibility"] = {{"invertible", r.flux_check->invertible}, {"note", r.flux_check->note}};
    if (r.flux_check->witness) j["flux_invertibility"]["witness"] = *r.flux_check->witness;
  }
  j["diagnostics"] = r.diagnostics;
  return j;
}

}  // namespace symlab
