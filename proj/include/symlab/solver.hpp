// Pseudospectral right-hand side and exponential integrators on a periodic grid.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "symlab/equation.hpp"
#include "symlab/spectral.hpp"

namespace symlab {

enum class Scheme { ETDRK4, IFRK4 };

inline const char* to_string(Scheme s) { return s == Scheme::ETDRK4 ? "ETDRK4" : "IFRK4"; }

struct IntegratorConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  std::size_t snapshot_stride = 100;
  double dealias_fraction = 2.0 / 3.0;
  Scheme scheme = Scheme::ETDRK4;

  void check() const {
    if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
    if (!(t_end >= 0)) throw std::invalid_argument("t_end must be nonnegative");
    if (t_end > 0 && dt > t_end) throw std::invalid_argument("dt must not exceed t_end");
    if (snapshot_stride == 0) throw std::invalid_argument("snapshot_stride must be positive");
    if (!(dealias_fraction > 0 && dealias_fraction <= 1))
      throw std::invalid_argument("dealias_fraction must lie in (0, 1]");
  }
};

struct BlowUp {
  double time = 0.0;
  double norm_ratio = 0.0;
};

struct Trajectory {
  std::vector<SpectralState> snapshots;
  std::optional<BlowUp> blowup;
  std::size_t steps = 0;
  double max_hermitian_residual = 0.0;  // before each projection
};

inline constexpr double kBlowUpFactor = 1e8;
inline constexpr int kContourPoints = 32;

/// Symbols evaluated once on a grid. Degree-1 self-coupled terms form the
/// diagonal linear operator; everything else is the explicit remainder.
class CompiledEquation {
 public:
  CompiledEquation(const EquationSpec& spec, const Grid& grid, double dealias_fraction = 2.0 / 3.0)
      : spec_(spec), grid_(grid), dealias_(dealias_fraction) {
    const std::size_t n = grid.size();
    const double cutoff = dealias_fraction * static_cast<double>(n) / 2.0;
    keep_.resize(n);
    for (std::size_t j = 0; j < n; ++j)
      keep_[j] = j != grid.nyquist() && std::abs(static_cast<double>(grid.wavenumber(j))) <= cutoff;

    inv_left_.resize(spec.dimension);
    linear_.assign(spec.dimension, CoeffArray(n, cplx(0.0, 0.0)));
    rows_.resize(spec.dimension);
    for (std::size_t c = 0; c < spec.dimension; ++c) {
      inv_left_[c].resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        cplx p = eval_symbol(spec.left[c], grid.xi(j));
        inv_left_[c][j] = std::abs(p) > kLeftSymbolFloor ? 1.0 / p : cplx(0.0, 0.0);
      }
      for (const auto& t : spec.terms[c]) {
        CompiledTerm ct = compile_one(t);
        if (t.is_linear() && ct.component[0] == c) {
          for (std::size_t j = 0; j < n; ++j) linear_[c][j] += ct.outer[j] * ct.inner[0][j] * inv_left_[c][j];
        } else {
          rows_[c].push_back(std::move(ct));
        }
      }
    }
  }

  const Grid& grid() const { return grid_; }
  const EquationSpec& spec() const { return spec_; }
  const std::vector<CoeffArray>& linear_operator() const { return linear_; }

  /// Explicit remainder N(u_hat) = P^-1 * (nonlinear and cross-coupled terms).
  std::vector<CoeffArray> nonlinear(const std::vector<CoeffArray>& u) const {
    return apply(u, rows_, true);
  }

  /// Full time derivative of u_hat.
  std::vector<CoeffArray> rhs(const std::vector<CoeffArray>& u) const {
    auto out = nonlinear(u);
    for (std::size_t c = 0; c < out.size(); ++c)
      for (std::size_t j = 0; j < grid_.size(); ++j) out[c][j] += linear_[c][j] * u[c][j];
    return out;
  }

  /// Unscaled sum over an explicit list of terms (no division by P).
  std::vector<CoeffArray> apply_terms(const std::vector<CoeffArray>& u,
                                      const std::vector<std::vector<std::size_t>>& selected) const {
    std::vector<std::vector<CompiledTerm>> rows(spec_.dimension);
    for (std::size_t c = 0; c < spec_.dimension; ++c)
      for (std::size_t k : selected[c]) rows[c].push_back(compile_one(spec_.terms[c].at(k)));
    return apply(u, rows, false);
  }

 private:
  struct CompiledTerm {
    CoeffArray outer;  // coefficient folded in
    std::vector<CoeffArray> inner;
    std::vector<std::size_t> component;
  };

  CompiledTerm compile_one(const PseudoProductTerm& t) const {
    CompiledTerm ct;
    const std::size_t n = grid_.size();
    ct.outer.resize(n);
    for (std::size_t j = 0; j < n; ++j) ct.outer[j] = t.coefficient * eval_symbol(t.outer, grid_.xi(j));
    for (const auto& f : t.factors) {
      CoeffArray g(n);
      for (std::size_t j = 0; j < n; ++j) g[j] = eval_symbol(f.inner, grid_.xi(j));
      ct.inner.push_back(std::move(g));
      ct.component.push_back(f.component);
    }
    return ct;
  }

  std::vector<CoeffArray> apply(const std::vector<CoeffArray>& u,
                                const std::vector<std::vector<CompiledTerm>>& rows,
                                bool divide_left) const {
    const std::size_t n = grid_.size();
    std::vector<CoeffArray> out(spec_.dimension, CoeffArray(n, cplx(0.0, 0.0)));
    CoeffArray acc(n), work(n);
    for (std::size_t c = 0; c < spec_.dimension; ++c) {
      for (const auto& t : rows[c]) {
        if (t.inner.size() == 1) {
          const auto& g = t.inner[0];
          const auto& v = u[t.component[0]];
          for (std::size_t j = 0; j < n; ++j) acc[j] = g[j] * v[j];
        } else {
          // product in physical space of dealiased filtered factors
          std::fill(acc.begin(), acc.end(), cplx(1.0, 0.0));
          for (std::size_t f = 0; f < t.inner.size(); ++f) {
            const auto& g = t.inner[f];
            const auto& v = u[t.component[f]];
            for (std::size_t j = 0; j < n; ++j) work[j] = keep_[j] ? g[j] * v[j] : cplx(0.0, 0.0);
            fft::backward(work);
            for (std::size_t j = 0; j < n; ++j) acc[j] *= work[j];
          }
          fft::forward(acc);
          for (std::size_t j = 0; j < n; ++j)
            if (!keep_[j]) acc[j] = {0.0, 0.0};
        }
        for (std::size_t j = 0; j < n; ++j) out[c][j] += t.outer[j] * acc[j];
      }
      if (divide_left)
        for (std::size_t j = 0; j < n; ++j) out[c][j] *= inv_left_[c][j];
    }
    return out;
  }

  EquationSpec spec_;
  Grid grid_;
  double dealias_;
  std::vector<bool> keep_;
  std::vector<CoeffArray> inv_left_;
  std::vector<CoeffArray> linear_;
  std::vector<std::vector<CompiledTerm>> rows_;
};

/// Time derivative of u_hat for the equation on the state's grid.
inline SpectralState eval_rhs(const EquationSpec& spec, const SpectralState& state,
                              double dealias_fraction = 2.0 / 3.0) {
  CompiledEquation eq(spec, state.grid, dealias_fraction);
  SpectralState out = state;
  out.coeffs = eq.rhs(state.coeffs);
  return out;
}

namespace detail {

struct EtdCoefficients {
  CoeffArray e, e2, q, f1, f2, f3;
};

/// phi-function combinations by the mean over a circle of radius 1 about each
/// dt * l, which avoids the cancellation in (e^z - 1)/z for small |z|.
inline EtdCoefficients etd_coefficients(const CoeffArray& l, double dt) {
  const std::size_t n = l.size();
  EtdCoefficients k;
  k.e.resize(n);
  k.e2.resize(n);
  k.q.resize(n);
  k.f1.resize(n);
  k.f2.resize(n);
  k.f3.resize(n);
  std::array<cplx, kContourPoints> roots;
  for (int m = 0; m < kContourPoints; ++m) {
    double th = 2.0 * M_PI * (m + 0.5) / kContourPoints;
    roots[m] = {std::cos(th), std::sin(th)};
  }
  for (std::size_t j = 0; j < n; ++j) {
    cplx z0 = dt * l[j];
    k.e[j] = std::exp(z0);
    k.e2[j] = std::exp(0.5 * z0);
    cplx q = 0, a = 0, b = 0, c = 0;
    for (const auto& r : roots) {
      cplx z = z0 + r;
      cplx ez = std::exp(z);
      cplx z3 = z * z * z;
      q += (std::exp(0.5 * z) - 1.0) / z;
      a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
      b += (2.0 + z + ez * (z - 2.0)) / z3;
      c += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    const double w = dt / kContourPoints;
    k.q[j] = w * q;
    k.f1[j] = w * a;
    k.f2[j] = w * b;
    k.f3[j] = w * c;
  }
  return k;
}

using Field = std::vector<CoeffArray>;

inline bool finite(const Field& u) {
  for (const auto& c : u)
    for (const auto& v : c)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

}  // namespace detail

/// Integrates from ic.time to ic.time + cfg.t_end. The step count is
/// ceil(t_end/dt); dt is shrunk so the last step lands on t_end.
inline Trajectory integrate(const EquationSpec& spec, const SpectralState& ic, const IntegratorConfig& cfg) {
  cfg.check();
  if (ic.dimension() != spec.dimension) throw std::invalid_argument("initial state has wrong dimension");
  Trajectory traj;
  traj.snapshots.push_back(ic);
  if (cfg.t_end == 0.0) return traj;

  const CompiledEquation eq(spec, ic.grid, cfg.dealias_fraction);
  const std::size_t n = ic.grid.size();
  const std::size_t dim = spec.dimension;
  const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  const double h = cfg.t_end / static_cast<double>(steps);

  std::vector<detail::EtdCoefficients> coef;
  for (std::size_t c = 0; c < dim; ++c) coef.push_back(detail::etd_coefficients(eq.linear_operator()[c], h));

  SpectralState state = ic;
  project_hermitian(state);
  const double norm0 = std::max(norm2(state), 1e-300);
  detail::Field a(dim, CoeffArray(n)), b(dim, CoeffArray(n)), cc(dim, CoeffArray(n));

  for (std::size_t step = 1; step <= steps; ++step) {
    auto& v = state.coeffs;
    if (cfg.scheme == Scheme::ETDRK4) {
      auto nv = eq.nonlinear(v);
      for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t j = 0; j < n; ++j) a[c][j] = coef[c].e2[j] * v[c][j] + coef[c].q[j] * nv[c][j];
      auto na = eq.nonlinear(a);
      for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t j = 0; j < n; ++j) b[c][j] = coef[c].e2[j] * v[c][j] + coef[c].q[j] * na[c][j];
      auto nb = eq.nonlinear(b);
      for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t j = 0; j < n; ++j)
          cc[c][j] = coef[c].e2[j] * a[c][j] + coef[c].q[j] * (2.0 * nb[c][j] - nv[c][j]);
      auto nc = eq.nonlinear(cc);
      for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t j = 0; j < n; ++j)
          v[c][j] = coef[c].e[j] * v[c][j] + nv[c][j] * coef[c].f1[j] +
                    2.0 * (na[c][j] + nb[c][j]) * coef[c].f2[j] + nc[c][j] * coef[c].f3[j];
    } else {
      // integrating-factor RK4
      auto k1 = eq.nonlinear(v);
      for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t j = 0; j < n; ++j) a[c][j] = coef[c].e2[j] * (v[c][j] + 0.5 * h * k1[c][j]);
      auto k2 = eq.nonlinear(a);
      for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t j = 0; j < n; ++j) b[c][j] = coef[c].e2[j] * v[c][j] + 0.5 * h * k2[c][j];
      auto k3 = eq.nonlinear(b);
      for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t j = 0; j < n; ++j) cc[c][j] = coef[c].e[j] * v[c][j] + h * coef[c].e2[j] * k3[c][j];
      auto k4 = eq.nonlinear(cc);
      for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t j = 0; j < n; ++j)
          v[c][j] = coef[c].e[j] * v[c][j] +
                    h / 6.0 * (coef[c].e[j] * k1[c][j] + 2.0 * coef[c].e2[j] * (k2[c][j] + k3[c][j]) + k4[c][j]);
    }
    state.time = ic.time + h * static_cast<double>(step);
    traj.max_hermitian_residual = std::max(traj.max_hermitian_residual, hermitian_residual(state));
    project_hermitian(state);
    traj.steps = step;

    double ratio = detail::finite(state.coeffs) ? norm2(state) / norm0 : INFINITY;
    if (!(ratio <= kBlowUpFactor)) {
      traj.blowup = BlowUp{state.time, ratio};
      return traj;
    }
    if (step % cfg.snapshot_stride == 0 || step == steps) traj.snapshots.push_back(state);
  }
  return traj;
}

}  // namespace symlab
