// Periodic grid, Fourier coefficient state, transforms and translation.
#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

namespace symlab {

using cplx = std::complex<double>;
using CoeffArray = std::vector<cplx>;
using RealArray = std::vector<double>;

/// Uniform periodic grid on [0, L) with N points. Coefficients are stored in
/// FFT order: index j holds wavenumber k = j for j < N/2 and k = j - N otherwise,
/// so index N/2 is the Nyquist mode k = -N/2.
class Grid {
 public:
  Grid(std::size_t n, double length) : n_(n), length_(length) {
    if (n < 16 || (n & (n - 1)) != 0)
      throw std::invalid_argument("grid size must be a power of two >= 16");
    if (!(length > 0) || !std::isfinite(length))
      throw std::invalid_argument("grid period must be positive");
    auto xi = std::make_shared<std::vector<double>>(n);
    for (std::size_t j = 0; j < n; ++j) (*xi)[j] = 2.0 * M_PI * wavenumber(j) / length;
    xi_ = std::move(xi);
  }

  std::size_t size() const { return n_; }
  double period() const { return length_; }
  double dx() const { return length_ / static_cast<double>(n_); }
  double x(std::size_t j) const { return dx() * static_cast<double>(j); }

  long wavenumber(std::size_t j) const {
    return j < n_ / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n_);
  }
  std::size_t index(long k) const {
    long n = static_cast<long>(n_);
    return static_cast<std::size_t>(((k % n) + n) % n);
  }
  /// Index of -k for the mode at index j.
  std::size_t mirror(std::size_t j) const { return j == 0 ? 0 : n_ - j; }
  std::size_t nyquist() const { return n_ / 2; }

  std::span<const double> frequencies() const { return *xi_; }
  double xi(std::size_t j) const { return (*xi_)[j]; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.length_ == b.length_;
  }

 private:
  std::size_t n_;
  double length_;
  std::shared_ptr<const std::vector<double>> xi_;
};

/// Fourier-series coefficients u_hat_k of each component at one time:
/// u(x_j) = sum_k u_hat_k exp(i xi_k x_j).
struct SpectralState {
  Grid grid;
  double time = 0.0;
  std::vector<CoeffArray> coeffs;

  SpectralState(Grid g, std::size_t components)
      : grid(std::move(g)), coeffs(components, CoeffArray(grid.size())) {}

  std::size_t dimension() const { return coeffs.size(); }
};

namespace fft {

/// Cached FFTW plans per size. Planning is serialized; execution through the
/// new-array interface is thread-safe. FFTW_ESTIMATE keeps plans deterministic.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  struct Plans {
    fftw_plan forward;
    fftw_plan backward;
  };

  Plans get(std::size_t n) {
    std::lock_guard lock(mu_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    auto* buf = fftw_alloc_complex(n);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    int in = static_cast<int>(n);
    Plans p{fftw_plan_dft_1d(in, buf, buf, FFTW_FORWARD, flags),
            fftw_plan_dft_1d(in, buf, buf, FFTW_BACKWARD, flags)};
    fftw_free(buf);
    plans_.emplace(n, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

 private:
  PlanCache() = default;
  std::mutex mu_;
  std::map<std::size_t, Plans> plans_;
};

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

/// In-place: physical samples -> series coefficients (scaled by 1/N).
inline void forward(CoeffArray& data) {
  auto plans = PlanCache::instance().get(data.size());
  fftw_execute_dft(plans.forward, as_fftw(data.data()), as_fftw(data.data()));
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

/// In-place: series coefficients -> physical samples.
inline void backward(CoeffArray& data) {
  auto plans = PlanCache::instance().get(data.size());
  fftw_execute_dft(plans.backward, as_fftw(data.data()), as_fftw(data.data()));
}

}  // namespace fft

inline SpectralState transform_forward(const Grid& grid, const std::vector<RealArray>& values,
                                       double time = 0.0) {
  SpectralState s(grid, values.size());
  s.time = time;
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (values[c].size() != grid.size())
      throw std::invalid_argument("sample array length does not match grid size");
    for (std::size_t j = 0; j < grid.size(); ++j) s.coeffs[c][j] = {values[c][j], 0.0};
    fft::forward(s.coeffs[c]);
  }
  return s;
}

inline RealArray to_physical(const CoeffArray& coeffs) {
  CoeffArray work = coeffs;
  fft::backward(work);
  RealArray out(work.size());
  for (std::size_t j = 0; j < work.size(); ++j) out[j] = work[j].real();
  return out;
}

inline std::vector<RealArray> transform_inverse(const SpectralState& s) {
  std::vector<RealArray> out;
  out.reserve(s.dimension());
  for (const auto& c : s.coeffs) out.push_back(to_physical(c));
  return out;
}

/// Largest |u_hat_k - conj(u_hat_{-k})| relative to the state norm, with the
/// Nyquist mode counted as a violation unless it is zero.
inline double hermitian_residual(const SpectralState& s);

/// Enforce real-field symmetry: average each pair with its conjugate mirror,
/// make the mean real and zero the Nyquist mode.
inline void project_hermitian(SpectralState& s) {
  const auto& g = s.grid;
  const std::size_t n = g.size();
  for (auto& c : s.coeffs) {
    c[0] = {c[0].real(), 0.0};
    c[g.nyquist()] = {0.0, 0.0};
    for (std::size_t j = 1; j < n / 2; ++j) {
      cplx avg = 0.5 * (c[j] + std::conj(c[n - j]));
      c[j] = avg;
      c[n - j] = std::conj(avg);
    }
  }
}

inline double norm2(const SpectralState& s) {
  double acc = 0.0;
  for (const auto& c : s.coeffs)
    for (const auto& v : c) acc += std::norm(v);
  return std::sqrt(acc);
}

inline double norm2(const CoeffArray& c) {
  double acc = 0.0;
  for (const auto& v : c) acc += std::norm(v);
  return std::sqrt(acc);
}

inline double distance2(const SpectralState& a, const SpectralState& b) {
  if (a.dimension() != b.dimension() || !(a.grid == b.grid))
    throw std::invalid_argument("states live on different grids");
  double acc = 0.0;
  for (std::size_t c = 0; c < a.dimension(); ++c)
    for (std::size_t j = 0; j < a.grid.size(); ++j) acc += std::norm(a.coeffs[c][j] - b.coeffs[c][j]);
  return std::sqrt(acc);
}

inline double hermitian_residual(const SpectralState& s) {
  const std::size_t n = s.grid.size();
  double worst = 0.0;
  for (const auto& c : s.coeffs) {
    worst = std::max(worst, std::abs(c[0].imag()));
    worst = std::max(worst, std::abs(c[s.grid.nyquist()]));
    for (std::size_t j = 1; j < n / 2; ++j) worst = std::max(worst, std::abs(c[j] - std::conj(c[n - j])));
  }
  double nrm = norm2(s);
  return nrm > 0 ? worst / nrm : worst;
}

/// x -> u(x - s): multiplies each coefficient by exp(-i xi_k s).
inline SpectralState shift(const SpectralState& s, double distance) {
  SpectralState out = s;
  const auto& g = s.grid;
  for (std::size_t j = 0; j < g.size(); ++j) {
    // reduce modulo whole periods first so that shift by L is exactly the identity
    double cycles = static_cast<double>(g.wavenumber(j)) * distance / g.period();
    double phase = -2.0 * M_PI * (cycles - std::round(cycles));
    cplx rot(std::cos(phase), std::sin(phase));
    for (auto& c : out.coeffs) c[j] *= rot;
  }
  return out;
}

}  // namespace symlab
