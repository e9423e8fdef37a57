#pragma once

// Fourier helpers on the periodic domain [0, 2π): integer wavenumbers,
// FFTW-backed transforms, spectral derivatives and phase unwrapping.

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "qwhydro/types.hpp"

namespace qwhydro::spectral {

namespace detail {

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;

inline Buffer make_buffer(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) throw Error("fftw_malloc failed");
  return Buffer(p);
}

// The FFTW planner is not reentrant. Plans are cached per (size, sign) and
// executed through the thread-safe new-array interface.
class PlanCache {
public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    Buffer in = make_buffer(n);
    Buffer out = make_buffer(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(), sign,
                                      FFTW_ESTIMATE);
    if (plan == nullptr) throw Error("fftw_plan_dft_1d failed");
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

inline ComplexField transform(std::span<const Complex> f, int sign) {
  const std::size_t n = f.size();
  if (n == 0) return {};
  fftw_plan plan = PlanCache::instance().get(n, sign);
  Buffer in = make_buffer(n);
  Buffer out = make_buffer(n);
  for (std::size_t i = 0; i < n; ++i) {
    in[i][0] = f[i].real();
    in[i][1] = f[i].imag();
  }
  fftw_execute_dft(plan, in.get(), out.get());
  ComplexField result(n);
  for (std::size_t i = 0; i < n; ++i) result[i] = Complex(out[i][0], out[i][1]);
  return result;
}

}  // namespace detail

/// Integer wavenumber of FFT bin i for an n-point transform. The Nyquist bin
/// of an even transform maps to +n/2.
inline long wavenumber(std::size_t i, std::size_t n) {
  const auto ii = static_cast<long>(i);
  const auto nn = static_cast<long>(n);
  return ii <= nn / 2 ? ii : ii - nn;
}

/// Unnormalized forward DFT, c_k = Σ f_n e^{-2πikn/N}.
inline ComplexField forward(std::span<const Complex> f) {
  return detail::transform(f, FFTW_FORWARD);
}

/// Inverse DFT including the 1/N factor.
inline ComplexField inverse(std::span<const Complex> c) {
  ComplexField f = detail::transform(c, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(c.size());
  for (Complex& v : f) v *= scale;
  return f;
}

inline ComplexField to_complex(std::span<const double> f) {
  return ComplexField(f.begin(), f.end());
}

/// Multiply each Fourier mode k by multiplier(k) and transform back.
template <typename Multiplier>
ComplexField apply_multiplier(std::span<const Complex> f, Multiplier&& multiplier) {
  ComplexField c = forward(f);
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i) c[i] *= multiplier(wavenumber(i, n), i);
  return inverse(c);
}

/// order-th derivative on [0, 2π). For odd orders the Nyquist mode of an
/// even grid is dropped (its derivative is not representable).
inline ComplexField derivative(std::span<const Complex> f, int order = 1) {
  const std::size_t n = f.size();
  return apply_multiplier(f, [n, order](long k, std::size_t) -> Complex {
    if (order % 2 == 1 && n % 2 == 0 && static_cast<std::size_t>(std::abs(k)) == n / 2)
      return 0.0;
    Complex m = 1.0;
    for (int j = 0; j < order; ++j) m *= Complex(0.0, static_cast<double>(k));
    return m;
  });
}

inline RealField derivative(std::span<const double> f, int order = 1) {
  ComplexField d = derivative(std::span<const Complex>(to_complex(f)), order);
  RealField out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i].real();
  return out;
}

/// Fraction of spectral energy carried by the top third of |k|.
inline double high_band_fraction(std::span<const Complex> f) {
  ComplexField c = forward(f);
  const std::size_t n = c.size();
  const auto cutoff = static_cast<long>(n / 3);
  double total = 0.0, high = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::norm(c[i]);
    total += e;
    if (std::abs(wavenumber(i, n)) > cutoff) high += e;
  }
  return total > 0.0 ? high / total : 0.0;
}

/// Result of cumulative 2π-jump removal along the periodic grid.
struct UnwrappedPhase {
  RealField values;
  /// Net number of 2π turns over one period.
  long winding = 0;
  /// False when some neighbour increment sits within tolerance of ±π,
  /// i.e. the phase is not resolved by the grid.
  bool ok = true;
};

/// Unwrap starting from the seed point x = 0 (index 0).
inline UnwrappedPhase unwrap(std::span<const double> phase, double ambiguity_tol = 1e-3) {
  UnwrappedPhase out;
  const std::size_t n = phase.size();
  out.values.resize(n);
  if (n == 0) return out;
  out.values[0] = phase[0];
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double next = phase[(i + 1) % n];
    const double step = wrap_angle(next - phase[i]);
    if (kPi - std::abs(step) < ambiguity_tol) out.ok = false;
    total += step;
    if (i + 1 < n) out.values[i + 1] = out.values[i] + step;
  }
  out.winding = std::lround(total / kTwoPi);
  return out;
}

/// ∂_x of a wrapped phase: unwrap, remove the winding ramp, differentiate the
/// periodic remainder spectrally, add the winding slope back.
inline RealField phase_derivative(std::span<const double> wrapped, bool* ok = nullptr) {
  UnwrappedPhase u = unwrap(wrapped);
  if (ok != nullptr) *ok = u.ok;
  const std::size_t n = wrapped.size();
  const double dx = periodic_spacing(n);
  const double slope = static_cast<double>(u.winding);
  RealField periodic(n);
  for (std::size_t i = 0; i < n; ++i)
    periodic[i] = u.values[i] - slope * dx * static_cast<double>(i);
  RealField d = derivative(std::span<const double>(periodic), 1);
  for (double& v : d) v += slope;
  return d;
}

/// Second derivative of a wrapped phase (the winding ramp drops out).
inline RealField phase_second_derivative(std::span<const double> wrapped) {
  UnwrappedPhase u = unwrap(wrapped);
  const std::size_t n = wrapped.size();
  const double dx = periodic_spacing(n);
  RealField periodic(n);
  for (std::size_t i = 0; i < n; ++i)
    periodic[i] = u.values[i] - static_cast<double>(u.winding) * dx * static_cast<double>(i);
  return derivative(std::span<const double>(periodic), 2);
}

}  // namespace qwhydro::spectral
