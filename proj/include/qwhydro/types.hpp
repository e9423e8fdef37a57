#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qwhydro {

using Complex = std::complex<double>;
using RealField = std::vector<double>;
using ComplexField = std::vector<Complex>;
/// Per-site validity flags (1 = valid). Kept as bytes so spans work.
using Mask = std::vector<std::uint8_t>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Raised for precondition violations and numerical failures.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Grid spacing of an N-site periodic lattice on [0, 2π).
inline double periodic_spacing(std::size_t n_sites) {
  return kTwoPi / static_cast<double>(n_sites);
}

inline RealField periodic_grid(std::size_t n_sites) {
  RealField x(n_sites);
  const double dx = periodic_spacing(n_sites);
  for (std::size_t i = 0; i < n_sites; ++i) x[i] = dx * static_cast<double>(i);
  return x;
}

/// Reduce an angle to the principal interval (-π, π].
inline double wrap_angle(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

/// Discrete L² norm sqrt(dx·Σ|f|²).
inline double l2_norm(std::span<const double> f, double dx) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return std::sqrt(dx * s);
}

inline double l2_norm(std::span<const Complex> f, double dx) {
  double s = 0.0;
  for (const Complex& v : f) s += std::norm(v);
  return std::sqrt(dx * s);
}

inline double max_abs(std::span<const double> f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

inline bool all_finite(std::span<const Complex> f) {
  for (const Complex& v : f)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

/// Single-component wavefunction on the periodic grid (the Galilean state).
struct Wavefunction {
  ComplexField values;
  double time = 0.0;

  std::size_t size() const { return values.size(); }
};

}  // namespace qwhydro
