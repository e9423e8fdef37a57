#pragma once

// Initial data: exact Dirac plane waves and phase-modulated (WKB) states
// φ(x) = (q_max/m)·Σ a_i cos(k_i x + δ_i).

#include "qwhydro/spectral.hpp"
#include "qwhydro/walk.hpp"

namespace qwhydro::init {

struct ModeSpec {
  double amplitude = 0.0;
  long wavenumber = 1;
  double phase_offset = 0.0;
};

/// q_max is an absolute momentum; u_max = q_max/m.
struct ShockInitSpec {
  std::vector<ModeSpec> modes;
  double q_max = 0.0;
  double mass = 0.0;
};

inline void check_spec(const ShockInitSpec& spec, std::size_t n_sites) {
  if (spec.modes.empty()) throw Error("shock spec: at least one mode is required");
  if (!(spec.q_max >= 0.0) || !std::isfinite(spec.q_max))
    throw Error("shock spec: q_max must be finite and non-negative");
  if (!(spec.mass > 0.0)) throw Error("shock spec: mass must be positive");
  for (const ModeSpec& md : spec.modes) {
    if (md.wavenumber < 1 || static_cast<std::size_t>(md.wavenumber) > n_sites / 2)
      throw Error("shock spec: wavenumber " + std::to_string(md.wavenumber) +
                  " not resolvable on " + std::to_string(n_sites) + " sites");
    if (!std::isfinite(md.amplitude) || !std::isfinite(md.phase_offset))
      throw Error("shock spec: non-finite mode parameter");
  }
}

/// φ(x_n) on the periodic grid.
inline RealField phase_profile(const ShockInitSpec& spec, std::size_t n_sites) {
  check_spec(spec, n_sites);
  const RealField x = periodic_grid(n_sites);
  RealField phi(n_sites, 0.0);
  const double scale = spec.q_max / spec.mass;
  for (std::size_t i = 0; i < n_sites; ++i)
    for (const ModeSpec& md : spec.modes)
      phi[i] += scale * md.amplitude * std::cos(static_cast<double>(md.wavenumber) * x[i] + md.phase_offset);
  return phi;
}

/// Exact ∂_xφ for the cosine modes; cross-check for the spectral route.
inline RealField phase_gradient_exact(const ShockInitSpec& spec, std::size_t n_sites) {
  check_spec(spec, n_sites);
  const RealField x = periodic_grid(n_sites);
  RealField d(n_sites, 0.0);
  const double scale = spec.q_max / spec.mass;
  for (std::size_t i = 0; i < n_sites; ++i)
    for (const ModeSpec& md : spec.modes) {
      const double k = static_cast<double>(md.wavenumber);
      d[i] -= scale * md.amplitude * k * std::sin(k * x[i] + md.phase_offset);
    }
  return d;
}

namespace detail {

// Positive-energy amplitudes for reduced momentum q̃: √(√(1+q̃²) ∓ q̃)/√2.
// The smaller one is formed as 1/(s+|q̃|) to avoid cancellation.
inline std::pair<double, double> plane_amplitudes(double qr) {
  const double s = std::hypot(1.0, qr);
  const double big = s + std::abs(qr);
  const double small = 1.0 / big;  // s − |q̃|
  const double l = qr >= 0.0 ? small : big;
  const double r = qr >= 0.0 ? big : small;
  return {std::sqrt(l / 2.0), std::sqrt(r / 2.0)};
}

}  // namespace detail

/// Positive-energy Dirac plane wave with integer wavenumber q (absolute
/// units, q̃ = q/m), at time t: both components carry e^{i(qx − Et)},
/// E = √(q² + m²). Gives n = 1, j⁰ = √(1+q̃²), j¹ = q̃, φ₋ = 0.
inline SpinorField plane_wave(const WalkParams& params, double q, double t = 0.0) {
  if (params.n_sites == 0) throw Error("plane_wave: empty lattice");
  if (std::abs(q - std::round(q)) > 1e-9 || std::abs(q) > static_cast<double>(params.n_sites / 2))
    throw Error("plane_wave: q must be an integer wavenumber with |q| <= N/2");
  const double qr = q / params.mass;
  const auto [al, ar] = detail::plane_amplitudes(qr);
  const double energy = std::hypot(q, params.mass);
  SpinorField s(params.n_sites);
  for (std::size_t i = 0; i < params.n_sites; ++i) {
    const Complex ph = std::polar(1.0, q * params.position(i) - energy * t);
    s.left[i] = al * ph;
    s.right[i] = ar * ph;
  }
  return s;
}

/// Pointwise plane-wave (WKB) construction with local q̃(x) = ∂_xφ and total
/// phase m·φ(x). |q̃| ≥ 1 anywhere is rejected.
inline SpinorField phase_modulated_state(const WalkParams& params, const ShockInitSpec& spec) {
  if (std::abs(spec.mass - params.mass) > 1e-12 * params.mass)
    throw Error("phase_modulated_state: spec mass differs from walk mass");
  const RealField phi = phase_profile(spec, params.n_sites);
  const RealField qr = spectral::derivative(std::span<const double>(phi));
  SpinorField s(params.n_sites);
  for (std::size_t i = 0; i < params.n_sites; ++i) {
    if (std::abs(qr[i]) >= 1.0)
      throw Error("phase_modulated_state: |u(x)| >= 1 at site " + std::to_string(i));
    const auto [al, ar] = detail::plane_amplitudes(qr[i]);
    const Complex ph = std::polar(1.0, params.mass * phi[i]);
    s.left[i] = al * ph;
    s.right[i] = ar * ph;
  }
  return s;
}

/// ψ = e^{imφ(x)} on an n_sites grid, m = spec.mass.
inline Wavefunction schrodinger_initial(std::size_t n_sites, const ShockInitSpec& spec) {
  const RealField phi = phase_profile(spec, n_sites);
  Wavefunction psi;
  psi.values.resize(n_sites);
  for (std::size_t i = 0; i < n_sites; ++i) psi.values[i] = std::polar(1.0, spec.mass * phi[i]);
  return psi;
}

inline Wavefunction schrodinger_initial(const WalkParams& params, const ShockInitSpec& spec) {
  return schrodinger_initial(params.n_sites, spec);
}

}  // namespace qwhydro::init
