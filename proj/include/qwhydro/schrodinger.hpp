#pragma once

// Free Schrödinger reference solutions, i∂_tψ = −(1/2m)∂_xxψ on [0, 2π):
// exact spectral propagation, Green-function quadrature, and the
// Jacobi–Anger series for the single-shock datum e^{im cos x}.

#include <optional>

#include "qwhydro/parallel.hpp"
#include "qwhydro/quadrature.hpp"
#include "qwhydro/spectral.hpp"
#include "qwhydro/special.hpp"

namespace qwhydro::schrodinger {

/// Multiplies mode k by e^{−ik²t/(2m)}.
inline Wavefunction spectral_propagate(const Wavefunction& psi, double mass, double t) {
  if (!(mass > 0.0)) throw Error("spectral_propagate: mass must be positive");
  if (psi.size() == 0) throw Error("spectral_propagate: empty wavefunction");
  Wavefunction out;
  out.time = psi.time + t;
  if (t == 0.0) {
    out.values = psi.values;
    return out;
  }
  out.values = spectral::apply_multiplier(std::span<const Complex>(psi.values),
                                          [&](long k, std::size_t) {
                                            const double kk = static_cast<double>(k);
                                            return std::polar(1.0, -kk * kk * t / (2.0 * mass));
                                          });
  return out;
}

/// Band-limited interpolant f(y) = Σ c_k e^{iky} of periodic samples. The
/// Nyquist mode of an even grid is split as a cosine.
class TrigInterpolant {
public:
  explicit TrigInterpolant(std::span<const Complex> samples) {
    const std::size_t n = samples.size();
    if (n == 0) throw Error("TrigInterpolant: no samples");
    const ComplexField c = spectral::forward(samples);
    double cmax = 0.0;
    for (const Complex& v : c) cmax = std::max(cmax, std::abs(v));
    for (std::size_t i = 0; i < n; ++i) {
      Complex v = c[i] / static_cast<double>(n);
      if (std::abs(v) * static_cast<double>(n) <= 1e-18 * cmax) continue;
      const long k = spectral::wavenumber(i, n);
      if (n % 2 == 0 && static_cast<std::size_t>(std::abs(k)) == n / 2) {
        modes_.push_back(k);
        coeffs_.push_back(v / 2.0);
        modes_.push_back(-k);
        coeffs_.push_back(v / 2.0);
      } else {
        modes_.push_back(k);
        coeffs_.push_back(v);
      }
    }
  }

  Complex operator()(double y) const {
    Complex sum = 0.0;
    for (std::size_t j = 0; j < modes_.size(); ++j)
      sum += coeffs_[j] * std::polar(1.0, static_cast<double>(modes_[j]) * y);
    return sum;
  }

  /// Largest |k| with a retained coefficient.
  long max_wavenumber() const {
    long m = 0;
    for (long k : modes_) m = std::max(m, std::abs(k));
    return m;
  }

private:
  std::vector<long> modes_;
  ComplexField coeffs_;
};

struct GreensOptions {
  /// Half-width of the integration window around each x; 0 selects
  /// v_max·t + 8 Fresnel lengths, v_max from the sampled phase gradient.
  double window = 0.0;
  double abs_tol = 1e-10;
  /// Flag the window when the truncation estimate exceeds this.
  double boundary_tol = 1e-6;
  /// Every this many output points the result is recomputed with a wider
  /// window to estimate truncation error.
  std::size_t probe_stride = 16;
};

struct GreensResult {
  Wavefunction psi;
  double window = 0.0;
  double boundary_estimate = 0.0;
  bool window_ok = true;
  bool converged = true;
};

namespace detail {

// Max |Im(ψ*∂ψ)|/(m|ψ|²) over the samples.
inline double max_velocity(std::span<const Complex> psi, double mass) {
  const ComplexField d = spectral::derivative(psi);
  double v = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double n = std::norm(psi[i]);
    if (n > 1e-20) v = std::max(v, std::abs((std::conj(psi[i]) * d[i]).imag()) / (mass * n));
  }
  return v;
}

}  // namespace detail

/// ψ(x,t) = ∫dy √(m/(2iπt))·e^{im(x−y)²/(2t)}·ψ₀(y) at every grid point,
/// with ψ₀ the trigonometric interpolant of the periodic samples. The
/// kernel is cut off smoothly: weight ½erfc((|y−x| − W)/σ), σ = ℓ/4 with
/// ℓ = √(2πt/m) the Fresnel length, integrated out to |y−x| = W + 2ℓ.
inline GreensResult greens_propagate(const Wavefunction& psi0, double mass, double t,
                                     const GreensOptions& opt = {}) {
  if (!(t > 0.0)) throw Error("greens_propagate: t must be positive");
  if (!(mass > 0.0)) throw Error("greens_propagate: mass must be positive");
  const std::size_t n = psi0.size();
  const TrigInterpolant f(psi0.values);
  const double fresnel = std::sqrt(kTwoPi * t / mass);
  const double vmax = detail::max_velocity(psi0.values, mass);
  const double window = opt.window > 0.0 ? opt.window : vmax * t + 8.0 * fresnel;
  if (window < 4.0 * fresnel) throw Error("greens_propagate: window shorter than 4 Fresnel lengths");
  double amp = 0.0;
  for (const Complex& v : psi0.values) amp = std::max(amp, std::abs(v));
  const Complex pref = std::sqrt(Complex(mass / (kTwoPi * t), 0.0) / kI);
  const double sigma = fresnel / 4.0;
  const double kmax = static_cast<double>(f.max_wavenumber());

  auto evaluate = [&](double x, double w, bool& ok) {
    const double reach = w + 2.0 * fresnel;
    auto integrand = [&](double y) -> Complex {
      const double d = y - x;
      const double taper = 0.5 * std::erfc((std::abs(d) - w) / sigma);
      return taper * std::polar(1.0, mass * d * d / (2.0 * t)) * f(y);
    };
    const double phase_span = mass * reach * reach / (2.0 * t) + 2.0 * reach * kmax;
    const auto segments = static_cast<std::size_t>(std::min(4000.0, phase_span / kPi + 8.0));
    const quadrature::Result r = quadrature::integrate(integrand, x - reach, x + reach,
                                                       opt.abs_tol * std::max(amp, 1e-300) /
                                                           std::abs(pref),
                                                       0.0, segments, 200000);
    ok = ok && r.converged;
    return pref * r.value;
  };

  GreensResult res;
  res.window = window;
  res.psi.values.resize(n);
  res.psi.time = psi0.time + t;
  std::vector<std::uint8_t> conv(n, 1);
  parallel_for(n, [&](std::size_t i) {
    bool ok = true;
    res.psi.values[i] = evaluate(periodic_spacing(n) * static_cast<double>(i), window, ok);
    conv[i] = ok;
  });
  const std::size_t stride = std::max<std::size_t>(1, opt.probe_stride);
  const std::size_t probes = (n + stride - 1) / stride;
  RealField diff(probes, 0.0);
  parallel_for(probes, [&](std::size_t j) {
    bool ok = true;
    const std::size_t i = j * stride;
    const Complex wide = evaluate(periodic_spacing(n) * static_cast<double>(i), 1.25 * window, ok);
    diff[j] = std::abs(wide - res.psi.values[i]);
  });
  for (double d : diff) res.boundary_estimate = std::max(res.boundary_estimate, d);
  res.window_ok = res.boundary_estimate <= opt.boundary_tol * std::max(amp, 1e-300);
  res.converged = std::all_of(conv.begin(), conv.end(), [](std::uint8_t c) { return c != 0; });
  return res;
}

/// Jacobi–Anger form of the single-shock solution (t₀ = 0, u_max = 1):
///   ψ(x,t) = Σ_k i^k J_k(m) e^{ikx − ik²t/(2m)}
///          = J₀(m) + 2Σ_{k≥1} i^k J_k(m) cos(kx) e^{−ik²t/(2m)}.
/// Truncated where |J_k(m)| < 1e-16, but never below k = m + 40·m^{1/3}.
class ShockSeries {
public:
  explicit ShockSeries(double mass) : mass_(mass) {
    if (!(mass > 0.0) || !std::isfinite(mass)) throw Error("ShockSeries: mass must be positive");
    const auto floor_k = static_cast<std::size_t>(std::ceil(mass + 40.0 * std::cbrt(mass)));
    RealField j = special::bessel_j_sequence(floor_k + 64, mass);
    std::size_t k_max = floor_k;
    while (k_max + 1 < j.size() && std::abs(j[k_max]) >= 1e-16) ++k_max;
    j.resize(k_max + 1);
    coeffs_.resize(k_max + 1);
    static constexpr Complex kPowI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (std::size_t k = 0; k <= k_max; ++k) coeffs_[k] = kPowI[k % 4] * j[k];
  }

  std::size_t order() const { return coeffs_.size() - 1; }
  double mass() const { return mass_; }

  /// i^k J_k(m)
  Complex coefficient(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : 0.0; }

  Complex operator()(double x, double t) const {
    const std::vector<Complex> c = timed(t);
    return sum(c, x);
  }

  ComplexField evaluate(std::span<const double> xs, double t) const {
    const std::vector<Complex> c = timed(t);
    ComplexField out(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) { out[i] = sum(c, xs[i]); });
    return out;
  }

private:
  std::vector<Complex> timed(double t) const {
    std::vector<Complex> c(coeffs_.size());
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      const double kk = static_cast<double>(k);
      c[k] = coeffs_[k] * std::polar(1.0, -kk * kk * t / (2.0 * mass_));
    }
    return c;
  }

  static Complex sum(const std::vector<Complex>& c, double x) {
    // highest orders first so the small terms are added before the large ones
    Complex acc = 0.0;
    for (std::size_t k = c.size() - 1; k >= 1; --k)
      acc += 2.0 * std::cos(static_cast<double>(k) * x) * c[k];
    return acc + c[0];
  }

  double mass_;
  std::vector<Complex> coeffs_;
};

inline Complex single_shock_psi(double x, double t, double mass) {
  if (!(t >= 0.0)) throw Error("single_shock_psi: t must be non-negative");
  return ShockSeries(mass)(x, t);
}

/// single_shock_psi on the n_sites periodic grid.
inline Wavefunction single_shock_grid(std::size_t n_sites, double t, double mass) {
  const RealField x = periodic_grid(n_sites);
  Wavefunction psi;
  psi.values = ShockSeries(mass).evaluate(x, t);
  psi.time = t;
  return psi;
}

struct HydroProfile {
  RealField n;
  RealField v;
  Mask valid;
};

/// n = |ψ|², v = Im(ψ*∂_xψ)/(m|ψ|²); sites with n ≤ threshold·max n are
/// masked (v = 0 there).
inline HydroProfile schrodinger_hydro(const Wavefunction& psi, double mass,
                                      double threshold = 1e-10) {
  if (!(mass > 0.0)) throw Error("schrodinger_hydro: mass must be positive");
  const std::size_t n = psi.size();
  const ComplexField d = spectral::derivative(std::span<const Complex>(psi.values));
  HydroProfile h{RealField(n), RealField(n, 0.0), Mask(n, 0)};
  double nmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    h.n[i] = std::norm(psi.values[i]);
    nmax = std::max(nmax, h.n[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (h.n[i] <= threshold * nmax || h.n[i] == 0.0) continue;
    h.v[i] = (std::conj(psi.values[i]) * d[i]).imag() / (mass * h.n[i]);
    h.valid[i] = 1;
  }
  return h;
}

}  // namespace qwhydro::schrodinger
