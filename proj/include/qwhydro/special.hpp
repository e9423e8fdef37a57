#pragma once

// Special functions used by the shock oracles and asymptotics:
// Airy Ai/Ai', integer-order Bessel J_k sequences, and cubic roots.

#include <algorithm>
#include <array>

#include "qwhydro/types.hpp"

namespace qwhydro::special {

namespace detail {

inline constexpr double kAi0 = 0.355028053887817239260063186004183;   // Ai(0)
inline constexpr double kAip0 = 0.258819403792806798405183560189203;  // -Ai'(0)

// Power series about 0. Accurate to ~1e-13 absolute on [-7, 5]; cancellation
// grows like exp((2/3)|z|^{3/2}) outside that range.
struct AiryPair {
  double ai, aip;
};

inline AiryPair airy_series(double z) {
  const double z3 = z * z * z;
  // f = Σ F_k z^{3k}, g = Σ G_k z^{3k+1}
  double f = 1.0, g = z, fp = 0.0, gp = 1.0;
  double fk = 1.0, gk = z;
  for (int k = 0; k < 200; ++k) {
    const double kk = static_cast<double>(k);
    fk *= z3 / ((3 * kk + 2) * (3 * kk + 3));
    gk *= z3 / ((3 * kk + 3) * (3 * kk + 4));
    f += fk;
    g += gk;
    // f' term for index k+1 is 3(k+1) F_{k+1} z^{3k+2} = 3(k+1) fk / z
    // computed without dividing by z:
    const double fpk = fk * 3 * (kk + 1);
    const double gpk = gk * (3 * kk + 4);
    if (z != 0.0) {
      fp += fpk / z;
      gp += gpk / z;
    }
    if (std::abs(fk) < 1e-18 * std::abs(f) && std::abs(gk) <= 1e-18 * (std::abs(g) + 1e-300) &&
        k > 2)
      break;
  }
  return {kAi0 * f - kAip0 * g, kAi0 * fp - kAip0 * gp};
}

// Coefficients u_k, v_k of the large-argument expansions.
inline std::array<double, 40> airy_u() {
  std::array<double, 40> u{};
  u[0] = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double kk = k;
    u[k] = u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / ((2 * kk - 1) * 216.0 * kk);
  }
  return u;
}

inline AiryPair airy_asymptotic_positive(double z) {
  static const std::array<double, 40> u = airy_u();
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  double s_ai = 0.0, s_aip = 0.0, term_prev = 1e300, zpow = 1.0;
  for (int k = 0; k < 40; ++k) {
    const double kk = k;
    const double uk = u[k];
    const double vk = k == 0 ? 1.0 : -(6 * kk + 1) / (6 * kk - 1) * uk;
    const double t = uk / zpow;
    if (std::abs(t) > term_prev) break;  // optimal truncation
    term_prev = std::abs(t);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    s_ai += sign * t;
    s_aip += sign * vk / zpow;
    zpow *= zeta;
  }
  const double pref = std::exp(-zeta) / (2.0 * std::sqrt(kPi));
  const double z14 = std::pow(z, 0.25);
  return {pref / z14 * s_ai, -pref * z14 * s_aip};
}

inline AiryPair airy_asymptotic_negative(double z) {
  static const std::array<double, 40> u = airy_u();
  const double x = -z;
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, zpow = 1.0, term_prev = 1e300;
  for (int k = 0; k < 40; ++k) {
    const double kk = k;
    const double uk = u[k];
    const double vk = k == 0 ? 1.0 : -(6 * kk + 1) / (6 * kk - 1) * uk;
    const double t = uk / zpow;
    if (std::abs(t) > term_prev) break;
    term_prev = std::abs(t);
    // k = 2j contributes (-1)^j to P/R; k = 2j+1 contributes (-1)^j to Q/S
    const int j = k / 2;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sign * t;
      r += sign * vk / zpow;
    } else {
      q += sign * t;
      s += sign * vk / zpow;
    }
    zpow *= zeta;
  }
  const double phase = zeta - kPi / 4.0;
  const double c = std::cos(phase), sn = std::sin(phase);
  const double x14 = std::pow(x, 0.25);
  const double rs = 1.0 / std::sqrt(kPi);
  return {rs / x14 * (c * p + sn * q), rs * x14 * (sn * r - c * s)};
}

inline constexpr double kSeriesUpper = 5.0;
inline constexpr double kSeriesLower = -7.0;

inline AiryPair airy_pair(double z) {
  if (z > kSeriesUpper) return airy_asymptotic_positive(z);
  if (z < kSeriesLower) return airy_asymptotic_negative(z);
  return airy_series(z);
}

}  // namespace detail

/// Airy function Ai(z). Maclaurin series on [-7, 5], asymptotic expansions
/// (optimally truncated) outside; absolute error below 1e-10.
inline double airy(double z) {
  if (!std::isfinite(z)) throw Error("airy: non-finite argument");
  return detail::airy_pair(z).ai;
}

/// Derivative Ai'(z), same construction as airy().
inline double airy_prime(double z) {
  if (!std::isfinite(z)) throw Error("airy_prime: non-finite argument");
  return detail::airy_pair(z).aip;
}

/// J_0(x) ... J_{order_max}(x) for x > 0 by Miller's backward recurrence,
/// normalized with J_0 + 2ΣJ_{2k} = 1.
inline RealField bessel_j_sequence(std::size_t order_max, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw Error("bessel_j_sequence: x must be positive");
  const auto start_order = static_cast<std::size_t>(
      std::max<double>(static_cast<double>(order_max), x) + 30.0 +
      std::ceil(std::sqrt(60.0 * std::max<double>(static_cast<double>(order_max), x))));
  const std::size_t top = start_order + (start_order % 2);  // even start
  RealField j(order_max + 1, 0.0);
  double next = 0.0;   // J_{k+1}
  double cur = 1e-300; // J_k, arbitrary seed
  double norm = 0.0;
  constexpr double kBig = 1e250;
  for (std::size_t k = top; k-- > 0;) {
    // J_k = (2(k+1)/x) J_{k+1} - J_{k+2}; on entry cur = J_{k+1}, next = J_{k+2}
    const double val = 2.0 * static_cast<double>(k + 1) / x * cur - next;
    next = cur;
    cur = val;
    if (k <= order_max) j[k] = cur;
    if (k % 2 == 0) norm += (k == 0 ? cur : 2.0 * cur);
    if (std::abs(cur) > kBig) {
      const double s = 1.0 / kBig;
      cur *= s;
      next *= s;
      norm *= s;
      for (std::size_t i = k; i <= order_max; ++i) j[i] *= s;
    }
  }
  for (double& v : j) v /= norm;
  return j;
}

/// Roots of the depressed cubic u³ + p·u + q = 0, polished by Newton steps
/// and sorted by (real, imag).
inline std::array<Complex, 3> depressed_cubic_roots(double p, double q) {
  std::array<Complex, 3> roots;
  const double disc = -(4.0 * p * p * p + 27.0 * q * q);  // > 0: three real roots
  if (p == 0.0 && q == 0.0) {
    roots = {Complex{0.0}, Complex{0.0}, Complex{0.0}};
    return roots;
  }
  if (disc > 0.0) {
    // trigonometric form, no cancellation
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) roots[k] = m * std::cos(theta - kTwoPi * k / 3.0);
  } else {
    // Cardano with the sign choice that avoids subtracting close numbers
    const double sq = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
    const double a = -std::copysign(std::cbrt(std::abs(q) / 2.0 + sq), q);
    const double b = (a != 0.0) ? -p / (3.0 * a) : 0.0;
    const double re = -(a + b) / 2.0;
    const double im = std::sqrt(3.0) / 2.0 * (a - b);
    roots = {Complex{a + b, 0.0}, Complex{re, im}, Complex{re, -im}};
  }
  for (Complex& r : roots) {
    for (int it = 0; it < 3; ++it) {
      const Complex f = r * r * r + p * r + q;
      const Complex df = 3.0 * r * r + p;
      if (std::abs(df) < 1e-300) break;
      const Complex nr = r - f / df;
      if (!std::isfinite(nr.real()) || !std::isfinite(nr.imag())) break;
      if (std::abs(nr * nr * nr + p * nr + q) >= std::abs(f)) break;
      r = nr;
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Complex& x, const Complex& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return roots;
}

}  // namespace qwhydro::special
