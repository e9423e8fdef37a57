#pragma once

// Pearcey's integral I_P(T, X) = ∫dy e^{i(Xy + Ty² + y⁴)}, the cusp map of
// the single-shock solution onto it, and the zone I/II/III saddle-point
// approximations. Shock coordinates use Φ(u) = u⁴ − Tu² + Xu, so that
// ψ ≈ A·∫e^{iΦ} = A·I_P(−T, X).

#include <array>

#include "qwhydro/quadrature.hpp"
#include "qwhydro/special.hpp"

namespace qwhydro::asymptotics {

// ---------------------------------------------------------------------------
// Pearcey integral

namespace detail {

// max over real s of the log-modulus of the rotated integrand,
// g(s) = −sin4α s⁴ − T sin2α s² − X sinα s.
inline double growth(double T, double X, double alpha) {
  const double s4 = std::sin(4 * alpha), s2 = std::sin(2 * alpha), s1 = std::sin(alpha);
  auto g = [&](double s) { return -s4 * s * s * s * s - T * s2 * s * s - X * s1 * s; };
  const auto crit = special::depressed_cubic_roots(T * s2 / (2 * s4), X * s1 / (4 * s4));
  double best = 0.0;
  for (const Complex& c : crit)
    if (std::abs(c.imag()) <= 1e-9 * (1.0 + std::abs(c.real()))) best = std::max(best, g(c.real()));
  return best;
}

inline constexpr std::array<double, 4> kAngles = {kPi / 8, kPi / 16, kPi / 32, kPi / 64};
// Largest tolerated e-fold growth of the integrand before cancellation sets in.
inline constexpr double kMaxGrowth = 8.0;
// Integrand is cut where its log-modulus falls below this.
inline constexpr double kTailLog = -45.0;

}  // namespace detail

/// Contour angle used by pearcey(): π/8 unless the integrand would grow by
/// more than e⁸ on that line, then the first of π/16, π/32, π/64 that
/// stays below, else the one with least growth.
inline double pearcey_angle(double T, double X) {
  double best_alpha = detail::kAngles[0];
  double best = 1e300;
  for (double a : detail::kAngles) {
    const double g = detail::growth(T, X, a);
    if (g <= detail::kMaxGrowth) return a;
    if (g < best) {
      best = g;
      best_alpha = a;
    }
  }
  return best_alpha;
}

/// I_P(T, X) on the rotated line y = e^{iα}s, where e^{iy⁴} decays as
/// e^{−sin4α·s⁴}. Rotation is legitimate for α ∈ (0, π/4]: the swept
/// sectors keep Re(iy⁴) ≤ 0.
inline Complex pearcey(double T, double X, double tol = 1e-10) {
  if (!std::isfinite(T) || !std::isfinite(X)) throw Error("pearcey: non-finite argument");
  if (!(tol > 0.0) || tol > 1e-3) throw Error("pearcey: tol must lie in (0, 1e-3]");
  const double alpha = pearcey_angle(T, X);
  const Complex e1 = std::polar(1.0, alpha), e2 = std::polar(1.0, 2 * alpha),
                e4 = std::polar(1.0, 4 * alpha);
  const double s4 = std::sin(4 * alpha), s2 = std::sin(2 * alpha), s1 = std::sin(alpha);
  auto logmod = [&](double s) { return -s4 * s * s * s * s - T * s2 * s * s - X * s1 * s; };

  // outermost critical points of the log-modulus bound the tails
  double lo = 0.0, hi = 0.0;
  for (const Complex& c : special::depressed_cubic_roots(T * s2 / (2 * s4), X * s1 / (4 * s4)))
    if (std::abs(c.imag()) <= 1e-9 * (1.0 + std::abs(c.real()))) {
      lo = std::min(lo, c.real());
      hi = std::max(hi, c.real());
    }
  auto tail = [&](double start, double dir) {
    double inner = start, outer = start + dir;
    while (logmod(outer) > detail::kTailLog) {
      inner = outer;
      outer = start + 2.0 * (outer - start);
    }
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (inner + outer);
      (logmod(mid) > detail::kTailLog ? inner : outer) = mid;
    }
    return outer;
  };
  const double a = tail(lo, -1.0), b = tail(hi, 1.0);

  auto integrand = [&](double s) -> Complex {
    const double s_2 = s * s;
    return std::exp(kI * (X * e1 * s + T * e2 * s_2 + e4 * s_2 * s_2));
  };
  const double reach = std::max(std::abs(a), std::abs(b));
  const double span = std::abs(X) * std::cos(alpha) * reach +
                      std::abs(T) * std::cos(2 * alpha) * reach * reach +
                      std::cos(4 * alpha) * reach * reach * reach * reach;
  const auto segments = static_cast<std::size_t>(std::min(2000.0, span / kPi + 16.0));
  const quadrature::Result r = quadrature::integrate(integrand, a, b, 0.1 * tol, 0.0, segments);
  if (!r.converged) throw Error("pearcey: quadrature did not converge");
  return e1 * r.value;
}

/// Second method: the real-line integral with a smooth erfc cut-off at
/// |y| = R beyond every real stationary point. The taper half-width σ is
/// chosen so that Φ′σ ≥ 12 across the taper, which makes the cut-off error
/// of order e^{−72}.
inline Complex pearcey_direct(double T, double X, double tol = 1e-10) {
  if (!std::isfinite(T) || !std::isfinite(X)) throw Error("pearcey_direct: non-finite argument");
  auto dphi = [&](double y) { return 4 * y * y * y + 2 * T * y + X; };
  double umax = 0.0;
  for (const Complex& c : special::depressed_cubic_roots(T / 2, X / 4))
    if (std::abs(c.imag()) <= 1e-9 * (1.0 + std::abs(c.real())))
      umax = std::max(umax, std::abs(c.real()));
  // also the inflection points of the phase, where Φ′ is smallest
  if (T < 0) umax = std::max(umax, std::sqrt(-T / 6));
  const double sigma = 1.0 / 6.0;
  double R = umax + 2.0;
  while (std::min(std::abs(dphi(R - 1.0)), std::abs(dphi(-(R - 1.0)))) * sigma < 12.0) R += 0.5;
  auto integrand = [&](double y) -> Complex {
    const double w = 0.5 * std::erfc((std::abs(y) - R) / sigma);
    const double y2 = y * y;
    return w * std::polar(1.0, X * y + T * y2 + y2 * y2);
  };
  const double reach = R + 1.0;
  const double span = std::pow(reach, 4) + std::abs(T) * reach * reach + std::abs(X) * reach;
  const auto segments = static_cast<std::size_t>(std::min(20000.0, span / kPi + 16.0));
  const quadrature::Result r =
      quadrature::integrate(integrand, -reach, reach, 0.1 * tol, 0.0, segments, 400000);
  if (!r.converged) throw Error("pearcey_direct: quadrature did not converge");
  return r.value;
}

// ---------------------------------------------------------------------------
// Shock coordinates

/// a = m/4!, ε = 1/m.
struct ShockChart {
  double mass = 0.0;
  double a = 0.0;
  double eps = 0.0;
};

inline ShockChart make_chart(double mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw Error("make_chart: mass must be positive");
  return {mass, mass / 24.0, 1.0 / mass};
}

struct ShockCoords {
  double T = 0.0;
  double X = 0.0;
  Complex A{};
};

/// Expanding cos y to fourth order in the single-shock integral and scaling
/// y = a^{−1/4}s gives ψ ≈ A·∫ds e^{i(s⁴ − Ts² + Xs)} with
///   T = a^{−1/2}(t−1)/(2εt),  X = −a^{−1/4}x/(εt),
///   A = e^{i(1 + x²/(2t))/ε}·(2iπtε√a)^{−1/2}.
inline ShockCoords shock_map(double x, double t, const ShockChart& chart) {
  if (!(t > 0.0)) throw Error("shock_map: t must be positive");
  ShockCoords c;
  c.T = (t - 1.0) / (std::sqrt(chart.a) * 2.0 * chart.eps * t);
  c.X = -x / (std::pow(chart.a, 0.25) * chart.eps * t);
  const Complex phase = std::polar(1.0, (1.0 + x * x / (2.0 * t)) / chart.eps);
  c.A = phase / std::sqrt(Complex(0.0, kTwoPi * t * chart.eps * std::sqrt(chart.a)));
  return c;
}

/// A·I_P(−T, X).
inline Complex pearcey_shock_approx(double x, double t, const ShockChart& chart,
                                    double tol = 1e-10) {
  const ShockCoords c = shock_map(x, t, chart);
  return c.A * pearcey(-c.T, c.X, tol);
}

// ---------------------------------------------------------------------------
// Saddles of Φ(u) = u⁴ − Tu² + Xu

inline Complex phi(Complex u, double T, double X) {
  const Complex u2 = u * u;
  return u2 * u2 - T * u2 + X * u;
}
inline Complex phi_prime(Complex u, double T, double X) { return 4.0 * u * u * u - 2.0 * T * u + X; }
inline Complex phi_second(Complex u, double T) { return 12.0 * u * u - 2.0 * T; }

/// Roots of Φ′(u) = 4u³ − 2Tu + X, sorted by real part.
inline std::array<Complex, 3> saddle_points(double T, double X) {
  if (!std::isfinite(T) || !std::isfinite(X)) throw Error("saddle_points: non-finite argument");
  return special::depressed_cubic_roots(-T / 2.0, X / 4.0);
}

/// Discriminant of Φ′ up to the positive factor 16: T³/2 − 27X²/16.
/// Positive: three real saddles. The caustic Δ = 0 reads 8T³ = 27X².
inline double discriminant(double T, double X) { return T * T * T / 2.0 - 27.0 * X * X / 16.0; }

/// √(2πi/Φ″)·e^{iΦ} at a simple saddle. The principal root matches the
/// steepest-descent direction e^{±iπ/4} for real saddles.
inline Complex saddle_term(Complex u, double T, double X) {
  const Complex d2 = phi_second(u, T);
  if (std::abs(d2) < 1e-12) throw Error("saddle_term: degenerate saddle (Φ'' = 0)");
  return std::sqrt(kTwoPi * kI / d2) * std::exp(kI * phi(u, T, X));
}

/// The pair of saddles that coalesce on the fold, for X ≥ 0 (the integral
/// is even in X). ζ is the Airy variable of the cubic normal form
/// Φ = Φ₀ + s³/3 − ζs: positive when the pair is real, negative when it is
/// complex conjugate.
struct FoldPair {
  Complex ua;    ///< Φ'' < 0 (real pair) or Im Φ < 0 (complex pair)
  Complex ub;
  Complex iso;   ///< the third, real saddle
  double zeta = 0.0;
  bool real_pair = true;
};

inline FoldPair fold_pair(double T, double X) {
  const double ax = std::abs(X);
  const std::array<Complex, 3> r = saddle_points(T, ax);
  FoldPair f;
  if (discriminant(T, ax) > 0.0) {
    // min, max, min of Φ; with X ≥ 0 the right pair coalesces
    f.iso = r[0].real();
    f.ua = r[1].real();
    f.ub = r[2].real();
    const double d = phi(f.ua, T, ax).real() - phi(f.ub, T, ax).real();
    f.zeta = std::pow(0.75 * std::max(0.0, d), 2.0 / 3.0);
    f.real_pair = true;
    return f;
  }
  std::size_t k = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (std::abs(r[i].imag()) < std::abs(r[k].imag())) k = i;
  f.iso = r[k].real();
  const Complex p = r[(k + 1) % 3], q = r[(k + 2) % 3];
  const Complex pp = phi(p, T, ax);
  f.ua = pp.imag() <= 0.0 ? p : q;
  f.ub = pp.imag() <= 0.0 ? q : p;
  f.zeta = -std::pow(1.5 * std::abs(phi(f.ua, T, ax).imag()), 2.0 / 3.0);
  f.real_pair = false;
  return f;
}

// ---------------------------------------------------------------------------
// Zones

enum class Zone { I = 1, II = 2, III = 3 };

inline const char* zone_name(Zone z) {
  switch (z) {
    case Zone::I: return "I";
    case Zone::II: return "II";
    case Zone::III: return "III";
  }
  return "?";
}

/// Airy-variable half-width of zone II.
inline constexpr double kDefaultBand = 2.0;
/// Cusp core |T| ≤ 2, |X| ≤ 2^{3/2}: all three saddles interact there and
/// no two-saddle reduction is reliable.
inline constexpr double kCoreT = 2.0;

struct PearceyPoint {
  double T = 0.0;
  double X = 0.0;
  double discriminant = 0.0;
  double zeta = 0.0;
  Zone zone = Zone::II;
  bool low_confidence = false;
};

inline bool in_cusp_core(double T, double X) {
  return std::abs(T) <= kCoreT && std::abs(X) <= std::pow(kCoreT, 1.5);
}

/// Zone II: the cusp core, or T > 0 with |ζ| ≤ band (near the fold lines).
/// Elsewhere the sign of Δ decides between I and III. The fold only exists
/// for T > 0; for T < 0 the conjugate pair never coalesces, so ζ is not used.
inline PearceyPoint classify_zone(double T, double X, double band = kDefaultBand) {
  if (!(band > 0.0)) throw Error("classify_zone: band must be positive");
  PearceyPoint p;
  p.T = T;
  p.X = X;
  p.discriminant = discriminant(T, X);
  p.zeta = fold_pair(T, X).zeta;
  if (in_cusp_core(T, X)) {
    p.zone = Zone::II;
    p.low_confidence = true;
  } else if (T > 0.0 && std::abs(p.zeta) <= band) {
    p.zone = Zone::II;
  } else {
    p.zone = p.discriminant > 0.0 ? Zone::III : Zone::I;
  }
  return p;
}

/// Approximation of ∫e^{iΦ(u)}du plus the zone it is meant for.
struct ZoneValue {
  Complex value{};
  Zone zone = Zone::I;
  bool low_confidence = false;
};

/// Zone I: single real saddle.
inline Complex zone1_saddle(double T, double X) {
  if (!(discriminant(T, X) < 0.0)) throw Error("zone1_saddle: (T, X) has three real saddles");
  const std::array<Complex, 3> r = saddle_points(T, X);
  std::size_t k = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (std::abs(r[i].imag()) < std::abs(r[k].imag())) k = i;
  return saddle_term(r[k].real(), T, X);
}

/// Zone III: sum of the three real saddle contributions. `keep` selects
/// which of the saddles (sorted by position) are included.
inline Complex zone3_saddles(double T, double X, std::array<bool, 3> keep = {true, true, true}) {
  if (!(discriminant(T, X) > 0.0)) throw Error("zone3_saddles: (T, X) has one real saddle");
  const std::array<Complex, 3> r = saddle_points(T, X);
  Complex sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    if (keep[i]) sum += saddle_term(r[i].real(), T, X);
  return sum;
}

/// Below this T the fold pair is too close to the cusp for the cubic normal
/// form; zone II is then evaluated at T = kAiryEdgeT.
inline constexpr double kAiryEdgeT = 0.5;

/// Zone II: uniform Airy reduction of the coalescing pair (ua, ub) plus the
/// isolated saddle as a simple term. Mapping Φ(u) = Φ₀ + s³/3 − ζs sends
/// ua ↦ −√ζ, ub ↦ +√ζ; with du/ds ≈ p₀ + q₀s,
///   ∫e^{iΦ} ≈ e^{iΦ₀}·2π·(p₀Ai(−ζ) − iq₀Ai′(−ζ)) + iso.
/// Real pair (ζ > 0): (du/ds)² = 2s/Φ''(u) at the saddles, so
///   g_{a,b} = √(2√ζ/|Φ''|), p₀ = (g_a+g_b)/2, q₀ = (g_b−g_a)/(2√ζ),
///   Φ₀ = (Φ(ua)+Φ(ub))/2, ζ = (¾(Φ(ua)−Φ(ub)))^{2/3}.
/// Complex pair (ζ = −κ² < 0): ua ↦ −iκ, g_a = √(−2iκ/Φ''(ua)),
///   p₀ = Re g_a, q₀ = −Im g_a/κ, Φ₀ = Re Φ(ua), κ³ = (3/2)|Im Φ(ua)|.
/// |ζ| < 1e-4: Taylor limit at the inflection u_c = √(T/6) with
///   c₃ = Φ''' = 24u_c, κ = (c₃/2)^{1/3}: p₀ = 1/κ, q₀ = −4/(c₃κ²).
inline ZoneValue zone2_airy(double T, double X) {
  ZoneValue out;
  out.zone = Zone::II;
  out.low_confidence = in_cusp_core(T, X);
  if (!std::isfinite(T) || !std::isfinite(X)) throw Error("zone2_airy: non-finite argument");
  if (T < kAiryEdgeT) {
    T = kAiryEdgeT;
    out.low_confidence = true;
  }
  const double ax = std::abs(X);
  const FoldPair f = fold_pair(T, ax);
  double p0, q0, phi0;
  const double zeta = f.zeta;
  if (std::abs(zeta) < 1e-4) {
    const double uc = std::sqrt(T / 6.0);
    const double c3 = 24.0 * uc;
    const double kappa = std::cbrt(c3 / 2.0);
    p0 = 1.0 / kappa;
    q0 = -4.0 / (c3 * kappa * kappa);
    phi0 = phi(uc, T, ax).real();
  } else if (f.real_pair) {
    const double rz = std::sqrt(zeta);
    const double ga = std::sqrt(2.0 * rz / std::abs(phi_second(f.ua, T).real()));
    const double gb = std::sqrt(2.0 * rz / std::abs(phi_second(f.ub, T).real()));
    p0 = 0.5 * (ga + gb);
    q0 = (gb - ga) / (2.0 * rz);
    phi0 = 0.5 * (phi(f.ua, T, ax).real() + phi(f.ub, T, ax).real());
  } else {
    const double kappa = std::sqrt(-zeta);
    const Complex ga = std::sqrt(-2.0 * kI * kappa / phi_second(f.ua, T));
    p0 = ga.real();
    q0 = -ga.imag() / kappa;
    phi0 = phi(f.ua, T, ax).real();
  }
  const double ai = special::airy(-zeta), aip = special::airy_prime(-zeta);
  out.value = std::polar(kTwoPi, phi0) * (p0 * ai - kI * q0 * aip) + saddle_term(f.iso, T, ax);
  return out;
}

/// Composite approximation: dispatches on classify_zone.
inline ZoneValue zone_approx(double T, double X, double band = kDefaultBand) {
  const PearceyPoint p = classify_zone(T, X, band);
  ZoneValue v;
  switch (p.zone) {
    case Zone::I: v.value = zone1_saddle(T, X); break;
    case Zone::III: v.value = zone3_saddles(T, X); break;
    case Zone::II: v = zone2_airy(T, X); break;
  }
  v.zone = p.zone;
  v.low_confidence = v.low_confidence || p.low_confidence;
  return v;
}

// (x, t) forms: multiply by A and enforce the zone precondition.

namespace detail {
inline ShockCoords checked(double x, double t, const ShockChart& chart, Zone want, double band,
                           const char* who, PearceyPoint* pp) {
  const ShockCoords c = shock_map(x, t, chart);
  *pp = classify_zone(c.T, c.X, band);
  if (pp->zone != want)
    throw Error(std::string(who) + ": point lies in zone " + zone_name(pp->zone));
  return c;
}
}  // namespace detail

inline ZoneValue zone1_saddle_approx(double x, double t, const ShockChart& chart,
                                     double band = kDefaultBand) {
  PearceyPoint p;
  const ShockCoords c = detail::checked(x, t, chart, Zone::I, band, "zone1_saddle_approx", &p);
  return {c.A * zone1_saddle(c.T, c.X), Zone::I, false};
}

inline ZoneValue zone2_airy_approx(double x, double t, const ShockChart& chart,
                                   double band = kDefaultBand) {
  PearceyPoint p;
  const ShockCoords c = detail::checked(x, t, chart, Zone::II, band, "zone2_airy_approx", &p);
  ZoneValue v = zone2_airy(c.T, c.X);
  v.value *= c.A;
  v.low_confidence = v.low_confidence || p.low_confidence;
  return v;
}

inline ZoneValue zone3_multi_saddle(double x, double t, const ShockChart& chart,
                                    double band = kDefaultBand) {
  PearceyPoint p;
  const ShockCoords c = detail::checked(x, t, chart, Zone::III, band, "zone3_multi_saddle", &p);
  return {c.A * zone3_saddles(c.T, c.X), Zone::III, false};
}

inline ZoneValue composite_approx(double x, double t, const ShockChart& chart,
                                  double band = kDefaultBand) {
  const ShockCoords c = shock_map(x, t, chart);
  ZoneValue v = zone_approx(c.T, c.X, band);
  v.value *= c.A;
  return v;
}

}  // namespace qwhydro::asymptotics
