#pragma once

// Non-relativistic expansion of the Dirac spinor, with c explicit.
// Ψ_{L/R} = Ψ̄_{L/R}·e^{−imc²t}; Ψ̄_L = r·e^{iφ}. The expansion parameter is
// a = 1/(mc) times a gradient, i.e. ν ~ (momentum)/(mc).
//
// With the Dirac components (∂_t ∓ c∂_x)Ψ_{L/R} = −imc²Ψ_{R/L} and
// ∂_tΨ̄ = (i/2m)∂_xxΨ̄ at leading order:
//   Ψ̄_R = Ψ̄_L + (1/imc)∂_xΨ̄_L − (1/2m²c²)∂_xxΨ̄_L + O(ν³)
//   Ψ̄_L = Ψ̄_R − (1/imc)∂_xΨ̄_R − (1/2m²c²)∂_xxΨ̄_R + O(ν³)

#include "json.hpp"

#include <functional>

#include "qwhydro/madelung.hpp"
#include "qwhydro/schrodinger.hpp"

namespace qwhydro::nonrel {

enum class Order { first = 1, second = 2 };

struct NRFields {
  RealField r;    ///< |Ψ̄_L|
  RealField phi;  ///< arg Ψ̄_L, unwrapped from x = 0
  double mass = 0.0;
  double light_speed = 1.0;
};

/// Top-third spectral energy allowed before derivatives are refused.
inline constexpr double kBandLimit = 1e-6;

inline void check_band_limit(std::span<const Complex> f, const char* who) {
  const double frac = spectral::high_band_fraction(f);
  if (frac >= kBandLimit)
    throw Error(std::string(who) + ": field not band-limited (top-third energy " +
                std::to_string(frac) + ")");
}

/// Multiply both components by e^{+imc²t}.
inline SpinorField strip_rest_phase(const SpinorField& psi, double mass, double c, double t) {
  const Complex f = std::polar(1.0, mass * c * c * t);
  SpinorField out = psi;
  for (Complex& v : out.left) v *= f;
  for (Complex& v : out.right) v *= f;
  return out;
}

inline NRFields fields_from_left(std::span<const Complex> left_bar, double mass, double c) {
  if (!(mass > 0.0) || !(c > 0.0)) throw Error("fields_from_left: mass and c must be positive");
  check_band_limit(left_bar, "fields_from_left");
  NRFields f;
  f.mass = mass;
  f.light_speed = c;
  RealField wrapped(left_bar.size());
  f.r.resize(left_bar.size());
  for (std::size_t i = 0; i < left_bar.size(); ++i) {
    f.r[i] = std::abs(left_bar[i]);
    wrapped[i] = std::arg(left_bar[i]);
  }
  f.phi = spectral::unwrap(wrapped).values;
  return f;
}

namespace detail {

struct Derivs {
  RealField r1, r2, p1, p2;
};

// Spectral derivatives of r and φ; φ may carry a winding ramp.
inline Derivs derivs(const NRFields& f) {
  const std::size_t n = f.r.size();
  if (f.phi.size() != n || n == 0) throw Error("nonrel: r and phi sizes differ");
  Derivs d;
  d.r1 = spectral::derivative(std::span<const double>(f.r), 1);
  d.r2 = spectral::derivative(std::span<const double>(f.r), 2);
  RealField wrapped(n);
  for (std::size_t i = 0; i < n; ++i) wrapped[i] = wrap_angle(f.phi[i]);
  d.p1 = spectral::phase_derivative(wrapped);
  d.p2 = spectral::phase_second_derivative(wrapped);
  return d;
}

inline Mask r_mask(const NRFields& f, double threshold) {
  double rmax = 0.0;
  for (double v : f.r) rmax = std::max(rmax, v);
  Mask m(f.r.size(), 0);
  for (std::size_t i = 0; i < f.r.size(); ++i) m[i] = f.r[i] > threshold * rmax ? 1 : 0;
  return m;
}

}  // namespace detail

/// Right-hand side of the Ψ̄_R relation from Ψ̄_L (sign = +1) or of the Ψ̄_L
/// relation from Ψ̄_R (sign = −1), truncated at `order`.
inline ComplexField component_relation(std::span<const Complex> from, double mass, double c,
                                       Order order, double sign) {
  const ComplexField d1 = spectral::derivative(from, 1);
  const ComplexField d2 = spectral::derivative(from, 2);
  ComplexField out(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    out[i] = from[i] + sign * d1[i] / (kI * mass * c);
    if (order == Order::second) out[i] -= d2[i] / (2.0 * mass * mass * c * c);
  }
  return out;
}

struct RelationResidual {
  double right_from_left = 0.0;  ///< ‖Ψ̄_R − rel(Ψ̄_L)‖
  double left_from_right = 0.0;  ///< ‖Ψ̄_L − rel(Ψ̄_R)‖
};

inline RelationResidual component_relation_residual(const SpinorField& psi_bar, double mass,
                                                    double c, Order order) {
  check_band_limit(psi_bar.left, "component_relation_residual");
  check_band_limit(psi_bar.right, "component_relation_residual");
  const std::size_t n = psi_bar.size();
  const double dx = periodic_spacing(n);
  const ComplexField rl = component_relation(psi_bar.left, mass, c, order, 1.0);
  const ComplexField lr = component_relation(psi_bar.right, mass, c, order, -1.0);
  ComplexField e1(n), e2(n);
  for (std::size_t i = 0; i < n; ++i) {
    e1[i] = psi_bar.right[i] - rl[i];
    e2[i] = psi_bar.left[i] - lr[i];
  }
  return {l2_norm(std::span<const Complex>(e1), dx), l2_norm(std::span<const Complex>(e2), dx)};
}

/// δφ = arg Ψ̄_R − arg Ψ̄_L and δr/r = (|Ψ̄_R| − |Ψ̄_L|)/|Ψ̄_L|.
struct Deltas {
  RealField delta_phi;
  RealField delta_r_over_r;
  Mask valid;
};

/// δφ = −a r′/r,  δr/r = a φ′,  a = 1/(mc).
inline Deltas deltas_first_order(const NRFields& f, double threshold = 1e-8) {
  const detail::Derivs d = detail::derivs(f);
  const double a = 1.0 / (f.mass * f.light_speed);
  const std::size_t n = f.r.size();
  Deltas out{RealField(n, 0.0), RealField(n, 0.0), detail::r_mask(f, threshold)};
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.valid[i]) continue;
    out.delta_phi[i] = -a * d.r1[i] / f.r[i];
    out.delta_r_over_r[i] = a * d.p1[i];
  }
  return out;
}

/// δφ = −a r′/r − (a²/2)φ″
/// δr/r = aφ′ + (a²/2)φ′² + (a²/2r²)(r′² − r r″)
inline Deltas deltas_second_order(const NRFields& f, double threshold = 1e-8) {
  const detail::Derivs d = detail::derivs(f);
  const double a = 1.0 / (f.mass * f.light_speed);
  const std::size_t n = f.r.size();
  Deltas out{RealField(n, 0.0), RealField(n, 0.0), detail::r_mask(f, threshold)};
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.valid[i]) continue;
    const double r = f.r[i];
    out.delta_phi[i] = -a * d.r1[i] / r - 0.5 * a * a * d.p2[i];
    out.delta_r_over_r[i] = a * d.p1[i] + 0.5 * a * a * d.p1[i] * d.p1[i] +
                            0.5 * a * a / (r * r) * (d.r1[i] * d.r1[i] - r * d.r2[i]);
  }
  return out;
}

/// Second-order fluid variables (c explicit, w = mc²·n·cosφ₋):
///   n  = 2r² + (2r²/mc)φ′ + (1/m²c²)[r²φ′² + r′² − r r″]
///   u⁰ = 1 + φ′²/(2m²c²)
///   u¹ = φ′/(mc) + (r′² − r r″)/(2m²c²r²)
///   w  = 2mc²r² + 2c r²φ′ + (r²φ′² − r r″)/m
inline madelung::HydroField hydro_second_order(const NRFields& f, double threshold = 1e-8) {
  const detail::Derivs d = detail::derivs(f);
  const double m = f.mass, c = f.light_speed;
  const std::size_t n = f.r.size();
  madelung::HydroField h{RealField(n, 0.0), RealField(n, 0.0), RealField(n, 0.0),
                         RealField(n, 0.0), detail::r_mask(f, threshold)};
  for (std::size_t i = 0; i < n; ++i) {
    if (!h.valid[i]) continue;
    const double r = f.r[i], r2 = r * r, p1 = d.p1[i];
    const double curv = d.r1[i] * d.r1[i] - r * d.r2[i];
    h.n[i] = 2 * r2 + 2 * r2 * p1 / (m * c) + (r2 * p1 * p1 + curv) / (m * m * c * c);
    h.u0[i] = 1 + p1 * p1 / (2 * m * m * c * c);
    h.u1[i] = p1 / (m * c) + curv / (2 * m * m * c * c * r2);
    h.w[i] = 2 * m * c * c * r2 + 2 * c * r2 * p1 + (r2 * p1 * p1 - r * d.r2[i]) / m;
  }
  return h;
}

/// Exact fluid variables of a spinor with explicit c: currents as in the
/// c = 1 case, w = mc²·n·cosφ₋.
inline madelung::HydroField hydro_exact(const SpinorField& s, double mass, double c) {
  const madelung::PhaseField p = madelung::phases(s);
  madelung::HydroField h = madelung::hydro_vars(madelung::currents(s), p, mass);
  for (double& w : h.w) w *= c * c;
  return h;
}

// ---------------------------------------------------------------------------
// DTQW against the Schrödinger oracle

/// Which stripped walk component stands in for ψ_S:
/// mean → (Ψ̄_L + Ψ̄_R)/√2, left → √2·Ψ̄_L. Both have |·|² → n at leading order.
enum class Comparator { mean, left };

inline Wavefunction comparator_field(const SpinorField& bar, Comparator cmp) {
  Wavefunction w;
  w.values.resize(bar.size());
  for (std::size_t i = 0; i < bar.size(); ++i)
    w.values[i] = cmp == Comparator::mean ? (bar.left[i] + bar.right[i]) / std::sqrt(2.0)
                                          : std::sqrt(2.0) * bar.left[i];
  return w;
}

struct CompareRecord {
  std::size_t step = 0;
  double time = 0.0;
  double density_l2 = 0.0;       ///< ‖n_walk − n_S‖ / ‖n_S‖
  double velocity_l2 = 0.0;      ///< ‖v_walk − v_S‖ / ‖v_S‖ (absolute if v_S ≡ 0)
  double density_max = 0.0;
  double velocity_max = 0.0;
};

inline nlohmann::json to_json(const CompareRecord& r) {
  return {{"step", r.step},
          {"time", r.time},
          {"density_l2", r.density_l2},
          {"velocity_l2", r.velocity_l2},
          {"density_max", r.density_max},
          {"velocity_max", r.velocity_max}};
}

using OracleSupplier = std::function<Wavefunction(double t)>;

inline CompareRecord compare_snapshot(const SpinorField& snap, const WalkParams& params,
                                      const Wavefunction& oracle, double c, Comparator cmp) {
  if (oracle.size() != params.n_sites) throw Error("nonrel_compare: grid mismatch");
  const double t = params.time(snap.step_index);
  const SpinorField bar = strip_rest_phase(snap, params.mass, c, t);
  const auto hw = schrodinger::schrodinger_hydro(comparator_field(bar, cmp), params.mass);
  const auto hs = schrodinger::schrodinger_hydro(oracle, params.mass);
  CompareRecord rec;
  rec.step = snap.step_index;
  rec.time = t;
  double dn = 0.0, nn = 0.0, dv = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < params.n_sites; ++i) {
    const double e = hw.n[i] - hs.n[i];
    dn += e * e;
    nn += hs.n[i] * hs.n[i];
    rec.density_max = std::max(rec.density_max, std::abs(e));
    if (hw.valid[i] && hs.valid[i]) {
      const double ev = hw.v[i] - hs.v[i];
      dv += ev * ev;
      vv += hs.v[i] * hs.v[i];
      rec.velocity_max = std::max(rec.velocity_max, std::abs(ev));
    }
  }
  rec.density_l2 = nn > 0 ? std::sqrt(dn / nn) : std::sqrt(dn);
  rec.velocity_l2 = vv > 0 ? std::sqrt(dv / vv) : std::sqrt(dv);
  return rec;
}

/// One record per trajectory snapshot; the oracle is asked for the
/// snapshot's continuum time jε.
inline std::vector<CompareRecord> nonrel_compare(const Trajectory& traj,
                                                 const OracleSupplier& oracle, double c = 1.0,
                                                 Comparator cmp = Comparator::mean) {
  std::vector<CompareRecord> out;
  out.reserve(traj.snapshots.size());
  for (const SpinorField& s : traj.snapshots) {
    check_state(s, traj.params);
    out.push_back(compare_snapshot(s, traj.params, oracle(traj.params.time(s.step_index)), c, cmp));
  }
  return out;
}

/// L² residual of (∂_tt − ∂_xx + m²)Ψ for both components at `mid`, with
/// centered second differences in t and x (c = 1, the walk's units).
inline double kg_residual(const SpinorField& prev, const SpinorField& mid, const SpinorField& next,
                          const WalkParams& params) {
  check_state(prev, params);
  check_state(mid, params);
  check_state(next, params);
  const std::size_t n = params.n_sites;
  const double h = params.spacing, dt = params.dt, m2 = params.mass * params.mass;
  double sum = 0.0;
  auto one = [&](const ComplexField& p, const ComplexField& c, const ComplexField& f) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ip = (i + 1) % n, im = (i + n - 1) % n;
      const Complex tt = (f[i] - 2.0 * c[i] + p[i]) / (dt * dt);
      const Complex xx = (c[ip] - 2.0 * c[i] + c[im]) / (h * h);
      sum += std::norm(tt - xx + m2 * c[i]);
    }
  };
  one(prev.left, mid.left, next.left);
  one(prev.right, mid.right, next.right);
  return std::sqrt(h * sum);
}

inline double kg_residual(const Trajectory& traj, const WalkParams& params) {
  const std::size_t mid = middle_snapshot(traj);
  return kg_residual(traj.snapshots[mid - 1], traj.snapshots[mid], traj.snapshots[mid + 1],
                     params);
}

}  // namespace qwhydro::nonrel
