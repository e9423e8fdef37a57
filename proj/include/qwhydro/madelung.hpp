#pragma once

// Relativistic Madelung picture of a (1+1)D Dirac spinor: currents j^μ,
// phase sums/differences φ±, fluid variables (n, u^μ, w), the stress-energy
// tensor in spinor and hydrodynamic form, and residuals of the hydrodynamic
// equations of motion.
//
// Conventions: metric (+,−), so ∂⁰ = ∂_t and ∂¹ = −∂_x; γ⁰ = σ₁, γ¹ = iσ₂;
// ψ̄ = ψ†γ⁰, hence ψ̄γ⁰χ = ψ†χ and ψ̄γ¹χ = ψ†(−σ₃)χ.

#include "qwhydro/spectral.hpp"
#include "qwhydro/walk.hpp"

namespace qwhydro::madelung {

/// Upper-index Levi-Civita component ε^{01}. Equivalently ε_{01} = +1. With
/// the γ-matrices above this is the sign for which the hydrodynamic
/// equations of motion and the φ± form of T^{μν} hold.
inline constexpr double kEpsilon01 = -1.0;

struct CurrentField {
  RealField j0;  ///< |Ψ_R|² + |Ψ_L|²
  RealField j1;  ///< |Ψ_R|² − |Ψ_L|²
};

struct PhaseField {
  RealField phi_plus;   ///< φ_L + φ_R in (−π, π]
  RealField phi_minus;  ///< φ_L − φ_R in (−π, π]
  Mask valid;           ///< both components above threshold
  /// Half-angle sheet: Ψ_L = |Ψ_L|·branch·e^{i(φ₊+φ₋)/2} (and the same sign
  /// for Ψ_R). Wrapping φ± into (−π, π] can flip the sign of the half angles;
  /// this records it so that the spinor is recoverable exactly.
  std::vector<std::int8_t> branch;
};

struct HydroField {
  RealField n;   ///< (j_μ j^μ)^{1/2}
  RealField u0;  ///< j⁰/n
  RealField u1;  ///< j¹/n
  RealField w;   ///< m·n·cos φ₋
  Mask valid;    ///< false where the current is numerically null
};

struct TensorField {
  RealField t00, t01, t10, t11;
};

inline CurrentField currents(const SpinorField& s) {
  const std::size_t n = s.size();
  CurrentField c{RealField(n), RealField(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double l2 = std::norm(s.left[i]);
    const double r2 = std::norm(s.right[i]);
    c.j0[i] = r2 + l2;
    c.j1[i] = r2 - l2;
  }
  return c;
}

inline PhaseField phases(const SpinorField& s, double threshold = 1e-14) {
  const std::size_t n = s.size();
  PhaseField p{RealField(n, 0.0), RealField(n, 0.0), Mask(n, 0), std::vector<std::int8_t>(n, 1)};
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(s.left[i]) <= threshold || std::abs(s.right[i]) <= threshold) continue;
    const double pl = std::arg(s.left[i]);
    const double pr = std::arg(s.right[i]);
    p.phi_plus[i] = wrap_angle(pl + pr);
    p.phi_minus[i] = wrap_angle(pl - pr);
    const double half = 0.5 * (p.phi_plus[i] + p.phi_minus[i]);
    p.branch[i] = std::cos(pl - half) > 0.0 ? 1 : -1;
    p.valid[i] = 1;
  }
  return p;
}

/// Fluid variables. Sites with n ≤ null_fraction·max(n) are masked.
inline HydroField hydro_vars(const CurrentField& c, const PhaseField& p, double mass,
                             double null_fraction = 1e-10) {
  const std::size_t n = c.j0.size();
  HydroField h{RealField(n, 0.0), RealField(n, 0.0), RealField(n, 0.0), RealField(n, 0.0),
               Mask(n, 0)};
  double n_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // (j0 − j1)(j0 + j1) avoids the cancellation in j0² − j1²
    const double n2 = (c.j0[i] - c.j1[i]) * (c.j0[i] + c.j1[i]);
    h.n[i] = std::sqrt(std::max(0.0, n2));
    n_max = std::max(n_max, h.n[i]);
  }
  const double floor = null_fraction * n_max;
  for (std::size_t i = 0; i < n; ++i) {
    h.w[i] = mass * h.n[i] * std::cos(p.phi_minus[i]);
    if (h.n[i] > floor && h.n[i] > 0.0) {
      h.u0[i] = c.j0[i] / h.n[i];
      h.u1[i] = c.j1[i] / h.n[i];
      h.valid[i] = p.valid.empty() ? 1 : p.valid[i];
    }
  }
  return h;
}

/// Ψ_L = √((j⁰−j¹)/2)·e^{i(φ₊+φ₋)/2}, Ψ_R = √((j⁰+j¹)/2)·e^{i(φ₊−φ₋)/2},
/// times the recorded half-angle branch sign when present.
inline SpinorField spinor_from_hydro(const CurrentField& c, const PhaseField& p) {
  const std::size_t n = c.j0.size();
  if (c.j1.size() != n || p.phi_plus.size() != n || p.phi_minus.size() != n)
    throw Error("spinor_from_hydro: field size mismatch");
  SpinorField s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double j0 = c.j0[i], j1 = c.j1[i];
    if (j0 - std::abs(j1) < -1e-12 * std::max(1.0, j0))
      throw Error("spinor_from_hydro: spacelike current at site " + std::to_string(i));
    const double sign = p.branch.empty() ? 1.0 : static_cast<double>(p.branch[i]);
    const double al = std::sqrt(std::max(0.0, 0.5 * (j0 - j1)));
    const double ar = std::sqrt(std::max(0.0, 0.5 * (j0 + j1)));
    s.left[i] = sign * al * std::polar(1.0, 0.5 * (p.phi_plus[i] + p.phi_minus[i]));
    s.right[i] = sign * ar * std::polar(1.0, 0.5 * (p.phi_plus[i] - p.phi_minus[i]));
  }
  return s;
}

/// T^{μν} = (i/4)[ψ̄γ^μ∂^νψ − ∂^νψ̄γ^μψ + (μ↔ν)], given ∂_tψ explicitly.
/// x-derivatives are spectral. Since γ⁰γ^μ is Hermitian this reduces to
/// T^{μν} = −½[Im ψ̄γ^μ∂^νψ + Im ψ̄γ^ν∂^μψ].
inline TensorField stress_energy_spinor(const SpinorField& state, const SpinorField& dt_state) {
  const std::size_t n = state.size();
  if (dt_state.size() != n) throw Error("stress_energy_spinor: time-derivative size mismatch");
  const ComplexField dxl = spectral::derivative(std::span<const Complex>(state.left));
  const ComplexField dxr = spectral::derivative(std::span<const Complex>(state.right));
  TensorField t{RealField(n), RealField(n), RealField(n), RealField(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const Complex l = state.left[i], r = state.right[i];
    // ∂⁰ = ∂_t, ∂¹ = −∂_x
    const Complex up0_l = dt_state.left[i], up0_r = dt_state.right[i];
    const Complex up1_l = -dxl[i], up1_r = -dxr[i];
    auto b0 = [&](Complex dl, Complex dr) { return (std::conj(l) * dl + std::conj(r) * dr).imag(); };
    auto b1 = [&](Complex dl, Complex dr) { return (-std::conj(l) * dl + std::conj(r) * dr).imag(); };
    const double b00 = b0(up0_l, up0_r);  // Im B^0(ψ, ∂^0ψ)
    const double b01 = b0(up1_l, up1_r);  // Im B^0(ψ, ∂^1ψ)
    const double b10 = b1(up0_l, up0_r);
    const double b11 = b1(up1_l, up1_r);
    t.t00[i] = -b00;
    t.t11[i] = -b11;
    t.t01[i] = -0.5 * (b01 + b10);
    t.t10[i] = t.t01[i];
  }
  return t;
}

/// Spinor-form tensor at `mid` with ∂_tψ from centered differences.
inline TensorField stress_energy_spinor(const SpinorField& prev, const SpinorField& mid,
                                        const SpinorField& next, const WalkParams& params) {
  check_state(prev, params);
  check_state(mid, params);
  check_state(next, params);
  SpinorField dt(params.n_sites);
  for (std::size_t i = 0; i < params.n_sites; ++i) {
    dt.left[i] = (next.left[i] - prev.left[i]) / (2.0 * params.dt);
    dt.right[i] = (next.right[i] - prev.right[i]) / (2.0 * params.dt);
  }
  return stress_energy_spinor(mid, dt);
}

inline TensorField stress_energy_spinor(const Trajectory& traj, const WalkParams& params) {
  const std::size_t mid = middle_snapshot(traj);
  return stress_energy_spinor(traj.snapshots[mid - 1], traj.snapshots[mid],
                              traj.snapshots[mid + 1], params);
}

/// Space-time gradient (∂_t, ∂_x) of a scalar field.
struct Gradient {
  RealField dt;
  RealField dx;
};

/// T^{μν} = w u^μ u^ν + (n/2)(ε^{μα}u_α ∂^νφ₋ + u^μ ε^{να}∂_αφ₋).
/// Masked sites are left at zero.
inline TensorField stress_energy_hydro(const HydroField& h, const Gradient& grad_phi_minus) {
  const std::size_t n = h.n.size();
  TensorField t{RealField(n, 0.0), RealField(n, 0.0), RealField(n, 0.0), RealField(n, 0.0)};
  constexpr double e = kEpsilon01;
  for (std::size_t i = 0; i < n; ++i) {
    if (!h.valid[i]) continue;
    const double u[2] = {h.u0[i], h.u1[i]};
    const double u_low[2] = {u[0], -u[1]};
    const double d_low[2] = {grad_phi_minus.dt[i], grad_phi_minus.dx[i]};
    const double d_up[2] = {d_low[0], -d_low[1]};
    const double a[2] = {e * u_low[1], -e * u_low[0]};  // ε^{μα}u_α
    const double c[2] = {e * d_low[1], -e * d_low[0]};  // ε^{να}∂_αφ₋
    double* out[2][2] = {{&t.t00[i], &t.t01[i]}, {&t.t10[i], &t.t11[i]}};
    for (int mu = 0; mu < 2; ++mu)
      for (int nu = 0; nu < 2; ++nu)
        *out[mu][nu] =
            h.w[i] * u[mu] * u[nu] + 0.5 * h.n[i] * (a[mu] * d_up[nu] + u[mu] * c[nu]);
  }
  return t;
}

/// Static form: ∂_tφ₋ = 0, ∂_xφ₋ from the unwrapped phase.
inline TensorField stress_energy_hydro(const HydroField& h, const PhaseField& p,
                                       const WalkParams& params) {
  if (p.phi_minus.size() != params.n_sites) throw Error("stress_energy_hydro: size mismatch");
  Gradient g{RealField(params.n_sites, 0.0), spectral::phase_derivative(p.phi_minus)};
  return stress_energy_hydro(h, g);
}

/// Centered time difference of a wrapped phase between prev and next.
inline RealField phase_time_derivative(std::span<const double> prev, std::span<const double> next,
                                       double dt) {
  RealField d(prev.size());
  for (std::size_t i = 0; i < prev.size(); ++i) d[i] = wrap_angle(next[i] - prev[i]) / (2.0 * dt);
  return d;
}

/// Hydrodynamic-form tensor at `mid` of three consecutive snapshots.
inline TensorField stress_energy_hydro(const SpinorField& prev, const SpinorField& mid,
                                       const SpinorField& next, const WalkParams& params) {
  check_state(prev, params);
  check_state(mid, params);
  check_state(next, params);
  const PhaseField pm = phases(mid);
  const HydroField h = hydro_vars(currents(mid), pm, params.mass);
  Gradient g{phase_time_derivative(phases(prev).phi_minus, phases(next).phi_minus, params.dt),
             spectral::phase_derivative(pm.phi_minus)};
  return stress_energy_hydro(h, g);
}

inline TensorField stress_energy_hydro(const Trajectory& traj, const WalkParams& params) {
  const std::size_t mid = middle_snapshot(traj);
  return stress_energy_hydro(traj.snapshots[mid - 1], traj.snapshots[mid],
                             traj.snapshots[mid + 1], params);
}

/// Relative L² distance between two tensors over all four components.
inline double tensor_discrepancy(const TensorField& a, const TensorField& b) {
  double num = 0.0, den = 0.0;
  const RealField* fa[4] = {&a.t00, &a.t01, &a.t10, &a.t11};
  const RealField* fb[4] = {&b.t00, &b.t01, &b.t10, &b.t11};
  for (int c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < fa[c]->size(); ++i) {
      const double d = (*fa[c])[i] - (*fb[c])[i];
      num += d * d;
      den += (*fb[c])[i] * (*fb[c])[i];
    }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

/// L² residuals of the hydrodynamic equations of motion on the middle
/// snapshot:
///   chirality:  ε^μ_α ∂_μ j^α − 2mn sin φ₋
///   potential:  m cos φ₋ j^μ + (n/2)(∂^μφ₊ + ε^{μν}∂_νφ₋)   (both μ)
///   continuity: ∂_μ j^μ
struct MadelungResiduals {
  double chirality = 0.0;
  double potential = 0.0;
  double continuity = 0.0;
  bool unwrap_ok = true;
  std::size_t masked_sites = 0;
};

inline MadelungResiduals madelung_residuals(const SpinorField& prev, const SpinorField& mid,
                                            const SpinorField& next, const WalkParams& params) {
  check_state(prev, params);
  check_state(mid, params);
  check_state(next, params);
  const std::size_t n = params.n_sites;
  const double dt = params.dt, m = params.mass;
  constexpr double e = kEpsilon01;
  const CurrentField cp = currents(prev), cm = currents(mid), cn = currents(next);
  const PhaseField pp = phases(prev), pm = phases(mid), pn = phases(next);
  const HydroField h = hydro_vars(cm, pm, m);

  MadelungResiduals res;
  bool ok_plus = true, ok_minus = true;
  const RealField dx_plus = spectral::phase_derivative(pm.phi_plus, &ok_plus);
  const RealField dx_minus = spectral::phase_derivative(pm.phi_minus, &ok_minus);
  res.unwrap_ok = ok_plus && ok_minus;
  const RealField dt_plus = phase_time_derivative(pp.phi_plus, pn.phi_plus, dt);
  const RealField dt_minus = phase_time_derivative(pp.phi_minus, pn.phi_minus, dt);
  const RealField dx_j0 = spectral::derivative(std::span<const double>(cm.j0));
  const RealField dx_j1 = spectral::derivative(std::span<const double>(cm.j1));

  double s4 = 0.0, s5 = 0.0, s6 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt_j0 = (cn.j0[i] - cp.j0[i]) / (2.0 * dt);
    const double dt_j1 = (cn.j1[i] - cp.j1[i]) / (2.0 * dt);
    s6 += (dt_j0 + dx_j1[i]) * (dt_j0 + dx_j1[i]);
    if (!h.valid[i] || !pp.valid[i] || !pn.valid[i]) {
      ++res.masked_sites;
      continue;
    }
    // ε^μ_α = ε^{μβ}η_{βα}: ε^0_1 = −ε^{01}, ε^1_0 = ε^{10} = −ε^{01}
    const double lhs4 = -e * dt_j1 - e * dx_j0[i];
    const double r4 = lhs4 - 2.0 * m * h.n[i] * std::sin(pm.phi_minus[i]);
    const double cosm = std::cos(pm.phi_minus[i]);
    const double r5_0 = m * cosm * cm.j0[i] + 0.5 * h.n[i] * (dt_plus[i] + e * dx_minus[i]);
    const double r5_1 = m * cosm * cm.j1[i] + 0.5 * h.n[i] * (-dx_plus[i] - e * dt_minus[i]);
    s4 += r4 * r4;
    s5 += r5_0 * r5_0 + r5_1 * r5_1;
  }
  res.chirality = std::sqrt(params.spacing * s4);
  res.potential = std::sqrt(params.spacing * s5);
  res.continuity = std::sqrt(params.spacing * s6);
  return res;
}

inline MadelungResiduals madelung_residuals(const Trajectory& traj, const WalkParams& params) {
  const std::size_t mid = middle_snapshot(traj);
  return madelung_residuals(traj.snapshots[mid - 1], traj.snapshots[mid],
                            traj.snapshots[mid + 1], params);
}

/// ∂_xφ₋ evaluated directly and through the enthalpy per particle:
///   ∂φ₋ = −σ ∂(w/mn) / √(1 − (w/mn)²),  σ = sign(sin φ₋).
struct PressureGradient {
  RealField direct;
  RealField via_enthalpy;
  RealField difference;
  RealField sigma;
  Mask valid;
};

inline PressureGradient quantum_pressure_gradient(const HydroField& h, const PhaseField& p,
                                                  const WalkParams& params,
                                                  double singular_tol = 1e-10) {
  const std::size_t n = params.n_sites;
  if (h.n.size() != n || p.phi_minus.size() != n)
    throw Error("quantum_pressure_gradient: size mismatch");
  PressureGradient g{spectral::phase_derivative(p.phi_minus), RealField(n, 0.0),
                     RealField(n, 0.0), RealField(n, 0.0), Mask(n, 0)};
  RealField ratio(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (h.n[i] > 0.0) ratio[i] = h.w[i] / (params.mass * h.n[i]);
  const RealField d_ratio = spectral::derivative(std::span<const double>(ratio));
  for (std::size_t i = 0; i < n; ++i) {
    g.sigma[i] = std::sin(p.phi_minus[i]) >= 0.0 ? 1.0 : -1.0;
    const double one_minus = 1.0 - ratio[i] * ratio[i];
    if (!h.valid[i] || std::abs(one_minus) < singular_tol) continue;
    g.via_enthalpy[i] = -g.sigma[i] * d_ratio[i] / std::sqrt(one_minus);
    g.difference[i] = g.direct[i] - g.via_enthalpy[i];
    g.valid[i] = 1;
  }
  return g;
}

}  // namespace qwhydro::madelung
