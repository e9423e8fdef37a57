#include <gtest/gtest.h>

#include "qwhydro/init.hpp"
#include "qwhydro/madelung.hpp"
#include "qwhydro/schrodinger.hpp"

using namespace qwhydro;

namespace {

init::ShockInitSpec three_mode(double mass) {
  return {{{1.0, 1, 0.0}, {1.0 / 3.0, 3, 0.0}, {0.5, 2, 0.9}}, 51.2, mass};
}

}  // namespace

TEST(PlaneWave, RestState) {
  const WalkParams p = build_walk(32, 4.0);
  const SpinorField s = init::plane_wave(p, 0.0);
  for (std::size_t i = 0; i < 32; ++i) {
    EXPECT_NEAR(s.left[i].real(), 1 / std::sqrt(2.0), 2e-16);
    EXPECT_NEAR(s.right[i].real(), 1 / std::sqrt(2.0), 2e-16);
  }
}

TEST(PlaneWave, CurrentsExact) {
  const WalkParams p = build_walk(128, 16.0);
  for (double q : {1.0, -9.0, 40.0, 64.0}) {
    const auto c = madelung::currents(init::plane_wave(p, q));
    const double qr = q / p.mass;
    for (std::size_t i = 0; i < 128; ++i) {
      EXPECT_NEAR(c.j0[i], std::hypot(1.0, qr), 1e-14);
      EXPECT_NEAR(c.j1[i], qr, 1e-14);
    }
  }
}

TEST(PlaneWave, RejectsUnresolvableWavenumber) {
  const WalkParams p = build_walk(32, 4.0);
  EXPECT_THROW(init::plane_wave(p, 2.5), Error);
  EXPECT_THROW(init::plane_wave(p, 17.0), Error);
  EXPECT_NO_THROW(init::plane_wave(p, -16.0));
}

TEST(PlaneWave, AmplitudesStableForLargeMomentum) {
  const auto [l, r] = init::detail::plane_amplitudes(1e8);
  EXPECT_GT(l, 0.0);
  EXPECT_NEAR(l * l + r * r, std::hypot(1.0, 1e8), 1e-6);
  EXPECT_NEAR(2 * l * r, 1.0, 1e-12);
}

TEST(PlaneWave, NonRelativisticPhaseRate) {
  // the stripped phase of a slow plane wave advances at ≈ q̃²m/2
  const double m = 2000.0, q = 20.0, t = 0.7;
  const WalkParams p = build_walk(64, m);
  const SpinorField s = init::plane_wave(p, q, t);
  const double stripped = std::arg(s.left[0] * std::polar(1.0, m * t));
  const double qr = q / m;
  EXPECT_NEAR(wrap_angle(stripped + qr * qr * m / 2 * t), 0.0, 1e-4);
  // and agrees with the Schrödinger reference for e^{iqx}
  Wavefunction w;
  w.values.resize(64);
  for (std::size_t i = 0; i < 64; ++i) w.values[i] = std::polar(1.0, q * p.position(i));
  const Wavefunction e = schrodinger::spectral_propagate(w, m, t);
  EXPECT_NEAR(std::arg(e.values[0]), -q * q * t / (2 * m), 1e-12);
}

TEST(PhaseModulated, ThreeModeVelocity) {
  const WalkParams p = build_walk(4096, 512.0);
  const SpinorField s = init::phase_modulated_state(p, three_mode(512.0));
  const auto c = madelung::currents(s);
  const auto h = madelung::hydro_vars(c, madelung::phases(s), p.mass);
  const RealField x = periodic_grid(4096);
  double umax = 0.0;
  for (std::size_t i = 0; i < 4096; ++i) {
    const double u = 0.1 * (-std::sin(x[i]) - std::sin(3 * x[i]) - std::sin(2 * x[i] + 0.9));
    EXPECT_NEAR(h.u1[i], u, 1e-12);
    EXPECT_NEAR(h.n[i], 1.0, 1e-12);
    umax = std::max(umax, std::abs(u));
  }
  EXPECT_GT(umax, 0.1);
  EXPECT_LT(umax, 0.3);
}

TEST(PhaseModulated, SingleCosineAndUnitDensity) {
  const WalkParams p = build_walk(512, 50.0);
  const init::ShockInitSpec spec{{{1.0, 1, 0.0}}, 0.3 * 50.0, 50.0};
  const SpinorField s = init::phase_modulated_state(p, spec);
  const auto c = madelung::currents(s);
  const auto h = madelung::hydro_vars(c, madelung::phases(s), p.mass);
  for (std::size_t i = 0; i < 512; ++i) {
    EXPECT_NEAR(h.u1[i], -0.3 * std::sin(p.position(i)), 1e-12);
    EXPECT_NEAR(h.n[i], 1.0, 1e-12);
  }
}

TEST(PhaseModulated, ZeroMomentumIsRestState) {
  const WalkParams p = build_walk(64, 8.0);
  const SpinorField a = init::phase_modulated_state(p, {{{1.0, 1, 0.0}}, 0.0, 8.0});
  const SpinorField b = init::plane_wave(p, 0.0);
  for (std::size_t i = 0; i < 64; ++i) {
    EXPECT_EQ(a.left[i], b.left[i]);
    EXPECT_EQ(a.right[i], b.right[i]);
  }
}

TEST(PhaseModulated, Errors) {
  const WalkParams p = build_walk(64, 8.0);
  EXPECT_THROW(init::phase_modulated_state(p, {{{1.0, 1, 0.0}}, 8.0, 8.0}), Error);  // |u| = 1
  EXPECT_THROW(init::phase_modulated_state(p, {{{1.0, 1, 0.0}}, 1.0, 9.0}), Error);  // mass
  EXPECT_THROW(init::phase_modulated_state(p, {{{1.0, 33, 0.0}}, 1.0, 8.0}), Error);
  EXPECT_THROW(init::phase_modulated_state(p, {{}, 1.0, 8.0}), Error);
}

TEST(PhaseModulated, SpectralAndExactGradientsAgree) {
  const auto spec = three_mode(512.0);
  const RealField phi = init::phase_profile(spec, 1024);
  const RealField d = spectral::derivative(std::span<const double>(phi));
  const RealField e = init::phase_gradient_exact(spec, 1024);
  for (std::size_t i = 0; i < 1024; ++i) EXPECT_NEAR(d[i], e[i], 1e-13);
}

TEST(SchrodingerInitial, Examples) {
  const init::ShockInitSpec spec{{{1.0, 1, 0.0}}, 100.0, 100.0};
  const Wavefunction w = init::schrodinger_initial(256, spec);
  const RealField x = periodic_grid(256);
  for (std::size_t i = 0; i < 256; ++i) {
    EXPECT_LT(std::abs(w.values[i] - std::polar(1.0, 100 * std::cos(x[i]))), 1e-12);
    EXPECT_NEAR(std::abs(w.values[i]), 1.0, 1e-15);
  }
  const Wavefunction one = init::schrodinger_initial(16, {{{1.0, 1, 0.0}}, 0.0, 5.0});
  for (const Complex& v : one.values) EXPECT_EQ(v, Complex(1.0));
}

TEST(SchrodingerInitial, JacobiAngerCoefficients) {
  const double m = 20.0;
  const std::size_t n = 256;
  const Wavefunction w = init::schrodinger_initial(n, {{{1.0, 1, 0.0}}, m, m});
  const ComplexField c = spectral::forward(w.values);
  for (long k = -40; k <= 40; ++k) {
    const Complex got = c[static_cast<std::size_t>((k + static_cast<long>(n)) % static_cast<long>(n))] /
                        static_cast<double>(n);
    const Complex ik = std::pow(kI, static_cast<int>(((k % 4) + 4) % 4));
    const double jk = (k < 0 && (k % 2) != 0 ? -1.0 : 1.0) * std::cyl_bessel_j(std::abs(k), m);
    EXPECT_LT(std::abs(got - ik * jk), 1e-13) << k;
  }
}
