#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "qwork/errors.hpp"
#include "qwork/protocol.hpp"

using namespace qwork;
using cplx = std::complex<double>;

namespace {

// Independent fine-grid trapezoid, used only as a test oracle.
template <typename Fn>
auto trapezoid(Fn&& fn, double a, double b, int n) {
  auto acc = 0.5 * (fn(a) + fn(b));
  for (int i = 1; i < n; ++i) acc += fn(a + (b - a) * i / n);
  return acc * ((b - a) / n);
}

DriveProtocol constant_protocol(double g0, double tau) {
  DriveProtocol p;
  p.switching = ConstantSwitch{g0};
  p.tau = tau;
  return p;
}

}  // namespace

TEST_CASE("switching window: inside, boundary, beyond, negative") {
  const DriveProtocol p = constant_protocol(1.0, 2.0);
  CHECK(evaluate_switching(p, 1.0) == 1.0);
  CHECK(evaluate_switching(p, 2.0) == 1.0);  // inclusive upper edge
  CHECK(evaluate_switching(p, 3.0) == 0.0);  // exactly zero past tau
  CHECK_THROWS_AS(evaluate_switching(p, -0.1), domain_error);
}

TEST_CASE("gaussian pulse peaks at tau/2 by default") {
  DriveProtocol p;
  p.tau = 4.0;
  p.switching = GaussianPulse{0.7, std::nullopt, 0.5};
  CHECK(evaluate_switching(p, 2.0) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(evaluate_switching(p, 1.0) < 0.7);
}

TEST_CASE("raised cosine vanishes at the window edges") {
  DriveProtocol p;
  p.tau = 3.0;
  p.switching = RaisedCosine{2.0};
  CHECK(evaluate_switching(p, 0.0) == doctest::Approx(0.0));
  CHECK(evaluate_switching(p, 1.5) == doctest::Approx(2.0));
  CHECK(evaluate_switching(p, 3.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("tabulated switching must cover the window") {
  DriveProtocol p;
  p.tau = 2.0;
  p.switching = TabulatedSwitch{{0.0, 0.5, 1.0}, {0.0, 1.0, 0.0}};  // stops at t = 1
  CHECK_THROWS_AS(evaluate_switching(p, 1.5), interpolation_error);
}

TEST_CASE("tabulated switching interpolates monotonically") {
  DriveProtocol p;
  p.tau = 2.0;
  p.switching = TabulatedSwitch{{0.0, 0.5, 1.0, 1.5, 2.0}, {0.0, 0.3, 1.0, 1.0, 0.2}};
  const double v = evaluate_switching(p, 0.25);
  CHECK(v > 0.0);
  CHECK(v < 0.3);  // no overshoot on a monotone segment
  CHECK(evaluate_switching(p, 1.25) <= 1.0 + 1e-15);
}

TEST_CASE("frequency profiles stay positive") {
  ModeSpec ramp;
  ramp.frequency = LinearRampFrequency{1.0, -0.5, 2.0};  // would cross zero without the clip
  CHECK(mode_frequency(ramp, 10.0) > 0.0);
  CHECK(mode_frequency(ramp, 10.0) == doctest::Approx(1e-6).epsilon(1e-9));

  ModeSpec tanh_mode;
  tanh_mode.frequency = TanhRampFrequency{1.2, 2.0, 1.0, 0.4};
  CHECK(mode_frequency(tanh_mode, -5.0) == doctest::Approx(1.2).epsilon(1e-6));
  CHECK(mode_frequency(tanh_mode, 7.0) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("constant drive functionals match the closed antiderivatives") {
  // omega and g constant: xi(t) = (F g0/omega)(e^{i omega t} - 1) and
  // theta(t) = |F|^2 g0^2 (t - sin(omega t)/omega)/omega, both exact.
  const double omega = 1.7, g0 = 0.8, tau = 2.0;
  const cplx F{0.4, 0.3};
  ModeSpec mode;
  mode.frequency = ConstantFrequency{omega};
  mode.coupling = F;
  const DriveProtocol p = constant_protocol(g0, tau);

  for (double t : {0.7, 1.6, 2.0}) {
    const DriveFunctionals f = compute_functionals(mode, p, t);
    const cplx xi_exact = F * g0 / omega * (std::polar(1.0, omega * t) - 1.0);
    const double theta_exact =
        std::norm(F) * g0 * g0 * (t - std::sin(omega * t) / omega) / omega;
    CHECK(f.zeta == doctest::Approx(omega * t).epsilon(1e-14));
    CHECK(std::abs(f.xi - xi_exact) < 1e-10);
    CHECK(f.theta == doctest::Approx(theta_exact).epsilon(1e-9));
  }

  // past tau: xi frozen at xi(tau), alpha off, z = |xi(tau)|^2
  const DriveFunctionals f3 = compute_functionals(mode, p, 3.0);
  const cplx xi_tau = F * g0 / omega * (std::polar(1.0, omega * tau) - 1.0);
  CHECK(std::abs(f3.xi - xi_tau) < 1e-10);
  CHECK(f3.alpha == cplx{0.0, 0.0});
  CHECK(std::abs(f3.eta - f3.xi) == 0.0);
  const double s = std::sin(0.5 * omega * tau);
  const double z_exact = 4.0 * std::norm(F) * g0 * g0 * s * s / (omega * omega);
  CHECK(f3.rapidity == doctest::Approx(z_exact).epsilon(1e-10));
  CHECK(f3.rapidity == doctest::Approx(std::norm(xi_tau)).epsilon(1e-12));
}

TEST_CASE("zero coupling gives identically zero drive functionals") {
  ModeSpec mode;
  mode.frequency = TanhRampFrequency{1.0, 1.8, 1.0, 0.3};
  mode.coupling = {0.0, 0.0};
  DriveProtocol p;
  p.tau = 2.0;
  p.switching = GaussianPulse{1.0, std::nullopt, 0.4};
  const DriveFunctionals f = compute_functionals(mode, p, 3.0);
  CHECK(f.xi == cplx{0.0, 0.0});
  CHECK(f.alpha == cplx{0.0, 0.0});
  CHECK(f.eta == cplx{0.0, 0.0});
  CHECK(f.rapidity == 0.0);
  CHECK(f.theta == 0.0);
}

TEST_CASE("fixed frequency: rapidity is the windowed Fourier transform of G") {
  const double omega = 1.4, tau = 3.0;
  const cplx F{0.3, -0.5};
  ModeSpec mode;
  mode.frequency = ConstantFrequency{omega};
  mode.coupling = F;
  DriveProtocol p;
  p.tau = tau;
  p.switching = GaussianPulse{0.9, 1.2, 0.45};

  const DriveFunctionals f = compute_functionals(mode, p, tau + 0.5);
  const cplx gt = trapezoid(
      [&](double t) { return std::polar(evaluate_switching(p, t), omega * t); }, 0.0, tau,
      400000);
  CHECK(f.rapidity == doctest::Approx(std::norm(F) * std::norm(gt)).epsilon(1e-8));
}

TEST_CASE("drive-off freeze: xi is time-independent beyond tau") {
  ModeSpec mode;
  mode.frequency = TanhRampFrequency{1.1, 1.9, 1.5, 0.5};
  mode.coupling = {0.45, 0.2};
  DriveProtocol p;
  p.tau = 3.0;
  p.switching = RaisedCosine{1.0};

  const DriveFunctionals a = compute_functionals(mode, p, 3.5);
  const DriveFunctionals b = compute_functionals(mode, p, 6.0);
  CHECK(std::abs(a.xi - b.xi) < 1e-11);
  CHECK(a.theta == doctest::Approx(b.theta).epsilon(1e-10));
  CHECK(a.rapidity == doctest::Approx(std::norm(a.xi)).epsilon(1e-12));
  // zeta keeps accumulating
  CHECK(b.zeta > a.zeta);
}

TEST_CASE("ramped frequency: zeta matches an independent quadrature") {
  ModeSpec mode;
  mode.frequency = TanhRampFrequency{1.3, 1.9, 2.0, 0.5};
  mode.coupling = {0.4, 0.25};
  DriveProtocol p;
  p.tau = 4.0;
  p.switching = GaussianPulse{1.0, std::nullopt, 0.6};

  const double t = 2.2;
  const DriveFunctionals f = compute_functionals(mode, p, t);
  const double zeta_oracle =
      trapezoid([&](double s) { return mode_frequency(mode, s); }, 0.0, t, 400000);
  CHECK(f.zeta == doctest::Approx(zeta_oracle).epsilon(1e-9));
  CHECK(f.delta ==
        doctest::Approx(mode_frequency(mode, t) - mode_frequency(mode, 0.0)).epsilon(1e-12));
}

TEST_CASE("quadrature refinement is already converged at the default tolerance") {
  ModeSpec mode;
  mode.frequency = TanhRampFrequency{1.2, 2.1, 1.5, 0.4};
  mode.coupling = {0.5, -0.1};
  DriveProtocol p;
  p.tau = 3.0;
  p.switching = SinusoidSwitch{0.8, 2.0, 0.3};

  QuadratureConfig loose;
  loose.rel_tol = 1e-8;
  QuadratureConfig tight;
  tight.rel_tol = 1e-12;
  const DriveFunctionals a = compute_functionals(mode, p, 2.5, loose);
  const DriveFunctionals b = compute_functionals(mode, p, 2.5, tight);
  CHECK(std::abs(a.xi - b.xi) < 1e-8);
  CHECK(a.zeta == doctest::Approx(b.zeta).epsilon(1e-8));
  CHECK(a.theta == doctest::Approx(b.theta).epsilon(1e-7));
}

TEST_CASE("tabulated frequency integrates like its interpolant") {
  ModeSpec mode;
  mode.frequency =
      TabulatedFrequency{{0.0, 0.8, 1.6, 2.4, 3.2, 4.0}, {1.2, 1.25, 1.45, 1.7, 1.78, 1.8}};
  mode.coupling = {0.3, 0.0};
  DriveProtocol p;
  p.tau = 3.0;
  p.switching = RaisedCosine{1.0};
  const double t = 3.5;
  const DriveFunctionals f = compute_functionals(mode, p, t);
  const double zeta_oracle =
      trapezoid([&](double s) { return mode_frequency(mode, s); }, 0.0, t, 800000);
  CHECK(f.zeta == doctest::Approx(zeta_oracle).epsilon(1e-8));
  CHECK(f.omega_t == doctest::Approx(mode_frequency(mode, 3.5)));
}

TEST_CASE("zeta is nondecreasing in time") {
  ModeSpec mode;
  mode.frequency = TanhRampFrequency{1.8, 1.05, 2.0, 0.5};  // downward ramp, still positive
  mode.coupling = {0.3, 0.1};
  DriveProtocol p;
  p.tau = 3.0;
  p.switching = RaisedCosine{1.0};
  double prev = 0.0;
  for (double t : {0.5, 1.0, 2.0, 3.0, 4.5, 6.0}) {
    const double zeta = compute_functionals(mode, p, t).zeta;
    CHECK(zeta >= prev);
    prev = zeta;
  }
}

TEST_CASE("functional preconditions") {
  ModeSpec mode;
  mode.frequency = ConstantFrequency{1.0};
  const DriveProtocol p = constant_protocol(1.0, 1.0);
  CHECK_THROWS_AS(compute_functionals(mode, p, -1.0), domain_error);

  ModeSpec gap;
  gap.frequency = TabulatedFrequency{{0.0, 0.4}, {1.0, 1.2}};  // ends before t
  CHECK_THROWS_AS(compute_functionals(gap, p, 1.0), interpolation_error);
}
