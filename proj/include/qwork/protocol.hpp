#pragma once

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qwork {

// ---------------------------------------------------------------------------
// Switching function g(t) on [0, tau]. The drive window G(t) equals g(t)
// inside the window and is exactly zero for t > tau.
// ---------------------------------------------------------------------------

struct ConstantSwitch {
  double amplitude = 1.0;
};

struct GaussianPulse {
  double amplitude = 1.0;
  std::optional<double> center;  // defaults to tau/2
  double width = 1.0;
};

// amplitude/2 * (1 - cos(2 pi t / tau)): vanishes smoothly at both window edges.
struct RaisedCosine {
  double amplitude = 1.0;
};

struct SinusoidSwitch {
  double amplitude = 1.0;
  double angular_frequency = 1.0;
  double phase = 0.0;
};

struct TabulatedSwitch {
  std::vector<double> times;
  std::vector<double> values;
};

using SwitchingShape =
    std::variant<ConstantSwitch, GaussianPulse, RaisedCosine, SinusoidSwitch, TabulatedSwitch>;

struct DriveProtocol {
  SwitchingShape switching{ConstantSwitch{}};
  double tau = 1.0;  // drive horizon, >= 0
};

/// G(t): g(t) for 0 <= t <= tau, exactly 0 for t > tau; t < 0 is a domain error.
/// A tabulated switching shape must cover [0, tau].
double evaluate_switching(const DriveProtocol& protocol, double t);

// ---------------------------------------------------------------------------
// Mode frequency profile omega(t) > 0.
// ---------------------------------------------------------------------------

struct ConstantFrequency {
  double omega = 1.0;
};

// Linear ramp from omega_start to omega_end over [0, ramp_time], held constant
// afterwards. Values are clipped from below at 1e-6 * omega_start so the
// profile can never reach zero.
struct LinearRampFrequency {
  double omega_start = 1.0;
  double omega_end = 1.0;
  double ramp_time = 1.0;
};

struct TanhRampFrequency {
  double omega_start = 1.0;
  double omega_end = 1.0;
  double center = 0.0;
  double width = 1.0;
};

struct TabulatedFrequency {
  std::vector<double> times;
  std::vector<double> omegas;
};

using FrequencyShape =
    std::variant<ConstantFrequency, LinearRampFrequency, TanhRampFrequency, TabulatedFrequency>;

// One bosonic mode: frequency profile omega_k(t) and complex drive coupling F(k).
struct ModeSpec {
  std::string label;
  FrequencyShape frequency{ConstantFrequency{}};
  std::complex<double> coupling{0.0, 0.0};
};

/// omega_k(t); throws model_error if the profile evaluates to a non-positive value.
double mode_frequency(const ModeSpec& mode, double t);

// ---------------------------------------------------------------------------
// Drive functionals.
// ---------------------------------------------------------------------------

struct QuadratureConfig {
  double rel_tol = 1e-10;   // step-halving stops once results agree to this
  int max_refinements = 16;
  int min_intervals = 16;
};

// Everything the closed-form work statistics need about one driven mode at one
// instant. zeta is the accumulated phase, xi the drive displacement, alpha the
// instantaneous Hamiltonian shift, eta = xi + alpha e^{i zeta}, delta the
// frequency change omega(t) - omega(0), theta the global propagator phase, and
// rapidity = |eta|^2.
struct DriveFunctionals {
  double t = 0.0;
  double omega0 = 0.0;   // omega(0)
  double omega_t = 0.0;  // omega(t)
  double zeta = 0.0;
  std::complex<double> xi{0.0, 0.0};
  std::complex<double> alpha{0.0, 0.0};
  std::complex<double> eta{0.0, 0.0};
  double delta = 0.0;
  double theta = 0.0;
  double rapidity = 0.0;
};

/// Computes all drive functionals at time t by composite-Simpson quadrature
/// with automatic step halving:
///   zeta(t)  = int_0^t omega
///   xi(t)    = i F int_0^t e^{i zeta} G
///   alpha(t) = -G(t) F / omega(t)
///   eta(t)   = xi + alpha e^{i zeta},   delta = omega(t) - omega(0)
///   theta(t) = |F|^2 int_0^t dt' int_0^t' dt'' G(t') sin(zeta' - zeta'') G(t'')
/// The theta double integral is evaluated as nested Simpson over the triangle;
/// the inner integral is carried cumulatively so the evaluation stays O(N).
DriveFunctionals compute_functionals(const ModeSpec& mode, const DriveProtocol& protocol,
                                     double t, const QuadratureConfig& quad = {});

}  // namespace qwork
