#pragma once

#include <complex>
#include <span>
#include <variant>
#include <vector>

#include "qwork/protocol.hpp"

namespace qwork {

// ---------------------------------------------------------------------------
// Initial states (diagonal in the energy basis).
// ---------------------------------------------------------------------------

struct NumberState {
  int n = 0;
};

struct ThermalState {
  double beta = 1.0;  // inverse temperature; +infinity selects the ground state
};

struct CoherentState {
  std::complex<double> amplitude{0.0, 0.0};
};

using InitialState = std::variant<NumberState, ThermalState, CoherentState>;

/// Throws domain_error if the state parameters are invalid.
void validate_state(const InitialState& state);

// One sample of a characteristic function G(nu, t).
struct CharacteristicSample {
  double nu = 0.0;
  std::complex<double> value{1.0, 0.0};
};

struct SeriesConfig {
  double tail_tol = 1e-14;
  int max_terms = 512;
};

// ---------------------------------------------------------------------------
// Per-mode characteristic functions (hbar = 1 throughout).
// ---------------------------------------------------------------------------

/// Number state |n>:
///   G = e^{-i nu w_t |alpha|^2} e^{z (e^{i nu w_t} - 1)} e^{i nu delta (n + 1/2)}
///       L_n(4 z sin^2(nu w_t / 2))
std::complex<double> char_number(const DriveFunctionals& f, int n, double nu);

/// Thermal state at inverse temperature beta. Accepts complex nu (purely
/// imaginary nu = i*beta' drives the Jarzynski evaluation) as long as the
/// geometric series converges, i.e. |e^{i nu delta - beta omega0}| < 1.
std::complex<double> char_thermal(const DriveFunctionals& f, double beta,
                                  std::complex<double> nu);

/// Coherent state. Evaluated as a Poisson-weighted Laguerre series with
/// adaptive truncation; for delta == 0 the Bessel-J0 closed form is
/// cross-evaluated internally and the two must agree.
std::complex<double> char_coherent(const DriveFunctionals& f, std::complex<double> amplitude,
                                   double nu, const SeriesConfig& series = {});

/// Boundary-only process (no external sources, thermal or ground initial
/// state): G = e^{i nu delta/2} (1 - e^{-beta w0}) / (1 - e^{i nu delta} e^{-beta w0}),
/// reducing to the pure phase e^{i nu delta/2} at beta = +infinity.
std::complex<double> char_boundary(const ModeSpec& mode, double beta,
                                   std::complex<double> nu, double t);

/// Dispatches on the state variant.
std::complex<double> char_state(const DriveFunctionals& f, const InitialState& state,
                                double nu, const SeriesConfig& series = {});

// One factor of the product-state total system.
struct ModeChannel {
  ModeSpec mode;
  DriveFunctionals functionals;
  InitialState state;
};

/// Total-system characteristic function: exp of the sum of per-mode logs.
std::complex<double> char_total(std::span<const ModeChannel> channels, double nu,
                                const SeriesConfig& series = {});

/// G_total sampled over a nu grid.
std::vector<CharacteristicSample> characteristic_curve(std::span<const ModeChannel> channels,
                                                       std::span<const double> nu_grid,
                                                       const SeriesConfig& series = {});

/// ln G_total along a nu grid with phase-continuous branches (the per-mode
/// logs are unwrapped along the grid before summation).
std::vector<std::complex<double>> log_char_total_grid(std::span<const ModeChannel> channels,
                                                      std::span<const double> nu_grid,
                                                      const SeriesConfig& series = {});

}  // namespace qwork
