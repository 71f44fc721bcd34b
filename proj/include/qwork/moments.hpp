#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qwork/protocol.hpp"

namespace qwork {

// Work moments of one scenario; cumulants[k] is C_{k+1}.
struct MomentReport {
  double mean = 0.0;       // <W>
  double variance = 0.0;   // (Delta W)^2
  double skewness = 0.0;   // third central moment
  std::vector<double> cumulants;
  std::string method;      // "analytic" | "finite-difference"
};

/// Zero-temperature closed forms, summed over modes (hbar = 1):
///   <W>   = sum_k [ z_k w_k(t) + delta_k/2 - w_k(t)|alpha_k|^2 ]
///   var   = sum_k z_k w_k(t)^2
///   skew  = sum_k z_k w_k(t)^3
MomentReport moments_zero_temperature(std::span<const DriveFunctionals> modes);

struct CumulantEstimate {
  double value = 0.0;
  double error = 0.0;  // Richardson disagreement estimate
};

/// Cumulants C_1..C_order (order <= 4) of a characteristic function by central
/// finite differences of ln cf at nu = 0, Richardson-extrapolated over steps
/// {step, step/2}. Throws precision_error when the two-step extrapolation
/// disagrees by more than max_rel_disagreement (relative), suggesting a step.
std::vector<CumulantEstimate> cumulants_fd(
    const std::function<std::complex<double>(double)>& cf, int order, double step,
    double max_rel_disagreement = 1e-3);

struct JarzynskiReport {
  double exp_avg = 0.0;          // <e^{-beta W}> = G(i beta)
  double delta_F = 0.0;          // -(1/beta) ln <e^{-beta W}>
  double partition_ratio = 0.0;  // prod_k Z_k(t)/Z_k(0)
  double gap = 0.0;              // |exp_avg - partition_ratio|
};

/// Jarzynski identity for thermal initial states at inverse temperature beta,
/// evaluated at t >= tau (drive off; alpha must vanish). Both sides of
/// G(i beta) = Z(t)/Z(0) are reported per the identity.
JarzynskiReport jarzynski(std::span<const DriveFunctionals> modes, double beta);

}  // namespace qwork
