#pragma once

#include <vector>

namespace qwork {

enum class CavityGeometry {
  Interval1D,        // Dirichlet interval, modes n pi / d
  ParallelPlates3D,  // perfect plates, TE/TM photon modes, results per unit area
};

struct CavitySpec {
  CavityGeometry geometry = CavityGeometry::Interval1D;
  double separation = 1.0;  // d
  double regulator = 0.0;   // exponential damping length lambda; <= 0 picks 0.35 d
  int max_modes = 200000;   // hard cap on the regulated mode sum
};

// Diagnostics of the regulator -> 0 extrapolation.
struct RegulatedValue {
  double value = 0.0;
  double residual = 0.0;            // disagreement of the deepest ladder entries
  std::vector<double> lambdas;      // regulator sequence used
  std::vector<double> raw;          // regulated sums before extrapolation
};

/// Regulated (not yet extrapolated) zero-point mode sum at a fixed regulator.
double regulated_mode_energy(const CavitySpec& cavity, double lambda);

/// Regulated free-energy mode sum F = sum e^{-lambda w} [w/2 + ln(1-e^{-bw})/b].
double regulated_mode_free_energy(const CavitySpec& cavity, double lambda, double beta);

/// Regularized zero-point energy of one cavity configuration (per unit plate
/// area in 3D): the exponentially regulated mode sum is evaluated on a
/// geometric regulator sequence, the divergent lambda powers are eliminated by
/// a Richardson ladder, and the lambda^0 term is returned.
RegulatedValue casimir_energy(const CavitySpec& cavity);

/// W = E(final) - E(initial): zero-point work done by moving the boundary.
double zero_point_work(const CavitySpec& initial, const CavitySpec& final_cavity);

/// Finite-temperature free-energy difference Delta F = -(1/beta) sum_k ln
/// G_k^{bc}(i beta), regularized identically to the zero-point sums. The
/// per-mode factor collapses to F(omega) = omega/2 + ln(1 - e^{-beta omega})/beta.
double free_energy_difference(const CavitySpec& initial, const CavitySpec& final_cavity,
                              double beta);

}  // namespace qwork
