#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qwork/protocol.hpp"

namespace qwork {

// One delta-comb atom of a work distribution.
struct WorkAtom {
  double work = 0.0;
  double weight = 0.0;
};

// Purely atomic work distribution: ordered atoms plus the truncation mass the
// emitted comb is missing.
struct WorkDistribution {
  std::vector<WorkAtom> atoms;  // ascending in work
  double mass_deficit = 0.0;    // 1 - sum of weights
  std::string state_tag;

  double total_weight() const;
  double mean() const;
  double variance() const;
};

/// Characteristic sum of an atom comb: sum_j q_j e^{i nu W_j}.
std::complex<double> char_of(const WorkDistribution& dist, double nu);

/// Convolution of two independent atom combs (work values add, weights
/// multiply); coinciding atoms merge within merge_tol energy units.
WorkDistribution convolve(const WorkDistribution& a, const WorkDistribution& b,
                          double merge_tol = 1e-12);

// ---------------------------------------------------------------------------
// Weight functions q_s(n, z): probability that an initial n-quanta mode ends
// s quanta higher after a drive of rapidity z.
// ---------------------------------------------------------------------------

/// q_s(n, z), s >= -n. Evaluated through the transition-probability form
///   q_s = e^{-z} z^{|s|} (n_<! / n_>!) [L_{n_<}^{(|s|)}(z)]^2,
/// which is algebraically identical to the alternating double sum of the
/// definition but has no cancellation (every factor is non-negative).
double weights_number(int n, double z, int s);

/// q_s for s in [s_min, s_max]; result[i] corresponds to s = s_min + i.
std::vector<double> weights_number_range(int n, double z, int s_min, int s_max);

/// Literal alternating double sum with compensated (Kahan) accumulation.
/// Kept for cross-checking; cancellation grows quickly with n and z, and a
/// raw result below -1e-9 raises precision_error advising the exact path.
double weights_number_series(int n, double z, int s);

/// Exact integer/rational evaluation of the alternating double sum (n <= 10),
/// rounded to double only at the very end. Adjudicates precision disputes.
double weights_number_exact(int n, double z, int s);

// ---------------------------------------------------------------------------
// Distribution assembly.
// ---------------------------------------------------------------------------

/// Number-state work comb: atoms at W_s = (s+n+1/2) delta + s omega0 - w_t |alpha|^2
/// with weights q_s(n, |eta|^2). s grows until the captured mass is >= 1 - eps.
WorkDistribution dist_number(const DriveFunctionals& f, int n, double eps = 1e-10);

/// Boundary-only thermal comb: geometric weights (1-e^{-beta w0}) e^{-r beta w0}
/// at W_r = (r+1/2) delta; a single unit atom at delta/2 for beta = +inf.
WorkDistribution dist_boundary_thermal(const ModeSpec& mode, double beta, double t,
                                       double eps = 1e-10);

/// Coherent-state comb: Poisson mixture of dist_number(n) over n, with
/// coinciding atoms merged.
WorkDistribution dist_coherent(const DriveFunctionals& f, std::complex<double> amplitude,
                               double eps = 1e-10);

/// Thermal-state comb under drive: geometric mixture of dist_number(n) over n.
/// For a pure boundary process prefer dist_boundary_thermal, whose closed
/// geometric weights this reproduces.
WorkDistribution dist_thermal(const DriveFunctionals& f, double beta, double eps = 1e-10);

}  // namespace qwork
