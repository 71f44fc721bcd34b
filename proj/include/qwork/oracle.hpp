#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qwork/charfunc.hpp"
#include "qwork/protocol.hpp"
#include "qwork/workdist.hpp"

namespace qwork {

struct OracleConfig {
  int dim = 128;        // Fock truncation D
  double dt = 0.0;      // integrator step; <= 0 selects one from the fastest timescale
  double leak_tol = 1e-10;
};

// Numerically integrated propagator in the truncated Fock basis, plus the
// diagnostics that decide whether it can be trusted.
struct PropagationResult {
  Eigen::MatrixXcd U;
  double unitarity_defect = 0.0;  // operator norm of U^dag U - 1
  double leak = 0.0;              // top-decile population, worst over low-lying columns
  double t = 0.0;
  double dt = 0.0;
  int steps = 0;
};

/// H(t) = w(t) diag(n + 1/2) + G(t(F^* a + F a^dag) on the truncated basis.
Eigen::MatrixXcd build_hamiltonian(const ModeSpec& mode, const DriveProtocol& protocol,
                                   double t, int dim);

/// Integrates the Schroedinger equation for the driven mode up to t_final.
/// The free part is rotated out exactly (its generator commutes with itself at
/// different times), and the remaining drive term is stepped with a
/// fourth-order commutator-free Magnus scheme whose substep exponentials are
/// evaluated to machine precision, so every step is exactly norm-preserving.
PropagationResult propagate(const ModeSpec& mode, const DriveProtocol& protocol,
                            double t_final, const OracleConfig& cfg = {});

/// <m|D(amplitude)|n> via the associated-Laguerre closed form with log-gamma
/// stabilization; unitary on the low-occupation block.
Eigen::MatrixXcd displacement_matrix(std::complex<double> amplitude, int dim);

/// Direct two-point-measurement statistics: project the propagated basis onto
/// the eigenbasis of the final Hamiltonian (Fock for t >= tau, displaced Fock
/// while the drive is on) and histogram the energy differences.
WorkDistribution tpm_distribution(const PropagationResult& prop, const ModeSpec& mode,
                                  const DriveProtocol& protocol, const InitialState& state,
                                  double tail_eps = 1e-12);

/// sum_j q_j e^{i nu W_j} over the TPM atoms.
std::complex<double> tpm_charfunc(const WorkDistribution& dist, double nu);

}  // namespace qwork
