#include "qwork/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qwork/errors.hpp"
#include "qwork/math.hpp"

namespace qwork {

namespace {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
constexpr cplx kI{0.0, 1.0};

// Gauss-Legendre 5 on [-1, 1]; exact enough that the phase integral carries
// no visible error over the step-sized gaps it is used on.
constexpr double kGL5Node = 0.5384693101056830910363144207;
constexpr double kGL5NodeOuter = 0.9061798459386639927976268782;
constexpr double kGL5W0 = 0.5688888888888888888888888889;
constexpr double kGL5W1 = 0.4786286704993664680412915148;
constexpr double kGL5W2 = 0.2369268850561890875142640407;

// Accumulates zeta(t) = int_0^t omega along monotonically increasing queries.
class PhaseTracker {
 public:
  explicit PhaseTracker(const ModeSpec& mode) : mode_(mode) {}

  double advance_to(double t) {
    if (t < position_ - 1e-15)
      throw domain_error("PhaseTracker: queries must not go backwards");
    if (t > position_) {
      const double a = position_, b = t;
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      double acc = kGL5W0 * mode_frequency(mode_, mid);
      acc += kGL5W1 * (mode_frequency(mode_, mid - half * kGL5Node) +
                       mode_frequency(mode_, mid + half * kGL5Node));
      acc += kGL5W2 * (mode_frequency(mode_, mid - half * kGL5NodeOuter) +
                       mode_frequency(mode_, mid + half * kGL5NodeOuter));
      zeta_ += half * acc;
      position_ = t;
    }
    return zeta_;
  }

 private:
  const ModeSpec& mode_;
  double position_ = 0.0;
  double zeta_ = 0.0;
};

// out = B * in for the zero-diagonal tridiagonal B with B(i+1, i) = lower(i)
// and B(i, i+1) = upper(i).
void tridiag_multiply(const VectorXcd& lower, const VectorXcd& upper, const MatrixXcd& in,
                      MatrixXcd& out) {
  const Eigen::Index dim = in.rows();
  for (Eigen::Index j = 0; j < in.cols(); ++j) {
    const cplx* src = in.data() + j * dim;
    cplx* dst = out.data() + j * dim;
    dst[0] = upper(0) * src[1];
    for (Eigen::Index i = 1; i + 1 < dim; ++i)
      dst[i] = upper(i) * src[i + 1] + lower(i - 1) * src[i - 1];
    dst[dim - 1] = lower(dim - 2) * src[dim - 2];
  }
}

// In-place matrix <- exp(B) * matrix where B = scale * (a^dag pattern)
// - conj(scale) * (a pattern); anti-Hermitian, so the exponential is unitary.
// Taylor series on substeps small enough that every term shrinks the previous
// one, evaluated to machine precision.
void apply_drive_exponential(cplx scale, MatrixXcd& matrix, MatrixXcd& term,
                             MatrixXcd& scratch) {
  const Eigen::Index dim = matrix.rows();
  if (scale == cplx{0.0, 0.0}) return;
  // 1-norm of B: column n carries |scale| (sqrt(n+1) + sqrt(n))
  const double norm1 = std::abs(scale) * (std::sqrt(static_cast<double>(dim - 1)) +
                                          std::sqrt(static_cast<double>(dim - 2 > 0 ? dim - 2 : 0)));
  const int substeps = std::max(1, static_cast<int>(std::ceil(norm1 / 0.5)));
  const cplx sub_scale = scale / static_cast<double>(substeps);

  VectorXcd lower(dim - 1), upper(dim - 1);
  for (Eigen::Index i = 0; i + 1 < dim; ++i) {
    const double root = std::sqrt(static_cast<double>(i + 1));
    lower(i) = sub_scale * root;
    upper(i) = -std::conj(sub_scale) * root;
  }

  for (int s = 0; s < substeps; ++s) {
    term = matrix;
    const double anchor = matrix.cwiseAbs().maxCoeff();
    for (int k = 1; k <= 64; ++k) {
      tridiag_multiply(lower, upper, term, scratch);
      term = scratch / static_cast<double>(k);
      matrix += term;
      if (term.cwiseAbs().maxCoeff() <= 1e-17 * anchor) break;
    }
  }
}

struct InitialWeights {
  std::vector<double> p;  // occupation probabilities, index = Fock level
  std::string tag;
};

// Diagonal occupation weights of the initial state, truncated once the missed
// tail is below tail_eps. Throws truncation_error when dim cannot hold that.
InitialWeights initial_weights(const InitialState& state, int dim, double tail_eps,
                               double omega0) {
  validate_state(state);
  InitialWeights out;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        std::ostringstream tag;
        if constexpr (std::is_same_v<T, NumberState>) {
          if (s.n >= dim)
            throw truncation_error("tpm_distribution: initial level exceeds Fock dimension");
          out.p.assign(s.n + 1, 0.0);
          out.p[s.n] = 1.0;
          tag << "tpm number n=" << s.n;
        } else if constexpr (std::is_same_v<T, ThermalState>) {
          if (std::isinf(s.beta)) {
            out.p = {1.0};
          } else {
            const double q = std::exp(-s.beta * omega0);
            double w = 1.0 - q;
            KahanSum<double> cum;
            for (int i = 0;; ++i) {
              out.p.push_back(w);
              cum.add(w);
              if (1.0 - cum.value() <= tail_eps) break;
              if (i + 1 >= dim)
                throw truncation_error(
                    "tpm_distribution: thermal occupation tail exceeds eps; increase dim");
              w *= q;
            }
          }
          tag << "tpm thermal beta=" << s.beta;
        } else {
          const double a2 = std::norm(s.amplitude);
          double w = std::exp(-a2);
          KahanSum<double> cum;
          for (int i = 0;; ++i) {
            out.p.push_back(w);
            cum.add(w);
            if (1.0 - cum.value() <= tail_eps) break;
            if (i + 1 >= dim)
              throw truncation_error(
                  "tpm_distribution: coherent occupation tail exceeds eps; increase dim");
            w *= a2 / (i + 1.0);
          }
          tag << "tpm coherent |amp|=" << std::abs(s.amplitude);
        }
        out.tag = tag.str();
      },
      state);
  return out;
}

}  // namespace

MatrixXcd build_hamiltonian(const ModeSpec& mode, const DriveProtocol& protocol, double t,
                            int dim) {
  if (dim < 2) throw domain_error("build_hamiltonian: dim must be >= 2");
  const double w = mode_frequency(mode, t);
  const cplx f = evaluate_switching(protocol, t) * mode.coupling;
  MatrixXcd h = MatrixXcd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) h(n, n) = w * (n + 0.5);
  for (int n = 0; n + 1 < dim; ++n) {
    const double root = std::sqrt(n + 1.0);
    h(n + 1, n) = f * root;             // F a^dag
    h(n, n + 1) = std::conj(f) * root;  // F^* a
  }
  return h;
}

PropagationResult propagate(const ModeSpec& mode, const DriveProtocol& protocol,
                            double t_final, const OracleConfig& cfg) {
  if (cfg.dim < 8) throw domain_error("propagate: dim must be >= 8");
  if (t_final < 0.0) throw domain_error("propagate: t_final must be >= 0");
  if (!(cfg.leak_tol > 0.0)) throw domain_error("propagate: leak_tol must be > 0");
  const int dim = cfg.dim;
  const cplx coupling = mode.coupling;

  // fastest rate present: max over the horizon of max(omega, |F| g)
  const double horizon = std::max(t_final, protocol.tau);
  double rate = mode_frequency(mode, 0.0);
  if (horizon > 0.0) {
    for (int i = 0; i <= 256; ++i) {
      const double ti = horizon * i / 256.0;
      rate = std::max(rate, mode_frequency(mode, ti));
      rate = std::max(rate, std::abs(coupling) * std::abs(evaluate_switching(protocol, ti)));
    }
  }
  const double dt_cap = 2.0 * std::numbers::pi / (20.0 * rate);
  double dt = cfg.dt;
  if (dt <= 0.0) dt = 2.0 * std::numbers::pi / (120.0 * rate);
  if (dt > dt_cap)
    throw domain_error("propagate: dt does not resolve the fastest oscillation by 20 samples");

  // integrate the drive only over [0, min(t, tau)]; it vanishes identically
  // beyond tau and the free part is applied exactly afterwards
  const double t_drive = std::min(t_final, protocol.tau);
  const int steps = t_drive > 0.0 ? std::max(1, static_cast<int>(std::ceil(t_drive / dt))) : 0;
  const double h = steps > 0 ? t_drive / steps : 0.0;

  // fourth-order commutator-free Magnus coefficients (two Gauss nodes)
  const double root3 = std::sqrt(3.0);
  const double c1 = 0.5 - root3 / 6.0, c2 = 0.5 + root3 / 6.0;
  const double x1 = 0.25 + root3 / 6.0, x2 = 0.25 - root3 / 6.0;

  MatrixXcd u = MatrixXcd::Identity(dim, dim);
  MatrixXcd term(dim, dim), scratch(dim, dim);
  PhaseTracker phase(mode);
  for (int k = 0; k < steps; ++k) {
    const double t0 = k * h;
    const double ta = t0 + c1 * h, tb = t0 + c2 * h;
    const double za = phase.advance_to(ta);
    const double zb = phase.advance_to(tb);
    const cplx fa = evaluate_switching(protocol, ta) * coupling * std::polar(1.0, za);
    const cplx fb = evaluate_switching(protocol, tb) * coupling * std::polar(1.0, zb);
    apply_drive_exponential(-kI * h * (x1 * fa + x2 * fb), u, term, scratch);
    apply_drive_exponential(-kI * h * (x2 * fa + x1 * fb), u, term, scratch);
  }
  const double zeta_final = phase.advance_to(t_final);
  for (int n = 0; n < dim; ++n) u.row(n) *= std::polar(1.0, -zeta_final * (n + 0.5));

  PropagationResult result;
  result.U = std::move(u);
  result.t = t_final;
  result.dt = h > 0.0 ? h : dt;
  result.steps = steps;

  MatrixXcd defect = result.U.adjoint() * result.U;
  defect.diagonal().array() -= 1.0;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(defect, Eigen::EigenvaluesOnly);
  result.unitarity_defect = es.eigenvalues().cwiseAbs().maxCoeff();
  if (result.unitarity_defect > 1e-8)
    throw precision_error("propagate: unitarity defect above 1e-8; the stepper degraded");

  const int top_start = dim - std::max(1, dim / 10);
  double leak = 0.0;
  for (int i = 0; i < dim / 2; ++i) {
    double col = 0.0;
    for (int j = top_start; j < dim; ++j) col += std::norm(result.U(j, i));
    leak = std::max(leak, col);
  }
  result.leak = leak;
  if (leak > cfg.leak_tol) {
    std::ostringstream msg;
    msg << "propagate: truncation leak " << leak << " exceeds " << cfg.leak_tol
        << "; increase dim";
    throw truncation_error(msg.str());
  }
  return result;
}

MatrixXcd displacement_matrix(cplx amplitude, int dim) {
  if (dim < 2) throw domain_error("displacement_matrix: dim must be >= 2");
  if (amplitude == cplx{0.0, 0.0}) return MatrixXcd::Identity(dim, dim);
  const double x = std::norm(amplitude);
  MatrixXcd d(dim, dim);
  // walk diagonals of fixed k = m - n so each shares one Laguerre recurrence
  for (int k = 0; k < dim; ++k) {
    const cplx up_pow = std::pow(amplitude, k);                 // m >= n side
    const cplx down_pow = std::pow(-std::conj(amplitude), k);   // m < n side
    double lag_prev = 1.0;        // L_0^{(k)}
    double lag = 1.0 + k - x;     // L_1^{(k)}
    for (int j = 0; j + k < dim; ++j) {
      double value;
      if (j == 0) {
        value = 1.0;
      } else if (j == 1) {
        value = lag;
      } else {
        const double next =
            ((2.0 * (j - 1) + 1.0 + k - x) * lag - (j - 1.0 + k) * lag_prev) / j;
        lag_prev = lag;
        lag = next;
        value = next;
      }
      const double pref =
          std::exp(0.5 * (log_factorial(j) - log_factorial(j + k)) - 0.5 * x);
      d(j + k, j) = pref * up_pow * value;
      if (k > 0) d(j, j + k) = pref * down_pow * value;
    }
  }
  return d;
}

WorkDistribution tpm_distribution(const PropagationResult& prop, const ModeSpec& mode,
                                  const DriveProtocol& protocol, const InitialState& state,
                                  double tail_eps) {
  const int dim = static_cast<int>(prop.U.rows());
  const double t = prop.t;
  const double w0 = mode_frequency(mode, 0.0);
  const double wt = mode_frequency(mode, t);
  const double g_t = evaluate_switching(protocol, t);

  // final eigenbasis: Fock once the drive is off, displaced Fock while it is on
  MatrixXcd overlap;
  double energy_shift = 0.0;
  if (g_t != 0.0) {
    if (wt < 1e-6 * w0)
      throw model_error("tpm_distribution: final frequency below the ramp clip");
    const cplx alpha = -g_t * mode.coupling / wt;
    overlap = displacement_matrix(alpha, dim).adjoint() * prop.U;
    energy_shift = -wt * std::norm(alpha);
  } else {
    overlap = prop.U;
  }

  const InitialWeights init = initial_weights(state, dim, tail_eps, w0);

  std::vector<WorkAtom> atoms;
  atoms.reserve(init.p.size() * dim);
  for (std::size_t i = 0; i < init.p.size(); ++i) {
    const double pi = init.p[i];
    if (pi <= 0.0) continue;
    const double e_initial = w0 * (static_cast<double>(i) + 0.5);
    for (int j = 0; j < dim; ++j) {
      const double q = pi * std::norm(overlap(j, static_cast<int>(i)));
      if (q == 0.0) continue;
      atoms.push_back({wt * (j + 0.5) + energy_shift - e_initial, q});
    }
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const WorkAtom& a, const WorkAtom& b) { return a.work < b.work; });
  std::vector<WorkAtom> merged;
  merged.reserve(atoms.size());
  for (const WorkAtom& a : atoms) {
    if (!merged.empty() && a.work - merged.back().work <= 1e-12)
      merged.back().weight += a.weight;
    else
      merged.push_back(a);
  }

  WorkDistribution out;
  out.atoms = std::move(merged);
  KahanSum<double> total;
  for (const WorkAtom& a : out.atoms) total.add(a.weight);
  out.mass_deficit = 1.0 - total.value();
  out.state_tag = init.tag;
  return out;
}

std::complex<double> tpm_charfunc(const WorkDistribution& dist, double nu) {
  return char_of(dist, nu);
}

}  // namespace qwork
