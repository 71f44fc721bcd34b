#include "qwork/casimir.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "qwork/errors.hpp"
#include "qwork/math.hpp"

namespace qwork {

namespace {

// The lambda^{-4} divergence of the 3D sums is cancelled numerically by the
// extrapolation ladder; extended precision keeps ~3.5 digits that double
// arithmetic would lose to that cancellation.
using Real = long double;

constexpr Real kPi = std::numbers::pi_v<Real>;
constexpr Real kTermTol = 1e-21L;  // relative cutoff inside regulated sums
constexpr int kLadderLevels = 10;
// divergent powers first, then the leading analytic corrections
constexpr int kLadderPowers[] = {-4, -3, -2, -1, 1, 2, 3, 4};

void validate(const CavitySpec& c) {
  if (!(c.separation > 0.0)) throw domain_error("CavitySpec: separation must be > 0");
  if (c.regulator < 0.0) throw domain_error("CavitySpec: regulator must be > 0 (or 0 = auto)");
  if (c.max_modes < 100) throw domain_error("CavitySpec: max_modes must be >= 100");
}

double effective_lambda(const CavitySpec& c) {
  return c.regulator > 0.0 ? c.regulator : 0.3 * c.separation;
}

// Regulated zero-point sum. 1D: sum_n (n pi/d)/2 e^{-lambda omega}. 3D per
// area, with the transverse integral carried out analytically per n
// (m = n pi/d, polarization weight 1 for n = 0 and 2 otherwise):
//   K_zp(m) = w/(4 pi) (m^2/lambda + 2 m/lambda^2 + 2/lambda^3) e^{-lambda m}.
Real regulated_zero_point(CavityGeometry geometry, Real d, Real lambda, int max_modes) {
  KahanSum<Real> sum;
  if (geometry == CavityGeometry::Interval1D) {
    for (int n = 1; n <= max_modes; ++n) {
      const Real w = n * kPi / d;
      const Real term = 0.5L * w * std::exp(-lambda * w);
      sum.add(term);
      if (n > 4 && term < kTermTol * std::abs(sum.value())) return sum.value();
    }
  } else {
    for (int n = 0; n <= max_modes; ++n) {
      const Real m = n * kPi / d;
      const Real pol = (n == 0) ? 1.0L : 2.0L;
      const Real term = pol / (4.0L * kPi) *
                        (m * m / lambda + 2.0L * m / (lambda * lambda) +
                         2.0L / (lambda * lambda * lambda)) *
                        std::exp(-lambda * m);
      sum.add(term);
      if (n > 4 && term < kTermTol * std::abs(sum.value())) return sum.value();
    }
  }
  throw truncation_error("casimir: regulated mode sum not converged within max_modes");
}

// Thermal contribution added to the zero-point part. 1D:
// sum_n e^{-lambda w} ln(1 - e^{-beta w})/beta. 3D kernel per n:
//   K_th(m) = -w/(2 pi beta) sum_j (1/j) e^{-(lambda + j beta) m}
//             [ m/(lambda + j beta) + 1/(lambda + j beta)^2 ].
Real regulated_thermal(CavityGeometry geometry, Real d, Real lambda, Real beta,
                       int max_modes) {
  KahanSum<Real> sum;
  if (geometry == CavityGeometry::Interval1D) {
    for (int n = 1; n <= max_modes; ++n) {
      const Real w = n * kPi / d;
      const Real term = std::exp(-lambda * w) * std::log1p(-std::exp(-beta * w)) / beta;
      sum.add(term);
      if (n > 4 && std::abs(term) < kTermTol * std::abs(sum.value())) return sum.value();
    }
  } else {
    for (int n = 0; n <= max_modes; ++n) {
      const Real m = n * kPi / d;
      const Real pol = (n == 0) ? 1.0L : 2.0L;
      KahanSum<Real> inner;
      for (int j = 1; j <= 200000; ++j) {
        const Real s = lambda + j * beta;
        const Real piece = std::exp(-s * m) * (m / s + 1.0L / (s * s)) / j;
        inner.add(piece);
        if (j > 4 && piece < kTermTol * std::max(std::abs(inner.value()), Real(1e-300L)))
          break;
      }
      const Real term = -pol / (2.0L * kPi * beta) * inner.value();
      sum.add(term);
      if (n > 4 && std::abs(term) < kTermTol * std::abs(sum.value())) return sum.value();
    }
  }
  throw truncation_error("casimir: regulated thermal sum not converged within max_modes");
}

// Richardson ladder on a geometric regulator sequence lambda_j = lambda0/2^j:
// eliminates the divergent powers lambda^{-4..-1} and the leading analytic
// corrections lambda^{1..4}; the surviving column converges to the lambda^0
// term, and its two deepest entries provide the residual diagnostic.
RegulatedValue extrapolate_lambda(const std::function<Real(Real)>& f, double lambda0) {
  RegulatedValue out;
  std::vector<Real> table(kLadderLevels);
  for (int j = 0; j < kLadderLevels; ++j) {
    const Real lambda = static_cast<Real>(lambda0) * std::ldexp(1.0L, -j);
    out.lambdas.push_back(static_cast<double>(lambda));
    table[j] = f(lambda);
    out.raw.push_back(static_cast<double>(table[j]));
  }
  std::size_t len = table.size();
  for (int p : kLadderPowers) {
    const Real qp = std::ldexp(1.0L, -p);  // (1/2)^p
    for (std::size_t j = 0; j + 1 < len; ++j)
      table[j] = (table[j + 1] - qp * table[j]) / (1.0L - qp);
    --len;
  }
  out.value = static_cast<double>(table[len - 1]);
  out.residual = static_cast<double>(std::abs(table[len - 1] - table[len - 2]));
  const double scale = std::max(std::abs(out.value), 1e-12);
  if (out.residual > 5e-4 * scale) {
    std::ostringstream msg;
    msg << "casimir: lambda -> 0 extrapolation not converged (residual " << out.residual
        << " on value " << out.value << "); lambda sequence " << out.lambdas.front() << " .. "
        << out.lambdas.back();
    throw precision_error(msg.str());
  }
  return out;
}

}  // namespace

double regulated_mode_energy(const CavitySpec& cavity, double lambda) {
  validate(cavity);
  if (!(lambda > 0.0)) throw domain_error("regulated_mode_energy: lambda must be > 0");
  return static_cast<double>(regulated_zero_point(cavity.geometry, cavity.separation, lambda,
                                                  cavity.max_modes));
}

double regulated_mode_free_energy(const CavitySpec& cavity, double lambda, double beta) {
  validate(cavity);
  if (!(lambda > 0.0)) throw domain_error("regulated_mode_free_energy: lambda must be > 0");
  if (!(beta > 0.0)) throw domain_error("regulated_mode_free_energy: beta must be > 0");
  return static_cast<double>(
      regulated_zero_point(cavity.geometry, cavity.separation, lambda, cavity.max_modes) +
      regulated_thermal(cavity.geometry, cavity.separation, lambda, beta, cavity.max_modes));
}

RegulatedValue casimir_energy(const CavitySpec& cavity) {
  validate(cavity);
  return extrapolate_lambda(
      [&](Real lambda) {
        return regulated_zero_point(cavity.geometry, cavity.separation, lambda,
                                    cavity.max_modes);
      },
      effective_lambda(cavity));
}

double zero_point_work(const CavitySpec& initial, const CavitySpec& final_cavity) {
  validate(initial);
  validate(final_cavity);
  if (initial.geometry != final_cavity.geometry)
    throw domain_error("zero_point_work: both cavities must share the geometry");
  if (initial.separation == final_cavity.separation) return 0.0;
  // extrapolate the difference: one ladder, better conditioned than two
  const double lambda0 = std::min(effective_lambda(initial), effective_lambda(final_cavity));
  const int max_modes = std::max(initial.max_modes, final_cavity.max_modes);
  const RegulatedValue diff = extrapolate_lambda(
      [&](Real lambda) {
        return regulated_zero_point(final_cavity.geometry, final_cavity.separation, lambda,
                                    max_modes) -
               regulated_zero_point(initial.geometry, initial.separation, lambda, max_modes);
      },
      lambda0);
  return diff.value;
}

double free_energy_difference(const CavitySpec& initial, const CavitySpec& final_cavity,
                              double beta) {
  validate(initial);
  validate(final_cavity);
  if (initial.geometry != final_cavity.geometry)
    throw domain_error("free_energy_difference: both cavities must share the geometry");
  if (!(beta > 0.0) || std::isinf(beta))
    throw domain_error("free_energy_difference: beta must be finite > 0");
  if (initial.separation == final_cavity.separation) return 0.0;
  const double lambda0 = std::min(effective_lambda(initial), effective_lambda(final_cavity));
  const int max_modes = std::max(initial.max_modes, final_cavity.max_modes);
  auto regulated_free = [&](const CavitySpec& c, Real lambda) {
    return regulated_zero_point(c.geometry, c.separation, lambda, max_modes) +
           regulated_thermal(c.geometry, c.separation, lambda, beta, max_modes);
  };
  const RegulatedValue diff = extrapolate_lambda(
      [&](Real lambda) {
        return regulated_free(final_cavity, lambda) - regulated_free(initial, lambda);
      },
      lambda0);
  return diff.value;
}

}  // namespace qwork
