#include "qwork/charfunc.hpp"

#include <cmath>
#include <sstream>

#include "qwork/errors.hpp"
#include "qwork/math.hpp"

namespace qwork {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

void check_finite(const cplx& v, const char* where) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw range_error(std::string(where) + ": value overflowed double range");
}

// Shared prefactor of Eqs. for driven modes:
//   e^{-i nu w_t |alpha|^2} * e^{z (e^{i nu w_t} - 1)}
cplx drive_prefactor(const DriveFunctionals& f, const cplx& nu) {
  const cplx a = std::exp(-kI * nu * f.omega_t * std::norm(f.alpha));
  const cplx b = std::exp(f.rapidity * (std::exp(kI * nu * f.omega_t) - 1.0));
  return a * b;
}

// Number-state form for complex nu (Laguerre argument then complex); only the
// n = 0 case is exercised with truly complex nu, via the beta -> inf thermal
// limit, where L_0 = 1 keeps this exact.
cplx char_number_core(const DriveFunctionals& f, int n, const cplx& nu) {
  const cplx s = std::sin(0.5 * nu * f.omega_t);
  const cplx x = 4.0 * f.rapidity * s * s;
  cplx lag{1.0, 0.0};
  if (n > 0) {
    cplx lm1{1.0, 0.0};
    cplx l = 1.0 - x;
    for (int j = 1; j < n; ++j) {
      const cplx lp1 = ((2.0 * j + 1.0 - x) * l - static_cast<double>(j) * lm1) /
                       static_cast<double>(j + 1);
      lm1 = l;
      l = lp1;
    }
    lag = l;
  }
  const cplx value =
      drive_prefactor(f, nu) * std::exp(kI * nu * f.delta * (n + 0.5)) * lag;
  check_finite(value, "char_number");
  return value;
}

}  // namespace

void validate_state(const InitialState& state) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NumberState>) {
          if (s.n < 0) throw domain_error("NumberState: n must be >= 0");
        } else if constexpr (std::is_same_v<T, ThermalState>) {
          if (!(s.beta > 0.0)) throw domain_error("ThermalState: beta must be > 0 or +inf");
        } else {
          if (!std::isfinite(s.amplitude.real()) || !std::isfinite(s.amplitude.imag()))
            throw domain_error("CoherentState: amplitude must be finite");
        }
      },
      state);
}

std::complex<double> char_number(const DriveFunctionals& f, int n, double nu) {
  if (n < 0) throw domain_error("char_number: n must be >= 0");
  return char_number_core(f, n, cplx{nu, 0.0});
}

std::complex<double> char_thermal(const DriveFunctionals& f, double beta,
                                  std::complex<double> nu) {
  if (!(beta > 0.0)) throw domain_error("char_thermal: beta must be > 0 or +inf");
  if (std::isinf(beta)) return char_number_core(f, 0, nu);  // ground state

  // Geometric-series convergence: |w| < 1 for w = e^{i nu delta - beta omega0}.
  const cplx log_w = kI * nu * f.delta - beta * f.omega0;
  if (!(log_w.real() < 0.0)) {
    std::ostringstream msg;
    msg << "char_thermal: geometric series diverges, |exp(i nu delta - beta omega0)| = "
        << std::exp(log_w.real()) << " >= 1";
    throw domain_error(msg.str());
  }
  const cplx w = std::exp(log_w);
  const double q = std::exp(-beta * f.omega0);

  const cplx s = std::sin(0.5 * nu * f.omega_t);
  const cplx x = 4.0 * f.rapidity * s * s;
  // -x / (e^{beta omega0} e^{-i nu delta} - 1) written as -x w / (1 - w) so
  // large beta never overflows.
  const cplx value = drive_prefactor(f, nu) * std::exp(0.5 * kI * nu * f.delta) *
                     (1.0 - q) * std::exp(-x * w / (1.0 - w)) / (1.0 - w);
  check_finite(value, "char_thermal");
  return value;
}

std::complex<double> char_coherent(const DriveFunctionals& f, std::complex<double> amplitude,
                                   double nu, const SeriesConfig& series) {
  const double a2 = std::norm(amplitude);
  const double sn = std::sin(0.5 * nu * f.omega_t);
  const double x = 4.0 * f.rapidity * sn * sn;
  const cplx y = a2 * std::exp(kI * nu * f.delta);

  // sum_n y^n/n! L_n(x), truncated once the Poisson tail bound
  // e^{-a2} |y|^n/n! * e^{x/2} drops below tail_tol.
  KahanSum<cplx> sum;
  cplx y_pow{1.0, 0.0};  // y^n / n!
  double lag_m1 = 1.0;
  double lag = 1.0;  // L_n(x), starts at L_0
  const double tail_scale = std::exp(-a2 + 0.5 * x);
  int terms = 0;
  for (int n = 0;; ++n) {
    sum.add(y_pow * lag);
    terms = n + 1;
    // advance y^n/n! and the Laguerre recurrence
    y_pow *= y / static_cast<double>(n + 1);
    const double lag_p1 = ((2.0 * n + 1.0 - x) * lag - n * lag_m1) / (n + 1.0);
    lag_m1 = lag;
    lag = lag_p1;
    // |y_pow| now holds a2^{n+1}/(n+1)!; bound the remaining Poisson mass by a
    // geometric tail once the ratio a2/(n+2) < 1.
    const double ratio = a2 / (n + 2.0);
    if (ratio < 1.0) {
      const double tail = tail_scale * std::abs(y_pow) / (1.0 - ratio);
      if (tail < series.tail_tol) break;
    }
    if (n + 1 >= series.max_terms) {
      std::ostringstream msg;
      msg << "char_coherent: series not converged after " << series.max_terms
          << " terms (partial sum " << sum.value().real() << (sum.value().imag() < 0 ? "-" : "+")
          << std::abs(sum.value().imag()) << "i)";
      throw convergence_error(msg.str());
    }
  }
  (void)terms;

  const cplx value = drive_prefactor(f, cplx{nu, 0.0}) *
                     std::exp(0.5 * kI * nu * f.delta) * std::exp(-a2) * sum.value();
  check_finite(value, "char_coherent");

  if (f.delta == 0.0) {
    // Fixed frequency: the series must collapse to the Bessel closed form
    // G = prefactor * J0(4 |amplitude eta sin(nu w_t/2)|).
    const double arg = 4.0 * std::abs(amplitude) * std::sqrt(f.rapidity) * std::abs(sn);
    const cplx closed = drive_prefactor(f, cplx{nu, 0.0}) * std::cyl_bessel_j(0.0, arg);
    if (std::abs(closed - value) > 1e-9 * std::max(1.0, std::abs(value)))
      throw precision_error("char_coherent: series and Bessel closed form disagree");
  }
  return value;
}

std::complex<double> char_boundary(const ModeSpec& mode, double beta,
                                   std::complex<double> nu, double t) {
  if (!(beta > 0.0)) throw domain_error("char_boundary: beta must be > 0 or +inf");
  const double w0 = mode_frequency(mode, 0.0);
  const double wt = mode_frequency(mode, t);
  const double delta = wt - w0;
  const cplx phase = std::exp(0.5 * kI * nu * delta);
  if (std::isinf(beta)) return phase;  // Eq. for the zero-temperature limit
  const cplx w = std::exp(kI * nu * delta - beta * w0);
  if (!(std::abs(w) < 1.0))
    throw domain_error("char_boundary: |exp(i nu delta - beta omega0)| >= 1");
  const double q = std::exp(-beta * w0);
  return phase * (1.0 - q) / (1.0 - w);
}

std::complex<double> char_state(const DriveFunctionals& f, const InitialState& state,
                                double nu, const SeriesConfig& series) {
  validate_state(state);
  return std::visit(
      [&](const auto& s) -> cplx {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NumberState>) {
          return char_number(f, s.n, nu);
        } else if constexpr (std::is_same_v<T, ThermalState>) {
          return char_thermal(f, s.beta, cplx{nu, 0.0});
        } else {
          return char_coherent(f, s.amplitude, nu, series);
        }
      },
      state);
}

std::complex<double> char_total(std::span<const ModeChannel> channels, double nu,
                                const SeriesConfig& series) {
  // Product as exp(sum of logs) so products over many modes cannot underflow
  // one factor at a time.
  KahanSum<cplx> log_sum;
  for (const ModeChannel& ch : channels)
    log_sum.add(std::log(char_state(ch.functionals, ch.state, nu, series)));
  return std::exp(log_sum.value());
}

std::vector<CharacteristicSample> characteristic_curve(std::span<const ModeChannel> channels,
                                                       std::span<const double> nu_grid,
                                                       const SeriesConfig& series) {
  std::vector<CharacteristicSample> out;
  out.reserve(nu_grid.size());
  for (double nu : nu_grid) out.push_back({nu, char_total(channels, nu, series)});
  return out;
}

std::vector<std::complex<double>> log_char_total_grid(std::span<const ModeChannel> channels,
                                                      std::span<const double> nu_grid,
                                                      const SeriesConfig& series) {
  std::vector<cplx> total(nu_grid.size(), cplx{0.0, 0.0});
  std::vector<cplx> values(nu_grid.size());
  for (const ModeChannel& ch : channels) {
    for (std::size_t i = 0; i < nu_grid.size(); ++i)
      values[i] = char_state(ch.functionals, ch.state, nu_grid[i], series);
    const std::vector<cplx> logs = unwrap_log(values);
    for (std::size_t i = 0; i < nu_grid.size(); ++i) total[i] += logs[i];
  }
  return total;
}

}  // namespace qwork
