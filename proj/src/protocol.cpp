#include "qwork/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qwork/errors.hpp"
#include "qwork/math.hpp"

namespace qwork {

namespace {

constexpr double kRampClipFraction = 1e-6;  // omega floor for linear ramps

// Switching evaluator with the tabulated interpolant built once.
class SwitchEvaluator {
 public:
  explicit SwitchEvaluator(const DriveProtocol& protocol) : protocol_(protocol) {
    if (const auto* tab = std::get_if<TabulatedSwitch>(&protocol.switching)) {
      interp_ = MonotoneCubic(tab->times, tab->values);
      if (interp_->front() > 0.0 || interp_->back() < protocol.tau)
        throw interpolation_error("tabulated switching must cover [0, tau]");
    }
  }

  double operator()(double t) const {
    if (t < 0.0) throw domain_error("switching function queried at t < 0");
    if (t > protocol_.tau) return 0.0;
    return std::visit(
        [&](const auto& shape) -> double {
          using T = std::decay_t<decltype(shape)>;
          if constexpr (std::is_same_v<T, ConstantSwitch>) {
            return shape.amplitude;
          } else if constexpr (std::is_same_v<T, GaussianPulse>) {
            if (!(shape.width > 0.0)) throw domain_error("GaussianPulse: width must be > 0");
            const double c = shape.center.value_or(0.5 * protocol_.tau);
            const double u = (t - c) / shape.width;
            return shape.amplitude * std::exp(-0.5 * u * u);
          } else if constexpr (std::is_same_v<T, RaisedCosine>) {
            if (!(protocol_.tau > 0.0))
              throw domain_error("RaisedCosine: needs tau > 0");
            return 0.5 * shape.amplitude *
                   (1.0 - std::cos(2.0 * std::numbers::pi * t / protocol_.tau));
          } else if constexpr (std::is_same_v<T, SinusoidSwitch>) {
            return shape.amplitude * std::sin(shape.angular_frequency * t + shape.phase);
          } else {
            return (*interp_)(t);
          }
        },
        protocol_.switching);
  }

 private:
  const DriveProtocol& protocol_;
  std::optional<MonotoneCubic> interp_;
};

class FrequencyEvaluator {
 public:
  explicit FrequencyEvaluator(const ModeSpec& mode) : mode_(mode) {
    if (const auto* tab = std::get_if<TabulatedFrequency>(&mode.frequency))
      interp_ = MonotoneCubic(tab->times, tab->omegas);
  }

  double operator()(double t) const {
    const double w = std::visit(
        [&](const auto& shape) -> double {
          using T = std::decay_t<decltype(shape)>;
          if constexpr (std::is_same_v<T, ConstantFrequency>) {
            return shape.omega;
          } else if constexpr (std::is_same_v<T, LinearRampFrequency>) {
            if (!(shape.ramp_time > 0.0))
              throw domain_error("LinearRampFrequency: ramp_time must be > 0");
            double w0 = shape.omega_start;
            double w1 = shape.omega_end;
            double v = (t <= 0.0)              ? w0
                       : (t >= shape.ramp_time) ? w1
                                                 : w0 + (w1 - w0) * t / shape.ramp_time;
            return std::max(v, kRampClipFraction * w0);
          } else if constexpr (std::is_same_v<T, TanhRampFrequency>) {
            if (!(shape.width > 0.0)) throw domain_error("TanhRampFrequency: width must be > 0");
            return shape.omega_start +
                   (shape.omega_end - shape.omega_start) * 0.5 *
                       (1.0 + std::tanh((t - shape.center) / shape.width));
          } else {
            return (*interp_)(t);
          }
        },
        mode_.frequency);
    if (!(w > 0.0)) throw model_error("mode '" + mode_.label + "': frequency not positive at t");
    return w;
  }

 private:
  const ModeSpec& mode_;
  std::optional<MonotoneCubic> interp_;
};

// Cumulative composite Simpson on a uniform grid (N even). out[i] is the
// integral from node 0 to node i; odd prefixes use the local 3-point rule.
template <typename T>
void cumulative_simpson(const std::vector<T>& f, double h, std::vector<T>& out) {
  const std::size_t n = f.size() - 1;  // intervals
  out.assign(f.size(), T{});
  for (std::size_t k = 2; k <= n; k += 2)
    out[k] = out[k - 2] + (h / 3.0) * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
  for (std::size_t k = 1; k <= n; k += 2)
    out[k] = out[k - 1] + (h / 12.0) * (5.0 * f[k - 1] + 8.0 * f[k] - f[k + 1]);
}

// Plain composite Simpson over [a, b] with n (even) intervals.
template <typename Fn>
double simpson(Fn&& fn, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = fn(a) + fn(b);
  for (int i = 1; i < n; ++i) acc += fn(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

struct DriveIntegrals {
  double zeta = 0.0;                  // over [0, t]
  std::complex<double> window{0.0};   // int_0^{min(t,tau)} e^{i zeta} G
  double theta_over_f2 = 0.0;         // theta / |F|^2
};

bool within(double delta, double magnitude, double rel_tol) {
  return std::abs(delta) <= rel_tol * std::max(1.0, magnitude);
}

}  // namespace

double evaluate_switching(const DriveProtocol& protocol, double t) {
  return SwitchEvaluator(protocol)(t);
}

double mode_frequency(const ModeSpec& mode, double t) {
  return FrequencyEvaluator(mode)(t);
}

DriveFunctionals compute_functionals(const ModeSpec& mode, const DriveProtocol& protocol,
                                     double t, const QuadratureConfig& quad) {
  if (t < 0.0) throw domain_error("compute_functionals: t must be >= 0");
  if (protocol.tau < 0.0) throw domain_error("compute_functionals: tau must be >= 0");

  const SwitchEvaluator g(protocol);
  const FrequencyEvaluator omega(mode);
  const std::complex<double> coupling = mode.coupling;

  DriveFunctionals out;
  out.t = t;
  out.omega0 = omega(0.0);
  out.omega_t = omega(t);
  out.delta = out.omega_t - out.omega0;

  const double t_drive = std::min(t, protocol.tau);

  // Initial grid: step small enough to resolve the fastest oscillation.
  double omega_max = out.omega0;
  const double horizon = std::max(t, protocol.tau);
  if (horizon > 0.0)
    for (int i = 0; i <= 256; ++i) omega_max = std::max(omega_max, omega(horizon * i / 256.0));
  const double step_cap =
      std::min(0.1 / omega_max, protocol.tau > 0.0 ? protocol.tau / 200.0 : 0.1 / omega_max);

  auto n_intervals = [&](double length, int refinement) {
    int n = quad.min_intervals;
    if (length > 0.0)
      n = std::max<int>(n, static_cast<int>(std::ceil(length / step_cap)));
    if (n % 2) ++n;
    return n << refinement;
  };

  auto evaluate_pass = [&](int refinement) {
    DriveIntegrals result;
    if (t_drive > 0.0) {
      const int n = n_intervals(t_drive, refinement);
      const double h = t_drive / n;
      std::vector<double> w(n + 1), gv(n + 1);
      for (int i = 0; i <= n; ++i) {
        // clamp the last node so rounding cannot push it past the window edge
        const double ti = (i == n) ? t_drive : i * h;
        w[i] = omega(ti);
        gv[i] = g(ti);
      }
      std::vector<double> zeta;
      cumulative_simpson(w, h, zeta);

      std::vector<std::complex<double>> window_integrand(n + 1), window;
      for (int i = 0; i <= n; ++i)
        window_integrand[i] = std::polar(gv[i], zeta[i]);  // g e^{i zeta}
      cumulative_simpson(window_integrand, h, window);

      // Outer Simpson of the triangle integral; the inner integral over t''
      // is the running window[] evaluated at the outer node.
      std::vector<double> theta_integrand(n + 1);
      for (int i = 0; i <= n; ++i)
        theta_integrand[i] =
            gv[i] * std::imag(std::polar(1.0, zeta[i]) * std::conj(window[i]));
      std::vector<double> theta_cum;
      cumulative_simpson(theta_integrand, h, theta_cum);

      result.zeta = zeta[n];
      result.window = window[n];
      result.theta_over_f2 = theta_cum[n];
    }
    if (t > protocol.tau) {
      const int n = n_intervals(t - protocol.tau, refinement);
      result.zeta += simpson([&](double s) { return omega(s); }, protocol.tau, t, n);
    }
    return result;
  };

  DriveIntegrals prev = evaluate_pass(0);
  bool converged = (t == 0.0);
  for (int r = 1; !converged && r <= quad.max_refinements; ++r) {
    const DriveIntegrals cur = evaluate_pass(r);
    converged = within(cur.zeta - prev.zeta, std::abs(cur.zeta), quad.rel_tol) &&
                within(std::abs(cur.window - prev.window), std::abs(cur.window), quad.rel_tol) &&
                within(cur.theta_over_f2 - prev.theta_over_f2, std::abs(cur.theta_over_f2),
                       quad.rel_tol);
    prev = cur;
    if (converged) break;
  }
  if (!converged && t > 0.0) {
    std::ostringstream msg;
    msg << "compute_functionals: quadrature did not converge to rel_tol " << quad.rel_tol;
    throw convergence_error(msg.str());
  }

  const double f2 = std::norm(coupling);
  out.zeta = prev.zeta;
  out.xi = std::complex<double>(0.0, 1.0) * coupling * prev.window;
  out.theta = f2 * prev.theta_over_f2;
  const double g_t = g(t);
  out.alpha = (g_t == 0.0) ? std::complex<double>(0.0, 0.0)
                           : -g_t * coupling / out.omega_t;
  out.eta = out.xi + out.alpha * std::polar(1.0, out.zeta);
  out.rapidity = std::norm(out.eta);
  return out;
}

}  // namespace qwork
