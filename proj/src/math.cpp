#include "qwork/math.hpp"

#include <algorithm>
#include <stdexcept>

#include "qwork/errors.hpp"

namespace qwork {

double laguerre(int n, double x) {
  if (n < 0) throw domain_error("laguerre: degree must be >= 0");
  if (n == 0) return 1.0;
  double lm1 = 1.0;       // L_0
  double l = 1.0 - x;     // L_1
  for (int j = 1; j < n; ++j) {
    const double lp1 = ((2.0 * j + 1.0 - x) * l - j * lm1) / (j + 1.0);
    lm1 = l;
    l = lp1;
  }
  return l;
}

double laguerre_assoc(int n, int k, double x) {
  if (n < 0 || k < 0) throw domain_error("laguerre_assoc: n and k must be >= 0");
  if (n == 0) return 1.0;
  double lm1 = 1.0;             // L_0^{(k)}
  double l = 1.0 + k - x;       // L_1^{(k)}
  for (int j = 1; j < n; ++j) {
    const double lp1 = ((2.0 * j + 1.0 + k - x) * l - (j + k) * lm1) / (j + 1.0);
    lm1 = l;
    l = lp1;
  }
  return l;
}

double log_factorial(int n) {
  if (n < 0) throw domain_error("log_factorial: n must be >= 0");
  return std::lgamma(n + 1.0);
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size() || x_.size() < 2)
    throw domain_error("MonotoneCubic: need at least two samples, equal-length arrays");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1]))
      throw domain_error("MonotoneCubic: abscissae must be strictly increasing");

  const std::size_t n = x_.size();
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    d[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  slope_.assign(n, 0.0);
  slope_[0] = d[0];
  slope_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      slope_[i] = 0.0;  // local extremum: flat tangent
    } else {
      // Fritsch-Carlson weighted harmonic mean
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      slope_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  // clamp endpoint slopes to preserve monotonicity of the first/last segment
  auto clamp_end = [](double m, double delta) {
    if (delta == 0.0) return 0.0;
    if (m * delta < 0.0) return 0.0;
    if (std::abs(m) > 3.0 * std::abs(delta)) return 3.0 * delta;
    return m;
  };
  slope_[0] = clamp_end(slope_[0], d[0]);
  slope_[n - 1] = clamp_end(slope_[n - 1], d[n - 2]);
}

double MonotoneCubic::operator()(double x) const {
  if (empty()) throw interpolation_error("MonotoneCubic: empty table");
  if (x < x_.front() || x > x_.back())
    throw interpolation_error("MonotoneCubic: query outside tabulated range");
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  if (i >= x_.size() - 1) i = x_.size() - 2;
  const double h = x_[i + 1] - x_[i];
  const double s = (x - x_[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] + h11 * h * slope_[i + 1];
}

std::vector<std::complex<double>> unwrap_log(const std::vector<std::complex<double>>& values) {
  std::vector<std::complex<double>> out;
  out.reserve(values.size());
  double phase = 0.0;
  std::complex<double> prev{1.0, 0.0};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::complex<double>& v = values[i];
    if (i == 0) {
      phase = std::arg(v);
    } else {
      phase += std::arg(v * std::conj(prev));  // increment in (-pi, pi]
    }
    out.emplace_back(std::log(std::abs(v)), phase);
    prev = v;
  }
  return out;
}

}  // namespace qwork
