#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace qwork {

// Compensated (Kahan) accumulator; works for double and std::complex<double>.
template <typename T>
class KahanSum {
 public:
  void add(const T& value) {
    const T y = value - compensation_;
    const T t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  const T& value() const { return sum_; }

 private:
  T sum_{};
  T compensation_{};
};

/// Laguerre polynomial L_n(x) by the upward three-term recurrence.
/// Stable for x >= 0, which is the only regime used here.
double laguerre(int n, double x);

/// Associated Laguerre polynomial L_n^{(k)}(x), k >= 0, by upward recurrence.
double laguerre_assoc(int n, int k, double x);

/// log(n!) via lgamma.
double log_factorial(int n);

// Monotone cubic (Fritsch-Carlson) interpolant for tabulated drive data.
// Monotone segments of the data stay monotone, so positive samples give a
// positive interpolant.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;  // throws interpolation_error outside [front, back]
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  std::vector<double> x_, y_, slope_;
};

/// Phase-continuous complex logarithms of a sequence of nonzero values:
/// result[i] = log|v_i| + i*phi_i with phi unwrapped along the sequence,
/// phi_0 the principal argument.
std::vector<std::complex<double>> unwrap_log(const std::vector<std::complex<double>>& values);

}  // namespace qwork
