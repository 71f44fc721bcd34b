#pragma once

#include <stdexcept>
#include <string>

namespace qwork {

// Argument outside the mathematical domain of an operation (t < 0, s < -n, ...).
struct domain_error : std::domain_error {
  explicit domain_error(const std::string& msg) : std::domain_error(msg) {}
};

// Physical model violated (non-positive frequency, drive still on where it must be off).
struct model_error : std::runtime_error {
  explicit model_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tabulated data does not cover the queried point.
struct interpolation_error : std::runtime_error {
  explicit interpolation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Floating-point evaluation lost too many digits; message suggests a remedy.
struct precision_error : std::runtime_error {
  explicit precision_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An infinite series or iterative refinement failed to converge within its budget.
struct convergence_error : std::runtime_error {
  explicit convergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Finite-precision overflow/underflow of an otherwise well-defined value.
struct range_error : std::runtime_error {
  explicit range_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A truncated basis or truncated tail is too small for the requested accuracy.
struct truncation_error : std::runtime_error {
  explicit truncation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Scenario configuration failed validation; message carries the field path.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qwork
