#include "qwork/moments.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qwork/charfunc.hpp"
#include "qwork/errors.hpp"
#include "qwork/math.hpp"

namespace qwork {

namespace {

using cplx = std::complex<double>;

// ln cf with the principal branch; the stencil must stay away from the cut.
cplx log_cf(const std::function<cplx(double)>& cf, double nu) {
  const cplx v = cf(nu);
  if (std::abs(std::arg(v)) > 0.5 * std::numbers::pi)
    throw precision_error("cumulants_fd: stencil too wide, ln cf leaves the principal branch");
  return std::log(v);
}

// Central differences of f at 0 for derivative orders 1..4, O(h^2) accurate.
cplx central_diff(int order, const cplx& f2m, const cplx& f1m, const cplx& f0,
                  const cplx& f1p, const cplx& f2p, double h) {
  switch (order) {
    case 1: return (f1p - f1m) / (2.0 * h);
    case 2: return (f1p - 2.0 * f0 + f1m) / (h * h);
    case 3: return (f2p - 2.0 * f1p + 2.0 * f1m - f2m) / (2.0 * h * h * h);
    default: return (f2p - 4.0 * f1p + 6.0 * f0 - 4.0 * f1m + f2m) / (h * h * h * h);
  }
}

}  // namespace

MomentReport moments_zero_temperature(std::span<const DriveFunctionals> modes) {
  MomentReport report;
  KahanSum<double> mean, var, skew;
  for (const DriveFunctionals& f : modes) {
    const double wt = f.omega_t;
    mean.add(f.rapidity * wt + 0.5 * f.delta - wt * std::norm(f.alpha));
    var.add(f.rapidity * wt * wt);
    skew.add(f.rapidity * wt * wt * wt);
  }
  report.mean = mean.value();
  report.variance = var.value();
  report.skewness = skew.value();
  report.cumulants = {report.mean, report.variance, report.skewness};
  report.method = "analytic";
  return report;
}

std::vector<CumulantEstimate> cumulants_fd(const std::function<cplx(double)>& cf, int order,
                                           double step, double max_rel_disagreement) {
  if (order < 1 || order > 4) throw domain_error("cumulants_fd: order must be in 1..4");
  if (!(step > 0.0)) throw domain_error("cumulants_fd: step must be > 0");

  // One step for every order: the truncation term of the k-th difference of
  // ln G grows like omega^2 per order, exactly as the cumulant it estimates,
  // so the balance point does not move with k. All orders share two stencils.
  const cplx f0 = log_cf(cf, 0.0);
  struct Pts { cplx m2, m1, p1, p2; };
  auto stencil = [&](double h) {
    return Pts{log_cf(cf, -2.0 * h), log_cf(cf, -h), log_cf(cf, h), log_cf(cf, 2.0 * h)};
  };
  const Pts coarse = stencil(step);
  const Pts fine = stencil(0.5 * step);

  std::vector<CumulantEstimate> out;
  out.reserve(order);
  const cplx i_unit{0.0, 1.0};
  for (int k = 1; k <= order; ++k) {
    const double h = step;
    const cplx dk_c = central_diff(k, coarse.m2, coarse.m1, f0, coarse.p1, coarse.p2, h);
    const cplx dk_f = central_diff(k, fine.m2, fine.m1, f0, fine.p1, fine.p2, 0.5 * h);
    const cplx ik = std::pow(i_unit, k);
    const double c_coarse = (dk_c / ik).real();
    const double c_fine = (dk_f / ik).real();
    // leading error is O(h^2): Richardson with ratio 2
    const double value = (4.0 * c_fine - c_coarse) / 3.0;
    const double error = std::abs(c_fine - c_coarse) / 3.0;
    if (error > max_rel_disagreement * std::max(std::abs(value), 1e-9)) {
      std::ostringstream msg;
      msg << "cumulants_fd: order-" << k << " extrapolation disagrees by " << error
          << "; retry with step <= " << 0.25 * step;
      throw precision_error(msg.str());
    }
    out.push_back({value, error});
  }
  return out;
}

JarzynskiReport jarzynski(std::span<const DriveFunctionals> modes, double beta) {
  if (!(beta > 0.0) || std::isinf(beta)) throw domain_error("jarzynski: beta must be finite > 0");
  JarzynskiReport report;
  KahanSum<double> log_lhs, log_rhs;
  for (const DriveFunctionals& f : modes) {
    if (std::abs(f.alpha) != 0.0)
      throw domain_error("jarzynski: requires t >= tau (instantaneous drive must be off)");
    const cplx g = char_thermal(f, beta, cplx{0.0, beta});  // nu = i beta
    if (std::abs(g.imag()) > 1e-12 * std::max(1.0, std::abs(g.real())))
      throw precision_error("jarzynski: G(i beta) acquired a spurious imaginary part");
    log_lhs.add(std::log(g.real()));
    // Z(t)/Z(0) per mode from the closed partition functions
    const double zr = -0.5 * beta * f.delta + std::log1p(-std::exp(-beta * f.omega0)) -
                      std::log1p(-std::exp(-beta * f.omega_t));
    log_rhs.add(zr);
  }
  report.exp_avg = std::exp(log_lhs.value());
  report.partition_ratio = std::exp(log_rhs.value());
  report.delta_F = -log_lhs.value() / beta;
  report.gap = std::abs(report.exp_avg - report.partition_ratio);
  return report;
}

}  // namespace qwork
