#include "qwork/workdist.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "qwork/errors.hpp"
#include "qwork/math.hpp"

namespace qwork {

namespace {

using cplx = std::complex<double>;

constexpr double kClipTol = 1e-12;        // negative round-off clipped to zero below this
constexpr double kCancelTol = 1e-9;       // raw series value below -kCancelTol is an error
constexpr double kAtomMergeTol = 1e-12;   // energy units

void merge_sorted_atoms(std::vector<WorkAtom>& atoms, double tol) {
  std::sort(atoms.begin(), atoms.end(),
            [](const WorkAtom& a, const WorkAtom& b) { return a.work < b.work; });
  std::vector<WorkAtom> merged;
  merged.reserve(atoms.size());
  for (const WorkAtom& a : atoms) {
    if (!merged.empty() && a.work - merged.back().work <= tol) {
      merged.back().weight += a.weight;
    } else {
      merged.push_back(a);
    }
  }
  atoms.swap(merged);
}

double kahan_total(const std::vector<WorkAtom>& atoms) {
  KahanSum<double> s;
  for (const WorkAtom& a : atoms) s.add(a.weight);
  return s.value();
}

}  // namespace

double WorkDistribution::total_weight() const { return kahan_total(atoms); }

double WorkDistribution::mean() const {
  KahanSum<double> s;
  for (const WorkAtom& a : atoms) s.add(a.weight * a.work);
  return s.value();
}

double WorkDistribution::variance() const {
  const double m = mean();
  KahanSum<double> s;
  for (const WorkAtom& a : atoms) s.add(a.weight * (a.work - m) * (a.work - m));
  return s.value();
}

std::complex<double> char_of(const WorkDistribution& dist, double nu) {
  KahanSum<cplx> s;
  for (const WorkAtom& a : dist.atoms) s.add(a.weight * std::polar(1.0, nu * a.work));
  return s.value();
}

WorkDistribution convolve(const WorkDistribution& a, const WorkDistribution& b,
                          double merge_tol) {
  WorkDistribution out;
  out.atoms.reserve(a.atoms.size() * b.atoms.size());
  for (const WorkAtom& x : a.atoms)
    for (const WorkAtom& y : b.atoms)
      out.atoms.push_back({x.work + y.work, x.weight * y.weight});
  merge_sorted_atoms(out.atoms, merge_tol);
  out.mass_deficit = 1.0 - kahan_total(out.atoms);
  out.state_tag = a.state_tag + " * " + b.state_tag;
  return out;
}

// ---------------------------------------------------------------------------
// Weight functions.
// ---------------------------------------------------------------------------

double weights_number(int n, double z, int s) {
  if (n < 0) throw domain_error("weights_number: n must be >= 0");
  if (!(z >= 0.0)) throw domain_error("weights_number: z must be >= 0");
  if (s < -n) throw domain_error("weights_number: s must be >= -n");
  if (z == 0.0) return s == 0 ? 1.0 : 0.0;

  const int lower = std::min(n, n + s);
  const int upper = std::max(n, n + s);
  const int k = std::abs(s);
  const double lag = laguerre_assoc(lower, k, z);
  if (lag == 0.0) return 0.0;
  const double log_q = -z + k * std::log(z) + log_factorial(lower) - log_factorial(upper) +
                       2.0 * std::log(std::abs(lag));
  return std::exp(log_q);  // non-negative by construction, no clip needed
}

std::vector<double> weights_number_range(int n, double z, int s_min, int s_max) {
  if (s_max < s_min) throw domain_error("weights_number_range: empty range");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(s_max - s_min + 1));
  for (int s = s_min; s <= s_max; ++s) out.push_back(weights_number(n, z, s));
  return out;
}

double weights_number_series(int n, double z, int s) {
  if (n < 0) throw domain_error("weights_number_series: n must be >= 0");
  if (!(z >= 0.0)) throw domain_error("weights_number_series: z must be >= 0");
  if (s < -n) throw domain_error("weights_number_series: s must be >= -n");
  if (z == 0.0) return s == 0 ? 1.0 : 0.0;

  const double log_z = std::log(z);
  KahanSum<double> sum;
  for (int l = 0; l <= n; ++l) {
    for (int p = std::max(l - s, 0); p <= 2 * l; ++p) {
      const double log_term = log_factorial(n) - log_factorial(l) - log_factorial(n - l) +
                              log_factorial(2 * l) - log_factorial(p) -
                              log_factorial(2 * l - p) - z + (s + p) * log_z -
                              log_factorial(l) - log_factorial(s + p - l);
      const double term = (p % 2 ? -1.0 : 1.0) * std::exp(log_term);
      sum.add(term);
    }
  }
  const double raw = sum.value();
  if (raw < -kCancelTol) {
    std::ostringstream msg;
    msg << "weights_number_series: catastrophic cancellation at n=" << n << " z=" << z
        << " s=" << s << " (raw " << raw << "); use a smaller n or weights_number_exact";
    throw precision_error(msg.str());
  }
  return (raw < 0.0 && raw > -kClipTol) ? 0.0 : raw;
}

double weights_number_exact(int n, double z, int s) {
  if (n < 0 || n > 10)
    throw domain_error("weights_number_exact: supported for 0 <= n <= 10");
  if (!(z >= 0.0)) throw domain_error("weights_number_exact: z must be >= 0");
  if (s < -n) throw domain_error("weights_number_exact: s must be >= -n");
  if (z == 0.0) return s == 0 ? 1.0 : 0.0;

  namespace mp = boost::multiprecision;
  using Int = mp::cpp_int;
  using Rat = mp::cpp_rational;

  // exact dyadic rational from the double z
  int exp2 = 0;
  const double mant = std::frexp(z, &exp2);
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  Rat zr(Int(scaled), Int(1) << 53);
  if (exp2 > 0)
    zr *= Rat(Int(1) << exp2, 1);
  else if (exp2 < 0)
    zr /= Rat(Int(1) << (-exp2), 1);

  auto factorial = [](int m) {
    Int r = 1;
    for (int i = 2; i <= m; ++i) r *= i;
    return r;
  };
  auto binomial = [&](int a, int b) {
    Int r = 1;
    for (int i = 0; i < b; ++i) r *= (a - i);
    return r / factorial(b);
  };
  auto pow_rat = [](const Rat& base, int e) {
    Rat r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
  };

  Rat sum = 0;
  for (int l = 0; l <= n; ++l) {
    for (int p = std::max(l - s, 0); p <= 2 * l; ++p) {
      Rat term = Rat(binomial(n, l) * binomial(2 * l, p),
                     factorial(l) * factorial(s + p - l));
      term *= pow_rat(zr, s + p);
      if (p % 2) term = -term;
      sum += term;
    }
  }
  // only the final e^{-z} multiply is inexact
  return sum.convert_to<double>() * std::exp(-z);
}

// ---------------------------------------------------------------------------
// Distribution assembly.
// ---------------------------------------------------------------------------

WorkDistribution dist_number(const DriveFunctionals& f, int n, double eps) {
  if (n < 0) throw domain_error("dist_number: n must be >= 0");
  if (!(eps > 0.0)) throw domain_error("dist_number: eps must be > 0");

  const double z = f.rapidity;
  const double shift = -f.omega_t * std::norm(f.alpha);
  auto work_at = [&](int s) { return (s + n + 0.5) * f.delta + s * f.omega0 + shift; };

  WorkDistribution out;
  out.state_tag = "number n=" + std::to_string(n);

  int s_max = static_cast<int>(std::ceil(n + 10.0 * z)) + 10;
  constexpr int kHardCap = 1 << 20;
  KahanSum<double> mass;
  std::vector<WorkAtom> atoms;
  int s = -n;
  for (;;) {
    for (; s <= s_max; ++s) {
      const double q = weights_number(n, z, s);
      if (q > 0.0) atoms.push_back({work_at(s), q});
      mass.add(q);
    }
    if (1.0 - mass.value() <= eps) break;
    if (s_max > kHardCap)
      throw convergence_error("dist_number: tail mass does not reach 1 - eps");
    s_max *= 2;  // doubling growth until the tail is captured
  }
  merge_sorted_atoms(atoms, kAtomMergeTol);  // delta and omega0 lattices can collide
  out.atoms = std::move(atoms);
  out.mass_deficit = 1.0 - kahan_total(out.atoms);
  return out;
}

WorkDistribution dist_boundary_thermal(const ModeSpec& mode, double beta, double t,
                                       double eps) {
  if (!(beta > 0.0)) throw domain_error("dist_boundary_thermal: beta must be > 0 or +inf");
  if (!(eps > 0.0)) throw domain_error("dist_boundary_thermal: eps must be > 0");
  const double w0 = mode_frequency(mode, 0.0);
  const double wt = mode_frequency(mode, t);
  const double delta = wt - w0;

  WorkDistribution out;
  if (std::isinf(beta)) {
    out.atoms = {{0.5 * delta, 1.0}};
    out.mass_deficit = 0.0;
    out.state_tag = "boundary ground";
    return out;
  }
  const double q = std::exp(-beta * w0);
  // geometric weights sum to 1 - q^{R+1}; stop once the tail is below eps
  const int r_max = std::max(0, static_cast<int>(std::ceil(std::log(eps) / std::log(q))) - 1);
  double weight = 1.0 - q;
  std::vector<WorkAtom> atoms;
  atoms.reserve(r_max + 1);
  for (int r = 0; r <= r_max; ++r) {
    atoms.push_back({(r + 0.5) * delta, weight});
    weight *= q;
  }
  merge_sorted_atoms(atoms, kAtomMergeTol);  // all atoms coincide when delta == 0
  out.atoms = std::move(atoms);
  out.mass_deficit = 1.0 - kahan_total(out.atoms);
  std::ostringstream tag;
  tag << "boundary thermal beta=" << beta;
  out.state_tag = tag.str();
  return out;
}

namespace {

// Mixture of number-state combs with the given occupation weights; the weight
// sequence is consumed until its tail drops below half the eps budget, and
// each component comb gets the other half.
WorkDistribution mix_number_combs(const DriveFunctionals& f,
                                  const std::function<double(int)>& occupation, double eps,
                                  std::string tag) {
  std::vector<double> weights;
  KahanSum<double> cum;
  while (true) {
    const double w = occupation(static_cast<int>(weights.size()));
    weights.push_back(w);
    cum.add(w);
    if (1.0 - cum.value() <= 0.5 * eps) break;
    if (weights.size() > 4096)
      throw convergence_error("work distribution mixture did not truncate");
  }

  std::vector<WorkAtom> atoms;
  for (std::size_t n = 0; n < weights.size(); ++n) {
    if (weights[n] <= 0.0) continue;
    const WorkDistribution comb = dist_number(f, static_cast<int>(n), 0.5 * eps);
    for (const WorkAtom& a : comb.atoms) atoms.push_back({a.work, weights[n] * a.weight});
  }
  merge_sorted_atoms(atoms, kAtomMergeTol);

  WorkDistribution out;
  out.atoms = std::move(atoms);
  out.mass_deficit = 1.0 - kahan_total(out.atoms);
  out.state_tag = std::move(tag);
  return out;
}

}  // namespace

WorkDistribution dist_coherent(const DriveFunctionals& f, std::complex<double> amplitude,
                               double eps) {
  if (!(eps > 0.0)) throw domain_error("dist_coherent: eps must be > 0");
  const double a2 = std::norm(amplitude);
  std::ostringstream tag;
  tag << "coherent |amp|=" << std::abs(amplitude);
  return mix_number_combs(
      f,
      [a2](int level) {
        if (a2 == 0.0) return level == 0 ? 1.0 : 0.0;
        return std::exp(-a2 + level * std::log(a2) - log_factorial(level));
      },
      eps, tag.str());
}

WorkDistribution dist_thermal(const DriveFunctionals& f, double beta, double eps) {
  if (!(beta > 0.0)) throw domain_error("dist_thermal: beta must be > 0 or +inf");
  if (!(eps > 0.0)) throw domain_error("dist_thermal: eps must be > 0");
  std::ostringstream tag;
  tag << "thermal beta=" << beta;
  if (std::isinf(beta)) {
    WorkDistribution out = dist_number(f, 0, eps);
    out.state_tag = tag.str();
    return out;
  }
  const double q = std::exp(-beta * f.omega0);
  return mix_number_combs(
      f, [q](int level) { return (1.0 - q) * std::pow(q, level); }, eps, tag.str());
}

}  // namespace qwork
