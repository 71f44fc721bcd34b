#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "qwork/charfunc.hpp"
#include "qwork/errors.hpp"
#include "qwork/moments.hpp"
#include "qwork/workdist.hpp"

using namespace qwork;
using cplx = std::complex<double>;

namespace {

struct Scenario {
  ModeSpec mode;
  DriveProtocol protocol;
};

Scenario driven_ramp() {
  Scenario s;
  s.mode.frequency = TanhRampFrequency{1.3, 1.8, 1.5, 0.45};
  s.mode.coupling = {0.42, 0.21};
  s.protocol.tau = 3.0;
  s.protocol.switching = GaussianPulse{1.0, std::nullopt, 0.55};
  return s;
}

}  // namespace

TEST_CASE("zero-temperature moments: idle system has none") {
  const MomentReport r = moments_zero_temperature({});
  CHECK(r.mean == 0.0);
  CHECK(r.variance == 0.0);
  CHECK(r.skewness == 0.0);

  DriveFunctionals still;
  still.omega0 = still.omega_t = 1.4;
  const MomentReport r2 = moments_zero_temperature({&still, 1});
  CHECK(r2.mean == 0.0);
  CHECK(r2.variance == 0.0);
}

TEST_CASE("zero-temperature moments: single mode closed forms after the drive") {
  const Scenario s = driven_ramp();
  const DriveFunctionals f = compute_functionals(s.mode, s.protocol, 3.4);
  REQUIRE(std::abs(f.alpha) == 0.0);
  const MomentReport r = moments_zero_temperature({&f, 1});
  CHECK(r.mean == doctest::Approx(f.rapidity * f.omega_t + 0.5 * f.delta).epsilon(1e-14));
  CHECK(r.variance == doctest::Approx(f.rapidity * f.omega_t * f.omega_t).epsilon(1e-14));
  CHECK(r.skewness ==
        doctest::Approx(f.rapidity * std::pow(f.omega_t, 3)).epsilon(1e-14));
}

TEST_CASE("zero-temperature moments agree with the assembled ground-state comb") {
  const Scenario s = driven_ramp();
  const DriveFunctionals f = compute_functionals(s.mode, s.protocol, 3.4);
  const WorkDistribution d = dist_number(f, 0, 1e-13);
  const MomentReport r = moments_zero_temperature({&f, 1});
  CHECK(std::abs(d.mean() - r.mean) < 1e-8);
  CHECK(std::abs(d.variance() - r.variance) < 1e-8);
}

TEST_CASE("finite-difference cumulants: trivial characteristic function") {
  const auto ones = [](double) { return cplx{1.0, 0.0}; };
  const auto cs = cumulants_fd(ones, 4, 0.05);
  for (const CumulantEstimate& c : cs) {
    CHECK(std::abs(c.value) < 1e-12);
    CHECK(c.error < 1e-12);
  }
}

TEST_CASE("finite-difference cumulants match the zero-T analytic moments") {
  const Scenario s = driven_ramp();
  const DriveFunctionals f = compute_functionals(s.mode, s.protocol, 3.4);
  const MomentReport analytic = moments_zero_temperature({&f, 1});

  const auto cf = [&](double nu) { return char_number(f, 0, nu); };
  const auto cs = cumulants_fd(cf, 3, 0.05 / f.omega_t);
  CHECK(std::abs(cs[0].value - analytic.mean) < 1e-6 * std::abs(analytic.mean));
  CHECK(std::abs(cs[1].value - analytic.variance) < 1e-6 * analytic.variance);
  CHECK(std::abs(cs[2].value - analytic.skewness) < 1e-6 * analytic.skewness);
}

TEST_CASE("thermal boundary-only first cumulant is (delta/2) coth(beta omega0 / 2)") {
  ModeSpec m;
  m.frequency = TanhRampFrequency{1.2, 1.65, 1.0, 0.35};
  const double t = 3.0, beta = 0.9;
  const double w0 = mode_frequency(m, 0.0);
  const double delta = mode_frequency(m, t) - w0;

  const auto cf = [&](double nu) { return char_boundary(m, beta, cplx{nu, 0.0}, t); };
  const auto cs = cumulants_fd(cf, 1, 0.02);
  const double expected = 0.5 * delta / std::tanh(0.5 * beta * w0);
  CHECK(cs[0].value == doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("Richardson residual shrinks at least fourfold when the step halves") {
  const Scenario s = driven_ramp();
  const DriveFunctionals f = compute_functionals(s.mode, s.protocol, 3.4);
  const auto cf = [&](double nu) { return char_thermal(f, 1.3, cplx{nu, 0.0}); };
  const auto coarse = cumulants_fd(cf, 2, 0.08);
  const auto fine = cumulants_fd(cf, 2, 0.04);
  CHECK(fine[1].error * 3.5 < coarse[1].error);
}

TEST_CASE("too coarse a stencil raises a precision error with a suggestion") {
  const Scenario s = driven_ramp();
  const DriveFunctionals f = compute_functionals(s.mode, s.protocol, 3.4);
  const auto cf = [&](double nu) { return char_number(f, 2, nu); };
  CHECK_THROWS_AS(cumulants_fd(cf, 4, 1.4), precision_error);
}

TEST_CASE("cumulants are additive across modes") {
  std::vector<Scenario> scenarios = {driven_ramp(), driven_ramp(), driven_ramp()};
  scenarios[1].mode.coupling = {0.2, -0.35};
  scenarios[1].mode.frequency = ConstantFrequency{1.55};
  scenarios[2].mode.coupling = {0.1, 0.3};
  scenarios[2].mode.frequency = TanhRampFrequency{1.1, 1.5, 1.2, 0.5};

  std::vector<ModeChannel> channels;
  std::vector<InitialState> states = {NumberState{1}, ThermalState{1.4},
                                      CoherentState{{0.5, 0.2}}};
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    channels.push_back({scenarios[k].mode,
                        compute_functionals(scenarios[k].mode, scenarios[k].protocol, 3.4),
                        states[k]});
  }

  const double step = 0.05 / 1.8;
  const auto total =
      cumulants_fd([&](double nu) { return char_total(channels, nu); }, 3, step);
  for (int order = 0; order < 3; ++order) {
    double sum = 0.0;
    for (const ModeChannel& ch : channels) {
      const auto single = cumulants_fd(
          [&](double nu) { return char_state(ch.functionals, ch.state, nu); }, 3, step);
      sum += single[order].value;
    }
    CHECK(std::abs(total[order].value - sum) <
          1e-8 * std::max(1.0, std::abs(sum)));
  }
}

TEST_CASE("Jensen inequality holds for the thermal work average") {
  const Scenario s = driven_ramp();
  const DriveFunctionals f = compute_functionals(s.mode, s.protocol, 3.4);
  const double beta = 1.1;
  const auto cf = [&](double nu) { return char_thermal(f, beta, cplx{nu, 0.0}); };
  const double mean_w = cumulants_fd(cf, 1, 0.02)[0].value;
  const JarzynskiReport r = jarzynski({&f, 1}, beta);
  CHECK(r.exp_avg >= std::exp(-beta * mean_w) - 1e-12);
}

TEST_CASE("jarzynski: identity process, drive-only, and boundary-only") {
  SUBCASE("no drive, no boundary motion") {
    DriveFunctionals idle;
    idle.omega0 = idle.omega_t = 1.5;
    const JarzynskiReport r = jarzynski({&idle, 1}, 1.2);
    CHECK(r.delta_F == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r.gap < 1e-14);
  }
  SUBCASE("drive at fixed frequency leaves the free energy unchanged") {
    Scenario s = driven_ramp();
    s.mode.frequency = ConstantFrequency{1.5};
    const DriveFunctionals f = compute_functionals(s.mode, s.protocol, 3.4);
    REQUIRE(f.rapidity > 0.01);  // work was done
    const JarzynskiReport r = jarzynski({&f, 1}, 1.2);
    CHECK(std::abs(r.delta_F) < 1e-12);
    CHECK(r.gap < 1e-12);
    CHECK(moments_zero_temperature({&f, 1}).mean > 0.0);
  }
  SUBCASE("boundary motion gives the sinh ratio") {
    const Scenario s = driven_ramp();
    const double beta = 0.9;
    const DriveFunctionals f = compute_functionals(s.mode, s.protocol, 4.0);
    const JarzynskiReport r = jarzynski({&f, 1}, beta);
    const double expected =
        std::log(std::sinh(0.5 * beta * f.omega_t) / std::sinh(0.5 * beta * f.omega0)) / beta;
    CHECK(r.delta_F == doctest::Approx(expected).epsilon(1e-10));
    CHECK(r.gap < 1e-12);
  }
  SUBCASE("mid-drive evaluation is rejected") {
    const Scenario s = driven_ramp();
    const DriveFunctionals f = compute_functionals(s.mode, s.protocol, 1.5);
    REQUIRE(std::abs(f.alpha) > 0.0);
    CHECK_THROWS_AS(jarzynski({&f, 1}, 1.0), domain_error);
  }
}
