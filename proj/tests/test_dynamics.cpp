#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "stabcert/dynamics.hpp"
#include "stabcert/errors.hpp"

using namespace stabcert;
using namespace stabcert::testing;

namespace {

VectorRhs decay_rhs() {
  return [](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy = -y;
  };
}

}  // namespace

TEST_CASE("exponential decay meets the tolerance") {
  IntegratorConfig cfg;
  Eigen::VectorXd y0(1);
  y0 << 1.0;
  const auto traj = integrate(decay_rhs(), y0, 0, 1, cfg);
  CHECK(traj.termination == Termination::horizon_reached);
  CHECK(traj.times.back() == doctest::Approx(1.0));
  CHECK(traj.states.back()(0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-7));
}

TEST_CASE("quadratic growth blows up near the analytic pole") {
  IntegratorConfig cfg;
  const auto traj = integrate_scalar(
      [](double, double z) { return z * z; }, 1.0, 0, 5, cfg);
  CHECK(traj.blew_up());
  CHECK(traj.blowup_time == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("harmonic oscillator conserves energy over 100 periods") {
  IntegratorConfig cfg;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  VectorRhs rhs = [](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(2);
    dy(0) = y(1);
    dy(1) = -y(0);
  };
  Eigen::VectorXd y0(2);
  y0 << 1.0, 0.0;
  const auto traj = integrate(rhs, y0, 0, 100 * 2 * M_PI, cfg);
  const double E0 = 0.5;
  double worst = 0;
  for (const auto& y : traj.states)
    worst = std::max(worst, std::abs(0.5 * y.squaredNorm() - E0) / E0);
  CHECK(worst <= 1e-6);
}

TEST_CASE("convergence improves with the tolerance like a high-order pair") {
  auto error_at = [](double rtol) {
    IntegratorConfig cfg;
    cfg.rtol = rtol;
    cfg.atol = rtol * 1e-2;
    Eigen::VectorXd y0(1);
    y0 << 1.0;
    const auto traj = integrate(decay_rhs(), y0, 0, 2, cfg);
    return std::abs(traj.states.back()(0) - std::exp(-2.0));
  };
  const double e6 = error_at(1e-6);
  const double e8 = error_at(1e-8);
  const double e10 = error_at(1e-10);
  CHECK(e8 < e6);
  CHECK(e10 < e8);
  CHECK(e10 <= 1e-9);
}

TEST_CASE("identical configs give identical accepted steps") {
  const auto s = planar_benchmark();
  IntegratorConfig cfg;
  auto rhs = [&s](double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    dx = s.rhs(t, x);
  };
  Eigen::VectorXd x0(2);
  x0 << 0.9, -0.4;
  const auto a = integrate(rhs, x0, 0, 50, cfg);
  const auto b = integrate(rhs, x0, 0, 50, cfg);
  REQUIRE(a.times.size() == b.times.size());
  for (size_t k = 0; k < a.times.size(); ++k) {
    CHECK(a.times[k] == b.times[k]);
    CHECK((a.states[k] - b.states[k]).norm() == 0.0);
  }
}

TEST_CASE("blow-up window detector") {
  IntegratorConfig cfg;
  SUBCASE("decaying window") {
    std::vector<double> norms{1.0, 0.5, 0.25, 0.12};
    CHECK(!detect_blowup(norms, cfg));
  }
  SUBCASE("two consecutive large ratios") {
    std::vector<double> norms{1.0, 12.0, 180.0};
    CHECK(detect_blowup(norms, cfg));
  }
  SUBCASE("a single spike then decay is not a blow-up") {
    std::vector<double> norms{1.0, 20.0, 10.0};
    CHECK(!detect_blowup(norms, cfg));
  }
  SUBCASE("norm cap") {
    std::vector<double> norms{1.0, 2.0, 2e6};
    CHECK(detect_blowup(norms, cfg));
  }
}

TEST_CASE("threshold bisection") {
  IntegratorConfig cfg;
  SUBCASE("cubic escape threshold at one") {
    const auto th = threshold_bisect(
        [](double, double z) { return -z + z * z * z; }, 0.5, 2.0, 1e-4, 0,
        60, cfg);
    CHECK(th.z_bar == doctest::Approx(1.0).epsilon(1e-3));
  }
  SUBCASE("globally stable equation has no bracket") {
    CHECK_THROWS_AS(threshold_bisect([](double, double z) { return -z; }, 0.5,
                                     100.0, 1e-3, 0, 60, cfg),
                    NoBracket);
  }
}

TEST_CASE("ordering in the initial value is preserved") {
  std::mt19937_64 rng(41);
  IntegratorConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  for (int trial = 0; trial < 5; ++trial) {
    const auto aux = random_scalar_aux(rng);
    const double z_lo = 0.05 + 0.02 * trial;
    const double z_hi = z_lo * 1.2;
    const auto a = integrate_scalar(aux.as_rhs(), z_lo, 0, 20, cfg);
    const auto b = integrate_scalar(aux.as_rhs(), z_hi, 0, 20, cfg);
    const Pchip pa = a.interpolant();
    for (size_t k = 0; k < b.times.size(); ++k) {
      if (b.times[k] > a.times.back()) break;
      CHECK(pa(b.times[k]) <= b.values[k] + 1e-9);
    }
  }
}

TEST_CASE("bound verification on a pure linear system") {
  // f = 0, G = 0: ||x(t)|| = ||V e^(Lambda t) V^-1 x0|| <= ||V|| e^(a1 t) z0.
  SystemSpec s;
  s.n = 2;
  s.A.resize(2, 2);
  s.A << -0.5, 1.0, -1.0, -0.5;
  s.forcing.eta.assign(2, TimeCoeff{});
  const auto an = analyze(s);
  IntegratorConfig cfg;
  auto rhs = [&s](double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    dx = s.rhs(t, x);
  };
  Eigen::VectorXd x0(2);
  x0 << 0.6, -0.2;
  const auto xt = integrate(rhs, x0, 0, 30, cfg);
  IntegratorConfig zcfg;
  zcfg.rtol = 1e-12;
  zcfg.atol = 1e-14;
  const auto zt = integrate_scalar(an.aux_refined.as_rhs(), an.z0_of(x0), 0,
                                   30, zcfg);
  const auto check = verify_bound(xt, zt, an.eig.norm_V);
  CHECK(check.pass);

  // Analytic reference at the accepted times.
  const double z0 = an.z0_of(x0);
  for (size_t k = 0; k < xt.times.size(); ++k)
    CHECK(xt.norms[k] <=
          an.eig.norm_V * z0 * std::exp(-0.5 * xt.times[k]) *
              (1 + 1e-7) + 1e-12);
}

TEST_CASE("bound verification on the zero trajectory") {
  const auto s = planar_benchmark();
  const auto an = analyze(s);
  IntegratorConfig cfg;
  auto rhs = [&s](double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    dx = s.rhs(t, x);
  };
  const auto xt = integrate(rhs, Eigen::VectorXd::Zero(2), 0, 10, cfg);
  const auto zt =
      integrate_scalar(an.aux_refined.as_rhs(), 0.0, 0, 10, cfg);
  const auto check = verify_bound(xt, zt, an.eig.norm_V);
  CHECK(check.pass);
  CHECK(check.max_violation_rel <= 0.0);
}

TEST_CASE("step underflow is reported when accuracy is unreachable") {
  IntegratorConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  // At t ~ 1e14 the smallest representable step exceeds what an O(1)
  // oscillation needs, so the controller stalls without any norm growth.
  CHECK_THROWS_AS(integrate_scalar(
                      [](double t, double z) { return std::cos(t) * z; }, 1.0,
                      1e14, 10, cfg),
                  StepUnderflow);
}
