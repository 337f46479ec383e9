#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "stabcert/criteria.hpp"
#include "stabcert/errors.hpp"

using namespace stabcert;
using namespace stabcert::testing;

namespace {

LinearAux make_lin(double alpha1, std::function<double(double)> g,
                   PolyBound L, std::function<double(double)> f,
                   double horizon, double period_hint = 0) {
  return LinearAux(alpha1, std::move(g), std::move(L), std::move(f), 0.0,
                   horizon, 0.0, 0.0, period_hint);
}

}  // namespace

TEST_CASE("transition supremum for constant negative rates is one") {
  auto lin = make_lin(-0.5, nullptr, {}, nullptr, 50);
  const auto r = compute_zs(lin, 0.0);
  CHECK(r.Zs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.sup_attained);
}

TEST_CASE("transition supremum of a drifting rate hits the interior max") {
  auto lin = make_lin(0.0, [](double t) { return 0.5 - 0.1 * t; }, {}, nullptr,
                      50);
  const auto r = compute_zs(lin, 0.0);
  CHECK(r.Zs == doctest::Approx(std::exp(1.25)).epsilon(1e-6));
  CHECK(r.arg_t == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(r.sup_attained);
}

TEST_CASE("positive rates are flagged as not settled") {
  auto lin = make_lin(0.1, nullptr, {}, nullptr, 50);
  const auto r = compute_zs(lin, 0.0);
  CHECK(!r.sup_attained);
}

TEST_CASE("forced supremum for constant coefficients") {
  SUBCASE("rho = c / nu") {
    auto lin = make_lin(-0.5, nullptr, {}, [](double) { return 1.0; }, 60);
    const auto r = compute_rho(lin, 0.0);
    CHECK(r.rho == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(r.sup_attained);
  }
  SUBCASE("scaled forcing profile") {
    auto lin = make_lin(-0.25, nullptr, {}, [](double) { return 0.5; }, 80);
    const auto r = compute_rho(lin, 0.0);
    CHECK(r.rho == doctest::Approx(2.0).epsilon(1e-6));
  }
}

TEST_CASE("uniform negativity criterion") {
  SUBCASE("planar envelope gives the closed-form cutoff") {
    PolyBound L;
    L.add_term(3, TimeCoeff::constant(0.1));
    LinearAux lin(-0.3, [](double t) { return 0.1 * std::abs(std::sin(t)); },
                  L, nullptr, 0, 100, 0.1, 0.0, 2 * M_PI);
    const auto r = check_uniform_negative(lin, {0.0, 0.5, 1.0});
    CHECK(r.fires);
    CHECK(r.z_hat_nu == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  }
  SUBCASE("positive linear rate never fires") {
    LinearAux lin(0.1, nullptr, {}, nullptr, 0, 50, 0.0, 0.0, 0);
    const auto r = check_uniform_negative(lin, {0.0});
    CHECK(!r.fires);
    CHECK(r.z_hat_nu == 0.0);
  }
  SUBCASE("quadratic majorant crosses at one") {
    PolyBound L;
    L.add_term(2, TimeCoeff::constant(1.0));
    LinearAux lin(-1.0, nullptr, L, nullptr, 0, 50, 0.0, 0.0, 0);
    const auto r = check_uniform_negative(lin, {0.0});
    CHECK(r.z_hat_nu == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("averaged criterion") {
  SUBCASE("rectified sinusoid averages to 2/pi of its amplitude") {
    LinearAux lin(-0.3, [](double t) { return 0.1 * std::abs(std::sin(t)); },
                  {}, nullptr, 0, 4000, 0.1, 0.0, M_PI);
    const auto r = check_average(lin, 0.0);
    CHECK(r.settled);
    CHECK(r.gamma == doctest::Approx(0.2 / M_PI).epsilon(5e-3));
    CHECK(r.fires);
    CHECK(r.phi == doctest::Approx(-0.3 + 0.2 / M_PI).epsilon(1e-2));
  }
  SUBCASE("constant perturbation averages exactly") {
    LinearAux lin(-0.5, [](double) { return 0.2; }, {}, nullptr, 0, 100, 0.2,
                  0.2, 0);
    const auto r = check_average(lin, 0.0);
    CHECK(r.gamma == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r.fires);
  }
  SUBCASE("uniformly negative rate fires with phi = -nu") {
    LinearAux lin(-0.4, nullptr, {}, nullptr, 0, 100, 0.0, 0.0, 0);
    const auto r = check_average(lin, 0.0);
    CHECK(r.phi == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(r.fires);
  }
}

TEST_CASE("integral criterion tri-state") {
  SUBCASE("negative drift certifies asymptotic stability") {
    LinearAux lin(0.0, [](double t) { return -0.2 + 0.1 * std::sin(t); }, {},
                  nullptr, 0, 200, 0.0, 0.0, 2 * M_PI);
    const auto r = check_integral_stability(lin, 0.0);
    CHECK(r.asymptotic == Cert::certified);
    CHECK(r.trailing_slope == doctest::Approx(-0.2).epsilon(1e-2));
  }
  SUBCASE("zero-mean rate certifies stability only") {
    LinearAux lin(0.0, [](double t) { return std::sin(t); }, {}, nullptr, 0,
                  200, 0.0, 0.0, 2 * M_PI);
    const auto r = check_integral_stability(lin, 0.0);
    CHECK(r.stable == Cert::certified);
    CHECK(r.asymptotic == Cert::not_certified);
  }
  SUBCASE("positive rate is rejected") {
    LinearAux lin(0.1, nullptr, {}, nullptr, 0, 200, 0.0, 0.0, 0);
    const auto r = check_integral_stability(lin, 0.0);
    CHECK(r.stable == Cert::not_certified);
  }
  SUBCASE("sub-threshold drift is inconclusive") {
    LinearAux lin(5e-4, nullptr, {}, nullptr, 0, 400, 0.0, 0.0, 0);
    const auto r = check_integral_stability(lin, 0.0);
    CHECK(r.stable == Cert::inconclusive);
  }
}

TEST_CASE("stability radius maximization") {
  SUBCASE("unit transition sup returns the interval endpoint") {
    PolyBound L;
    L.add_term(3, TimeCoeff::constant(0.1));
    LinearAux lin(-0.3, [](double t) { return 0.1 * std::abs(std::sin(t)); },
                  L, nullptr, 0, 100, 0.1, 0.0, 2 * M_PI);
    const auto est = stability_radius(lin, 0, std::sqrt(2.0),
                                      RegionKind::asymptotic_stability, "uv");
    CHECK(est.radius == doctest::Approx(std::sqrt(2.0)).epsilon(1e-4));
  }
  SUBCASE("a transition sup near two divides the radius") {
    // mu(t) = c t e^-t - d: a smooth transient bump with I peaking near
    // log 2, decaying afterwards.
    const double c = 0.7712, d = 0.01;
    LinearAux lin(-d, [c](double t) { return c * t * std::exp(-t); }, {},
                  nullptr, 0, 120, 0.0, 0.0, 0);
    const auto zs = compute_zs(lin, 0.0);
    CHECK(zs.Zs == doctest::Approx(2.0).epsilon(0.05));
    const auto est = stability_radius(lin, 0, 1.0, RegionKind::stability, "t");
    CHECK(est.radius == doctest::Approx(1.0 / zs.Zs).epsilon(1e-4));
  }
  SUBCASE("interior maximizer agrees with an analytic oracle") {
    // mu(t, zh) = -1 + zh + 2 e^-t: I(t, zh) = (zh - 1) t + 2 (1 - e^-t).
    PolyBound L;
    L.add_term(2, TimeCoeff::constant(1.0));
    LinearAux lin(-1.0, [](double t) { return 2 * std::exp(-t); }, L, nullptr,
                  0, 200, 2.0, 0.0, 0);
    const auto est =
        stability_radius(lin, 0, 0.9, RegionKind::stability, "oracle");
    // Oracle: Zs(zh) = exp(I at the crossing of mu), dense grid over zh.
    double best = 0;
    for (int k = 1; k <= 4000; ++k) {
      const double zh = 0.9 * k / 4000;
      const double t_star = std::log(2.0 / (1.0 - zh));
      const double I_star = (zh - 1) * t_star + 2 * (1 - std::exp(-t_star));
      best = std::max(best, zh * std::exp(-I_star));
    }
    CHECK(est.radius == doctest::Approx(best).epsilon(1e-3));
  }
}

TEST_CASE("trapping radius and the zero-forcing reduction") {
  PolyBound L;
  L.add_term(3, TimeCoeff::constant(0.1));
  LinearAux lin(-0.3, [](double t) { return 0.1 * std::abs(std::sin(t)); }, L,
                [](double) { return 1.0; }, 0, 150, 0.1, 0.0, 2 * M_PI);
  SUBCASE("zero forcing reduces to the stability radius") {
    const auto trap = boundedness_radius(lin, 0.0, std::sqrt(2.0), 1.0, true,
                                         "reduction");
    const auto stab = stability_radius(lin, 0, std::sqrt(2.0),
                                       RegionKind::stability, "s");
    CHECK(trap.radius == doctest::Approx(stab.radius).epsilon(1e-6));
  }
  SUBCASE("overwhelming forcing yields no radius") {
    CHECK_THROWS_AS(
        boundedness_radius(lin, 10.0, std::sqrt(2.0), 1.0, true, "big"),
        NegativeRadius);
  }
}

TEST_CASE("decay-envelope fit criterion") {
  SUBCASE("constant decay fits exactly") {
    const auto rep =
        check_massera([](double) { return -1.0; }, 3.0, 0.5, 0, 100);
    CHECK(rep.zeta1 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rep.zeta2 == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rep.holds);
  }
  SUBCASE("growth admits no envelope") {
    CHECK_THROWS_AS(check_massera([](double) { return 1.0; }, 3.0, 0.5, 0, 100),
                    NoValidFit);
  }
  SUBCASE("oscillation is absorbed by the offset") {
    const auto rep = check_massera(
        [](double t) { return -1.0 + 0.5 * std::sin(t); }, 3.0, 0.5, 0, 200);
    CHECK(rep.zeta1 == doctest::Approx(1.0).epsilon(2e-2));
    CHECK(rep.zeta2 <= 1e-6);
    CHECK(rep.zeta0 <= 1.5);
    CHECK(rep.holds);
  }
}

TEST_CASE("asymptotic gain closed forms") {
  CHECK(asymptotic_gain_uniform(0.1, 1.0, 1.0, 0.5) == doctest::Approx(0.2));

  SUBCASE("constant rate gives D = 1 and matching gains") {
    LinearAux lin(-0.5, nullptr, {}, [](double) { return 1.0; }, 0, 100, 0.0,
                  0.0, 0);
    const auto fit = asymptotic_gain_exponent_fit(lin, 0.0, 0.1, 1.0, 1.0);
    CHECK(fit.D == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(fit.chi == doctest::Approx(0.49).epsilon(1e-6));
    // Slightly larger than the uniform gain because of the decay margin.
    CHECK(fit.gain >= asymptotic_gain_uniform(0.1, 1.0, 1.0, 0.5) - 1e-12);
    CHECK(fit.gain == doctest::Approx(0.1 / 0.49).epsilon(1e-3));
  }
  SUBCASE("fitted gain dominates the simulated forced supremum") {
    std::mt19937_64 rng(57);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      const double c = 0.3 + u01(rng);
      const double a = 0.5 * c * u01(rng);
      const double w = 1 + 3 * u01(rng);
      LinearAux lin(
          -c, [a, w](double t) { return a * (1 + std::sin(w * t)) / 2; }, {},
          [](double) { return 1.0; }, 0, 300, a, 0.0, 2 * M_PI / w);
      const double F0 = 0.1;
      const auto fit = asymptotic_gain_exponent_fit(lin, 0.0, F0, 1.3, 1.0);
      const auto rho = compute_rho(lin, 0.0);
      CHECK(fit.gain >= F0 * 1.3 * rho.rho * (1 - 1e-6));
    }
  }
}

TEST_CASE("transition supremum never drops below one") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = u(rng), b = 0.5 * (u(rng) + 1), w = 1 + 4 * (u(rng) + 1);
    LinearAux lin(a, [b, w](double t) { return b * std::abs(std::sin(w * t)); },
                  {}, nullptr, 0, 60, b, 0.0, 2 * M_PI / w);
    const auto r = compute_zs(lin, 0.0);
    CHECK(r.Zs >= 1.0);
  }
}

TEST_CASE("superposition of the linear comparison solution") {
  const auto spec = planar_forced_variant();
  const auto an = analyze(spec);
  IntegratorConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-13;
  const double z0 = 0.4;
  const double z_hat = 0.8;
  const auto& lin = *an.lin;

  // Direct integration of Z' = mu Z + F0 ||V^-1 eta||.
  auto rhs = [&lin, &an, z_hat](double t, double Z) {
    return lin.mu(t, z_hat) * Z + an.spec.forcing.F0 * lin.f_norm_fn()(t);
  };
  const auto direct = integrate_scalar(rhs, z0, spec.t0, 60, cfg);

  // Z = z0 Z_h + F0 Z_F with Z_h from the cached integral and Z_F integrated
  // with zero initial value.
  auto rhs_F = [&lin, z_hat](double t, double Z) {
    return lin.mu(t, z_hat) * Z + lin.f_norm_fn()(t);
  };
  const auto zf = integrate_scalar(rhs_F, 0.0, spec.t0, 60, cfg);
  const Pchip pf = zf.interpolant();
  for (size_t k = 0; k < direct.times.size(); k += 7) {
    const double t = direct.times[k];
    const double Zh = std::exp(lin.integral_mu(t, z_hat));
    const double recomposed = z0 * Zh + an.spec.forcing.F0 * pf(t);
    CHECK(direct.values[k] ==
          doctest::Approx(recomposed).epsilon(1e-6));
  }
}

TEST_CASE("nonlinear solutions stay below the linear comparison") {
  std::mt19937_64 rng(67);
  IntegratorConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  int checked = 0;
  for (int trial = 0; trial < 8 && checked < 5; ++trial) {
    const auto spec = random_stable_spec(rng, 2 + (trial % 3), trial % 2 == 0);
    Analysis an;
    try {
      an = analyze(spec);
    } catch (const DefectiveMatrix&) {
      continue;
    }
    const double z_hat = 0.4;
    const double z0 = 0.2;
    const auto& lin = *an.lin;
    auto rhs_lin = [&lin, &an, z_hat](double t, double Z) {
      return lin.mu(t, z_hat) * Z +
             an.spec.forcing.F0 * lin.f_norm_fn()(t);
    };
    const auto nl =
        integrate_scalar(an.aux_refined.as_rhs(), z0, spec.t0, 30, cfg);
    const auto li = integrate_scalar(rhs_lin, z0, spec.t0, 30, cfg);
    const Pchip pl = li.interpolant();
    for (size_t k = 0; k < nl.times.size(); ++k) {
      if (nl.values[k] > z_hat) break;  // comparison valid on [0, z_hat]
      if (nl.times[k] > li.times.back()) break;
      CHECK(nl.values[k] <= pl(nl.times[k]) * (1 + 1e-7) + 1e-10);
    }
    ++checked;
  }
  CHECK(checked >= 3);
}

TEST_CASE("the refined variant is never more conservative on the planar case") {
  const auto s = planar_benchmark();
  const auto an = analyze(s);
  // ||G_-(t)|| <= ||G(t)|| holds on the grid for this system.
  for (int k = 0; k <= 200; ++k) {
    const double t = an.horizon * k / 200;
    CHECK(an.maps->g_minus_norm(t) <= an.maps->g_norm(t) + 1e-12);
  }
  PolyBound L = an.L_y;
  const auto maps = an.maps;
  LinearAux lin_refined(an.eig.alpha1(),
                        [maps](double t) { return maps->g_minus_norm(t); }, L,
                        nullptr, 0, an.horizon, an.g_minus_sup.sup,
                        an.g_minus_sup.inf, s.min_period());
  LinearAux lin_full(an.eig.alpha1(),
                     [maps](double t) { return maps->g_norm(t); }, L, nullptr,
                     0, an.horizon, an.g_sup.sup, an.g_sup.inf,
                     s.min_period());
  const auto uni_r = check_uniform_negative(lin_refined, {0.0});
  const auto uni_f = check_uniform_negative(lin_full, {0.0});
  REQUIRE(uni_r.fires);
  REQUIRE(uni_f.fires);
  const auto rad_r = stability_radius(lin_refined, 0, uni_r.z_hat_nu,
                                      RegionKind::asymptotic_stability, "r");
  const auto rad_f = stability_radius(lin_full, 0, uni_f.z_hat_nu,
                                      RegionKind::asymptotic_stability, "f");
  CHECK(rad_r.radius >= rad_f.radius - 1e-9);
}
