#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "stabcert/auxiliary.hpp"
#include "stabcert/errors.hpp"

using namespace stabcert;
using namespace stabcert::testing;

TEST_CASE("scalar comparison equation assembly") {
  PolyBound L;
  L.add_term(3, TimeCoeff::constant(0.1));
  auto g = [](double t) { return 0.1 * std::abs(std::sin(t)); };
  auto f = [](double) { return 0.05; };

  SUBCASE("forced refined variant") {
    const auto aux = build_aux(-0.3, g, L, f, AuxVariant::refined);
    const double t = 0.7, z = 1.2;
    CHECK(aux.rhs(t, z) ==
          doctest::Approx((-0.3 + g(t)) * z + 0.1 * z * z * z + 0.05));
    CHECK(aux.rhs(t, 0.0) == doctest::Approx(0.05));
  }
  SUBCASE("homogeneous variant drops the forcing") {
    const auto aux = build_aux(-0.3, g, L, f, AuxVariant::homogeneous);
    CHECK(aux.rhs(0.7, 0.0) == 0.0);
  }
  SUBCASE("pure linear is an exact exponential") {
    const auto aux = build_aux(-0.4, nullptr, PolyBound{}, nullptr,
                               AuxVariant::homogeneous);
    IntegratorConfig cfg;
    cfg.rtol = 1e-11;
    cfg.atol = 1e-13;
    const auto traj = integrate_scalar(aux.as_rhs(), 2.0, 0, 5, cfg);
    CHECK(traj.values.back() ==
          doctest::Approx(2.0 * std::exp(-0.4 * 5)).epsilon(1e-8));
  }
}

TEST_CASE("autonomous bounds from envelope constants") {
  EnvelopeConstants env;
  env.alpha1 = -0.3;
  env.Gs = 0.1;
  env.G_inf = 0.0;
  env.kappa_plus = -0.2;
  env.kappa_minus = -0.3;
  env.L_plus.add_term(3, TimeCoeff::constant(0.1));
  env.L_minus.add_term(3, TimeCoeff::constant(0.1));
  env.F_tilde = 0.1;
  env.F_minus = 0.0;

  const auto up = build_autonomous(env, BoundDirection::upper);
  CHECK(up.rhs(1.0) == doctest::Approx(-0.2 + 0.1 + 0.1));
  const auto low = build_autonomous(env, BoundDirection::lower);
  CHECK(low.kappa == doctest::Approx(-0.3));
  CHECK(low.F_const == 0.0);

  env.kappa_plus = 0.05;
  CHECK_THROWS_AS(build_autonomous(env, BoundDirection::upper),
                  KappaNonNegative);
}

TEST_CASE("fixed points of the cubic envelope equation") {
  AutonomousAux aux;
  aux.kappa = -0.2;
  aux.poly.add_term(3, TimeCoeff::constant(0.1));
  aux.F_const = 0.1;
  // 0.1 z^3 - 0.2 z + 0.1 = 0  <=>  z^3 - 2 z + 1 = 0.
  const auto fp = fixed_points(aux);
  REQUIRE(fp.roots.size() == 2);
  CHECK(fp.roots[0].z ==
        doctest::Approx((std::sqrt(5.0) - 1) / 2).epsilon(1e-9));
  CHECK(fp.roots[0].stability == RootStability::stable);
  CHECK(fp.roots[1].z == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fp.roots[1].stability == RootStability::unstable);
  CHECK(fp.situation == FixedPointCase::two_roots);
}

TEST_CASE("fixed points of the homogeneous equation") {
  AutonomousAux aux;
  aux.kappa = -1.0;
  aux.poly.add_term(3, TimeCoeff::constant(1.0));
  aux.F_const = 0.0;
  const auto fp = fixed_points(aux);
  REQUIRE(fp.roots.size() == 2);
  CHECK(fp.roots[0].z == 0.0);
  CHECK(fp.roots[0].stability == RootStability::stable);
  CHECK(fp.roots[1].z == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fp.roots[1].stability == RootStability::unstable);
  CHECK(fp.situation == FixedPointCase::homogeneous_single_unstable);
}

TEST_CASE("forcing beyond the fold leaves no fixed point") {
  AutonomousAux aux;
  aux.kappa = -1.0;
  aux.poly.add_term(3, TimeCoeff::constant(1.0));
  aux.F_const = 0.5;
  // min over z >= 0 of z^3 - z + 0.5 is at 1/sqrt(3), value ~ 0.115 > 0.
  const auto fp = fixed_points(aux);
  CHECK(fp.situation == FixedPointCase::no_positive_root);
  for (const auto& r : fp.roots) CHECK(r.z < 0);  // none expected
  CHECK(fp.roots.empty());
}

TEST_CASE("near-double roots collapse to a degenerate case") {
  AutonomousAux aux;
  aux.kappa = -1.0;
  aux.poly.add_term(3, TimeCoeff::constant(1.0));
  // Drift z^3 - z + F with the fold at F = 2/(3 sqrt(3)).
  aux.F_const = 2.0 / (3 * std::sqrt(3.0));
  const auto fp = fixed_points(aux);
  REQUIRE(fp.roots.size() >= 1);
  bool has_degenerate = false;
  for (const auto& r : fp.roots)
    has_degenerate = has_degenerate || r.stability == RootStability::degenerate;
  CHECK(has_degenerate);
  CHECK(fp.situation == FixedPointCase::double_root);
}

TEST_CASE("fixed points agree with a dense sign scan") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    AutonomousAux aux;
    aux.kappa = -0.1 - u01(rng);
    const int deg = 2 + static_cast<int>(u01(rng) * 2.999);
    aux.poly.add_term(deg, TimeCoeff::constant(0.05 + u01(rng)));
    if (u01(rng) < 0.4)
      aux.poly.add_term(deg + 1, TimeCoeff::constant(0.5 * u01(rng)));
    aux.F_const = u01(rng) < 0.5 ? 0.0 : 0.02 * u01(rng);

    const double zmax = default_z_max_search(aux);
    const auto fp = fixed_points(aux, zmax);

    // Oracle: dense sign scan of the drift.
    std::vector<double> oracle;
    const int N = 200000;
    double prev = aux.rhs(0.0);
    for (int k = 1; k <= N; ++k) {
      const double z = zmax * k / N;
      const double v = aux.rhs(z);
      if ((prev > 0) != (v > 0) || v == 0)
        oracle.push_back(z - 0.5 * zmax / N);
      prev = v;
    }
    std::vector<double> found;
    for (const auto& r : fp.roots)
      if (r.z > 0) found.push_back(r.z);
    REQUIRE(found.size() == oracle.size());
    for (size_t i = 0; i < found.size(); ++i)
      CHECK(found[i] == doctest::Approx(oracle[i]).epsilon(1e-3));
  }
}

TEST_CASE("comparison sandwich between the autonomous envelopes") {
  const auto spec = planar_forced_variant();
  const auto an = analyze(spec);
  const auto upper = build_autonomous(an.env, BoundDirection::upper);
  const auto lower = build_autonomous(an.env, BoundDirection::lower);

  IntegratorConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  const double z0 = 0.3;
  const double H = 40;
  const auto mid = integrate_scalar(an.aux_refined.as_rhs(), z0, spec.t0, H, cfg);
  const auto up = integrate_scalar(upper.as_rhs(), z0, spec.t0, H, cfg);
  const auto low = integrate_scalar(lower.as_rhs(), z0, spec.t0, H, cfg);
  const Pchip pu = up.interpolant();
  const Pchip pl = low.interpolant();
  for (size_t k = 0; k < mid.times.size(); ++k) {
    const double t = mid.times[k];
    if (t > up.times.back() || t > low.times.back()) break;
    const double z = mid.values[k];
    CHECK(z <= pu(t) * (1 + 1e-7) + 1e-12);
    CHECK(z >= pl(t) * (1 - 1e-7) - 1e-12);
  }
}

TEST_CASE("closed-form reductions of the power-law equation") {
  SUBCASE("fixed point stays fixed") {
    const auto sol = bernoulli_solve([](double) { return -1.0; },
                                     [](double) { return 1.0; }, 3, 1.0,
                                     {0, 0.5, 1.0, 2.0});
    REQUIRE(!sol.blown_up);
    for (double v : sol.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("decaying branch matches the quadrature formula") {
    const auto sol = bernoulli_solve([](double) { return -1.0; },
                                     [](double) { return 1.0; }, 3, 0.5,
                                     {0, 1.0});
    REQUIRE(!sol.blown_up);
    const double exact = std::pow(3 * std::exp(2.0) + 1, -0.5);
    CHECK(sol.values.back() == doctest::Approx(exact).epsilon(1e-8));
  }
  SUBCASE("zero start stays zero") {
    const auto sol = bernoulli_solve([](double) { return -1.0; },
                                     [](double) { return 1.0; }, 3, 0.0,
                                     {0, 1.0, 5.0});
    for (double v : sol.values) CHECK(v == 0.0);
  }
  SUBCASE("finite-time escape is located") {
    // z' = z^3 from 1 has the pole at t = 1/2.
    const auto sol = bernoulli_solve([](double) { return 0.0; },
                                     [](double) { return 1.0; }, 3, 1.0,
                                     {0, 0.25, 0.45, 0.6, 1.0});
    CHECK(sol.blown_up);
    CHECK(sol.blowup_time == doctest::Approx(0.5).epsilon(1e-2));
  }
}

TEST_CASE("power-law equation bounds the full comparison equation below") {
  // L = L1 z + Ln z^n + P with P >= 0: dropping P can only lower solutions.
  auto g = [](double t) { return 0.05 * std::abs(std::sin(2 * t)); };
  const double alpha1 = -0.6;
  PolyBound L;
  L.add_term(1, TimeCoeff::constant(0.1));
  L.add_term(3, TimeCoeff::constant(0.4));
  L.add_term(5, TimeCoeff::constant(0.2));  // the nonnegative remainder P
  const auto aux = build_aux(alpha1, g, L, nullptr, AuxVariant::homogeneous);

  auto p_fn = [&](double t) { return alpha1 + g(t) + 0.1; };
  auto q_fn = [](double) { return 0.4; };

  IntegratorConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  for (double z0 : {0.1, 0.4, 0.8}) {
    std::vector<double> grid;
    for (int k = 0; k <= 60; ++k) grid.push_back(k * 0.25);
    const auto lower = bernoulli_solve(p_fn, q_fn, 3, z0, grid);
    const auto full = integrate_scalar(aux.as_rhs(), z0, 0, 15, cfg);
    const Pchip pf = full.interpolant();
    for (size_t k = 0; k < lower.times.size(); ++k) {
      if (lower.times[k] > full.times.back()) break;
      CHECK(lower.values[k] <= pf(lower.times[k]) * (1 + 1e-7) + 1e-12);
    }
  }
}
