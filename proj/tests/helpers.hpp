#ifndef STABCERT_TESTS_HELPERS_HPP
#define STABCERT_TESTS_HELPERS_HPP

#include <random>

#include "stabcert/analysis.hpp"
#include "stabcert/system.hpp"

namespace stabcert::testing {

inline SystemSpec planar_benchmark() {
  SystemSpec s;
  s.name = "planar";
  s.n = 2;
  s.A.resize(2, 2);
  s.A << -0.3, 0.05, -0.05, -0.3;
  s.gstar.push_back({2, 1, TimeCoeff{0, {{0.2, 3.14, 0}}}});
  MonomialTerm t;
  t.component = 2;
  t.coeff = TimeCoeff::constant(0.1 / (2 * std::sqrt(2.0)));
  t.exponents = {0, 3};
  s.f_terms.push_back(t);
  s.forcing.eta.assign(2, TimeCoeff{});
  return s;
}

inline SystemSpec planar_forced_variant() {
  auto s = planar_benchmark();
  s.name = "planar_forced";
  s.forcing.F0 = 0.1;
  s.forcing.eta[1] = TimeCoeff{0, {{1.0, 5.43, 0}}};
  return s;
}

// Coupled oscillator pair in companion form with sinusoidal stiffness
// perturbations; `velocity_cubic` selects which state the cubic acts on.
inline SystemSpec coupled_benchmark(double d, double mu, bool velocity_cubic,
                                    double F01) {
  SystemSpec s;
  s.n = 4;
  s.A.resize(4, 4);
  s.A << 0, 1, 0, 0,
      -(1.0 + d), -0.4, d, 0,
      0, 0, 0, 1,
      d, 0, -(4.0 + d), -0.2;
  s.gstar.push_back({2, 1, TimeCoeff{0, {{-0.1, 3.14, 0}, {-0.1, 6.15, 0}}}});
  s.gstar.push_back({4, 3, TimeCoeff{0, {{-0.1, 3.1, 0}, {-0.1, 6.28, 0}}}});
  MonomialTerm t1, t2;
  t1.component = 2;
  t1.coeff = TimeCoeff::constant(-mu);
  t1.exponents = velocity_cubic ? std::vector<int>{0, 3, 0, 0}
                                : std::vector<int>{3, 0, 0, 0};
  t2.component = 4;
  t2.coeff = TimeCoeff::constant(-mu);
  t2.exponents = velocity_cubic ? std::vector<int>{0, 0, 0, 3}
                                : std::vector<int>{0, 0, 3, 0};
  s.f_terms = {t1, t2};
  s.forcing.eta.assign(4, TimeCoeff{});
  if (F01 > 0) {
    s.forcing.F0 = F01;
    s.forcing.eta[1] = TimeCoeff{0, {{1.0, 5.43, 0}}};
  }
  return s;
}

inline SystemSpec vdp_benchmark(double d = 0.1) {
  auto s = coupled_benchmark(d, 18.2, true, 0);
  s.name = "vdp";
  return s;
}

inline SystemSpec duffing_benchmark(double d = 0.1) {
  auto s = coupled_benchmark(d, 18.2, false, 0);
  s.name = "duffing";
  return s;
}

inline SystemSpec duffing_trapping_benchmark(double d = 5.0) {
  auto s = coupled_benchmark(d, 0.3, false, 0.01);
  s.name = "duffing_trapping";
  return s;
}

// Random diagonalizable Hurwitz system with small perturbations and a few
// monomial terms; retries until the decomposition is well conditioned.
inline SystemSpec random_stable_spec(std::mt19937_64& rng, int n,
                                     bool with_forcing) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (;;) {
    SystemSpec s;
    s.n = n;
    s.A.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s.A(i, j) = u(rng);
    Eigen::EigenSolver<Eigen::MatrixXd> es(s.A, false);
    const double shift = es.eigenvalues().real().maxCoeff() + 0.2 +
                         0.3 * u01(rng);
    s.A -= shift * Eigen::MatrixXd::Identity(n, n);

    const int n_g = static_cast<int>(u01(rng) * 2.999);
    for (int k = 0; k < n_g; ++k) {
      GstarEntry e;
      e.i = 1 + static_cast<int>(u01(rng) * (n - 1e-9));
      e.j = 1 + static_cast<int>(u01(rng) * (n - 1e-9));
      e.coeff.sinusoids.push_back({0.05 * u(rng), 0.5 + 6 * u01(rng), u(rng)});
      s.gstar.push_back(e);
    }

    const int n_f = 1 + static_cast<int>(u01(rng) * 1.999);
    for (int k = 0; k < n_f; ++k) {
      MonomialTerm t;
      t.component = 1 + static_cast<int>(u01(rng) * (n - 1e-9));
      t.coeff = TimeCoeff::constant(0.5 * u(rng));
      t.exponents.assign(n, 0);
      int deg = 2 + static_cast<int>(u01(rng) * 2.999);
      for (int e = 0; e < deg; ++e)
        ++t.exponents[static_cast<int>(u01(rng) * (n - 1e-9))];
      s.f_terms.push_back(t);
    }

    s.forcing.eta.assign(n, TimeCoeff{});
    if (with_forcing) {
      s.forcing.F0 = 0.05 * u01(rng);
      s.forcing.eta[static_cast<int>(u01(rng) * (n - 1e-9))] =
          TimeCoeff{0, {{1.0, 1 + 5 * u01(rng), 0}}};
    }
    try {
      const auto eig = decompose(s.A, 1e-9, 1e6);
      (void)eig;
      return s;
    } catch (const DefectiveMatrix&) {
      continue;
    }
  }
}

// Random scalar comparison equation with a negative mean rate.
inline ScalarAux random_scalar_aux(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  ScalarAux aux;
  aux.alpha1 = -0.2 - 0.8 * u01(rng);
  const double amp = 0.1 * u01(rng);
  const double w = 0.5 + 5 * u01(rng);
  aux.g_norm = [amp, w](double t) { return amp * std::abs(std::sin(w * t)); };
  PolyBound L;
  L.add_term(2 + static_cast<int>(u01(rng) * 1.999),
             TimeCoeff::constant(0.5 * u01(rng)));
  aux.majorant = L;
  if (u01(rng) < 0.5) {
    const double f0 = 0.02 * u01(rng);
    const double wf = 1 + 4 * u01(rng);
    aux.f_norm = [f0, wf](double t) {
      return f0 * std::abs(std::sin(wf * t));
    };
    aux.variant = AuxVariant::refined;
  } else {
    aux.variant = AuxVariant::homogeneous;
  }
  return aux;
}

}  // namespace stabcert::testing

#endif
