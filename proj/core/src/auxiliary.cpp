#include "stabcert/auxiliary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stabcert/errors.hpp"
#include "stabcert/numeric.hpp"

namespace stabcert {

ScalarAux build_aux(double alpha1, std::function<double(double)> g_norm,
                    PolyBound majorant, std::function<double(double)> f_norm,
                    AuxVariant variant) {
  ScalarAux aux;
  aux.alpha1 = alpha1;
  aux.g_norm = std::move(g_norm);
  aux.majorant = std::move(majorant);
  aux.variant = variant;
  if (variant != AuxVariant::homogeneous) aux.f_norm = std::move(f_norm);
  return aux;
}

double AutonomousAux::drift_derivative(double z) const {
  double d = kappa;
  for (const auto& term : poly.terms) {
    double p = term.coeff.envelope() * term.degree;
    for (int i = 0; i < term.degree - 1; ++i) p *= z;
    d += p;
  }
  return d;
}

AutonomousAux build_autonomous(const EnvelopeConstants& env,
                               BoundDirection direction) {
  AutonomousAux aux;
  aux.direction = direction;
  if (direction == BoundDirection::upper) {
    aux.kappa = env.kappa_plus;
    aux.poly = env.L_plus;
    aux.F_const = env.F_tilde;
  } else {
    aux.kappa = env.kappa_minus;
    aux.poly = env.L_minus;
    aux.F_const = env.F_minus;
  }
  if (aux.kappa >= 0) throw KappaNonNegative(aux.kappa);
  return aux;
}

double default_z_max_search(const AutonomousAux& aux) {
  double scale = 0;
  if (aux.kappa != 0) scale += std::abs(aux.F_const / aux.kappa);
  const int d = aux.poly.max_degree();
  if (d >= 2) {
    const double lead = aux.poly.coeff_envelope(d);
    if (lead > 0)
      scale += std::pow(std::abs(aux.kappa) / lead, 1.0 / (d - 1));
  }
  if (scale == 0) scale = 1;
  return 10 * scale;
}

FixedPointAnalysis fixed_points(const AutonomousAux& aux,
                                double z_max_search) {
  if (z_max_search <= 0) z_max_search = default_z_max_search(aux);
  FixedPointAnalysis out;

  if (aux.kappa >= 0) {
    out.situation = FixedPointCase::all_unbounded;
    return out;
  }

  auto p = [&aux](double z) { return aux.rhs(z); };

  // Dense sign scan, then bracketed refinement.
  const int N = 4096;
  std::vector<double> roots;
  double z_prev = 0, p_prev = p(0.0);
  if (p_prev == 0) roots.push_back(0.0);
  for (int k = 1; k <= N; ++k) {
    const double z = z_max_search * k / N;
    const double pv = p(z);
    if (pv == 0) {
      roots.push_back(z);
    } else if (p_prev != 0 && (p_prev > 0) != (pv > 0)) {
      roots.push_back(brent_root(p, z_prev, z, 1e-14));
    }
    z_prev = z;
    p_prev = pv;
  }
  std::sort(roots.begin(), roots.end());

  const int max_roots = std::max(1, aux.poly.max_degree());
  if (static_cast<int>(roots.size()) > max_roots)
    throw RootIsolationFailure(
        "more sign changes than the polynomial degree admits");

  // Merge near-coincident roots into degenerate double roots.
  std::vector<std::pair<double, bool>> merged;  // (z, is_double)
  for (double r : roots) {
    if (!merged.empty() &&
        r - merged.back().first <= 1e-6 * std::max(1.0, std::abs(r))) {
      merged.back().first = 0.5 * (merged.back().first + r);
      merged.back().second = true;
    } else {
      merged.emplace_back(r, false);
    }
  }

  const double deriv_tol =
      1e-7 * std::max(1.0, std::abs(aux.kappa));
  for (auto [z, is_double] : merged) {
    FixedPointAnalysis::Root root;
    root.z = z;
    const double d = aux.drift_derivative(z);
    if (is_double || std::abs(d) <= deriv_tol) {
      root.stability = RootStability::degenerate;
    } else {
      root.stability =
          d < 0 ? RootStability::stable : RootStability::unstable;
    }
    out.roots.push_back(root);
  }

  // The trivial fixed point of the homogeneous equation.
  if (aux.F_const == 0 && (out.roots.empty() || out.roots.front().z > 0)) {
    out.roots.insert(out.roots.begin(),
                     {0.0, aux.kappa < 0 ? RootStability::stable
                                         : RootStability::unstable});
  }

  int n_pos = 0, n_degen = 0;
  bool pos_stable = false;
  for (const auto& r : out.roots) {
    if (r.z > 0) {
      ++n_pos;
      if (r.stability == RootStability::degenerate) ++n_degen;
      if (r.stability == RootStability::stable) pos_stable = true;
    }
  }
  if (aux.F_const == 0) {
    out.situation = n_pos >= 1 ? FixedPointCase::homogeneous_single_unstable
                               : FixedPointCase::no_positive_root;
  } else if (n_degen >= 1 && n_pos == 1) {
    out.situation = FixedPointCase::double_root;
  } else if (n_pos >= 2) {
    out.situation = FixedPointCase::two_roots;
  } else if (n_pos == 1 && pos_stable) {
    if (aux.poly.lowest_superlinear_degree() > 0 && p(z_max_search) < 0)
      throw RootIsolationFailure(
          "drift still negative at the search cap; enlarge z_max_search");
    out.situation = FixedPointCase::single_stable_root;
  } else {
    out.situation = FixedPointCase::no_positive_root;
  }
  return out;
}

BernoulliSolution bernoulli_solve(const std::function<double(double)>& p_fn,
                                  const std::function<double(double)>& q_fn,
                                  int n_exp, double z0,
                                  const std::vector<double>& t_grid) {
  if (n_exp <= 1) throw Error("bernoulli_solve: exponent must be > 1");
  if (z0 < 0) throw Error("bernoulli_solve: z0 must be >= 0");
  BernoulliSolution sol;
  sol.times = t_grid;
  if (t_grid.empty()) return sol;
  sol.values.assign(t_grid.size(), 0.0);
  if (z0 == 0) return sol;  // z == 0 identically

  // u = z^(1-n) satisfies u' = (1-n)(p u + q); with P = integral of p and
  // W = u0 + (1-n) * integral of q * e^((n-1) P), u = e^(-(n-1) P) * W.
  const double m = static_cast<double>(n_exp - 1);
  const double u0 = std::pow(z0, -m);
  IntegratorConfig cfg;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  cfg.norm_cap = std::numeric_limits<double>::infinity();
  cfg.growth_cap = std::numeric_limits<double>::infinity();

  double P = 0, W = u0;
  double t_prev = t_grid.front();
  sol.values[0] = z0;
  for (size_t k = 1; k < t_grid.size(); ++k) {
    const double t_next = t_grid[k];
    if (t_next < t_prev)
      throw Error("bernoulli_solve: t_grid must be non-decreasing");
    if (t_next > t_prev) {
      VectorRhs rhs = [&](double t, const Eigen::VectorXd& y,
                          Eigen::VectorXd& dy) {
        const double q = q_fn(t);
        dy(0) = p_fn(t);
        dy(1) = q == 0 ? 0.0 : -m * q * std::exp(m * y(0));
      };
      Eigen::VectorXd y0v(2);
      y0v << P, W;
      const auto seg = integrate(rhs, y0v, t_prev, t_next - t_prev, cfg);
      // Watch for the closed-form denominator crossing zero inside the leg.
      for (size_t i = 0; i < seg.times.size(); ++i) {
        if (seg.states[i](1) <= 0) {
          sol.blown_up = true;
          if (i == 0) {
            sol.blowup_time = seg.times[0];
          } else {
            const double w1 = seg.states[i - 1](1);
            const double w2 = seg.states[i](1);
            sol.blowup_time =
                seg.times[i - 1] + (seg.times[i] - seg.times[i - 1]) *
                                       (w1 / (w1 - w2));
          }
          sol.times.resize(k);
          sol.values.resize(k);
          return sol;
        }
      }
      P = seg.states.back()(0);
      W = seg.states.back()(1);
      t_prev = t_next;
    }
    // z = u^(-1/m) with u = e^(-mP) W, evaluated in log space.
    sol.values[k] = std::exp(P - std::log(W) / m);
  }
  return sol;
}

}  // namespace stabcert
