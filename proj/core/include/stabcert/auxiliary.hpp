#ifndef STABCERT_AUXILIARY_HPP
#define STABCERT_AUXILIARY_HPP

#include <functional>
#include <vector>

#include "stabcert/bounds.hpp"
#include "stabcert/dynamics.hpp"

namespace stabcert {

enum class AuxVariant {
  conservative,  // rate uses ||G(t)||
  refined,       // rate uses ||G_-(t)||
  homogeneous,   // refined rate, F == 0
};

// Scalar comparison equation  z' = (alpha1 + g(t)) z + L(t, z) + f(t).
// Solutions bound ||y(t)|| from above; z0 convention is ||V^-1 x0||.
struct ScalarAux {
  double alpha1 = 0;
  std::function<double(double)> g_norm;  // ||G_-(t)|| or ||G(t)||
  PolyBound majorant;
  std::function<double(double)> f_norm;  // ||F(t)||; empty for homogeneous
  AuxVariant variant = AuxVariant::refined;

  double rhs(double t, double z) const {
    double v = (alpha1 + (g_norm ? g_norm(t) : 0.0)) * z;
    if (!majorant.empty()) v += majorant.value(t, z);
    if (f_norm) v += f_norm(t);
    return v;
  }
  ScalarRhs as_rhs() const {
    return [this](double t, double z) { return rhs(t, z); };
  }
};

ScalarAux build_aux(double alpha1, std::function<double(double)> g_norm,
                    PolyBound majorant, std::function<double(double)> f_norm,
                    AuxVariant variant);

enum class BoundDirection { upper, lower };

// Autonomous envelope of the comparison equation:
//   upper:  z' = kappa_plus z + L_plus(z) + F_tilde
//   lower:  z' = kappa_minus z + L_minus(z) + F_minus
struct AutonomousAux {
  double kappa = 0;
  PolyBound poly;    // constant coefficients
  double F_const = 0;
  BoundDirection direction = BoundDirection::upper;

  double rhs(double z) const { return kappa * z + poly.envelope_value(z) + F_const; }
  double drift_derivative(double z) const;
  ScalarRhs as_rhs() const {
    return [this](double, double z) { return rhs(z); };
  }
};

// Throws KappaNonNegative when the linear rate is >= 0: every solution of the
// bound diverges and no conclusion is available from this route.
AutonomousAux build_autonomous(const EnvelopeConstants& env,
                               BoundDirection direction);

enum class RootStability { stable, unstable, degenerate };

enum class FixedPointCase {
  no_positive_root,
  homogeneous_single_unstable,
  two_roots,
  double_root,
  all_unbounded,
  // Forced equation whose drift has a single stable zero (no superlinear
  // growth): solutions converge to it from every start.
  single_stable_root,
};

struct FixedPointAnalysis {
  struct Root {
    double z = 0;
    RootStability stability = RootStability::stable;
  };
  std::vector<Root> roots;  // sorted ascending, z >= 0
  FixedPointCase situation = FixedPointCase::no_positive_root;
};

double default_z_max_search(const AutonomousAux& aux);

// Nonnegative real zeros of kappa z + L(z) + F on [0, z_max_search] with
// stability classification by the sign of the drift derivative. Two isolated
// roots closer than 1e-6 relative collapse to one degenerate double root.
FixedPointAnalysis fixed_points(const AutonomousAux& aux,
                                double z_max_search = 0);

struct BernoulliSolution {
  std::vector<double> times;
  std::vector<double> values;
  bool blown_up = false;
  double blowup_time = 0;
};

// Solves z' = p(t) z + q(t) z^n (q >= 0, n > 1) through the substitution
// u = z^(1-n), which is linear in u and integrates by quadrature.
BernoulliSolution bernoulli_solve(const std::function<double(double)>& p_fn,
                                  const std::function<double(double)>& q_fn,
                                  int n_exp, double z0,
                                  const std::vector<double>& t_grid);

}  // namespace stabcert

#endif
