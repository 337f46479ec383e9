#ifndef STABCERT_BOUNDS_HPP
#define STABCERT_BOUNDS_HPP

#include <functional>
#include <vector>

#include "stabcert/spectral.hpp"
#include "stabcert/system.hpp"
#include "stabcert/time_coeff.hpp"

namespace stabcert {

// Scalar majorant L(t, z) = sum_d a_d(t) z^d with a_d(t) >= 0 for all t and
// every degree >= 1, so L(t, 0) = 0 and ||f(t, y)|| <= L(t, ||y||).
struct PolyBound {
  struct Term {
    int degree = 1;
    TimeCoeff coeff;
  };
  std::vector<Term> terms;  // sorted by degree, one term per degree

  bool empty() const { return terms.empty(); }
  double value(double t, double z) const;
  double envelope_value(double z) const;     // sup_t L(t, z)
  double lower_value(double z) const;        // inf_t L(t, z), clamped at 0
  int max_degree() const;
  // Lowest degree >= 2 present, or 0 when purely linear/empty.
  int lowest_superlinear_degree() const;
  double coeff_envelope(int degree) const;
  double degree1_envelope() const { return coeff_envelope(1); }

  void add_term(int degree, const TimeCoeff& coeff);

  // Constant-coefficient copies built from sup / inf envelopes.
  PolyBound envelope_upper() const;
  PolyBound envelope_lower() const;
};

// Majorant in ||x|| units: terms grouped by total degree; coefficients are
// the envelope-safe absolute values of the monomial coefficients.
PolyBound monomial_bound_x(const std::vector<MonomialTerm>& f_terms);

// Majorant of ||V^-1 f*(t, V y)|| in z = ||y|| units: each term contributes
// ||V^-1|| * |coeff| * prod_j (sum_k abs(V_jk))^(e_j) at its total degree.
PolyBound monomial_bound_y(const std::vector<MonomialTerm>& f_terms,
                           const EigenStructure& eig);

// l2(t, zhat) = sum_d a_d(t) zhat^(d-1), so L(t, z) <= l2(t, zhat) z on
// [0, zhat].
TimeCoeff linearize_l2(const PolyBound& L, double z_hat);

struct GridSup {
  double sup = 0;       // max sample * (1 + safety_margin)
  double inf = 0;       // min sample, no margin
  bool step_warning = false;  // grid coarser than shortest period / 20
};

// Supremum/infimum of a norm signal over [t0, t0 + horizon] on a uniform
// grid. min_period_hint (0 = unknown) drives the coarse-grid warning.
GridSup sup_norm_g(const std::function<double(double)>& g_norm, double t0,
                   double horizon, double grid_step,
                   double safety_margin = 0.02, double min_period_hint = 0);

struct EnvelopeConstants {
  double alpha1 = 0;
  double Gs = 0;           // sup ||G_-(t)||, with safety margin
  double G_inf = 0;        // inf ||G_-(t)||
  double kappa_plus = 0;   // alpha1 + Gs
  double kappa_minus = 0;  // alpha1 + G_inf
  double F0 = 0;
  double F_tilde = 0;      // F0 * ||V^-1||, the constant forcing envelope
  double F_minus = 0;      // F0 * inf_t ||V^-1 eta(t)||
  PolyBound L_plus;
  PolyBound L_minus;
};

EnvelopeConstants kappa_bounds(double alpha1, double Gs, double G_inf,
                               const PolyBound& L, const EigenbasisMaps& maps,
                               double t0, double horizon, double grid_step);

}  // namespace stabcert

#endif
