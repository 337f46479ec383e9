#include "stabcert/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stabcert/errors.hpp"

namespace stabcert {

namespace {

double pow_int(double z, int d) {
  double p = 1;
  for (int i = 0; i < d; ++i) p *= z;
  return p;
}

// Envelope-safe |coeff(t)|: exact |c| for constants, constant envelope for
// time-varying coefficients (|TimeCoeff| is not itself a sinusoid sum).
TimeCoeff abs_coeff(const TimeCoeff& c) {
  if (c.is_constant()) return TimeCoeff::constant(std::abs(c.offset));
  return TimeCoeff::constant(c.envelope());
}

}  // namespace

double PolyBound::value(double t, double z) const {
  double s = 0;
  for (const auto& term : terms)
    s += term.coeff.value(t) * pow_int(z, term.degree);
  return s;
}

double PolyBound::envelope_value(double z) const {
  double s = 0;
  for (const auto& term : terms)
    s += term.coeff.envelope() * pow_int(z, term.degree);
  return s;
}

double PolyBound::lower_value(double z) const {
  double s = 0;
  for (const auto& term : terms)
    s += std::max(0.0, term.coeff.lower_bound()) * pow_int(z, term.degree);
  return s;
}

int PolyBound::max_degree() const {
  int d = 0;
  for (const auto& term : terms) d = std::max(d, term.degree);
  return d;
}

int PolyBound::lowest_superlinear_degree() const {
  int d = 0;
  for (const auto& term : terms)
    if (term.degree >= 2 && (d == 0 || term.degree < d)) d = term.degree;
  return d;
}

double PolyBound::coeff_envelope(int degree) const {
  for (const auto& term : terms)
    if (term.degree == degree) return term.coeff.envelope();
  return 0;
}

void PolyBound::add_term(int degree, const TimeCoeff& coeff) {
  for (auto& term : terms) {
    if (term.degree == degree) {
      term.coeff.add_scaled(coeff, 1.0);
      return;
    }
  }
  terms.push_back({degree, coeff});
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.degree < b.degree; });
}

PolyBound PolyBound::envelope_upper() const {
  PolyBound out;
  for (const auto& term : terms)
    out.add_term(term.degree, TimeCoeff::constant(term.coeff.envelope()));
  return out;
}

PolyBound PolyBound::envelope_lower() const {
  PolyBound out;
  for (const auto& term : terms)
    out.add_term(term.degree,
                 TimeCoeff::constant(std::max(0.0, term.coeff.lower_bound())));
  return out;
}

PolyBound monomial_bound_x(const std::vector<MonomialTerm>& f_terms) {
  PolyBound out;
  for (const auto& term : f_terms)
    out.add_term(term.total_degree(), abs_coeff(term.coeff));
  return out;
}

PolyBound monomial_bound_y(const std::vector<MonomialTerm>& f_terms,
                           const EigenStructure& eig) {
  const int n = static_cast<int>(eig.V.rows());
  Eigen::VectorXd row_abs_sum(n);
  for (int j = 0; j < n; ++j) {
    double s = 0;
    for (int k = 0; k < n; ++k) s += std::abs(eig.V(j, k));
    row_abs_sum(j) = s;
  }
  PolyBound out;
  for (const auto& term : f_terms) {
    double factor = eig.norm_V_inv;
    for (int j = 0; j < n; ++j)
      factor *= pow_int(row_abs_sum(j), term.exponents[j]);
    TimeCoeff c = abs_coeff(term.coeff);
    c.scale(factor);
    out.add_term(term.total_degree(), c);
  }
  return out;
}

TimeCoeff linearize_l2(const PolyBound& L, double z_hat) {
  if (z_hat < 0) throw Error("linearize_l2: z_hat must be >= 0");
  TimeCoeff l2;
  for (const auto& term : L.terms)
    l2.add_scaled(term.coeff, pow_int(z_hat, term.degree - 1));
  return l2;
}

GridSup sup_norm_g(const std::function<double(double)>& g_norm, double t0,
                   double horizon, double grid_step, double safety_margin,
                   double min_period_hint) {
  GridSup out;
  if (horizon <= 0 || grid_step <= 0)
    throw Error("sup_norm_g: horizon and grid_step must be positive");
  out.step_warning =
      min_period_hint > 0 && grid_step > min_period_hint / 20.0;
  const int n = std::max(2, static_cast<int>(std::ceil(horizon / grid_step)));
  double vmax = 0, vmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k) {
    const double v = g_norm(t0 + horizon * k / n);
    vmax = std::max(vmax, v);
    vmin = std::min(vmin, v);
  }
  out.sup = vmax * (1.0 + safety_margin);
  out.inf = vmin;
  return out;
}

EnvelopeConstants kappa_bounds(double alpha1, double Gs, double G_inf,
                               const PolyBound& L, const EigenbasisMaps& maps,
                               double t0, double horizon, double grid_step) {
  EnvelopeConstants env;
  env.alpha1 = alpha1;
  env.Gs = Gs;
  env.G_inf = G_inf;
  env.kappa_plus = alpha1 + Gs;
  env.kappa_minus = alpha1 + G_inf;
  env.L_plus = L.envelope_upper();
  env.L_minus = L.envelope_lower();
  env.F0 = maps.F0();
  env.F_tilde = maps.F0() * maps.norm_V_inv();
  env.F_minus = 0;
  if (maps.F0() > 0) {
    const int n = std::max(2, static_cast<int>(std::ceil(horizon / grid_step)));
    double vmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n; ++k)
      vmin = std::min(vmin, maps.f_norm_unit(t0 + horizon * k / n));
    env.F_minus = maps.F0() * vmin;
  }
  return env;
}

}  // namespace stabcert
