#ifndef STABCERT_CRITERIA_HPP
#define STABCERT_CRITERIA_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stabcert/bounds.hpp"
#include "stabcert/dynamics.hpp"

namespace stabcert {

// Tri-state verdicts: infinite-horizon conditions are checked on a finite
// window with trailing-window attainment flags, so "inconclusive" is a
// first-class outcome.
enum class Cert { certified, not_certified, inconclusive };

// Linear comparison equation  Z' = mu(t, zhat) Z + F0 ||V^-1 eta(t)||  with
// mu(t, zhat) = alpha1 + ||G_-(t)|| + l2(t, zhat).
//
// Construction precomputes cumulative integrals of the time-varying parts on
// a uniform Gauss grid over [t0, t0 + horizon]; evaluations at any zhat then
// reuse the cache, since the zhat dependence enters through fixed powers.
class LinearAux {
 public:
  LinearAux(double alpha1, std::function<double(double)> g_norm,
            PolyBound l2_source, std::function<double(double)> f_norm,
            double t0, double horizon, double Gs = 0, double G_inf = 0,
            double min_period_hint = 0);

  double mu(double t, double z_hat) const;
  double l2_at(double t, double z_hat) const;
  double l2_envelope(double z_hat) const;

  // Cumulative integral of mu from t0 to the grid edge closest below t.
  double integral_mu(double t, double z_hat) const;

  double alpha1() const { return alpha1_; }
  double Gs() const { return Gs_; }
  double G_inf() const { return G_inf_; }
  double t0() const { return t0_; }
  double horizon() const { return horizon_; }
  double eps_neg = 1e-3;          // settled-negativity threshold
  double avg_settle_abs = 1e-3;   // limsup-settled tolerance (absolute)

  const std::function<double(double)>& g_norm_fn() const { return g_norm_; }
  const std::function<double(double)>& f_norm_fn() const { return f_norm_; }

  // Mean of alpha1 + g over a trailing window [t0 + from_frac * H, t0 + H].
  double trailing_mean_base(double from_frac, double to_frac) const;

  size_t n_edges() const { return edges_.size(); }
  double edge(size_t k) const { return edges_[k]; }
  double edge_integral_base(size_t k) const { return cum_base_[k]; }
  double edge_integral_mu(size_t k, double z_hat) const;

 private:
  double alpha1_;
  std::function<double(double)> g_norm_;
  PolyBound l2_source_;
  std::function<double(double)> f_norm_;
  double t0_, horizon_;
  double Gs_, G_inf_;

  std::vector<double> edges_;      // n_cells + 1 grid edges
  std::vector<double> cum_base_;   // integral of (alpha1 + g) at edges
  // Per-degree cumulative integrals of the l2 coefficients at edges.
  std::vector<int> degrees_;
  std::vector<std::vector<double>> cum_coeff_;
};

struct ZsResult {
  double Zs = 1;
  bool sup_attained = false;
  double arg_t = 0;  // where the running max of the integral sits
};

// Z_s(t0, zhat) = sup_t exp(integral of mu); the flag reports whether the
// trailing-window mean of mu is settled negative (the sup cannot grow later).
ZsResult compute_zs(const LinearAux& lin, double z_hat);

struct RhoResult {
  double rho = 0;
  bool sup_attained = false;
  bool blew_up = false;
};

// rho(t0, zhat) = sup_t Z_F where Z_F' = mu Z_F + ||V^-1 eta||, Z_F(t0) = 0.
RhoResult compute_rho(const LinearAux& lin, double z_hat);

struct UniformNegativeResult {
  std::vector<std::pair<double, double>> nu_samples;  // (zhat, nu)
  double z_hat_nu = 0;  // largest zhat with nu > 0 (0 when never)
  bool fires = false;
};

// nu(zhat) = -(alpha1 + Gs + l2_envelope(zhat)) from envelope constants;
// the boundary zhat is refined by bisection on the analytic envelope.
UniformNegativeResult check_uniform_negative(const LinearAux& lin,
                                             const std::vector<double>& grid);

struct AverageResult {
  double phi = 0;
  double gamma = 0;
  double g_av = 0;
  double l2_av = 0;
  bool fires = false;
  bool settled = true;  // trailing quarter-window means agree
};

AverageResult check_average(const LinearAux& lin, double z_hat);

struct IntegralResult {
  Cert stable = Cert::not_certified;
  Cert asymptotic = Cert::not_certified;
  double trailing_slope = 0;
};

// Trailing-slope test on I(t) = integral of mu: settled negative slope means
// asymptotic stability, bounded I with near-zero slope means stability.
IntegralResult check_integral_stability(const LinearAux& lin, double z_hat);

enum class RegionKind { stability, asymptotic_stability, trapping };

struct RegionEstimate {
  double radius = 0;  // in z = ||V^-1 x0|| units; membership is strict <
  RegionKind kind = RegionKind::stability;
  double t0 = 0;
  std::string provenance;
  std::optional<double> gain;  // limsup bound F0 ||V|| rho, when asymptotic
  double z_hat_star = 0;       // maximizing zhat
};

// Maximizes zhat / Z_s over the certified interval (golden section with a
// dense-grid cross-check that wins on disagreement).
RegionEstimate stability_radius(const LinearAux& lin, double z_hat_lo,
                                double z_hat_hi, RegionKind kind,
                                const std::string& provenance);

// Maximizes (zhat - F0 rho) / Z_s; kind is trapping. gain = F0 ||V|| rho at
// the maximizer when the certifying criterion was asymptotic.
RegionEstimate boundedness_radius(const LinearAux& lin, double F0,
                                  double z_hat_hi, double norm_V,
                                  bool asymptotic,
                                  const std::string& provenance);

struct MasseraReport {
  double zeta0 = 0, zeta1 = 0, zeta2 = 0;
  bool holds = false;  // (r - 1) zeta1 >= zeta2 with zeta1 > 0
  double margin = 0;
  double r = 0, l3 = 0;
};

// Advisory check: fits zeta(t, tau) = integral of psi over [tau, t] with
// zeta0 - zeta1 (t - tau) + zeta2 tau on a grid. zeta1 comes from the
// trailing decay slope; (zeta2, zeta0) solve the remaining two-variable
// minimax fit over the grid constraints. Never produces a region by itself.
MasseraReport check_massera(const std::function<double(double)>& psi, double r,
                            double l3, double t0, double horizon);

// F0 ||V|| ||V^-1|| / nu.
double asymptotic_gain_uniform(double F0, double norm_V, double norm_V_inv,
                               double nu);

struct ExponentFit {
  double D = 1;
  double chi = 0;
  double gain = 0;
};

// Fits Z_h <= D e^(-chi (t - t0)) by least squares on log Z_h with a fixed
// decay-margin, then lifts D so the bound dominates every sample.
ExponentFit asymptotic_gain_exponent_fit(const LinearAux& lin, double z_hat,
                                         double F0, double norm_V,
                                         double norm_V_inv,
                                         double margin = 0.01);

struct CriteriaReport {
  Cert stable = Cert::not_certified;
  Cert asymptotically_stable = Cert::not_certified;
  std::vector<std::string> fired;
  double Zs = 1;
  double rho = 0;
  double nu = 0;
  double phi = 0;
  double z_hat_star = 0;
  double z_hat_nu = 0;
  double z_hat_phi = 0;
  std::vector<RegionEstimate> regions;
  double horizon = 0;
  bool any_inconclusive = false;
};

// Runs every criterion over a zhat grid and assembles radii for those that
// fired. F0 > 0 adds the trapping radius via rho.
CriteriaReport evaluate_criteria(const LinearAux& lin, double F0,
                                 double norm_V, int z_hat_grid_points = 33);

}  // namespace stabcert

#endif
