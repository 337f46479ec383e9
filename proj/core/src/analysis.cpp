#include "stabcert/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "stabcert/errors.hpp"

namespace stabcert {

Analysis analyze(const SystemSpec& spec, const AnalysisOptions& opt) {
  Analysis an;
  an.spec = spec;
  an.eig = decompose(spec.A, opt.decomposition_tol, opt.cond_cap);
  an.maps = std::make_shared<EigenbasisMaps>(an.eig, an.spec);

  const double slow = spec.min_period();
  an.horizon = opt.horizon > 0 ? opt.horizon
                               : (slow > 0 ? 50 * slow : 100.0);
  const double grid_step =
      opt.grid_step > 0 ? opt.grid_step : (slow > 0 ? slow / 40 : an.horizon / 4000);

  an.L_x = monomial_bound_x(spec.f_terms);
  an.L_y = monomial_bound_y(spec.f_terms, an.eig);

  const auto maps = an.maps;
  auto g_minus = [maps](double t) { return maps->g_minus_norm(t); };
  auto g_full = [maps](double t) { return maps->g_norm(t); };
  auto f_norm = [maps](double t) { return maps->f_norm(t); };
  auto f_unit = [maps](double t) { return maps->f_norm_unit(t); };

  if (an.maps->has_gstar()) {
    an.g_minus_sup = sup_norm_g(g_minus, spec.t0, an.horizon, grid_step,
                                opt.safety_margin, slow);
    an.g_sup = sup_norm_g(g_full, spec.t0, an.horizon, grid_step,
                          opt.safety_margin, slow);
  }

  an.env = kappa_bounds(an.eig.alpha1(), an.g_minus_sup.sup, an.g_minus_sup.inf,
                        an.L_y, *an.maps, spec.t0, an.horizon, grid_step);

  const bool forced = spec.forcing.F0 > 0;
  an.aux_refined =
      build_aux(an.eig.alpha1(), g_minus, an.L_y, f_norm,
                forced ? AuxVariant::refined : AuxVariant::homogeneous);
  an.aux_conservative =
      build_aux(an.eig.alpha1(), g_full, an.L_y, f_norm,
                forced ? AuxVariant::conservative : AuxVariant::homogeneous);

  an.lin = std::make_shared<LinearAux>(an.eig.alpha1(), g_minus, an.L_y,
                                       forced ? f_unit
                                              : std::function<double(double)>(),
                                       spec.t0, an.horizon, an.g_minus_sup.sup,
                                       an.g_minus_sup.inf, slow);
  return an;
}

std::optional<RegionEstimate> threshold_certificate(const Analysis& an,
                                                    const IntegratorConfig& cfg,
                                                    double horizon,
                                                    double rel_tol) {
  const auto rhs = an.aux_refined.as_rhs();
  // Root-scale estimate seeds the probe schedule.
  double scale = 1;
  const int d = an.L_y.max_degree();
  if (d >= 2) {
    const double lead = an.L_y.coeff_envelope(d);
    const double kap = std::abs(an.eig.alpha1()) + an.g_minus_sup.sup;
    if (lead > 0) scale = std::pow(std::max(kap, 1e-6) / lead, 1.0 / (d - 1));
  }

  // Two rounds: a certificate found on the base horizon must survive a 3x
  // replay, otherwise the bisection is redone on the longer window. Marginal
  // systems whose divergence only shows late are rejected rather than
  // certified on a truncated view.
  for (double H : {horizon, 3 * horizon}) {
    auto blows_up = [&](double z0, double span) {
      return integrate_scalar(rhs, z0, an.spec.t0, span, cfg).blew_up();
    };
    double z_lo = 1e-4 * scale;
    if (blows_up(z_lo, H)) return std::nullopt;  // diverges from tiny starts
    double z_hi = z_lo;
    bool bracket = false;
    while (z_hi < 100 * scale) {
      z_hi *= 2;
      if (blows_up(z_hi, H)) {
        bracket = true;
        break;
      }
    }
    if (!bracket) return std::nullopt;  // nothing escapes below the probe cap

    const auto th = threshold_bisect(rhs, z_hi / 2, z_hi, rel_tol, an.spec.t0,
                                     H, cfg);
    if (blows_up(th.z_lo, 3 * H)) continue;  // truncation artifact
    RegionEstimate est;
    est.radius = th.z_lo;  // certified side of the bracket
    est.kind = an.spec.forcing.F0 > 0 ? RegionKind::trapping
                                      : RegionKind::asymptotic_stability;
    est.t0 = an.spec.t0;
    est.provenance = "aux-threshold";
    est.z_hat_star = th.z_bar;
    return est;
  }
  return std::nullopt;
}

CertificateSet certify(const Analysis& an, const AnalysisOptions& opt) {
  CertificateSet out;
  out.criteria = evaluate_criteria(*an.lin, an.spec.forcing.F0,
                                   an.eig.norm_V, opt.z_hat_grid_points);
  out.regions = out.criteria.regions;

  IntegratorConfig cfg = opt.integ;
  auto th = threshold_certificate(an, cfg, an.horizon);
  if (th) out.regions.push_back(*th);

  std::sort(out.regions.begin(), out.regions.end(),
            [](const RegionEstimate& a, const RegionEstimate& b) {
              return a.radius > b.radius;
            });
  return out;
}

}  // namespace stabcert
