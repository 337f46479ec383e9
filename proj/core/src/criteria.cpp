#include "stabcert/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stabcert/errors.hpp"
#include "stabcert/numeric.hpp"

namespace stabcert {

namespace {

double pow_int(double z, int d) {
  double p = 1;
  for (int i = 0; i < d; ++i) p *= z;
  return p;
}

}  // namespace

LinearAux::LinearAux(double alpha1, std::function<double(double)> g_norm,
                     PolyBound l2_source, std::function<double(double)> f_norm,
                     double t0, double horizon, double Gs, double G_inf,
                     double min_period_hint)
    : alpha1_(alpha1),
      g_norm_(std::move(g_norm)),
      l2_source_(std::move(l2_source)),
      f_norm_(std::move(f_norm)),
      t0_(t0),
      horizon_(horizon),
      Gs_(Gs),
      G_inf_(G_inf) {
  if (horizon <= 0) throw Error("LinearAux: horizon must be positive");
  int n_cells = 4000;
  if (min_period_hint > 0)
    n_cells = std::max(n_cells,
                       static_cast<int>(horizon / min_period_hint * 40));
  n_cells = ((n_cells + 3) / 4) * 4;  // align quarter-window boundaries

  edges_.resize(n_cells + 1);
  for (int k = 0; k <= n_cells; ++k)
    edges_[k] = t0 + horizon * k / n_cells;

  auto base = [this](double t) {
    return alpha1_ + (g_norm_ ? g_norm_(t) : 0.0);
  };
  cum_base_.resize(n_cells + 1);
  cum_base_[0] = 0;
  for (int k = 0; k < n_cells; ++k)
    cum_base_[k + 1] = cum_base_[k] + gauss5(base, edges_[k], edges_[k + 1]);

  for (const auto& term : l2_source_.terms) degrees_.push_back(term.degree);
  cum_coeff_.resize(degrees_.size());
  for (size_t i = 0; i < degrees_.size(); ++i) {
    const auto& c = l2_source_.terms[i].coeff;
    auto f = [&c](double t) { return c.value(t); };
    cum_coeff_[i].resize(n_cells + 1);
    cum_coeff_[i][0] = 0;
    if (c.is_constant()) {
      for (int k = 0; k < n_cells; ++k)
        cum_coeff_[i][k + 1] =
            cum_coeff_[i][k] + c.offset * (edges_[k + 1] - edges_[k]);
    } else {
      for (int k = 0; k < n_cells; ++k)
        cum_coeff_[i][k + 1] =
            cum_coeff_[i][k] + gauss5(f, edges_[k], edges_[k + 1]);
    }
  }
}

double LinearAux::l2_at(double t, double z_hat) const {
  double v = 0;
  for (size_t i = 0; i < degrees_.size(); ++i)
    v += l2_source_.terms[i].coeff.value(t) * pow_int(z_hat, degrees_[i] - 1);
  return v;
}

double LinearAux::l2_envelope(double z_hat) const {
  double v = 0;
  for (const auto& term : l2_source_.terms)
    v += term.coeff.envelope() * pow_int(z_hat, term.degree - 1);
  return v;
}

double LinearAux::mu(double t, double z_hat) const {
  return alpha1_ + (g_norm_ ? g_norm_(t) : 0.0) + l2_at(t, z_hat);
}

double LinearAux::edge_integral_mu(size_t k, double z_hat) const {
  double v = cum_base_[k];
  for (size_t i = 0; i < degrees_.size(); ++i)
    v += cum_coeff_[i][k] * pow_int(z_hat, degrees_[i] - 1);
  return v;
}

double LinearAux::integral_mu(double t, double z_hat) const {
  if (t <= t0_) return 0;
  const double h = (edges_.back() - t0_) / (edges_.size() - 1);
  size_t k = std::min(edges_.size() - 1,
                      static_cast<size_t>((t - t0_) / h));
  double v = edge_integral_mu(k, z_hat);
  if (t > edges_[k]) {
    auto f = [this, z_hat](double s) { return mu(s, z_hat); };
    v += gauss5(f, edges_[k], t);
  }
  return v;
}

double LinearAux::trailing_mean_base(double from_frac, double to_frac) const {
  const size_t n = edges_.size() - 1;
  const size_t a = static_cast<size_t>(from_frac * n);
  const size_t b = static_cast<size_t>(to_frac * n);
  const double span = edges_[b] - edges_[a];
  return (cum_base_[b] - cum_base_[a]) / span;
}

ZsResult compute_zs(const LinearAux& lin, double z_hat) {
  ZsResult out;
  const size_t n = lin.n_edges();
  double best_I = 0;  // I(t0) = 0, so Z_s >= 1 always
  double best_t = lin.t0();
  double prev_I = 0, prev_mu = lin.mu(lin.t0(), z_hat);
  for (size_t k = 1; k < n; ++k) {
    const double I = lin.edge_integral_mu(k, z_hat);
    const double mu_k = lin.mu(lin.edge(k), z_hat);
    if (I > best_I) {
      best_I = I;
      best_t = lin.edge(k);
    }
    // Downward zero crossing of mu inside the cell: interior max of I.
    if (prev_mu > 0 && mu_k < 0) {
      auto f = [&lin, z_hat](double t) { return lin.mu(t, z_hat); };
      const double t_star = brent_root(f, lin.edge(k - 1), lin.edge(k));
      auto g = f;
      const double I_star = prev_I + gauss5(g, lin.edge(k - 1), t_star);
      if (I_star > best_I) {
        best_I = I_star;
        best_t = t_star;
      }
    }
    prev_I = I;
    prev_mu = mu_k;
  }
  out.Zs = std::exp(best_I);
  out.arg_t = best_t;
  const double tail_mean =
      (lin.edge_integral_mu(n - 1, z_hat) -
       lin.edge_integral_mu((n - 1) / 2, z_hat)) /
      (lin.edge(n - 1) - lin.edge((n - 1) / 2));
  out.sup_attained = tail_mean <= -lin.eps_neg;
  return out;
}

RhoResult compute_rho(const LinearAux& lin, double z_hat) {
  RhoResult out;
  IntegratorConfig cfg;
  cfg.rtol = 1e-9;
  cfg.atol = 1e-12;
  cfg.norm_cap = 1e12;
  auto rhs = [&lin, z_hat](double t, double Z) {
    return lin.mu(t, z_hat) * Z + (lin.f_norm_fn() ? lin.f_norm_fn()(t) : 0.0);
  };
  const auto traj =
      integrate_scalar(rhs, 0.0, lin.t0(), lin.horizon(), cfg);
  double best = 0;
  for (size_t k = 0; k < traj.values.size(); ++k) {
    double v = traj.values[k];
    // Local maximum between accepted steps: parabolic refinement.
    if (k > 0 && k + 1 < traj.values.size() && traj.values[k] >= traj.values[k - 1] &&
        traj.values[k] >= traj.values[k + 1]) {
      const double t1 = traj.times[k - 1], t2 = traj.times[k],
                   t3 = traj.times[k + 1];
      const double y1 = traj.values[k - 1], y2 = traj.values[k],
                   y3 = traj.values[k + 1];
      const double d21 = (y2 - y1) / (t2 - t1), d32 = (y3 - y2) / (t3 - t2);
      const double curv = (d32 - d21) / (t3 - t1);
      if (curv < 0) {
        const double t_star = 0.5 * (t2 + t3 - d32 / curv);
        if (t_star > t1 && t_star < t3) {
          const double dt = t_star - t2;
          v = std::max(v, y2 + 0.5 * (d21 + d32) * dt + curv * dt * dt);
        }
      }
    }
    best = std::max(best, v);
  }
  out.rho = best;
  out.blew_up = traj.blew_up();
  const size_t n = lin.n_edges();
  const double tail_mean =
      (lin.edge_integral_mu(n - 1, z_hat) -
       lin.edge_integral_mu((n - 1) / 2, z_hat)) /
      (lin.edge(n - 1) - lin.edge((n - 1) / 2));
  out.sup_attained = tail_mean <= -lin.eps_neg && !traj.blew_up();
  return out;
}

UniformNegativeResult check_uniform_negative(const LinearAux& lin,
                                             const std::vector<double>& grid) {
  UniformNegativeResult out;
  auto nu_of = [&lin](double z_hat) {
    return -(lin.alpha1() + lin.Gs() + lin.l2_envelope(z_hat));
  };
  for (double z : grid) out.nu_samples.emplace_back(z, nu_of(z));
  if (nu_of(0.0) <= 0) {
    out.fires = false;
    out.z_hat_nu = 0;
    return out;
  }
  out.fires = true;
  // nu is non-increasing in zhat; find the sign flip and bisect.
  double lo = 0, hi = 1;
  while (nu_of(hi) > 0 && hi < 1e12) hi *= 2;
  if (nu_of(hi) > 0) {
    out.z_hat_nu = hi;  // never turns: linear-only majorant
    return out;
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * (1 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (nu_of(mid) > 0 ? lo : hi) = mid;
  }
  out.z_hat_nu = lo;
  return out;
}

AverageResult check_average(const LinearAux& lin, double z_hat) {
  AverageResult out;
  const size_t n = lin.n_edges() - 1;
  auto window_mean = [&lin, z_hat, n](double a_frac, double b_frac) {
    const size_t a = static_cast<size_t>(a_frac * n);
    const size_t b = static_cast<size_t>(b_frac * n);
    return (lin.edge_integral_mu(b, z_hat) - lin.edge_integral_mu(a, z_hat)) /
           (lin.edge(b) - lin.edge(a));
  };
  const double mu_half = window_mean(0.5, 1.0);
  out.gamma = mu_half - lin.alpha1();
  out.phi = mu_half;
  out.g_av = lin.trailing_mean_base(0.5, 1.0) - lin.alpha1();
  out.l2_av = out.gamma - out.g_av;
  const double q3 = window_mean(0.5, 0.75);
  const double q4 = window_mean(0.75, 1.0);
  out.settled = std::abs(q3 - q4) <=
                std::max(lin.avg_settle_abs, 0.05 * std::abs(out.phi));
  out.fires = out.settled && out.phi < -lin.eps_neg;
  return out;
}

IntegralResult check_integral_stability(const LinearAux& lin, double z_hat) {
  IntegralResult out;
  const size_t n = lin.n_edges();
  std::vector<double> ts, Is;
  ts.reserve(n / 2 + 1);
  Is.reserve(n / 2 + 1);
  double I_max_q3 = -std::numeric_limits<double>::infinity();
  double I_max_q4 = -std::numeric_limits<double>::infinity();
  double I_abs_max = 0;
  for (size_t k = 0; k < n; ++k) {
    const double I = lin.edge_integral_mu(k, z_hat);
    I_abs_max = std::max(I_abs_max, std::abs(I));
    const double frac = static_cast<double>(k) / (n - 1);
    if (frac >= 0.5) {
      ts.push_back(lin.edge(k));
      Is.push_back(I);
      if (frac < 0.75)
        I_max_q3 = std::max(I_max_q3, I);
      else
        I_max_q4 = std::max(I_max_q4, I);
    }
  }
  const LineFit fit = fit_line(ts, Is);
  out.trailing_slope = fit.slope;
  if (fit.slope < -lin.eps_neg) {
    out.asymptotic = Cert::certified;
    out.stable = Cert::certified;
  } else if (fit.slope > lin.eps_neg) {
    out.asymptotic = Cert::not_certified;
    out.stable = Cert::not_certified;
  } else {
    const double growth = I_max_q4 - I_max_q3;
    const double tol = 1e-3 * std::max(1.0, I_abs_max);
    if (growth <= tol) {
      out.stable = Cert::certified;
      out.asymptotic = Cert::not_certified;
    } else {
      out.stable = Cert::inconclusive;
      out.asymptotic = Cert::inconclusive;
    }
  }
  return out;
}

namespace {

RegionEstimate maximize_over_zhat(const std::function<double(double)>& value,
                                  double lo, double hi, RegionKind kind,
                                  double t0, const std::string& provenance) {
  if (!(hi > lo))
    throw EmptyCertifiedInterval("no certified z-hat interval for " +
                                 provenance);
  auto [zg, vg] = golden_max(value, lo, hi, 1e-9);
  auto [zd, vd] = grid_max(value, lo, hi, 101);
  // The dense grid guards against multimodality and wins on disagreement.
  double z_star = zg, v_star = vg;
  if (vd > vg) {
    auto [zr, vr] = golden_max(value, std::max(lo, zd - (hi - lo) / 100),
                               std::min(hi, zd + (hi - lo) / 100), 1e-9);
    z_star = vr > vd ? zr : zd;
    v_star = std::max(vr, vd);
  }
  RegionEstimate est;
  est.radius = v_star;
  est.kind = kind;
  est.t0 = t0;
  est.provenance = provenance;
  est.z_hat_star = z_star;
  return est;
}

}  // namespace

RegionEstimate stability_radius(const LinearAux& lin, double z_hat_lo,
                                double z_hat_hi, RegionKind kind,
                                const std::string& provenance) {
  auto value = [&lin](double z_hat) {
    const auto zs = compute_zs(lin, z_hat);
    if (!zs.sup_attained) return -std::numeric_limits<double>::infinity();
    return z_hat / zs.Zs;
  };
  const double lo = std::max(z_hat_lo, 1e-12 * z_hat_hi);
  RegionEstimate est =
      maximize_over_zhat(value, lo, z_hat_hi, kind, lin.t0(), provenance);
  if (!(est.radius > 0))
    throw EmptyCertifiedInterval(
        "the horizon never settles on the certified interval");
  return est;
}

RegionEstimate boundedness_radius(const LinearAux& lin, double F0,
                                  double z_hat_hi, double norm_V,
                                  bool asymptotic,
                                  const std::string& provenance) {
  auto value = [&lin, F0](double z_hat) {
    const auto zs = compute_zs(lin, z_hat);
    const auto rho = compute_rho(lin, z_hat);
    if (!zs.sup_attained || !rho.sup_attained)
      return -std::numeric_limits<double>::infinity();
    return (z_hat - F0 * rho.rho) / zs.Zs;
  };
  RegionEstimate est =
      maximize_over_zhat(value, 1e-6 * z_hat_hi, z_hat_hi,
                         RegionKind::trapping, lin.t0(), provenance);
  if (!(est.radius > 0))
    throw NegativeRadius(
        "forcing too large: z - F0 rho is nonpositive on the whole interval");
  if (asymptotic)
    est.gain = F0 * norm_V * compute_rho(lin, est.z_hat_star).rho;
  return est;
}

MasseraReport check_massera(const std::function<double(double)>& psi, double r,
                            double l3, double t0, double horizon) {
  MasseraReport rep;
  rep.r = r;
  rep.l3 = l3;
  if (r <= 1) throw Error("check_massera: r must exceed 1");

  const int n_tau = 24, n_t = 160;
  // zeta(t, tau) for tau on a coarse grid, t on a fine one.
  std::vector<double> taus(n_tau);
  for (int j = 0; j < n_tau; ++j)
    taus[j] = t0 + horizon * 0.5 * j / (n_tau - 1);  // tau in first half

  std::vector<double> cum(n_t + 1), tgrid(n_t + 1);
  cum[0] = 0;
  for (int k = 0; k <= n_t; ++k) tgrid[k] = t0 + horizon * k / n_t;
  for (int k = 0; k < n_t; ++k)
    cum[k + 1] = cum[k] + gauss5(psi, tgrid[k], tgrid[k + 1]);
  auto cum_at = [&](double t) {
    const double h = horizon / n_t;
    const int k = std::min(n_t, static_cast<int>((t - t0) / h));
    double v = cum[k];
    if (t > tgrid[k]) v += gauss5(psi, tgrid[k], t);
    return v;
  };

  // Decay rate: trailing least-squares slope of zeta(t, t0) in t.
  std::vector<double> ts, zs;
  for (int k = n_t / 2; k <= n_t; ++k) {
    ts.push_back(tgrid[k]);
    zs.push_back(cum[k]);
  }
  const LineFit fit = fit_line(ts, zs);
  if (!(fit.slope < 0))
    throw NoValidFit("integral of psi does not decay; no dominating envelope");
  rep.zeta1 = -fit.slope;

  // Offsets needed per tau so the envelope dominates every grid constraint.
  std::vector<double> b(n_tau);
  for (int j = 0; j < n_tau; ++j) {
    const double c_tau = cum_at(taus[j]);
    double need = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n_t; ++k) {
      if (tgrid[k] < taus[j]) continue;
      const double zeta = cum[k] - c_tau;
      need = std::max(need, zeta + rep.zeta1 * (tgrid[k] - taus[j]));
    }
    b[j] = need;
  }
  // Growth of the offsets in tau is charged to zeta2; the rest to zeta0.
  const LineFit bfit = fit_line(taus, b);
  rep.zeta2 = std::max(0.0, bfit.slope);
  double z0_needed = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < n_tau; ++j)
    z0_needed = std::max(z0_needed, b[j] - rep.zeta2 * taus[j]);
  rep.zeta0 = std::max(0.0, z0_needed);
  rep.margin = (r - 1) * rep.zeta1 - rep.zeta2;
  rep.holds = rep.zeta1 > 0 && rep.margin >= 0;
  return rep;
}

double asymptotic_gain_uniform(double F0, double norm_V, double norm_V_inv,
                               double nu) {
  if (nu <= 0) throw Error("asymptotic_gain_uniform: nu must be positive");
  return F0 * norm_V * norm_V_inv / nu;
}

ExponentFit asymptotic_gain_exponent_fit(const LinearAux& lin, double z_hat,
                                         double F0, double norm_V,
                                         double norm_V_inv, double margin) {
  ExponentFit out;
  const size_t n = lin.n_edges();
  std::vector<double> ts(n), logZ(n);
  for (size_t k = 0; k < n; ++k) {
    ts[k] = lin.edge(k) - lin.t0();
    logZ[k] = lin.edge_integral_mu(k, z_hat);
  }
  const LineFit fit = fit_line(ts, logZ);
  const double chi = -fit.slope - margin;
  if (chi <= 0)
    throw Error("asymptotic_gain_exponent_fit: fitted exponent not negative");
  out.chi = chi;
  double logD = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < n; ++k)
    logD = std::max(logD, logZ[k] + chi * ts[k]);
  out.D = std::exp(logD);
  out.gain = F0 * norm_V * norm_V_inv * out.D / chi;
  return out;
}

CriteriaReport evaluate_criteria(const LinearAux& lin, double F0,
                                 double norm_V, int z_hat_grid_points) {
  CriteriaReport rep;
  rep.horizon = lin.horizon();

  // Uniform negativity fixes the widest analytic interval.
  std::vector<double> probe{0.0};
  const auto uni = check_uniform_negative(lin, probe);
  double z_hi = 0;
  RegionKind kind = RegionKind::stability;
  std::string provenance = "none";
  bool asymptotic = false;

  if (uni.fires) {
    rep.fired.push_back("C2-uniform-negative");
    rep.z_hat_nu = uni.z_hat_nu;
    rep.nu = -(lin.alpha1() + lin.Gs() + lin.l2_envelope(uni.z_hat_nu / 2));
    z_hi = uni.z_hat_nu;
    kind = RegionKind::asymptotic_stability;
    provenance = "C2-uniform-negative";
    asymptotic = true;
    rep.stable = Cert::certified;
    rep.asymptotically_stable = Cert::certified;
  }

  // Averaged criterion: phi(zhat) = alpha1 + gamma(zhat) < 0; gamma grows
  // with zhat, so the boundary is found by bisection.
  {
    const auto avg0 = check_average(lin, 0.0);
    rep.phi = avg0.phi;
    if (!avg0.settled) rep.any_inconclusive = true;
    if (avg0.fires) {
      rep.fired.push_back("C3-average");
      double lo = 0, hi = std::max(1.0, 2 * uni.z_hat_nu);
      while (check_average(lin, hi).fires && hi < 1e9) hi *= 2;
      if (check_average(lin, hi).fires) {
        rep.z_hat_phi = hi;
      } else {
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          (check_average(lin, mid).fires ? lo : hi) = mid;
        }
        rep.z_hat_phi = lo;
      }
      if (rep.z_hat_phi > z_hi) {
        z_hi = rep.z_hat_phi;
        kind = RegionKind::asymptotic_stability;
        provenance = "C3-average";
        asymptotic = true;
      }
      rep.stable = Cert::certified;
      rep.asymptotically_stable = Cert::certified;
    }
  }

  // Integral criterion at small zhat decides the system-level verdict when
  // the closed-form criteria stay silent.
  {
    const auto integ = check_integral_stability(lin, z_hi > 0 ? z_hi / 2 : 0.0);
    if (integ.stable == Cert::inconclusive) rep.any_inconclusive = true;
    if (integ.asymptotic == Cert::certified ||
        integ.stable == Cert::certified) {
      rep.fired.push_back("T2-integral");
      if (rep.stable != Cert::certified) {
        rep.stable = Cert::certified;
        rep.asymptotically_stable = integ.asymptotic;
      }
      if (z_hi == 0) {
        // Find the largest zhat the integral criterion certifies.
        auto ok = [&lin](double z) {
          const auto r = check_integral_stability(lin, z);
          return r.stable == Cert::certified ||
                 r.asymptotic == Cert::certified;
        };
        double lo = 0, hi = 1;
        while (ok(hi) && hi < 1e9) hi *= 2;
        if (!ok(hi)) {
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ok(mid) ? lo : hi) = mid;
          }
        }
        z_hi = lo;
        asymptotic = integ.asymptotic == Cert::certified;
        kind = asymptotic ? RegionKind::asymptotic_stability
                          : RegionKind::stability;
        provenance = "T2-integral";
      }
    } else if (rep.stable != Cert::certified) {
      rep.stable = integ.stable;
      rep.asymptotically_stable = integ.asymptotic;
    }
  }

  if (z_hi > 0) {
    auto est = stability_radius(lin, 0, z_hi, kind, provenance);
    const auto zs = compute_zs(lin, est.z_hat_star);
    rep.Zs = zs.Zs;
    if (!zs.sup_attained) rep.any_inconclusive = true;
    rep.z_hat_star = est.z_hat_star;
    if (F0 == 0) {
      // The stability/asymptotic-stability region applies to the
      // homogeneous system only.
      rep.regions.push_back(est);
    } else {
      const auto rho = compute_rho(lin, est.z_hat_star);
      rep.rho = rho.rho;
      if (!rho.sup_attained) rep.any_inconclusive = true;
      try {
        auto trap = boundedness_radius(lin, F0, z_hi, norm_V, asymptotic,
                                       provenance + "+rho");
        rep.regions.push_back(trap);
      } catch (const NegativeRadius&) {
        // Forcing too large relative to the certified interval: no trapping
        // region from this route.
      }
    }
  }

  (void)z_hat_grid_points;
  return rep;
}

}  // namespace stabcert
