// Temporary design probe; removed before release.
#include <cstdio>

#include "stabcert/analysis.hpp"

using namespace stabcert;

SystemSpec planar() {
  SystemSpec s;
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

SystemSpec coupled(double d, double mu, bool duffing, double F01) {
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
  t1.exponents = duffing ? std::vector<int>{3, 0, 0, 0}
                         : std::vector<int>{0, 3, 0, 0};
  t2.component = 4;
  t2.coeff = TimeCoeff::constant(-mu);
  t2.exponents = duffing ? std::vector<int>{0, 0, 3, 0}
                         : std::vector<int>{0, 0, 0, 3};
  s.f_terms = {t1, t2};
  s.forcing.eta.assign(4, TimeCoeff{});
  if (F01 > 0) {
    s.forcing.F0 = F01;
    s.forcing.eta[1] = TimeCoeff{0, {{1.0, 5.43, 0}}};
  }
  return s;
}

void report(const char* name, const SystemSpec& s) {
  try {
    auto an = analyze(s);
    printf("== %s ==\n", name);
    printf("alpha: ");
    for (int i = 0; i < s.n; ++i) printf("%.4f ", an.eig.alpha(i));
    printf("\nbeta: ");
    for (int i = 0; i < s.n; ++i) printf("%.4f ", an.eig.beta(i));
    printf("\n||V||=%.4f ||Vinv||=%.4f cond=%.4f\n", an.eig.norm_V,
           an.eig.norm_V_inv, an.eig.cond_V);
    printf("Gs(minus)=%.5f Ginf=%.5f  Gs(full)=%.5f\n", an.g_minus_sup.sup,
           an.g_minus_sup.inf, an.g_sup.sup);
    // mean of ||G-|| over horizon
    double mean = 0;
    int N = 5000;
    for (int k = 0; k < N; ++k)
      mean += an.maps->g_minus_norm(s.t0 + an.horizon * k / N);
    mean /= N;
    printf("mean||G-||=%.5f  alpha1=%.5f  => avg mu0=%.5f\n", mean,
           an.eig.alpha1(), an.eig.alpha1() + mean);
    for (auto& term : an.L_y.terms)
      printf("L_y: deg %d coeff %.5f\n", term.degree, term.coeff.envelope());
    printf("kappa+=%.5f kappa-=%.5f Ftilde=%.5f Fminus=%.5f\n",
           an.env.kappa_plus, an.env.kappa_minus, an.env.F_tilde,
           an.env.F_minus);
    IntegratorConfig cfg;
    auto th = threshold_certificate(an, cfg, an.horizon);
    if (th)
      printf("threshold cert: z=%.6f\n", th->radius);
    else
      printf("threshold cert: NONE\n");
    auto th2 = threshold_certificate(an, cfg, 3 * an.horizon);
    if (th2)
      printf("threshold cert (3x horizon): z=%.6f\n", th2->radius);
    else
      printf("threshold cert (3x horizon): NONE\n");
    // Mean-field fixed points: kappa_mean z + L z^3 + f_mean.
    if (s.forcing.F0 > 0) {
      double fmean = 0;
      int N = 5000;
      for (int k = 0; k < N; ++k)
        fmean += an.maps->f_norm(s.t0 + an.horizon * k / N);
      fmean /= N;
      const double kap = an.eig.alpha1() + mean;
      const double c3 = an.L_y.coeff_envelope(3);
      printf("mean-field: kappa=%.5f fmean=%.5f c3=%.5f  min drift at "
             "z*=%.4f -> %.6f\n",
             kap, fmean, c3, std::sqrt(-kap / (3 * c3)),
             kap * std::sqrt(-kap / (3 * c3)) +
                 c3 * std::pow(std::sqrt(-kap / (3 * c3)), 3) + fmean);
    }
    auto certs = certify(an);
    for (auto& r : certs.regions)
      printf("region: radius=%.6f kind=%d prov=%s zhat*=%.4f\n", r.radius,
             (int)r.kind, r.provenance.c_str(), r.z_hat_star);
    printf("criteria: stable=%d asym=%d fired:", (int)certs.criteria.stable,
           (int)certs.criteria.asymptotically_stable);
    for (auto& f : certs.criteria.fired) printf(" %s", f.c_str());
    printf("  Zs=%.4f rho=%.4f nu=%.4f phi=%.5f znu=%.5f\n",
           certs.criteria.Zs, certs.criteria.rho, certs.criteria.nu,
           certs.criteria.phi, certs.criteria.z_hat_nu);
  } catch (const std::exception& e) {
    printf("== %s == FAILED: %s\n", name, e.what());
  }
}

int main() {
  report("planar", planar());
  report("vdp d=0.1 mu=18.2", coupled(0.1, 18.2, false, 0));
  report("duffing d=0.1 mu=18.2", coupled(0.1, 18.2, true, 0));
  report("duffing-trap d=0.1 mu=0.3 F=0.01", coupled(0.1, 0.3, true, 0.01));
  report("duffing-trap d=2 mu=0.3 F=0.01", coupled(2.0, 0.3, true, 0.01));
  report("duffing-trap d=5 mu=0.3 F=0.01", coupled(5.0, 0.3, true, 0.01));
  report("duffing-trap d=10 mu=0.3 F=0.01", coupled(10.0, 0.3, true, 0.01));
  return 0;
}
