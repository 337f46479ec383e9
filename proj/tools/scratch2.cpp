#include <cstdio>
#include "stabcert/analysis.hpp"
#include "stabcert/regions.hpp"
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

int main() {
  auto s = planar();
  IntegratorConfig cfg;
  auto rhs = [&s](double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    dx = s.rhs(t, x);
  };
  // decay from 0.99*sqrt(2) at 12 angles by t=200
  const double r = 0.99 * std::sqrt(2.0);
  int decayed = 0;
  for (int k = 0; k < 12; ++k) {
    double a = 2 * M_PI * k / 12;
    Eigen::VectorXd x0(2);
    x0 << r * std::cos(a), r * std::sin(a);
    auto tr = integrate(rhs, x0, 0, 200, cfg);
    bool ok = !tr.blew_up() && tr.norms.back() <= 1e-3 * r;
    printf("angle %2d: term=%d final=%.3e %s\n", k, (int)tr.termination,
           tr.norms.back(), ok ? "DECAYED" : "NO");
    decayed += ok;
  }
  printf("decayed %d/12\n", decayed);
  // blow-up somewhere on ||x0|| = 3
  int blew = 0;
  for (int k = 0; k < 12; ++k) {
    double a = 2 * M_PI * k / 12;
    Eigen::VectorXd x0(2);
    x0 << 3 * std::cos(a), 3 * std::sin(a);
    auto tr = integrate(rhs, x0, 0, 200, cfg);
    if (tr.blew_up()) { ++blew; printf("z0=3 angle %d blows at t=%.2f\n", k, tr.blowup_time); }
  }
  printf("blew %d/12 at z0=3\n", blew);
  // coarse scan
  PolarScanConfig pc;
  pc.angle_step = M_PI / 8;
  pc.radial_start = 0.5;
  pc.radial_cap = 8;
  pc.horizon = 120;
  auto b = scan_region_2d(s, pc);
  double rmin = 1e9, rmax = 0;
  for (auto& p : b.points) {
    rmin = std::min(rmin, p.radius);
    rmax = std::max(rmax, p.radius);
    if (p.status == ProbeStatus::unbounded_within_cap) printf("angle %.2f UNBOUNDED\n", p.angle);
  }
  printf("scanned boundary radius in [%.3f, %.3f]\n", rmin, rmax);
  return 0;
}
