#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stabcert/analysis.hpp"
#include "stabcert/errors.hpp"
#include "stabcert/numeric.hpp"
#include "stabcert/regions.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stabcert;

namespace {

// Exit codes: 0 ok, 1 input error, 2 method inapplicable (defective A or
// nonnegative kappa), 3 only horizon-inconclusive results.
constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInapplicable = 2;
constexpr int kExitInconclusive = 3;

struct CommonOpts {
  std::string spec_path;
  std::string out_dir = "out";
  double horizon = 0;
  double rtol = 1e-8;
  double atol = 1e-10;
  double angle_step = M_PI / 60;
  std::optional<double> t0_override;
  int zhat_grid = 33;
  unsigned seed = 0;
  int threads = 0;
};

json manifest_json(const std::string& command, const CommonOpts& o) {
  json m;
  m["command"] = command;
  m["spec"] = o.spec_path;
  m["out"] = o.out_dir;
  m["horizon"] = o.horizon;
  m["rtol"] = o.rtol;
  m["atol"] = o.atol;
  m["angle_step"] = o.angle_step;
  if (o.t0_override) m["t0"] = *o.t0_override;
  m["zhat_grid"] = o.zhat_grid;
  m["seed"] = o.seed;
  m["threads"] = o.threads;
  return m;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

SystemSpec load_with_overrides(const CommonOpts& o) {
  SystemSpec spec = load_spec(o.spec_path);
  if (o.t0_override) spec.t0 = *o.t0_override;
  return spec;
}

AnalysisOptions analysis_options(const CommonOpts& o) {
  AnalysisOptions opt;
  opt.horizon = o.horizon;
  opt.integ.rtol = o.rtol;
  opt.integ.atol = o.atol;
  opt.z_hat_grid_points = o.zhat_grid;
  return opt;
}

const char* kind_name(RegionKind k) {
  switch (k) {
    case RegionKind::stability: return "stability";
    case RegionKind::asymptotic_stability: return "asymptotic_stability";
    case RegionKind::trapping: return "trapping";
  }
  return "?";
}

const char* cert_name(Cert c) {
  switch (c) {
    case Cert::certified: return "certified";
    case Cert::not_certified: return "not-certified";
    case Cert::inconclusive: return "horizon-inconclusive";
  }
  return "?";
}

json region_json(const RegionEstimate& r) {
  json j;
  j["radius"] = r.radius;
  j["kind"] = kind_name(r.kind);
  j["t0"] = r.t0;
  j["provenance"] = r.provenance;
  j["z_hat_star"] = r.z_hat_star;
  if (r.gain) j["gain"] = *r.gain;
  return j;
}

json analysis_json(const Analysis& an) {
  json j;
  j["n"] = an.spec.n;
  j["t0"] = an.spec.t0;
  j["horizon"] = an.horizon;
  json eig;
  eig["alpha"] = std::vector<double>(an.eig.alpha.data(),
                                     an.eig.alpha.data() + an.eig.alpha.size());
  eig["beta"] = std::vector<double>(an.eig.beta.data(),
                                    an.eig.beta.data() + an.eig.beta.size());
  eig["norm_V"] = an.eig.norm_V;
  eig["norm_V_inv"] = an.eig.norm_V_inv;
  eig["cond_V"] = an.eig.cond_V;
  eig["n_pairs"] = an.eig.n_pairs;
  const auto lam = choose_lambda(an.eig.alpha);
  eig["lambda"] = lam.lambda;
  eig["M"] = lam.M;
  j["eigen"] = eig;

  json bounds;
  json terms = json::array();
  for (const auto& t : an.L_y.terms)
    terms.push_back({{"degree", t.degree}, {"coeff_sup", t.coeff.envelope()}});
  bounds["L_y"] = terms;
  json terms_x = json::array();
  for (const auto& t : an.L_x.terms)
    terms_x.push_back({{"degree", t.degree}, {"coeff_sup", t.coeff.envelope()}});
  bounds["L_x"] = terms_x;
  bounds["Gs_refined"] = an.g_minus_sup.sup;
  bounds["G_inf_refined"] = an.g_minus_sup.inf;
  bounds["Gs_conservative"] = an.g_sup.sup;
  bounds["grid_step_warning"] = an.g_minus_sup.step_warning;
  bounds["kappa_plus"] = an.env.kappa_plus;
  bounds["kappa_minus"] = an.env.kappa_minus;
  bounds["F0"] = an.env.F0;
  bounds["F_tilde"] = an.env.F_tilde;
  bounds["F_minus"] = an.env.F_minus;
  j["bounds"] = bounds;

  json aux;
  aux["alpha1"] = an.eig.alpha1();
  aux["variant"] = an.spec.forcing.F0 > 0 ? "forced" : "homogeneous";
  std::string pretty =
      "z' = (" + std::to_string(an.eig.alpha1()) + " + |G-(t)|) z";
  for (const auto& t : an.L_y.terms)
    pretty += " + " + std::to_string(t.coeff.envelope()) + " z^" +
              std::to_string(t.degree);
  if (an.spec.forcing.F0 > 0) pretty += " + |F(t)|";
  aux["equation"] = pretty;
  j["auxiliary"] = aux;
  return j;
}

json criteria_json(const CriteriaReport& rep) {
  json c;
  c["stable"] = cert_name(rep.stable);
  c["asymptotically_stable"] = cert_name(rep.asymptotically_stable);
  c["fired"] = rep.fired;
  c["Zs"] = rep.Zs;
  c["rho"] = rep.rho;
  c["nu"] = rep.nu;
  c["phi"] = rep.phi;
  c["z_hat_star"] = rep.z_hat_star;
  c["z_hat_nu"] = rep.z_hat_nu;
  c["z_hat_phi"] = rep.z_hat_phi;
  c["horizon"] = rep.horizon;
  c["any_inconclusive"] = rep.any_inconclusive;
  json regions = json::array();
  for (const auto& r : rep.regions) regions.push_back(region_json(r));
  c["regions"] = regions;
  return c;
}

void print_analysis_summary(const Analysis& an) {
  const auto& e = an.eig;
  std::cout << "eigenvalues (alpha +/- i beta):\n";
  for (int k = 0; k < an.spec.n; ++k)
    std::cout << "  " << e.alpha(k) << (e.beta(k) >= 0 ? " + " : " - ")
              << std::abs(e.beta(k)) << "i\n";
  std::cout << "||V|| = " << e.norm_V << "  ||V^-1|| = " << e.norm_V_inv
            << "  cond = " << e.cond_V << "\n";
  std::cout << "sup||G-|| = " << an.g_minus_sup.sup
            << "  sup||G|| = " << an.g_sup.sup
            << "  kappa+ = " << an.env.kappa_plus
            << "  kappa- = " << an.env.kappa_minus << "\n";
  std::cout << "majorant in z:";
  for (const auto& t : an.L_y.terms)
    std::cout << "  " << t.coeff.envelope() << " z^" << t.degree;
  if (an.L_y.empty()) std::cout << "  0";
  std::cout << "\n";
}

int cmd_analyze(const CommonOpts& o) {
  const SystemSpec spec = load_with_overrides(o);
  const Analysis an = analyze(spec, analysis_options(o));
  json rep = analysis_json(an);
  write_file(fs::path(o.out_dir) / "manifest.json",
             manifest_json("analyze", o).dump(2) + "\n");
  write_file(fs::path(o.out_dir) / "report.json", rep.dump(2) + "\n");
  print_analysis_summary(an);
  std::cout << "report written to " << (fs::path(o.out_dir) / "report.json")
            << "\n";
  return kExitOk;
}

int cmd_criteria(const CommonOpts& o) {
  const SystemSpec spec = load_with_overrides(o);
  const AnalysisOptions opt = analysis_options(o);
  const Analysis an = analyze(spec, opt);
  const CertificateSet certs = certify(an, opt);

  json rep = analysis_json(an);
  rep["criteria"] = criteria_json(certs.criteria);
  json regions = json::array();
  for (const auto& r : certs.regions) regions.push_back(region_json(r));
  rep["regions"] = regions;

  write_file(fs::path(o.out_dir) / "manifest.json",
             manifest_json("criteria", o).dump(2) + "\n");
  write_file(fs::path(o.out_dir) / "report.json", rep.dump(2) + "\n");

  print_analysis_summary(an);
  std::cout << "stable: " << cert_name(certs.criteria.stable)
            << "   asymptotically stable: "
            << cert_name(certs.criteria.asymptotically_stable) << "\n";
  std::cout << "fired:";
  for (const auto& f : certs.criteria.fired) std::cout << " " << f;
  std::cout << "\n";
  for (const auto& r : certs.regions)
    std::cout << "region " << kind_name(r.kind) << "  radius " << r.radius
              << "  [" << r.provenance << "]\n";
  if (certs.regions.empty())
    std::cout << "no certified region on this horizon\n";

  if (certs.regions.empty() &&
      (certs.criteria.stable == Cert::inconclusive ||
       certs.criteria.any_inconclusive))
    return kExitInconclusive;
  return kExitOk;
}

std::string boundary_csv(const RegionBoundary& b) {
  std::string csv = "angle_rad,radius,x_i,x_j,status\n";
  for (const auto& p : b.points) {
    csv += std::to_string(p.angle) + "," + std::to_string(p.radius) + "," +
           std::to_string(p.xi) + "," + std::to_string(p.xj) + "," +
           (p.status == ProbeStatus::bounded_threshold
                ? "boundary"
                : "unbounded_within_cap") +
           "\n";
  }
  return csv;
}

std::string curve_csv(const EllipseCurve& c) {
  std::string csv = "angle_rad,radius,x_i,x_j,status\n";
  for (const auto& p : c.points)
    csv += std::to_string(p.angle) + "," + std::to_string(p.radius) + "," +
           std::to_string(p.xi) + "," + std::to_string(p.xj) + ",ellipsoid\n";
  return csv;
}

int cmd_region(const CommonOpts& o, double radial_start, double radial_cap,
               double scan_horizon) {
  const SystemSpec spec = load_with_overrides(o);
  const AnalysisOptions opt = analysis_options(o);
  const Analysis an = analyze(spec, opt);
  const CertificateSet certs = certify(an, opt);
  const auto best = certs.best();

  PolarScanConfig pc;
  pc.angle_step = o.angle_step;
  pc.integ.rtol = o.rtol;
  pc.integ.atol = o.atol;
  pc.threads = o.threads;
  pc.horizon = scan_horizon > 0 ? scan_horizon : an.horizon;
  if (best) {
    pc.radial_start = best->radius / 10;
    pc.radial_cap = std::max(1.0, 10 * best->radius);
  }
  if (radial_start > 0) pc.radial_start = radial_start;
  if (radial_cap > 0) pc.radial_cap = radial_cap;

  std::vector<RegionBoundary> boundaries;
  if (spec.n == 2)
    boundaries.push_back(scan_region_2d(spec, pc));
  else if (spec.n == 4)
    boundaries = scan_region_4d(spec, pc);
  else
    throw Error("region scan supports n = 2 or n = 4");

  write_file(fs::path(o.out_dir) / "manifest.json",
             manifest_json("region", o).dump(2) + "\n");
  json contain_rep;
  contain_rep["certified_radius"] = best ? best->radius : 0.0;
  contain_rep["planes"] = json::array();
  bool all_pass = true;
  for (const auto& b : boundaries) {
    const std::string tag = "x" + std::to_string(b.plane.first) + "x" +
                            std::to_string(b.plane.second);
    write_file(fs::path(o.out_dir) / ("boundary_" + tag + ".csv"),
               boundary_csv(b));
    json pj;
    pj["plane"] = {b.plane.first, b.plane.second};
    if (best) {
      const auto curve = ellipsoid_projection(*best, an.eig, b.plane, 720);
      write_file(fs::path(o.out_dir) / ("ellipsoid_" + tag + ".csv"),
                 curve_csv(curve));
      const auto rep = compare_regions(curve, b);
      pj["containment_pass"] = rep.pass();
      pj["min_ratio"] = rep.min_ratio;
      pj["mean_ratio"] = rep.mean_ratio;
      pj["violations"] = rep.violation_angles;
      all_pass = all_pass && rep.pass();
      std::cout << "plane " << tag << ": containment "
                << (rep.pass() ? "pass" : "VIOLATION") << "  min ratio "
                << rep.min_ratio << "\n";
    } else {
      pj["containment_pass"] = nullptr;
      std::cout << "plane " << tag
                << ": scanned (no certificate to compare)\n";
    }
    contain_rep["planes"].push_back(pj);
  }
  write_file(fs::path(o.out_dir) / "containment.json",
             contain_rep.dump(2) + "\n");
  if (!best) return kExitInconclusive;
  return all_pass ? kExitOk : kExitInapplicable;
}

int cmd_simulate(const CommonOpts& o, const std::vector<double>& x0_in,
                 double sim_horizon) {
  const SystemSpec spec = load_with_overrides(o);
  const AnalysisOptions opt = analysis_options(o);
  const Analysis an = analyze(spec, opt);

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(spec.n);
  for (int i = 0; i < spec.n && i < static_cast<int>(x0_in.size()); ++i)
    x0(i) = x0_in[i];

  IntegratorConfig cfg = opt.integ;
  const double H = sim_horizon > 0 ? sim_horizon : an.horizon;
  auto rhs = [&spec](double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    dx = spec.rhs(t, x);
  };
  const Trajectory xt = integrate(rhs, x0, spec.t0, H, cfg);

  IntegratorConfig zcfg = cfg;
  zcfg.rtol = std::min(cfg.rtol, 1e-10);
  zcfg.atol = std::min(cfg.atol, 1e-12);
  const double z0 = an.z0_of(x0);
  const ScalarTrajectory zt =
      integrate_scalar(an.aux_refined.as_rhs(), z0, spec.t0, H, zcfg);
  const Pchip zi = zt.interpolant();
  const double z_end = zt.times.empty() ? spec.t0 : zt.times.back();

  std::string csv = "t,norm_x,z,bound\n";
  for (size_t k = 0; k < xt.times.size(); ++k) {
    const double t = xt.times[k];
    const double z = t <= z_end ? zi(t) : std::nan("");
    csv += std::to_string(t) + "," + std::to_string(xt.norms[k]) + "," +
           std::to_string(z) + "," + std::to_string(an.eig.norm_V * z) + "\n";
  }
  write_file(fs::path(o.out_dir) / "manifest.json",
             manifest_json("simulate", o).dump(2) + "\n");
  write_file(fs::path(o.out_dir) / "trajectory.csv", csv);

  const auto check = verify_bound(xt, zt, an.eig.norm_V);
  std::cout << "z0 = " << z0 << ", " << xt.times.size() << " accepted steps, "
            << "max bound violation " << check.max_violation_rel
            << (check.pass ? " (bound holds)" : " (BOUND VIOLATED)") << "\n";
  std::cout << "trajectory written to "
            << (fs::path(o.out_dir) / "trajectory.csv") << "\n";
  return kExitOk;
}

// Scripted regression of the planar envelope chain: autonomous fixed points,
// the closed-form stability cutoff, and the trapping radius maximization.
int benchmark_envelope_chain(double alpha_star, double Gs, double sigma,
                             double F_tilde) {
  std::cout << "planar envelope regression (alpha*=" << alpha_star
            << " Gs=" << Gs << " sigma=" << sigma << " F~=" << F_tilde
            << ")\n";
  EnvelopeConstants env;
  env.alpha1 = -alpha_star;
  env.Gs = Gs;
  env.kappa_plus = -alpha_star + Gs;
  env.L_plus.add_term(3, TimeCoeff::constant(sigma));
  env.F_tilde = F_tilde;
  env.F0 = F_tilde;

  bool ok = true;
  const auto aux = build_autonomous(env, BoundDirection::upper);
  const auto fp = fixed_points(aux);
  std::cout << "  fixed points:";
  for (const auto& r : fp.roots)
    std::cout << " " << r.z
              << (r.stability == RootStability::stable ? "(stable)"
                                                       : "(unstable)");
  std::cout << "\n";
  const double exact_lo = (std::sqrt(5.0) - 1) / 2;
  bool roots_ok = fp.roots.size() == 2 &&
                  std::abs(fp.roots[0].z - exact_lo) <= 1e-3 &&
                  std::abs(fp.roots[1].z - 1.0) <= 1e-3 &&
                  fp.situation == FixedPointCase::two_roots;
  std::cout << "  expected 0.618 (stable), 1.000 (unstable): "
            << (roots_ok ? "pass" : "FAIL") << "\n";
  ok = ok && roots_ok;

  const double z_star = std::sqrt((alpha_star - Gs) / sigma);
  std::cout << "  z* = " << z_star << " (expected sqrt(2))\n";
  ok = ok && std::abs(z_star - std::sqrt(2.0)) <= 1e-9;

  auto s_bar = [&](double zh) { return alpha_star - Gs - sigma * zh * zh; };
  auto value = [&](double zh) { return zh - F_tilde / s_bar(zh); };
  auto [z_s, R] = golden_max(value, 1e-6, z_star * (1 - 1e-9), 1e-12);
  auto [zg, Rg] = grid_max(value, 1e-6, z_star * (1 - 1e-9), 101);
  if (Rg > R) {
    z_s = zg;
    R = Rg;
  }
  std::cout << "  z_s = " << z_s << " (reported 0.848), R = " << R
            << " (reported 0.07)\n";
  ok = ok && std::abs(R - 0.07) <= 0.005;

  std::cout << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kExitOk : kExitInapplicable;
}

int cmd_benchmark(const CommonOpts& o, const std::string& scenario,
                  bool with_scan) {
  if (scenario == "example2" || scenario == "planar-envelope")
    return benchmark_envelope_chain(0.3, 0.1, 0.1, 0.1);

  // Named configs resolve against the config directory.
  std::string dir = "configs";
  if (const char* env = std::getenv("STABCERT_CONFIG_DIR")) dir = env;
  CommonOpts run = o;
  run.spec_path = scenario;
  if (!fs::exists(run.spec_path))
    run.spec_path = dir + "/" + scenario + ".json";
  if (!fs::exists(run.spec_path))
    throw ParseError("benchmark scenario not found: " + scenario);
  run.out_dir = o.out_dir;
  const int rc = cmd_criteria(run);
  if (rc != kExitOk) return rc;
  if (with_scan) return cmd_region(run, 0, 0, 0);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundedness/stability certificates for time-varying "
               "nonlinear systems via scalar comparison equations"};
  app.require_subcommand(1);

  CommonOpts o;
  std::vector<double> x0;
  double radial_start = 0, radial_cap = 0, scan_horizon = 0, sim_horizon = 0;
  std::string scenario;
  bool with_scan = false;

  auto add_common = [&o](CLI::App* cmd, bool needs_spec) {
    auto* s = cmd->add_option("--spec", o.spec_path, "system config file");
    if (needs_spec) s->required();
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--horizon", o.horizon, "analysis horizon");
    cmd->add_option("--rtol", o.rtol, "integrator relative tolerance");
    cmd->add_option("--atol", o.atol, "integrator absolute tolerance");
    cmd->add_option("--angle-step", o.angle_step, "polar scan angle step");
    cmd->add_option_function<double>(
        "--t0", [&o](const double& v) { o.t0_override = v; },
        "override the config t0");
    cmd->add_option("--zhat-grid", o.zhat_grid, "z-hat grid points");
    cmd->add_option("--seed", o.seed, "seed for randomized sweeps");
    cmd->add_option("--threads", o.threads,
                    "scan worker threads (default: STABCERT_THREADS or all)");
  };

  auto* analyze_cmd = app.add_subcommand("analyze", "decomposition + bounds");
  add_common(analyze_cmd, true);

  auto* criteria_cmd =
      app.add_subcommand("criteria", "stability/boundedness criteria + radii");
  add_common(criteria_cmd, true);

  auto* region_cmd =
      app.add_subcommand("region", "boundary scan + ellipsoid containment");
  add_common(region_cmd, true);
  region_cmd->add_option("--radial-start", radial_start, "first probe radius");
  region_cmd->add_option("--radial-cap", radial_cap, "largest probe radius");
  region_cmd->add_option("--scan-horizon", scan_horizon,
                         "probe integration horizon");

  auto* simulate_cmd = app.add_subcommand("simulate", "trajectory + bound CSV");
  add_common(simulate_cmd, true);
  simulate_cmd->add_option("--x0", x0, "initial state (repeat per component)")
      ->expected(-1);
  simulate_cmd->add_option("--sim-horizon", sim_horizon, "simulation horizon");

  auto* benchmark_cmd = app.add_subcommand(
      "benchmark", "scripted benchmark runs with pass/fail checks");
  benchmark_cmd
      ->add_option("scenario", scenario, "example2 | config name | config path")
      ->required();
  benchmark_cmd->add_flag("--with-scan", with_scan,
                          "also scan boundaries and check containment");
  add_common(benchmark_cmd, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze_cmd->parsed()) return cmd_analyze(o);
    if (criteria_cmd->parsed()) return cmd_criteria(o);
    if (region_cmd->parsed())
      return cmd_region(o, radial_start, radial_cap, scan_horizon);
    if (simulate_cmd->parsed()) return cmd_simulate(o, x0, sim_horizon);
    if (benchmark_cmd->parsed()) return cmd_benchmark(o, scenario, with_scan);
  } catch (const DefectiveMatrix& e) {
    json err{{"error", "defective_matrix"}, {"what", e.what()}, {"cond", e.cond}};
    std::cerr << err.dump() << "\n";
    return kExitInapplicable;
  } catch (const KappaNonNegative& e) {
    json err{{"error", "kappa_nonnegative"}, {"what", e.what()}};
    std::cerr << err.dump() << "\n";
    return kExitInapplicable;
  } catch (const ParseError& e) {
    json err{{"error", "parse"}, {"what", e.what()}};
    std::cerr << err.dump() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    json err{{"error", "runtime"}, {"what", e.what()}};
    std::cerr << err.dump() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
