#ifndef STABCERT_ANALYSIS_HPP
#define STABCERT_ANALYSIS_HPP

#include <memory>
#include <optional>
#include <string>

#include "stabcert/auxiliary.hpp"
#include "stabcert/bounds.hpp"
#include "stabcert/criteria.hpp"
#include "stabcert/dynamics.hpp"
#include "stabcert/spectral.hpp"
#include "stabcert/system.hpp"

namespace stabcert {

struct AnalysisOptions {
  double horizon = 0;        // 0 = 50 slow periods (or 100 when autonomous)
  double decomposition_tol = 1e-9;
  double cond_cap = 1e8;
  double safety_margin = 0.02;   // grid-sup inflation for Gs
  double grid_step = 0;          // 0 = shortest period / 40
  int z_hat_grid_points = 33;
  IntegratorConfig integ;
};

// Everything the pipeline derives from one system: the eigenstructure, the
// transformed evaluators, the majorant, envelope constants, both scalar
// comparison equations, and the linear comparison equation.
struct Analysis {
  SystemSpec spec;
  EigenStructure eig;
  std::shared_ptr<EigenbasisMaps> maps;
  PolyBound L_x;  // majorant in ||x||
  PolyBound L_y;  // majorant in z = ||y||
  GridSup g_minus_sup;
  GridSup g_sup;  // for the conservative variant
  EnvelopeConstants env;
  ScalarAux aux_refined;
  ScalarAux aux_conservative;
  std::shared_ptr<LinearAux> lin;
  double horizon = 0;

  double z0_of(const Eigen::VectorXd& x0) const { return maps->z0_of(x0); }
};

Analysis analyze(const SystemSpec& spec, const AnalysisOptions& opt = {});

// Threshold certificate via bisection of the scalar comparison equation:
// the interval [0, z_bar) maps to the ellipsoid ||V^-1 x0|| < z_bar. Returns
// nothing when the equation diverges from every positive start, or never
// blows up below the probe cap times the root-scale estimate.
std::optional<RegionEstimate> threshold_certificate(
    const Analysis& an, const IntegratorConfig& cfg, double horizon,
    double rel_tol = 1e-3);

// Criteria certificates plus the threshold certificate, best radius first.
struct CertificateSet {
  CriteriaReport criteria;
  std::vector<RegionEstimate> regions;  // sorted by radius, descending
  std::optional<RegionEstimate> best() const {
    if (regions.empty()) return std::nullopt;
    return regions.front();
  }
};

CertificateSet certify(const Analysis& an, const AnalysisOptions& opt = {});

}  // namespace stabcert

#endif
