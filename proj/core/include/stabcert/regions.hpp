#ifndef STABCERT_REGIONS_HPP
#define STABCERT_REGIONS_HPP

#include <utility>
#include <vector>

#include "stabcert/criteria.hpp"
#include "stabcert/dynamics.hpp"
#include "stabcert/spectral.hpp"
#include "stabcert/system.hpp"

namespace stabcert {

struct PolarScanConfig {
  double angle_step = M_PI / 60;
  double radial_start = 0.01;
  double radial_growth = 1.2;
  double radial_cap = 10;
  double horizon = 60;
  double bisect_rel_tol = 1e-2;
  std::vector<std::pair<int, int>> planes;  // 1-based coordinate pairs
  IntegratorConfig integ;
  int threads = 0;  // 0 = STABCERT_THREADS env or hardware concurrency
};

enum class ProbeStatus { bounded_threshold, unbounded_within_cap };

struct BoundaryPoint {
  double angle = 0;
  double radius = 0;
  double xi = 0, xj = 0;
  ProbeStatus status = ProbeStatus::bounded_threshold;
};

struct RegionBoundary {
  std::pair<int, int> plane{1, 2};
  std::vector<BoundaryPoint> points;
  double t0 = 0;
  double horizon = 0;
};

// Per angle: advance the radius geometrically from radial_start until
// blow-up, then bisect the last bracket. Initial states live in the plane
// x = r (cos a * e_i + sin a * e_j) with every other coordinate zero.
RegionBoundary scan_plane(const SystemSpec& spec, std::pair<int, int> plane,
                          const PolarScanConfig& cfg);

RegionBoundary scan_region_2d(const SystemSpec& spec,
                              const PolarScanConfig& cfg);

// Double-polar protocol: each plane is scanned with the complementary polar
// pair held at zero (the slice convention is recorded in the metadata).
std::vector<RegionBoundary> scan_region_4d(const SystemSpec& spec,
                                           const PolarScanConfig& cfg);

struct EllipseCurve {
  std::pair<int, int> plane{1, 2};
  std::vector<BoundaryPoint> points;  // radial curve, one point per angle
  double radius_z = 0;                // the defining ||V^-1 x|| level
};

// Intersection of the ellipsoid ||V^-1 x|| = radius with a coordinate plane,
// parametrized by angle. Throws DegeneratePlane when the induced quadratic
// form is singular.
EllipseCurve ellipsoid_projection(const RegionEstimate& est,
                                  const EigenStructure& eig,
                                  std::pair<int, int> plane, int n_points);

struct ContainmentReport {
  std::vector<double> violation_angles;
  double min_ratio = 0;   // min over angles of outer/inner radius
  double mean_ratio = 0;
  int n_checked = 0;
  bool pass() const { return violation_angles.empty(); }
};

// Checks that the certified curve lies inside the scanned boundary at every
// scanned angle; a violation is a soundness alarm for the whole pipeline.
ContainmentReport compare_regions(const EllipseCurve& inner,
                                  const RegionBoundary& outer);

}  // namespace stabcert

#endif
