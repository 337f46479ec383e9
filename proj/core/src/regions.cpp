#include "stabcert/regions.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "stabcert/errors.hpp"

namespace stabcert {

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STABCERT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

RegionBoundary scan_plane(const SystemSpec& spec, std::pair<int, int> plane,
                          const PolarScanConfig& cfg) {
  if (plane.first < 1 || plane.first > spec.n || plane.second < 1 ||
      plane.second > spec.n || plane.first == plane.second)
    throw Error("scan_plane: invalid coordinate plane");
  RegionBoundary boundary;
  boundary.plane = plane;
  boundary.t0 = spec.t0;
  boundary.horizon = cfg.horizon;

  const int n_angles =
      std::max(4, static_cast<int>(std::round(2 * M_PI / cfg.angle_step)));
  boundary.points.resize(n_angles);

  auto probe = [&spec, &plane, &cfg](double angle) {
    const double ci = std::cos(angle), sj = std::sin(angle);
    auto blows_up = [&](double r) {
      Eigen::VectorXd x0 = Eigen::VectorXd::Zero(spec.n);
      x0(plane.first - 1) = r * ci;
      x0(plane.second - 1) = r * sj;
      IntegratorConfig ic = cfg.integ;
      ic.zero_floor = 1e-9 * r;  // decayed trajectories are settled early
      auto rhs = [&spec](double t, const Eigen::VectorXd& x,
                         Eigen::VectorXd& dx) { dx = spec.rhs(t, x); };
      return integrate(rhs, x0, spec.t0, cfg.horizon, ic).blew_up();
    };
    BoundaryPoint pt;
    pt.angle = angle;
    double r = cfg.radial_start;
    if (blows_up(r)) {
      // Boundary below the starting radius; bisect down toward zero.
      double lo = 0, hi = r;
      while (hi - lo > cfg.bisect_rel_tol * hi)
        (blows_up(0.5 * (lo + hi)) ? hi : lo) = 0.5 * (lo + hi);
      pt.radius = 0.5 * (lo + hi);
      pt.status = ProbeStatus::bounded_threshold;
    } else {
      double last_bounded = r;
      bool found = false;
      while (r <= cfg.radial_cap) {
        r *= cfg.radial_growth;
        if (blows_up(r)) {
          found = true;
          break;
        }
        last_bounded = r;
      }
      if (!found) {
        pt.radius = cfg.radial_cap;
        pt.status = ProbeStatus::unbounded_within_cap;
      } else {
        double lo = last_bounded, hi = r;
        while (hi - lo > cfg.bisect_rel_tol * hi)
          (blows_up(0.5 * (lo + hi)) ? hi : lo) = 0.5 * (lo + hi);
        pt.radius = 0.5 * (lo + hi);
        pt.status = ProbeStatus::bounded_threshold;
      }
    }
    pt.xi = pt.radius * ci;
    pt.xj = pt.radius * sj;
    return pt;
  };

  const int n_threads = std::min(resolve_threads(cfg.threads), n_angles);
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&]() {
      for (int k = next.fetch_add(1); k < n_angles; k = next.fetch_add(1))
        boundary.points[k] = probe(2 * M_PI * k / n_angles);
    });
  }
  for (auto& th : pool) th.join();
  return boundary;
}

RegionBoundary scan_region_2d(const SystemSpec& spec,
                              const PolarScanConfig& cfg) {
  if (spec.n != 2) throw Error("scan_region_2d requires n = 2");
  return scan_plane(spec, {1, 2}, cfg);
}

std::vector<RegionBoundary> scan_region_4d(const SystemSpec& spec,
                                           const PolarScanConfig& cfg) {
  if (spec.n != 4) throw Error("scan_region_4d requires n = 4");
  std::vector<std::pair<int, int>> planes = cfg.planes;
  if (planes.empty()) planes = {{1, 2}, {3, 4}, {1, 3}};
  std::vector<RegionBoundary> out;
  out.reserve(planes.size());
  for (const auto& plane : planes) out.push_back(scan_plane(spec, plane, cfg));
  return out;
}

EllipseCurve ellipsoid_projection(const RegionEstimate& est,
                                  const EigenStructure& eig,
                                  std::pair<int, int> plane, int n_points) {
  if (est.radius <= 0)
    throw Error("ellipsoid_projection: estimate has no positive radius");
  const int n = static_cast<int>(eig.V.rows());
  if (plane.first < 1 || plane.first > n || plane.second < 1 ||
      plane.second > n || plane.first == plane.second)
    throw Error("ellipsoid_projection: invalid coordinate plane");

  // Induced 2x2 quadratic form q(u) = ||V^-1 (u_i e_i + u_j e_j)||^2.
  const Eigen::VectorXcd col_i = eig.V_inv.col(plane.first - 1);
  const Eigen::VectorXcd col_j = eig.V_inv.col(plane.second - 1);
  const double qii = col_i.squaredNorm();
  const double qjj = col_j.squaredNorm();
  const double qij = col_i.dot(col_j).real();  // col_i^H col_j
  const double det = qii * qjj - qij * qij;
  const double trace = qii + qjj;
  const double min_eig = 0.5 * (trace - std::sqrt(std::max(
                                             0.0, trace * trace - 4 * det)));
  if (min_eig <= 1e-12 * std::max(1.0, trace))
    throw DegeneratePlane("induced quadratic form is singular on this plane");

  EllipseCurve curve;
  curve.plane = plane;
  curve.radius_z = est.radius;
  curve.points.resize(n_points);
  for (int k = 0; k < n_points; ++k) {
    const double a = 2 * M_PI * k / n_points;
    const double c = std::cos(a), s = std::sin(a);
    const double q = qii * c * c + 2 * qij * c * s + qjj * s * s;
    const double r = est.radius / std::sqrt(q);
    curve.points[k] = {a, r, r * c, r * s, ProbeStatus::bounded_threshold};
  }
  return curve;
}

ContainmentReport compare_regions(const EllipseCurve& inner,
                                  const RegionBoundary& outer) {
  if (inner.plane != outer.plane)
    throw Error("compare_regions: plane mismatch");
  ContainmentReport rep;
  if (inner.points.empty() || outer.points.empty()) return rep;

  auto inner_radius_at = [&inner](double angle) {
    // Periodic linear interpolation on the inner curve's angle grid.
    const int m = static_cast<int>(inner.points.size());
    double a = std::fmod(angle, 2 * M_PI);
    if (a < 0) a += 2 * M_PI;
    const double step = 2 * M_PI / m;
    const int k = std::min(m - 1, static_cast<int>(a / step));
    const double frac = (a - k * step) / step;
    const double r0 = inner.points[k].radius;
    const double r1 = inner.points[(k + 1) % m].radius;
    return r0 + frac * (r1 - r0);
  };

  double sum_ratio = 0;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& pt : outer.points) {
    const double ri = inner_radius_at(pt.angle);
    ++rep.n_checked;
    const double ratio = ri > 0 ? pt.radius / ri
                                : std::numeric_limits<double>::infinity();
    sum_ratio += ratio;
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    if (pt.status == ProbeStatus::bounded_threshold && ri > pt.radius)
      rep.violation_angles.push_back(pt.angle);
  }
  rep.mean_ratio = rep.n_checked > 0 ? sum_ratio / rep.n_checked : 0;
  return rep;
}

}  // namespace stabcert
