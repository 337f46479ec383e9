#ifndef STABCERT_DYNAMICS_HPP
#define STABCERT_DYNAMICS_HPP

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "stabcert/numeric.hpp"

namespace stabcert {

struct IntegratorConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = 0;      // 0 = unrestricted
  double norm_cap = 1e6;    // blow-up once ||state|| reaches this
  double growth_cap = 10;   // ... or two consecutive step ratios reach this
  double zero_floor = 0;    // 0 = never terminate on decay
  long max_steps = 20'000'000;
};

enum class Termination {
  horizon_reached,
  blow_up,
  converged_to_zero,
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> norms;
  Termination termination = Termination::horizon_reached;
  double blowup_time = 0;  // valid when termination == blow_up

  bool blew_up() const { return termination == Termination::blow_up; }
};

struct ScalarTrajectory {
  std::vector<double> times;
  std::vector<double> values;
  Termination termination = Termination::horizon_reached;
  double blowup_time = 0;

  bool blew_up() const { return termination == Termination::blow_up; }
  Pchip interpolant() const { return Pchip(times, values); }
};

using VectorRhs =
    std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;
using ScalarRhs = std::function<double(double, double)>;

// Adaptive Dormand-Prince 5(4) over [t0, t0 + horizon]. Accepted steps are
// recorded densely; the step sequence is deterministic for a given config.
// Throws StepUnderflow when the controller stalls.
Trajectory integrate(const VectorRhs& rhs, const Eigen::VectorXd& y0,
                     double t0, double horizon, const IntegratorConfig& cfg);

ScalarTrajectory integrate_scalar(const ScalarRhs& rhs, double z0, double t0,
                                  double horizon, const IntegratorConfig& cfg);

// True when the window of accepted norms ends in two consecutive growth
// ratios >= growth_cap, or the last norm reached norm_cap.
bool detect_blowup(std::span<const double> norms, const IntegratorConfig& cfg);

struct ThresholdResult {
  double z_bar = 0;  // midpoint of the final bracket
  double z_lo = 0;   // largest initial value observed to stay bounded
  double z_hi = 0;   // smallest initial value observed to blow up
};

// Bisects the initial value separating bounded from blow-up behavior of a
// scalar equation; valid because solutions are ordered in z0. Throws
// NoBracket when both endpoints behave identically.
ThresholdResult threshold_bisect(const ScalarRhs& rhs, double z_lo,
                                 double z_hi, double rel_tol, double t0,
                                 double horizon, const IntegratorConfig& cfg);

struct BoundCheck {
  double max_violation_rel = 0;  // max (||x|| - ||V|| z) / (1 + ||V|| z)
  double worst_time = 0;
  bool pass = true;
  long n_times = 0;
};

// Verifies ||x(t)|| <= ||V|| z(t) on the accepted times of the x-trajectory;
// z is interpolated monotonically between its own accepted steps.
BoundCheck verify_bound(const Trajectory& x_traj, const ScalarTrajectory& z_traj,
                        double norm_V, double rel_tol = 1e-9);

}  // namespace stabcert

#endif
