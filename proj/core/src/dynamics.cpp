#include "stabcert/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stabcert/errors.hpp"

namespace stabcert {

namespace {

// Dormand-Prince 5(4) tableau (FSAL).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b(5th) - b(4th): error estimator weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// State concept: needs axpy-style arithmetic, elementwise error norm, norm.
struct VecOps {
  using State = Eigen::VectorXd;
  static double sol_norm(const State& y) { return y.norm(); }
  static bool finite(const State& y) { return y.allFinite(); }
};

struct ScalarOps {
  using State = double;
  static double sol_norm(double y) { return std::abs(y); }
  static bool finite(double y) { return std::isfinite(y); }
};

template <typename Ops, typename Rhs, typename Record>
Termination run_dopri5(const Rhs& rhs, typename Ops::State y0, double t0,
                       double horizon, const IntegratorConfig& cfg,
                       const Record& record, double* blowup_time) {
  using State = typename Ops::State;
  const double t_end = t0 + horizon;
  const double hmax =
      cfg.max_step > 0 ? std::min(cfg.max_step, horizon) : horizon;

  State y = y0;
  State k1 = rhs(t0, y);
  if (!Ops::finite(k1)) {
    *blowup_time = t0;
    return Termination::blow_up;
  }

  auto err_scale = [&cfg](const State& a, const State& b) {
    if constexpr (std::is_same_v<State, double>)
      return cfg.atol + cfg.rtol * std::max(std::abs(a), std::abs(b));
    else {
      Eigen::VectorXd sc(a.size());
      for (Eigen::Index i = 0; i < a.size(); ++i)
        sc(i) = cfg.atol + cfg.rtol * std::max(std::abs(a(i)), std::abs(b(i)));
      return sc;
    }
  };

  // Initial step: standard norm-based heuristic, deterministic.
  double h;
  {
    double d0, d1;
    if constexpr (std::is_same_v<State, double>) {
      const double sc = cfg.atol + cfg.rtol * std::abs(y);
      d0 = std::abs(y) / sc;
      d1 = std::abs(k1) / sc;
    } else {
      const Eigen::VectorXd sc = err_scale(y, y);
      d0 = (y.cwiseQuotient(sc)).norm() / std::sqrt(double(y.size()));
      d1 = (k1.cwiseQuotient(sc)).norm() / std::sqrt(double(y.size()));
    }
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, hmax);
    State y1 = y + h0 * k1;
    State f1 = rhs(t0 + h0, y1);
    double d2;
    if constexpr (std::is_same_v<State, double>) {
      const double sc = cfg.atol + cfg.rtol * std::abs(y);
      d2 = std::abs(f1 - k1) / sc / h0;
    } else {
      const Eigen::VectorXd sc = err_scale(y, y);
      d2 = ((f1 - k1).cwiseQuotient(sc)).norm() /
           std::sqrt(double(y.size())) / h0;
    }
    const double dm = std::max(d1, d2);
    const double h1 =
        dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    h = std::min({100 * h0, h1, hmax});
  }

  record(t0, y);
  const double norm0 = std::max(Ops::sol_norm(y0), cfg.atol);
  double prev_norm = Ops::sol_norm(y);
  double prev_ratio = 0;
  double h_prev_accepted = std::numeric_limits<double>::infinity();
  bool growing = false;
  long steps = 0;

  double t = t0;
  while (t < t_end) {
    if (++steps > cfg.max_steps)
      throw Error("integrate: step budget exhausted");
    const double hmin = 16 * std::numeric_limits<double>::epsilon() *
                        std::max(std::abs(t), 1.0);
    if (t_end - t < hmin) break;  // remaining span below resolution
    h = std::min(h, t_end - t);
    if (h < hmin) {
      // A polynomial pole shrinks the step quadratically while the norm
      // escapes; that is a blow-up, not stiffness. Stiffness keeps the norm
      // near its running scale.
      if (growing && Ops::sol_norm(y) >= 1e3 * norm0) {
        *blowup_time = t;
        return Termination::blow_up;
      }
      throw StepUnderflow(t);
    }

    const State k2v = rhs(t + c2 * h, y + h * (a21 * k1));
    const State k3v = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2v));
    const State k4v =
        rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2v + a43 * k3v));
    const State k5v = rhs(
        t + c5 * h, y + h * (a51 * k1 + a52 * k2v + a53 * k3v + a54 * k4v));
    const State k6v =
        rhs(t + h,
            y + h * (a61 * k1 + a62 * k2v + a63 * k3v + a64 * k4v + a65 * k5v));
    const State y_new =
        y + h * (b1 * k1 + b3 * k3v + b4 * k4v + b5 * k5v + b6 * k6v);
    const State k7v = rhs(t + h, y_new);

    if (!Ops::finite(y_new) || !Ops::finite(k7v)) {
      // Overflow inside the step: polynomial escape, treat as blow-up.
      *blowup_time = t + h;
      return Termination::blow_up;
    }

    const State err_vec = h * (e1 * k1 + e3 * k3v + e4 * k4v + e5 * k5v +
                               e6 * k6v + e7 * k7v);
    double err;
    if constexpr (std::is_same_v<State, double>) {
      err = std::abs(err_vec) / err_scale(y, y_new);
    } else {
      const Eigen::VectorXd sc = err_scale(y, y_new);
      err = (err_vec.cwiseQuotient(sc)).norm() / std::sqrt(double(y.size()));
    }

    if (err <= 1.0) {
      t += h;
      y = y_new;
      k1 = k7v;  // FSAL
      record(t, y);

      const double norm = Ops::sol_norm(y);
      if (norm >= cfg.norm_cap) {
        *blowup_time = t;
        return Termination::blow_up;
      }
      // Growth ratios only count between near-zero-free norms and on
      // non-growing steps: escape shrinks the step, a benign transient
      // leaving the origin grows it.
      const double ratio_floor = 1e3 * cfg.atol;
      const double ratio =
          (prev_norm > ratio_floor && h <= 1.01 * h_prev_accepted)
              ? norm / prev_norm
              : 0;
      if (ratio >= cfg.growth_cap && prev_ratio >= cfg.growth_cap) {
        *blowup_time = t;
        return Termination::blow_up;
      }
      growing = norm > prev_norm;
      prev_ratio = ratio;
      prev_norm = norm;
      h_prev_accepted = h;
      if (cfg.zero_floor > 0 && norm <= cfg.zero_floor)
        return Termination::converged_to_zero;

      const double fac =
          err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = std::min(h * fac, hmax);
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
    }
  }
  return Termination::horizon_reached;
}

}  // namespace

Trajectory integrate(const VectorRhs& rhs, const Eigen::VectorXd& y0,
                     double t0, double horizon, const IntegratorConfig& cfg) {
  Trajectory traj;
  auto rhs_val = [&rhs](double t, const Eigen::VectorXd& y) {
    Eigen::VectorXd out(y.size());
    rhs(t, y, out);
    return out;
  };
  auto record = [&traj](double t, const Eigen::VectorXd& y) {
    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.norms.push_back(y.norm());
  };
  traj.termination = run_dopri5<VecOps>(rhs_val, y0, t0, horizon, cfg, record,
                                        &traj.blowup_time);
  return traj;
}

ScalarTrajectory integrate_scalar(const ScalarRhs& rhs, double z0, double t0,
                                  double horizon,
                                  const IntegratorConfig& cfg) {
  ScalarTrajectory traj;
  auto rhs_val = [&rhs](double t, double z) { return rhs(t, z); };
  auto record = [&traj](double t, double z) {
    traj.times.push_back(t);
    traj.values.push_back(z);
  };
  traj.termination = run_dopri5<ScalarOps>(rhs_val, z0, t0, horizon, cfg,
                                           record, &traj.blowup_time);
  return traj;
}

bool detect_blowup(std::span<const double> norms,
                   const IntegratorConfig& cfg) {
  const size_t n = norms.size();
  if (n < 3) return false;
  if (norms[n - 1] >= cfg.norm_cap) return true;
  const double floor = 1e3 * cfg.atol;
  const double r1 = norms[n - 2] > floor ? norms[n - 1] / norms[n - 2] : 0;
  const double r2 = norms[n - 3] > floor ? norms[n - 2] / norms[n - 3] : 0;
  return r1 >= cfg.growth_cap && r2 >= cfg.growth_cap;
}

ThresholdResult threshold_bisect(const ScalarRhs& rhs, double z_lo,
                                 double z_hi, double rel_tol, double t0,
                                 double horizon, const IntegratorConfig& cfg) {
  auto blows_up = [&](double z0) {
    return integrate_scalar(rhs, z0, t0, horizon, cfg).blew_up();
  };
  if (blows_up(z_lo))
    throw NoBracket("threshold_bisect: lower endpoint already blows up");
  if (!blows_up(z_hi))
    throw NoBracket("threshold_bisect: upper endpoint stays bounded");
  while (z_hi - z_lo > rel_tol * z_hi) {
    const double mid = 0.5 * (z_lo + z_hi);
    if (blows_up(mid))
      z_hi = mid;
    else
      z_lo = mid;
  }
  return {0.5 * (z_lo + z_hi), z_lo, z_hi};
}

BoundCheck verify_bound(const Trajectory& x_traj,
                        const ScalarTrajectory& z_traj, double norm_V,
                        double rel_tol) {
  BoundCheck out;
  const Pchip z_interp = z_traj.interpolant();
  const double z_t_end = z_traj.times.empty() ? 0 : z_traj.times.back();
  for (size_t k = 0; k < x_traj.times.size(); ++k) {
    const double t = x_traj.times[k];
    if (t > z_t_end) break;  // aux trajectory ended earlier (blow-up)
    const double bound = norm_V * z_interp(t);
    const double viol = (x_traj.norms[k] - bound) / (1.0 + bound);
    ++out.n_times;
    if (viol > out.max_violation_rel) {
      out.max_violation_rel = viol;
      out.worst_time = t;
    }
  }
  out.pass = out.max_violation_rel <= rel_tol;
  return out;
}

}  // namespace stabcert
