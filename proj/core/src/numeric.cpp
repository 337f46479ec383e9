#include "stabcert/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stabcert {

namespace {

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGx[5] = {-0.9061798459386639928, -0.5384693101056830910, 0.0,
                           0.5384693101056830910, 0.9061798459386639928};
constexpr double kGw[5] = {0.2369268850561890875, 0.4786286704993664680,
                           0.5688888888888888889, 0.4786286704993664680,
                           0.2369268850561890875};

}  // namespace

double gauss5(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0;
  for (int i = 0; i < 5; ++i) s += kGw[i] * f(c + h * kGx[i]);
  return s * h;
}

double gauss5_composite(const std::function<double(double)>& f, double a,
                        double b, int n_cells) {
  if (n_cells < 1) n_cells = 1;
  const double h = (b - a) / n_cells;
  double s = 0;
  for (int k = 0; k < n_cells; ++k) s += gauss5(f, a + k * h, a + (k + 1) * h);
  return s;
}

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol, int max_iter) {
  double fa = f(a), fb = f(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  if (fa * fb > 0) throw std::invalid_argument("brent_root: no sign change");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2 * 2.22e-16 * std::abs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0) return b;
    if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
      d = e = m;
    } else {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2 * m * s;
        q = 1 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2 * m * q * (q - r) - (b - a) * (r - 1));
        q = (q - 1) * (r - 1) * (s - 1);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2 * p < std::min(3 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = e = m;
      }
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
    fb = f(b);
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
  }
  return b;
}

std::pair<double, double> golden_max(const std::function<double(double)>& f,
                                     double a, double b, double xtol,
                                     int max_iter) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > xtol * (1 + std::abs(a)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

std::pair<double, double> grid_max(const std::function<double(double)>& f,
                                   double a, double b, int n_points) {
  if (n_points < 2) n_points = 2;
  double best_x = a, best_f = f(a);
  for (int i = 1; i < n_points; ++i) {
    const double x = a + (b - a) * i / (n_points - 1);
    const double v = f(x);
    if (v > best_f) {
      best_f = v;
      best_x = x;
    }
  }
  return {best_x, best_f};
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: size");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  LineFit out;
  if (det == 0) {
    out.slope = 0;
    out.intercept = sy / n;
  } else {
    out.slope = (n * sxy - sx * sy) / det;
    out.intercept = (sy - out.slope * sx) / n;
  }
  return out;
}

Pchip::Pchip(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const size_t n = x_.size();
  if (y_.size() != n) throw std::invalid_argument("pchip: size mismatch");
  d_.assign(n, 0.0);
  if (n < 2) return;
  std::vector<double> h(n - 1), delta(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    if (h[i] <= 0) throw std::invalid_argument("pchip: x not increasing");
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  if (n == 2) {
    d_[0] = d_[1] = delta[0];
    return;
  }
  for (size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0) {
      d_[i] = 0;
    } else {
      const double w1 = 2 * h[i] + h[i - 1];
      const double w2 = h[i] + 2 * h[i - 1];
      d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0)
      d = 0;
    else if (d0 * d1 <= 0 && std::abs(d) > 3 * std::abs(d0))
      d = 3 * d0;
    return d;
  };
  d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double Pchip::operator()(double t) const {
  const size_t n = x_.size();
  if (n == 0) return 0;
  if (n == 1 || t <= x_.front()) return y_.front();
  if (t >= x_.back()) return y_.back();
  size_t hi = std::upper_bound(x_.begin(), x_.end(), t) - x_.begin();
  const size_t lo = hi - 1;
  const double h = x_[hi] - x_[lo];
  const double s = (t - x_[lo]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * y_[lo] + h10 * h * d_[lo] + h01 * y_[hi] + h11 * h * d_[hi];
}

}  // namespace stabcert
