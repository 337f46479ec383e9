#ifndef STABCERT_NUMERIC_HPP
#define STABCERT_NUMERIC_HPP

#include <functional>
#include <utility>
#include <vector>

namespace stabcert {

// Integral of f over [a, b] with a single 5-point Gauss-Legendre rule.
double gauss5(const std::function<double(double)>& f, double a, double b);

// Composite Gauss-Legendre over n uniform cells.
double gauss5_composite(const std::function<double(double)>& f, double a,
                        double b, int n_cells);

// Root of f in [a, b]; requires f(a) and f(b) of opposite sign.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol = 1e-13, int max_iter = 200);

// Maximizer of a unimodal f on [a, b] by golden section.
std::pair<double, double> golden_max(const std::function<double(double)>& f,
                                     double a, double b, double xtol = 1e-10,
                                     int max_iter = 300);

// Dense-grid maximizer (n_points samples including both ends).
std::pair<double, double> grid_max(const std::function<double(double)>& f,
                                   double a, double b, int n_points);

// Least-squares line y = slope*x + intercept.
struct LineFit {
  double slope = 0;
  double intercept = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Monotone (Fritsch-Carlson) piecewise-cubic interpolant. Does not overshoot
// the data, which keeps interpolated bound checks one-sided.
class Pchip {
 public:
  Pchip() = default;
  Pchip(std::vector<double> x, std::vector<double> y);
  double operator()(double t) const;
  bool empty() const { return x_.size() < 2; }

 private:
  std::vector<double> x_, y_, d_;  // nodes, values, node derivatives
};

}  // namespace stabcert

#endif
