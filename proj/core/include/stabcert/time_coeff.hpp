#ifndef STABCERT_TIME_COEFF_HPP
#define STABCERT_TIME_COEFF_HPP

#include <vector>

namespace stabcert {

struct Sinusoid {
  double amplitude = 0;
  double angular_frequency = 0;  // >= 0
  double phase = 0;
};

// Scalar coefficient of the form  offset + sum_k amp_k * sin(w_k t + phi_k).
// |offset| + sum |amp_k| is a guaranteed bound on |value(t)| for all t.
struct TimeCoeff {
  double offset = 0;
  std::vector<Sinusoid> sinusoids;

  double value(double t) const;

  // Upper bound on |value(t)|.
  double envelope() const;

  // Lower bound on value(t); may be negative.
  double lower_bound() const;

  bool is_constant() const { return sinusoids.empty(); }

  // Shortest sinusoid period, or 0 when constant.
  double min_period() const;

  // this += w * other (w >= 0 expected by callers building majorants).
  void add_scaled(const TimeCoeff& other, double w);

  void scale(double w);

  static TimeCoeff constant(double c) { return TimeCoeff{c, {}}; }
};

}  // namespace stabcert

#endif
