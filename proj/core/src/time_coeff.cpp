#include "stabcert/time_coeff.hpp"

#include <cmath>

namespace stabcert {

double TimeCoeff::value(double t) const {
  double v = offset;
  for (const auto& s : sinusoids)
    v += s.amplitude * std::sin(s.angular_frequency * t + s.phase);
  return v;
}

double TimeCoeff::envelope() const {
  double v = std::abs(offset);
  for (const auto& s : sinusoids) v += std::abs(s.amplitude);
  return v;
}

double TimeCoeff::lower_bound() const {
  double v = offset;
  for (const auto& s : sinusoids) v -= std::abs(s.amplitude);
  return v;
}

double TimeCoeff::min_period() const {
  double w_max = 0;
  for (const auto& s : sinusoids)
    if (s.amplitude != 0 && s.angular_frequency > w_max)
      w_max = s.angular_frequency;
  return w_max > 0 ? 2 * M_PI / w_max : 0;
}

void TimeCoeff::add_scaled(const TimeCoeff& other, double w) {
  offset += w * other.offset;
  for (const auto& s : other.sinusoids)
    if (w * s.amplitude != 0)
      sinusoids.push_back({w * s.amplitude, s.angular_frequency, s.phase});
}

void TimeCoeff::scale(double w) {
  offset *= w;
  for (auto& s : sinusoids) s.amplitude *= w;
}

}  // namespace stabcert
