#ifndef STABCERT_SYSTEM_HPP
#define STABCERT_SYSTEM_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "stabcert/time_coeff.hpp"

namespace stabcert {

// One monomial term of the nonlinearity: component <- coeff(t) * prod x_j^e_j.
// Total degree >= 1, so the nonlinearity vanishes at the origin.
struct MonomialTerm {
  int component = 1;  // 1-based
  TimeCoeff coeff;
  std::vector<int> exponents;

  int total_degree() const {
    int d = 0;
    for (int e : exponents) d += e;
    return d;
  }
};

// F(t) = F0 * eta(t) with sup_t ||eta(t)|| normalized to 1 at load time.
struct Forcing {
  double F0 = 0;
  std::vector<TimeCoeff> eta;
};

struct GstarEntry {
  int i = 1, j = 1;  // 1-based
  TimeCoeff coeff;
};

// Declarative form of  x' = A x + G*(t) x + f*(t, x) + F*(t).
// The A / G* split is declared by the user; G* must be zero-mean.
struct SystemSpec {
  int n = 0;
  Eigen::MatrixXd A;
  std::vector<GstarEntry> gstar;
  std::vector<MonomialTerm> f_terms;
  Forcing forcing;
  double t0 = 0;
  std::string name;

  Eigen::MatrixXd gstar_at(double t) const;
  Eigen::VectorXd eta_at(double t) const;
  Eigen::VectorXd forcing_at(double t) const;  // F0 * eta(t)

  // f*(t, x); works for real and complex state vectors.
  template <typename Derived>
  Eigen::Vector<typename Derived::Scalar, Eigen::Dynamic> f_at(
      double t, const Eigen::MatrixBase<Derived>& x) const {
    using Scalar = typename Derived::Scalar;
    Eigen::Vector<Scalar, Eigen::Dynamic> out =
        Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(n);
    for (const auto& term : f_terms) {
      Scalar mono = Scalar(1);
      for (int j = 0; j < n; ++j) {
        for (int e = 0; e < term.exponents[j]; ++e) mono *= x(j);
      }
      out(term.component - 1) += Scalar(term.coeff.value(t)) * mono;
    }
    return out;
  }

  Eigen::VectorXd rhs(double t, const Eigen::VectorXd& x) const;

  // Shortest period among all time-varying coefficients (0 if autonomous).
  double min_period() const;
};

// Parses and validates a config file (JSON; schema documented in the README).
// Forcing is rescaled so sup_t ||eta(t)|| = 1 with F0 adjusted to match.
SystemSpec load_spec(const std::string& path);
SystemSpec load_spec_from_string(const std::string& text,
                                 const std::string& origin = "<string>");

struct ZeroMeanReport {
  double max_mean_entry = 0;
  bool pass = true;
};

// (1/T) * integral of G*(s) entrywise over [t0, t0+T] by quadrature.
ZeroMeanReport validate_zero_mean(const SystemSpec& spec, double horizon,
                                  double tol);

// Estimated sup_t ||eta(t)|| together with the analytic envelope upper bound.
struct SupEstimate {
  double value = 0;      // grid + local refinement estimate
  double upper_bound = 0;  // from per-component envelopes
};
SupEstimate sup_eta_norm(const std::vector<TimeCoeff>& eta, double t0);

}  // namespace stabcert

#endif
