#ifndef STABCERT_ERRORS_HPP
#define STABCERT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stabcert {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Config file could not be parsed or failed schema validation.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A is numerically non-diagonalizable; the eigenbasis reduction does not apply.
class DefectiveMatrix : public Error {
 public:
  DefectiveMatrix(const std::string& what, double cond, double residual)
      : Error(what), cond(cond), residual(residual) {}
  double cond;
  double residual;
};

// kappa >= 0: the autonomous bounding equations diverge from every start.
class KappaNonNegative : public Error {
 public:
  explicit KappaNonNegative(double kappa)
      : Error("autonomous bound has nonnegative linear rate " +
              std::to_string(kappa) + "; every bound solution diverges"),
        kappa(kappa) {}
  double kappa;
};

class RootIsolationFailure : public Error {
 public:
  using Error::Error;
};

class NoBracket : public Error {
 public:
  using Error::Error;
};

class EmptyCertifiedInterval : public Error {
 public:
  using Error::Error;
};

class NegativeRadius : public Error {
 public:
  using Error::Error;
};

class DegeneratePlane : public Error {
 public:
  using Error::Error;
};

class NoValidFit : public Error {
 public:
  using Error::Error;
};

// Adaptive step fell below the representable minimum (stiffness); distinct
// from blow-up, which is a regular trajectory termination.
class StepUnderflow : public Error {
 public:
  explicit StepUnderflow(double t)
      : Error("step size underflow at t = " + std::to_string(t)), t(t) {}
  double t;
};

}  // namespace stabcert

#endif
