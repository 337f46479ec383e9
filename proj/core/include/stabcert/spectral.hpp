#ifndef STABCERT_SPECTRAL_HPP
#define STABCERT_SPECTRAL_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "stabcert/system.hpp"

namespace stabcert {

// Ordered eigendecomposition of the averaged matrix A.
//
// Eigenvalues are sorted by real part (descending); complex pairs are
// adjacent with the +Im member first. Eigenvector columns are normalized to
// unit 2-norm with the first nonzero entry rotated real-positive, so every
// downstream constant is reproducible.
struct EigenStructure {
  Eigen::VectorXd alpha;   // real parts, non-increasing
  Eigen::VectorXd beta;    // imaginary parts, conjugate-paired
  Eigen::MatrixXcd V;
  Eigen::MatrixXcd V_inv;
  double norm_V = 0;
  double norm_V_inv = 0;
  double cond_V = 0;
  int n_pairs = 0;  // number of conjugate pairs

  double alpha1() const { return alpha(0); }
  double alpha_min() const { return alpha(alpha.size() - 1); }
};

// Induced 2-norm of a complex matrix.
double spectral_norm(const Eigen::MatrixXcd& m);

// Throws DefectiveMatrix when cond(V) exceeds cond_cap or the residual
// ||A V - V Lambda|| exceeds tol * ||A||.
EigenStructure decompose(const Eigen::MatrixXd& A, double tol = 1e-9,
                         double cond_cap = 1e8);

// Shift minimizing lambda + max_k |alpha_k - lambda|; the minimum is attained
// at lambda = alpha_n with value alpha_1.
struct LambdaChoice {
  double lambda = 0;
  double M = 0;
};
LambdaChoice choose_lambda(const Eigen::VectorXd& alpha_desc);

// G_-(t) = G(t) - i * diag(Im diag G(t)): the imaginary diagonal is absorbed
// into the rotation, shrinking the perturbation norm used by the bound.
Eigen::MatrixXcd remove_imag_diag(const Eigen::MatrixXcd& G);

// Pointwise evaluators of the system transformed into the eigenbasis of A.
class EigenbasisMaps {
 public:
  EigenbasisMaps(const EigenStructure& eig, const SystemSpec& spec);

  Eigen::MatrixXcd G_at(double t) const;        // V^-1 G*(t) V
  Eigen::MatrixXcd G_minus_at(double t) const;  // with imaginary diag removed
  Eigen::VectorXcd F_at(double t) const;        // F0 * V^-1 eta(t)

  double g_norm(double t) const { return spectral_norm(G_at(t)); }
  double g_minus_norm(double t) const { return spectral_norm(G_minus_at(t)); }
  double f_norm(double t) const { return F_at(t).norm(); }
  double f_norm_unit(double t) const;  // ||V^-1 eta(t)|| (no F0 factor)

  double z0_of(const Eigen::VectorXd& x0) const { return (V_inv_ * x0).norm(); }

  const Eigen::MatrixXcd& V() const { return V_; }
  const Eigen::MatrixXcd& V_inv() const { return V_inv_; }
  double norm_V() const { return norm_V_; }
  double norm_V_inv() const { return norm_V_inv_; }
  double F0() const { return F0_; }
  bool has_gstar() const { return !g_terms_.empty(); }

 private:
  Eigen::MatrixXcd V_, V_inv_;
  double norm_V_ = 0, norm_V_inv_ = 0;
  double F0_ = 0;
  int n_ = 0;
  // G(t) = sum_e c_e(t) * M_e with M_e = V^-1 E_(i,j) V precomputed.
  std::vector<std::pair<TimeCoeff, Eigen::MatrixXcd>> g_terms_;
  std::vector<TimeCoeff> eta_;
};

EigenbasisMaps to_eigenbasis(const EigenStructure& eig, const SystemSpec& spec);

// Adapter matching the callable-to-callable form of the refinement.
std::function<Eigen::MatrixXcd(double)> refine_g_minus(
    const std::function<Eigen::MatrixXcd(double)>& G);

// | ||exp((lambda I + i beta) dt)|| - e^(lambda dt) | combined with the
// deviation of ||w|| * ||w^-1|| from 1; both vanish for the modified
// fundamental matrix.
double fundamental_norm_check(double lambda, const Eigen::VectorXd& beta,
                              double dt);

}  // namespace stabcert

#endif
