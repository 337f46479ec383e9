#include "stabcert/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stabcert/errors.hpp"

namespace stabcert {

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

EigenStructure decompose(const Eigen::MatrixXd& A, double tol,
                         double cond_cap) {
  const int n = static_cast<int>(A.rows());
  if (n == 0 || A.cols() != n) throw Error("decompose: A must be square");
  if (A.cwiseAbs().maxCoeff() == 0) throw Error("decompose: A must be nonzero");

  Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success)
    throw DefectiveMatrix("eigendecomposition failed to converge", 0, 0);

  const Eigen::VectorXcd vals = es.eigenvalues();
  const Eigen::MatrixXcd vecs = es.eigenvectors();

  // Real part descending; ties broken by |Im| descending with +Im first,
  // which keeps conjugate pairs adjacent.
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&vals](int a, int b) {
    const double ra = vals(a).real(), rb = vals(b).real();
    if (ra != rb) return ra > rb;
    const double ia = std::abs(vals(a).imag()), ib = std::abs(vals(b).imag());
    if (ia != ib) return ia > ib;
    return vals(a).imag() > vals(b).imag();
  });

  EigenStructure eig;
  eig.alpha.resize(n);
  eig.beta.resize(n);
  eig.V.resize(n, n);
  for (int k = 0; k < n; ++k) {
    const auto lam = vals(idx[k]);
    eig.alpha(k) = lam.real();
    eig.beta(k) = lam.imag();
    Eigen::VectorXcd col = vecs.col(idx[k]);
    col.normalize();
    // Rotate so the first entry of non-negligible modulus is real-positive.
    for (int r = 0; r < n; ++r) {
      const double a = std::abs(col(r));
      if (a > 1e-12) {
        col *= std::conj(col(r)) / a;
        break;
      }
    }
    eig.V.col(k) = col;
  }
  eig.n_pairs = 0;
  for (int k = 0; k < n; ++k)
    if (eig.beta(k) > 0) ++eig.n_pairs;

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(eig.V);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(n - 1);
  eig.norm_V = smax;
  eig.norm_V_inv = smin > 0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
  eig.cond_V = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();

  const Eigen::VectorXcd lambda =
      eig.alpha.cast<std::complex<double>>() +
      std::complex<double>(0, 1) * eig.beta.cast<std::complex<double>>();
  const double normA = spectral_norm(A.cast<std::complex<double>>());
  const double residual = spectral_norm(A * eig.V - eig.V * lambda.asDiagonal());

  if (!(eig.cond_V <= cond_cap))
    throw DefectiveMatrix(
        "A is numerically defective: cond(V) = " + std::to_string(eig.cond_V),
        eig.cond_V, residual);
  if (residual > tol * normA)
    throw DefectiveMatrix("eigendecomposition residual " +
                              std::to_string(residual) + " exceeds " +
                              std::to_string(tol * normA),
                          eig.cond_V, residual);

  eig.V_inv = eig.V.partialPivLu().solve(
      Eigen::MatrixXcd::Identity(n, n));
  return eig;
}

LambdaChoice choose_lambda(const Eigen::VectorXd& alpha_desc) {
  const int n = static_cast<int>(alpha_desc.size());
  if (n == 0) throw Error("choose_lambda: empty spectrum");
  for (int k = 0; k + 1 < n; ++k)
    if (alpha_desc(k) < alpha_desc(k + 1))
      throw Error("choose_lambda: alpha must be non-increasing");
  return {alpha_desc(n - 1), alpha_desc(0)};
}

Eigen::MatrixXcd remove_imag_diag(const Eigen::MatrixXcd& G) {
  Eigen::MatrixXcd out = G;
  const int n = static_cast<int>(G.rows());
  for (int k = 0; k < n; ++k)
    out(k, k) = std::complex<double>(G(k, k).real(), 0);
  return out;
}

EigenbasisMaps::EigenbasisMaps(const EigenStructure& eig,
                               const SystemSpec& spec)
    : V_(eig.V),
      V_inv_(eig.V_inv),
      norm_V_(eig.norm_V),
      norm_V_inv_(eig.norm_V_inv),
      F0_(spec.forcing.F0),
      n_(spec.n),
      eta_(spec.forcing.eta) {
  for (const auto& e : spec.gstar) {
    Eigen::MatrixXcd M = V_inv_.col(e.i - 1) * V_.row(e.j - 1);
    g_terms_.emplace_back(e.coeff, std::move(M));
  }
}

Eigen::MatrixXcd EigenbasisMaps::G_at(double t) const {
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(n_, n_);
  for (const auto& [c, M] : g_terms_) G += c.value(t) * M;
  return G;
}

Eigen::MatrixXcd EigenbasisMaps::G_minus_at(double t) const {
  return remove_imag_diag(G_at(t));
}

Eigen::VectorXcd EigenbasisMaps::F_at(double t) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n_);
  if (F0_ == 0) return v;
  for (int i = 0; i < n_; ++i) v(i) = eta_[i].value(t);
  return F0_ * (V_inv_ * v);
}

double EigenbasisMaps::f_norm_unit(double t) const {
  Eigen::VectorXcd v(n_);
  for (int i = 0; i < n_; ++i) v(i) = eta_[i].value(t);
  return (V_inv_ * v).norm();
}

EigenbasisMaps to_eigenbasis(const EigenStructure& eig,
                             const SystemSpec& spec) {
  return EigenbasisMaps(eig, spec);
}

std::function<Eigen::MatrixXcd(double)> refine_g_minus(
    const std::function<Eigen::MatrixXcd(double)>& G) {
  return [G](double t) { return remove_imag_diag(G(t)); };
}

double fundamental_norm_check(double lambda, const Eigen::VectorXd& beta,
                              double dt) {
  const int n = static_cast<int>(beta.size());
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k)
    w(k, k) = std::exp(std::complex<double>(lambda, beta(k)) * dt);
  const double norm_w = spectral_norm(w);
  const double norm_w_inv =
      spectral_norm(w.partialPivLu().solve(Eigen::MatrixXcd::Identity(n, n)));
  const double r1 = std::abs(norm_w - std::exp(lambda * dt));
  const double r2 = std::abs(norm_w * norm_w_inv - 1.0);
  return std::max(r1, r2);
}

}  // namespace stabcert
