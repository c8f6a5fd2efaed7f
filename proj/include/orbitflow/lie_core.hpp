#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "orbitflow/errors.hpp"

namespace orbitflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace tol {
// Null-space cutoff: singular values below this fraction of the largest count as zero.
inline constexpr double nullspace = 1e-9;
// Absolute Jacobi / nilpotency-series tolerance on tensors normalized to unit norm.
inline constexpr double jacobi = 1e-9;
inline constexpr double rank_rel = 1e-9;
// Condition-number bound for gl_act inputs.
inline constexpr double max_condition = 1e12;
}  // namespace tol

/// Antisymmetric structure-constant tensor c_{ij}^k for a bilinear bracket
/// mu(e_i, e_j) = sum_k c_{ij}^k e_k on R^n.  Stored densely over all ordered
/// index pairs; antisymmetry is enforced by the mutators.  Indices 0-based.
class BracketTensor {
 public:
  explicit BracketTensor(int dim);

  int dim() const { return dim_; }

  double c(int i, int j, int k) const { return coeffs_[idx(i, j, k)]; }

  /// Sets c_{ij}^k = value and c_{ji}^k = -value.  i == j requires value == 0.
  void set(int i, int j, int k, double value);

  /// mu(x, y) = sum_{ij} x_i y_j c_{ij}^.
  Vector apply(const Vector& x, const Vector& y) const;

  /// Matrix of ad_mu(x): y -> mu(x, y).
  Matrix ad(const Vector& x) const;
  Matrix ad(int basis_index) const;

  const std::vector<double>& coeffs() const { return coeffs_; }

  Vector flatten() const;
  static BracketTensor unflatten(int dim, const Vector& v);

  double dot(const BracketTensor& other) const;
  double norm() const;
  BracketTensor normalized() const;

  bool all_finite() const;

  BracketTensor& operator+=(const BracketTensor& rhs);
  BracketTensor& operator-=(const BracketTensor& rhs);
  BracketTensor& operator*=(double s);
  friend BracketTensor operator+(BracketTensor a, const BracketTensor& b) { return a += b; }
  friend BracketTensor operator-(BracketTensor a, const BracketTensor& b) { return a -= b; }
  friend BracketTensor operator*(double s, BracketTensor a) { return a *= s; }

 private:
  int idx(int i, int j, int k) const { return (i * dim_ + j) * dim_ + k; }
  void check_index(int i) const;

  int dim_;
  std::vector<double> coeffs_;
};

/// Orthonormal (trace pairing) basis of a space of linear maps, e.g. Der(mu).
struct DerivationBasis {
  int dim = 0;
  std::vector<Matrix> elements;
};

/// <lambda, mu> = sum_{ijk} <lambda(e_i,e_j), e_k><mu(e_i,e_j), e_k>, the full
/// sum over ordered pairs (each unordered pair counts twice).
double inner_product_V(const BracketTensor& lambda, const BracketTensor& mu);

/// Max over basis triples of the norm of the cyclic Jacobi sum.
double jacobi_residual(const BracketTensor& mu);

/// Step size of the lower central series, or nullopt if the series stabilizes
/// at a nonzero subspace.  Input is normalized to unit norm before the check.
std::optional<int> nilpotency_class(const BracketTensor& mu);

/// Change-of-basis action (g.mu)(X,Y) = g mu(g^-1 X, g^-1 Y).
BracketTensor gl_act(const Matrix& g, const BracketTensor& mu);

/// Infinitesimal action A.mu = A mu(.,.) - mu(A., .) - mu(., A.).
BracketTensor gl_infinitesimal_act(const Matrix& A, const BracketTensor& mu);

/// Orthonormal basis of the kernel of A -> A.mu on gl(n) (or symm(n) when
/// symmetric_only).  Requires jacobi_residual(mu) within tolerance.
DerivationBasis derivation_space(const BracketTensor& mu, bool symmetric_only);

/// Trace-orthonormal basis of symm(n), dimension n(n+1)/2.
std::vector<Matrix> symmetric_basis(int n);

/// Trace-orthonormal basis of traceless symmetric matrices, dimension n(n+1)/2 - 1.
std::vector<Matrix> traceless_symmetric_basis(int n);

}  // namespace orbitflow
