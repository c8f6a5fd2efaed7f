#pragma once

#include <functional>
#include <optional>

#include "orbitflow/lie_core.hpp"

namespace orbitflow {

/// Infinitesimal action data for a representation: trace-orthonormal
/// generators of the symmetric part of the acting Lie algebra, the action of
/// a linear map on flattened representation vectors, and the inner product on
/// those vectors.
struct ActionBasis {
  std::vector<Matrix> generators;
  std::function<Vector(const Matrix&, const Vector&)> apply;
  std::function<double(const Vector&, const Vector&)> inner;

  /// Throws NonOrthonormalBasis if the Gram matrix deviates from identity
  /// beyond 1e-8 under the trace pairing.
  void validate() const;
};

/// Closed-form moment map of the bracket representation:
///   m(mu) = -4 sum_i (ad_mu e_i)^T (ad_mu e_i) + 2 sum_i (ad_mu e_i)(ad_mu e_i)^T.
/// Satisfies <<m(mu), A>> = 2 <A.mu, mu> for all symmetric A.
Matrix moment_bracket(const BracketTensor& mu);

/// Generic moment map from the defining identity on span(basis):
///   m(v) = sum_r 2 <E_r . v, v> E_r.
Matrix moment_generic(const ActionBasis& basis, const Vector& v);

/// m(mu) / <mu, mu>; invariant under rescaling of mu.
Matrix moment_projective(const BracketTensor& mu);

/// ActionBasis of the bracket representation with the full symm(n) generator
/// set (representation vectors are flattened tensors, inner product the V one).
ActionBasis bracket_action_basis(int n);

/// Gradient of ||m[.]||^2 restricted to the unit sphere at unit-norm mu,
/// computed as 8 (m[mu].mu) minus its radial component.  Validated against
/// central finite differences in the test suite.
BracketTensor grad_norm_sq(const BracketTensor& mu);

/// Lemma criterion m(mu).mu = c mu: returns c when the residual is within
/// tol * ||mu||, otherwise nullopt.
std::optional<double> is_distinguished(const BracketTensor& mu, double tolerance = 1e-8);

}  // namespace orbitflow
