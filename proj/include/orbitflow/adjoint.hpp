#pragma once

#include <optional>
#include <string>

#include "orbitflow/moment.hpp"

namespace orbitflow {

/// Weakly decreasing positive integers; labels a nilpotent SL(n)-orbit.
struct Partition {
  std::vector<int> parts;

  int n() const;
  bool valid() const;
  std::string to_string() const;  // comma-joined parts
  friend bool operator==(const Partition&, const Partition&) = default;
};

/// All partitions of n in descending lexicographic order ([n] first).
std::vector<Partition> enumerate_partitions(int n);

/// Adjoint moment map m(X) = X X^T - X^T X (symmetric, trace zero).
Matrix adjoint_moment(const Matrix& X);

/// Nilpotency certificate ||X^n|| <= 1e-8 ||X||^n.
bool is_nilpotent(const Matrix& X);

/// Block-diagonal rescaled Jordan representative: block J_k carries
/// superdiagonal entries sqrt(i (k - i) / 2), i = 1..k-1.  Satisfies
/// [m(X), X] = X up to rounding.
Matrix jordan_rep(const Partition& p);

/// Returns c = <[m(X),X], X> / <X,X> when [m(X),X] = c X within
/// tol ||X||, otherwise nullopt.
std::optional<double> verify_adjoint_distinguished(const Matrix& X, double tolerance = 1e-8);

/// Jordan partition of a nilpotent matrix from the rank sequence of its
/// powers (SVD threshold 1e-7 relative).  Throws NotNilpotent.
Partition classify_nilpotent_orbit(const Matrix& X);

/// True iff m(X) lies in span(g_basis), for X in the span.  The basis must
/// span a subspace closed under commutator and transpose (validated); throws
/// NotThetaStable otherwise.
bool subalgebra_detection_check(const Matrix& X, const std::vector<Matrix>& g_basis,
                                double tolerance = 1e-8);

/// ActionBasis of the adjoint representation of sl(n): traceless symmetric
/// generators, commutator action, half-Frobenius inner product (the scaling
/// under which the closed form X X^T - X^T X satisfies the defining identity).
ActionBasis adjoint_action_basis(int n);

}  // namespace orbitflow
