#pragma once

#include <utility>

#include "orbitflow/lie_core.hpp"

namespace orbitflow {

/// Eigenspace decomposition of a symmetric derivation.  Defines the block
/// subgroup H = GL(n_1) x ... x GL(n_k) in the columns of `basis`.
struct BlockStructure {
  int dim = 0;
  std::vector<double> eigenvalues;  // strictly increasing, one per block
  Matrix basis;                     // orthogonal; column groups span eigenspaces
  std::vector<int> block_sizes;

  /// Block index of basis column `col`.
  int block_of(int col) const;
  /// Eigenvalue of the block holding column `col`.
  double eigenvalue_of(int col) const { return eigenvalues[static_cast<size_t>(block_of(col))]; }
};

/// Orthogonal coordinate split R^n = R^{dim_1} + R^{dim_2}.
struct SumSplit {
  int dim_1 = 0;
  int dim_2 = 0;
  int dim() const { return dim_1 + dim_2; }
};

/// Symmetric eigendecomposition of D with eigenvalues within gap_tol merged
/// into a single block.
BlockStructure eigenspace_blocks(const Matrix& D, double gap_tol = 1e-7);

/// Common refinement of the eigenspace decompositions of a commuting family
/// of symmetric maps.  Throws NonCommutingDerivations when pairwise
/// commutator norms exceed 1e-9 (relative).
BlockStructure common_refinement(const std::vector<Matrix>& Ds, double gap_tol = 1e-7);

/// Membership in W = ker(lambda -> D.lambda):
/// ||D.lambda|| <= tol ||D|| ||lambda||.
bool in_W(const BracketTensor& lambda, const Matrix& D, double tolerance = 1e-9);

/// Orthonormal basis of W for one derivation, or the intersection of the
/// kernels for a family (stacked linear system).
std::vector<BracketTensor> w_basis(int n, const std::vector<Matrix>& Ds);

/// lambda(V_alpha, V_beta) subset V_{alpha+beta} for all block pairs, with
/// the zero space when alpha+beta is not an eigenvalue.
bool graded_bracket_check(const BracketTensor& lambda, const BlockStructure& blocks,
                          double tolerance = 1e-9);

/// m(lambda) in h: off-diagonal blocks of the moment value vanish in the
/// block eigenbasis, relative to ||m(lambda)||.
bool check_detection(const BracketTensor& lambda, const BlockStructure& blocks,
                     double tolerance = 1e-9);

/// Verifies mu restricts to the two coordinate factors (ideals with zero
/// cross bracket) and returns the restricted brackets.  Throws NotAnIdealSum.
std::pair<BracketTensor, BracketTensor> split_direct_sum(const BracketTensor& mu,
                                                         const SumSplit& split,
                                                         double tolerance = 1e-9);

/// Builds the block bracket lambda_1 (+) lambda_2 on R^{n1+n2}.
BracketTensor direct_sum(const BracketTensor& a, const BracketTensor& b);

/// For lambda in W = (L^2 V_1* x V_1) + (L^2 V_2* x V_2): off-diagonal blocks
/// of m(lambda) vanish.  Throws NotInW when lambda has cross components.
bool check_sum_detection(const BracketTensor& lambda, const SumSplit& split,
                         double tolerance = 1e-9);

/// Numerical ranks (dim gl(n).mu intersect W, dim h.mu); Lemma-level equality
/// is the detection invariant.  Throws NotInW when mu is outside W.
std::pair<int, int> tangent_intersection_rank(const BracketTensor& mu,
                                              const BlockStructure& blocks);
std::pair<int, int> tangent_intersection_rank(const BracketTensor& mu, const SumSplit& split);

}  // namespace orbitflow
