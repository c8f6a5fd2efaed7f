#include "orbitflow/detection.hpp"

#include <algorithm>
#include <cmath>

#include "orbitflow/moment.hpp"

namespace orbitflow {

namespace {

// Eigenvalue matching when testing graded inclusion; an order of magnitude
// looser than the default block-merge tolerance.
constexpr double kEigenvalueMatchTol = 1e-6;

int rank_above(const Matrix& M, double floor_scale) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& s = svd.singularValues();
  const double cutoff = tol::rank_rel * std::max(floor_scale, s.size() ? s[0] : 0.0);
  int r = 0;
  for (Eigen::Index t = 0; t < s.size(); ++t)
    if (s[t] > cutoff) ++r;
  return r;
}

Matrix column_space(const Matrix& M) {
  if (M.cols() == 0) return Matrix(M.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index t = 0; t < s.size(); ++t)
    if (s[0] > 0.0 && s[t] > tol::rank_rel * s[0]) ++r;
  return svd.matrixU().leftCols(r);
}

void require_symmetric(const Matrix& D) {
  if (D.rows() != D.cols()) throw DimensionMismatch("matrix is not square");
  const double scale = std::max(1.0, D.norm());
  if ((D - D.transpose()).norm() > 1e-10 * scale)
    throw DimensionMismatch("matrix is not symmetric");
}

// dim(col(T) intersect row-space(Wf)) and dim(col(H)) via SVD ranks.
std::pair<int, int> intersection_ranks(const Matrix& T, const Matrix& Wf, const Matrix& H) {
  Matrix Tb = column_space(T);
  Matrix off = Tb - Wf.transpose() * (Wf * Tb);
  // Tb columns are orthonormal, so 1.0 is the natural scale here.
  const int dim_cap = static_cast<int>(Tb.cols()) - rank_above(off, 1.0);
  const int dim_h = rank_above(H, 0.0);
  return {dim_cap, dim_h};
}

}  // namespace

int BlockStructure::block_of(int col) const {
  int offset = 0;
  for (size_t b = 0; b < block_sizes.size(); ++b) {
    offset += block_sizes[b];
    if (col < offset) return static_cast<int>(b);
  }
  throw DimensionMismatch("column index out of range");
}

BlockStructure eigenspace_blocks(const Matrix& D, double gap_tol) {
  require_symmetric(D);
  const int n = static_cast<int>(D.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (D + D.transpose()));
  const Vector& vals = eig.eigenvalues();  // ascending

  BlockStructure out;
  out.dim = n;
  out.basis = eig.eigenvectors();
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || vals[i] - vals[i - 1] > gap_tol) {
      out.block_sizes.push_back(i - start);
      out.eigenvalues.push_back(vals.segment(start, i - start).mean());
      start = i;
    }
  }
  return out;
}

BlockStructure common_refinement(const std::vector<Matrix>& Ds, double gap_tol) {
  if (Ds.empty()) throw DimensionMismatch("empty derivation family");
  for (const Matrix& D : Ds) require_symmetric(D);
  const int n = static_cast<int>(Ds.front().rows());
  for (size_t a = 0; a < Ds.size(); ++a)
    for (size_t b = a + 1; b < Ds.size(); ++b) {
      const double scale = std::max(1.0, Ds[a].norm() * Ds[b].norm());
      if ((Ds[a] * Ds[b] - Ds[b] * Ds[a]).norm() > 1e-9 * scale)
        throw NonCommutingDerivations(
            "symmetric derivations do not commute; no joint eigenbasis exists");
    }

  // Refine blocks one derivation at a time inside the running joint basis.
  BlockStructure out = eigenspace_blocks(Ds.front(), gap_tol);
  for (size_t d = 1; d < Ds.size(); ++d) {
    BlockStructure refined;
    refined.dim = n;
    refined.basis = Matrix(n, n);
    int offset = 0;
    for (size_t b = 0; b < out.block_sizes.size(); ++b) {
      const int sz = out.block_sizes[b];
      Matrix Q = out.basis.middleCols(offset, sz);
      Matrix sub = Q.transpose() * Ds[d] * Q;
      BlockStructure inner = eigenspace_blocks(0.5 * (sub + sub.transpose()), gap_tol);
      int inner_off = 0;
      for (size_t c = 0; c < inner.block_sizes.size(); ++c) {
        const int isz = inner.block_sizes[c];
        refined.basis.middleCols(offset + inner_off, isz) =
            Q * inner.basis.middleCols(inner_off, isz);
        refined.block_sizes.push_back(isz);
        // Label refined blocks by the first derivation's eigenvalue; values
        // may repeat across refined blocks.
        refined.eigenvalues.push_back(out.eigenvalues[b]);
        inner_off += isz;
      }
      offset += sz;
    }
    out = std::move(refined);
  }
  return out;
}

bool in_W(const BracketTensor& lambda, const Matrix& D, double tolerance) {
  const double scale = D.norm() * lambda.norm();
  if (scale == 0.0) return true;
  return gl_infinitesimal_act(D, lambda).norm() <= tolerance * scale;
}

std::vector<BracketTensor> w_basis(int n, const std::vector<Matrix>& Ds) {
  // Parameter basis of antisymmetric tensors, orthonormal in the V inner product.
  std::vector<BracketTensor> params;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        BracketTensor t(n);
        t.set(i, j, k, inv_sqrt2);
        params.push_back(t);
      }
  const Eigen::Index d = static_cast<Eigen::Index>(params.size());
  const Eigen::Index rows = static_cast<Eigen::Index>(Ds.size()) * n * n * n;
  Matrix L(rows, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (size_t a = 0; a < Ds.size(); ++a)
      L.col(r).segment(static_cast<Eigen::Index>(a) * n * n * n, n * n * n) =
          gl_infinitesimal_act(Ds[a], params[r]).flatten();

  Eigen::JacobiSVD<Matrix> svd(L, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cutoff = (s.size() > 0 && s[0] > 0.0) ? tol::nullspace * s[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index t = 0; t < s.size(); ++t)
    if (s[t] > cutoff) ++rank;

  std::vector<BracketTensor> basis;
  const Matrix& V = svd.matrixV();
  for (Eigen::Index r = rank; r < d; ++r) {
    BracketTensor w(n);
    for (Eigen::Index t = 0; t < d; ++t) {
      if (V(t, r) == 0.0) continue;
      BracketTensor scaled = params[t];
      scaled *= V(t, r);
      w += scaled;
    }
    basis.push_back(w);
  }
  return basis;
}

bool graded_bracket_check(const BracketTensor& lambda, const BlockStructure& blocks,
                          double tolerance) {
  const int n = lambda.dim();
  if (blocks.dim != n) throw DimensionMismatch("block structure dimension mismatch");
  BracketTensor lam = gl_act(blocks.basis.transpose(), lambda);
  const double scale = lambda.norm();
  if (scale == 0.0) return true;

  double offending_sq = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double target = blocks.eigenvalue_of(i) + blocks.eigenvalue_of(j);
      for (int k = 0; k < n; ++k) {
        if (std::abs(blocks.eigenvalue_of(k) - target) <= kEigenvalueMatchTol) continue;
        const double v = lam.c(i, j, k);
        offending_sq += v * v;
      }
    }
  return std::sqrt(offending_sq) <= tolerance * scale;
}

bool check_detection(const BracketTensor& lambda, const BlockStructure& blocks,
                     double tolerance) {
  const int n = lambda.dim();
  if (blocks.dim != n) throw DimensionMismatch("block structure dimension mismatch");
  Matrix m = moment_bracket(lambda);
  const double scale = m.norm();
  if (scale == 0.0) return true;
  Matrix mb = blocks.basis.transpose() * m * blocks.basis;
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (blocks.block_of(a) != blocks.block_of(b)) worst = std::max(worst, std::abs(mb(a, b)));
  return worst <= tolerance * scale;
}

BracketTensor direct_sum(const BracketTensor& a, const BracketTensor& b) {
  const int n1 = a.dim(), n2 = b.dim();
  BracketTensor out(n1 + n2);
  for (int i = 0; i < n1; ++i)
    for (int j = i + 1; j < n1; ++j)
      for (int k = 0; k < n1; ++k) out.set(i, j, k, a.c(i, j, k));
  for (int i = 0; i < n2; ++i)
    for (int j = i + 1; j < n2; ++j)
      for (int k = 0; k < n2; ++k) out.set(n1 + i, n1 + j, n1 + k, b.c(i, j, k));
  return out;
}

std::pair<BracketTensor, BracketTensor> split_direct_sum(const BracketTensor& mu,
                                                         const SumSplit& split,
                                                         double tolerance) {
  const int n = mu.dim();
  if (split.dim() != n || split.dim_1 < 1 || split.dim_2 < 1)
    throw DimensionMismatch("split dimensions inconsistent with the bracket");
  auto factor = [&](int i) { return i < split.dim_1 ? 0 : 1; };
  double cross_sq = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (!(factor(i) == factor(j) && factor(j) == factor(k))) {
          const double v = mu.c(i, j, k);
          cross_sq += v * v;
        }
  const double cross = std::sqrt(cross_sq);
  if (cross > tolerance * std::max(1.0, mu.norm())) throw NotAnIdealSum(cross);

  BracketTensor a(split.dim_1), b(split.dim_2);
  for (int i = 0; i < split.dim_1; ++i)
    for (int j = i + 1; j < split.dim_1; ++j)
      for (int k = 0; k < split.dim_1; ++k) a.set(i, j, k, mu.c(i, j, k));
  for (int i = 0; i < split.dim_2; ++i)
    for (int j = i + 1; j < split.dim_2; ++j)
      for (int k = 0; k < split.dim_2; ++k)
        b.set(i, j, k, mu.c(split.dim_1 + i, split.dim_1 + j, split.dim_1 + k));
  return {a, b};
}

bool check_sum_detection(const BracketTensor& lambda, const SumSplit& split,
                         double tolerance) {
  const int n = lambda.dim();
  if (split.dim() != n) throw DimensionMismatch("split dimensions inconsistent");
  try {
    (void)split_direct_sum(lambda, split, 1e-8);
  } catch (const NotAnIdealSum&) {
    throw NotInW("lambda is not a direct sum of factor brackets");
  }
  Matrix m = moment_bracket(lambda);
  const double scale = m.norm();
  if (scale == 0.0) return true;
  double worst = 0.0;
  for (int a = 0; a < split.dim_1; ++a)
    for (int b = split.dim_1; b < n; ++b)
      worst = std::max({worst, std::abs(m(a, b)), std::abs(m(b, a))});
  return worst <= tolerance * scale;
}

std::pair<int, int> tangent_intersection_rank(const BracketTensor& mu,
                                              const BlockStructure& blocks) {
  const int n = mu.dim();
  if (blocks.dim != n) throw DimensionMismatch("block structure dimension mismatch");
  Matrix diag = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) diag(i, i) = blocks.eigenvalue_of(i);
  Matrix D = blocks.basis * diag * blocks.basis.transpose();
  if (!in_W(mu, D, 1e-8)) throw NotInW("mu is not in the kernel subspace W");

  // Full tangent space gl(n).mu.
  Matrix T(static_cast<Eigen::Index>(n) * n * n, static_cast<Eigen::Index>(n) * n);
  Eigen::Index col = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Matrix E = Matrix::Zero(n, n);
      E(a, b) = 1.0;
      T.col(col++) = gl_infinitesimal_act(E, mu).flatten();
    }

  std::vector<BracketTensor> wb = w_basis(n, {D});
  Matrix Wf(static_cast<Eigen::Index>(wb.size()), static_cast<Eigen::Index>(n) * n * n);
  for (size_t r = 0; r < wb.size(); ++r) Wf.row(static_cast<Eigen::Index>(r)) = wb[r].flatten();

  // h.mu for block-diagonal maps in the eigenbasis.
  std::vector<Matrix> hgens;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (blocks.block_of(a) == blocks.block_of(b))
        hgens.push_back(blocks.basis.col(a) * blocks.basis.col(b).transpose());
  Matrix H(static_cast<Eigen::Index>(n) * n * n, static_cast<Eigen::Index>(hgens.size()));
  for (size_t r = 0; r < hgens.size(); ++r)
    H.col(static_cast<Eigen::Index>(r)) = gl_infinitesimal_act(hgens[r], mu).flatten();

  return intersection_ranks(T, Wf, H);
}

std::pair<int, int> tangent_intersection_rank(const BracketTensor& mu, const SumSplit& split) {
  const int n = mu.dim();
  if (split.dim() != n) throw DimensionMismatch("split dimensions inconsistent");
  try {
    (void)split_direct_sum(mu, split, 1e-8);
  } catch (const NotAnIdealSum&) {
    throw NotInW("mu is not a direct sum of factor brackets");
  }
  auto factor = [&](int i) { return i < split.dim_1 ? 0 : 1; };

  Matrix T(static_cast<Eigen::Index>(n) * n * n, static_cast<Eigen::Index>(n) * n);
  Eigen::Index col = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Matrix E = Matrix::Zero(n, n);
      E(a, b) = 1.0;
      T.col(col++) = gl_infinitesimal_act(E, mu).flatten();
    }

  std::vector<Vector> wrows;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (factor(i) == factor(j) && factor(j) == factor(k)) {
          BracketTensor t(n);
          t.set(i, j, k, inv_sqrt2);
          wrows.push_back(t.flatten());
        }
  Matrix Wf(static_cast<Eigen::Index>(wrows.size()), static_cast<Eigen::Index>(n) * n * n);
  for (size_t r = 0; r < wrows.size(); ++r) Wf.row(static_cast<Eigen::Index>(r)) = wrows[r];

  std::vector<Matrix> hgens;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (factor(a) == factor(b)) {
        Matrix E = Matrix::Zero(n, n);
        E(a, b) = 1.0;
        hgens.push_back(E);
      }
  Matrix H(static_cast<Eigen::Index>(n) * n * n, static_cast<Eigen::Index>(hgens.size()));
  for (size_t r = 0; r < hgens.size(); ++r)
    H.col(static_cast<Eigen::Index>(r)) = gl_infinitesimal_act(hgens[r], mu).flatten();

  return intersection_ranks(T, Wf, H);
}

}  // namespace orbitflow
