#include "orbitflow/adjoint.hpp"

#include <cmath>
#include <numeric>

namespace orbitflow {

int Partition::n() const { return std::accumulate(parts.begin(), parts.end(), 0); }

bool Partition::valid() const {
  if (parts.empty()) return false;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] < 1) return false;
    if (i > 0 && parts[i] > parts[i - 1]) return false;
  }
  return true;
}

std::string Partition::to_string() const {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(parts[i]);
  }
  return out;
}

namespace {

void enumerate_rec(int remaining, int max_part, std::vector<int>& prefix,
                   std::vector<Partition>& out) {
  if (remaining == 0) {
    out.push_back(Partition{prefix});
    return;
  }
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    prefix.push_back(p);
    enumerate_rec(remaining - p, p, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Partition> enumerate_partitions(int n) {
  if (n < 1) throw DimensionMismatch("n must be positive");
  std::vector<Partition> out;
  std::vector<int> prefix;
  enumerate_rec(n, n, prefix, out);
  return out;
}

Matrix adjoint_moment(const Matrix& X) {
  if (X.rows() != X.cols()) throw DimensionMismatch("matrix is not square");
  Matrix m = X * X.transpose() - X.transpose() * X;
  return 0.5 * (m + m.transpose());
}

bool is_nilpotent(const Matrix& X) {
  if (X.rows() != X.cols()) throw DimensionMismatch("matrix is not square");
  const int n = static_cast<int>(X.rows());
  const double nrm = X.norm();
  if (nrm == 0.0) return true;
  Matrix P = X;
  for (int k = 1; k < n; ++k) P = P * X;
  return P.norm() <= 1e-8 * std::pow(nrm, n);
}

Matrix jordan_rep(const Partition& p) {
  if (!p.valid()) throw DimensionMismatch("invalid partition");
  const int n = p.n();
  Matrix X = Matrix::Zero(n, n);
  int offset = 0;
  for (int k : p.parts) {
    for (int i = 1; i < k; ++i)
      X(offset + i - 1, offset + i) = std::sqrt(0.5 * i * (k - i));
    offset += k;
  }
  return X;
}

std::optional<double> verify_adjoint_distinguished(const Matrix& X, double tolerance) {
  if (X.rows() != X.cols()) throw DimensionMismatch("matrix is not square");
  const double nsq = X.squaredNorm();
  if (nsq == 0.0) return 0.0;  // zero matrix: minimum of ||m||^2
  Matrix m = adjoint_moment(X);
  Matrix w = m * X - X * m;
  const double c = (w.array() * X.array()).sum() / nsq;
  if ((w - c * X).norm() <= tolerance * std::sqrt(nsq)) return c;
  return std::nullopt;
}

Partition classify_nilpotent_orbit(const Matrix& X) {
  if (!is_nilpotent(X)) throw NotNilpotent("matrix fails the nilpotency certificate");
  const int n = static_cast<int>(X.rows());
  // r_k = rank(X^k); parts >= k count is r_{k-1} - r_k.  The image chain
  // im(X^k) = X(im(X^{k-1})) is re-orthonormalized at every step, which keeps
  // the rank decisions well conditioned (explicit powers lose precision fast).
  std::vector<int> ranks(static_cast<size_t>(n) + 1);
  ranks[0] = n;
  const double scale = X.norm();
  const Matrix Xu = scale > 0.0 ? Matrix(X / scale) : X;
  Matrix V = Matrix::Identity(n, n);
  for (int k = 1; k <= n; ++k) {
    if (V.cols() == 0) {
      ranks[static_cast<size_t>(k)] = 0;
      continue;
    }
    Matrix W = Xu * V;
    Eigen::JacobiSVD<Matrix> svd(W, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    // Floor the cutoff at the unit scale of Xu so an all-noise step (largest
    // singular value ~ machine epsilon) reads as rank zero.
    const double cutoff = 1e-7 * std::max(s.size() > 0 ? s[0] : 0.0, 1.0);
    int r = 0;
    for (Eigen::Index t = 0; t < s.size(); ++t)
      if (s[t] > cutoff) ++r;
    V = svd.matrixU().leftCols(r);
    ranks[static_cast<size_t>(k)] = r;
  }
  Partition p;
  for (int k = 1; k <= n; ++k) {
    const int count = ranks[static_cast<size_t>(k - 1)] - ranks[static_cast<size_t>(k)];
    for (int t = static_cast<int>(p.parts.size()); t < count; ++t) p.parts.push_back(0);
    for (int t = 0; t < count; ++t) ++p.parts[static_cast<size_t>(t)];
  }
  if (!p.valid() || p.n() != n)
    throw NotNilpotent("rank sequence does not define a partition");
  return p;
}

bool subalgebra_detection_check(const Matrix& X, const std::vector<Matrix>& g_basis,
                                double tolerance) {
  if (g_basis.empty()) throw NotThetaStable("empty subalgebra basis");
  const int n = static_cast<int>(g_basis.front().rows());
  for (const Matrix& A : g_basis)
    if (A.rows() != n || A.cols() != n) throw DimensionMismatch("basis dimension mismatch");
  if (X.rows() != n || X.cols() != n) throw DimensionMismatch("matrix dimension mismatch");

  // Orthonormalize the span for projection tests.
  std::vector<Matrix> ortho;
  for (Matrix A : g_basis) {
    for (const Matrix& E : ortho) A -= (A.array() * E.array()).sum() * E;
    const double nm = A.norm();
    if (nm > 1e-12) ortho.push_back(A / nm);
  }
  auto off_span = [&](const Matrix& A) {
    Matrix R = A;
    for (const Matrix& E : ortho) R -= (R.array() * E.array()).sum() * E;
    return R.norm();
  };

  // theta-stability: closure under commutator and transpose.
  for (size_t a = 0; a < g_basis.size(); ++a) {
    const double na = std::max(g_basis[a].norm(), 1e-300);
    if (off_span(g_basis[a].transpose()) > tolerance * na)
      throw NotThetaStable("basis is not closed under transpose");
    for (size_t b = 0; b < g_basis.size(); ++b) {
      Matrix C = g_basis[a] * g_basis[b] - g_basis[b] * g_basis[a];
      if (off_span(C) > tolerance * na * std::max(g_basis[b].norm(), 1e-300))
        throw NotThetaStable("basis is not closed under the commutator");
    }
  }
  if (off_span(X) > tolerance * std::max(X.norm(), 1e-300))
    throw NotThetaStable("X is not in the subalgebra span");

  Matrix m = adjoint_moment(X);
  return off_span(m) <= tolerance * std::max(m.norm(), 1e-300);
}

ActionBasis adjoint_action_basis(int n) {
  ActionBasis basis;
  basis.generators = traceless_symmetric_basis(n);
  basis.apply = [n](const Matrix& A, const Vector& v) {
    Matrix X = Eigen::Map<const Matrix>(v.data(), n, n);
    Matrix C = A * X - X * A;
    return Vector(Eigen::Map<Vector>(C.data(), n * n));
  };
  basis.inner = [](const Vector& a, const Vector& b) { return 0.5 * a.dot(b); };
  return basis;
}

}  // namespace orbitflow
