#include "orbitflow/lie_core.hpp"

#include <cmath>

namespace orbitflow {

BracketTensor::BracketTensor(int dim) : dim_(dim) {
  if (dim < 1) throw DimensionMismatch("bracket dimension must be positive");
  coeffs_.assign(static_cast<size_t>(dim) * dim * dim, 0.0);
}

void BracketTensor::check_index(int i) const {
  if (i < 0 || i >= dim_) throw DimensionMismatch("index out of range");
}

void BracketTensor::set(int i, int j, int k, double value) {
  check_index(i);
  check_index(j);
  check_index(k);
  if (!std::isfinite(value)) throw DimensionMismatch("structure constant must be finite");
  if (i == j && value != 0.0)
    throw DimensionMismatch("antisymmetry forces c_{ii}^k = 0");
  coeffs_[idx(i, j, k)] = value;
  coeffs_[idx(j, i, k)] = -value;
}

Vector BracketTensor::apply(const Vector& x, const Vector& y) const {
  if (x.size() != dim_ || y.size() != dim_)
    throw DimensionMismatch("vector dimension does not match bracket dimension");
  Vector out = Vector::Zero(dim_);
  for (int i = 0; i < dim_; ++i) {
    if (x[i] == 0.0) continue;
    for (int j = 0; j < dim_; ++j) {
      const double w = x[i] * y[j];
      if (w == 0.0) continue;
      for (int k = 0; k < dim_; ++k) out[k] += w * coeffs_[idx(i, j, k)];
    }
  }
  return out;
}

Matrix BracketTensor::ad(const Vector& x) const {
  if (x.size() != dim_) throw DimensionMismatch("vector dimension mismatch");
  Matrix A = Matrix::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    if (x[i] == 0.0) continue;
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k) A(k, j) += x[i] * coeffs_[idx(i, j, k)];
  }
  return A;
}

Matrix BracketTensor::ad(int basis_index) const {
  check_index(basis_index);
  Matrix A = Matrix::Zero(dim_, dim_);
  for (int j = 0; j < dim_; ++j)
    for (int k = 0; k < dim_; ++k) A(k, j) = coeffs_[idx(basis_index, j, k)];
  return A;
}

Vector BracketTensor::flatten() const {
  return Eigen::Map<const Vector>(coeffs_.data(), static_cast<Eigen::Index>(coeffs_.size()));
}

BracketTensor BracketTensor::unflatten(int dim, const Vector& v) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim * dim)
    throw DimensionMismatch("flattened tensor has wrong length");
  BracketTensor mu(dim);
  // Antisymmetrize: tolerate small asymmetry from round-off in callers.
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k) {
        const double a = v[(i * dim + j) * dim + k];
        const double b = v[(j * dim + i) * dim + k];
        mu.coeffs_[mu.idx(i, j, k)] = 0.5 * (a - b);
      }
  return mu;
}

double BracketTensor::dot(const BracketTensor& other) const {
  if (other.dim_ != dim_) throw DimensionMismatch("bracket dimensions differ");
  double s = 0.0;
  for (size_t t = 0; t < coeffs_.size(); ++t) s += coeffs_[t] * other.coeffs_[t];
  return s;
}

double BracketTensor::norm() const { return std::sqrt(dot(*this)); }

BracketTensor BracketTensor::normalized() const {
  const double n = norm();
  if (n == 0.0) throw ZeroVector("cannot normalize the zero bracket");
  BracketTensor out = *this;
  out *= 1.0 / n;
  return out;
}

bool BracketTensor::all_finite() const {
  for (double v : coeffs_)
    if (!std::isfinite(v)) return false;
  return true;
}

BracketTensor& BracketTensor::operator+=(const BracketTensor& rhs) {
  if (rhs.dim_ != dim_) throw DimensionMismatch("bracket dimensions differ");
  for (size_t t = 0; t < coeffs_.size(); ++t) coeffs_[t] += rhs.coeffs_[t];
  return *this;
}

BracketTensor& BracketTensor::operator-=(const BracketTensor& rhs) {
  if (rhs.dim_ != dim_) throw DimensionMismatch("bracket dimensions differ");
  for (size_t t = 0; t < coeffs_.size(); ++t) coeffs_[t] -= rhs.coeffs_[t];
  return *this;
}

BracketTensor& BracketTensor::operator*=(double s) {
  for (double& v : coeffs_) v *= s;
  return *this;
}

double inner_product_V(const BracketTensor& lambda, const BracketTensor& mu) {
  return lambda.dot(mu);
}

double jacobi_residual(const BracketTensor& mu) {
  const int n = mu.dim();
  Matrix I = Matrix::Identity(n, n);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        Vector r = mu.apply(mu.apply(I.col(i), I.col(j)), I.col(k)) +
                   mu.apply(mu.apply(I.col(j), I.col(k)), I.col(i)) +
                   mu.apply(mu.apply(I.col(k), I.col(i)), I.col(j));
        worst = std::max(worst, r.norm());
      }
  return worst;
}

namespace {

// Orthonormal basis of the column space of M (empty when M is zero).
Matrix column_space(const Matrix& M) {
  if (M.cols() == 0) return Matrix(M.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index t = 0; t < s.size(); ++t)
    if (s[0] > 0.0 && s[t] > tol::rank_rel * s[0]) ++r;
  return svd.matrixU().leftCols(r);
}

}  // namespace

std::optional<int> nilpotency_class(const BracketTensor& mu) {
  const double nrm = mu.norm();
  if (nrm == 0.0) return 1;  // abelian
  BracketTensor unit = mu.normalized();
  const double res = jacobi_residual(unit);
  if (res > tol::jacobi) throw JacobiViolation(res);

  const int n = unit.dim();
  Matrix term = Matrix::Identity(n, n);  // basis of the current series term
  int step = 0;
  while (true) {
    ++step;
    // Next term: span of mu(e_i, v) over basis vectors v of the current term.
    Matrix images(n, static_cast<Eigen::Index>(n) * term.cols());
    Matrix I = Matrix::Identity(n, n);
    Eigen::Index col = 0;
    for (int i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < term.cols(); ++j)
        images.col(col++) = unit.apply(I.col(i), term.col(j));
    Matrix next = column_space(images);
    if (next.cols() == 0) return step;
    if (next.cols() >= term.cols()) return std::nullopt;  // series stabilized nonzero
    term = next;
  }
}

BracketTensor gl_act(const Matrix& g, const BracketTensor& mu) {
  const int n = mu.dim();
  if (g.rows() != n || g.cols() != n) throw DimensionMismatch("matrix dimension mismatch");
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s[s.size() - 1] <= 0.0 || s[0] / s[s.size() - 1] > tol::max_condition)
    throw SingularMatrix("matrix is singular or too badly conditioned");
  Matrix gi = svd.solve(Matrix::Identity(n, n));

  // Staged contraction: output leg by g, both input legs by g^-1.
  BracketTensor out(n);
  std::vector<double> tmp(static_cast<size_t>(n) * n * n, 0.0);
  auto at = [n](std::vector<double>& a, int i, int j, int k) -> double& {
    return a[(static_cast<size_t>(i) * n + j) * n + k];
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int c = 0; c < n; ++c) v += g(k, c) * mu.c(i, j, c);
        at(tmp, i, j, k) = v;
      }
  std::vector<double> tmp2(tmp.size(), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int a = 0; a < n; ++a) v += gi(a, i) * at(tmp, a, j, k);
        at(tmp2, i, j, k) = v;
      }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int b = 0; b < n; ++b) v += gi(b, j) * at(tmp2, i, b, k);
        out.set(i, j, k, v);
      }
  return out;
}

BracketTensor gl_infinitesimal_act(const Matrix& A, const BracketTensor& mu) {
  const int n = mu.dim();
  if (A.rows() != n || A.cols() != n) throw DimensionMismatch("matrix dimension mismatch");
  BracketTensor out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int c = 0; c < n; ++c) v += A(k, c) * mu.c(i, j, c);
        for (int a = 0; a < n; ++a) v -= A(a, i) * mu.c(a, j, k);
        for (int b = 0; b < n; ++b) v -= A(b, j) * mu.c(i, b, k);
        out.set(i, j, k, v);
      }
  return out;
}

std::vector<Matrix> symmetric_basis(int n) {
  std::vector<Matrix> basis;
  basis.reserve(static_cast<size_t>(n) * (n + 1) / 2);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < n; ++a) {
    Matrix E = Matrix::Zero(n, n);
    E(a, a) = 1.0;
    basis.push_back(E);
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Matrix E = Matrix::Zero(n, n);
      E(a, b) = E(b, a) = inv_sqrt2;
      basis.push_back(E);
    }
  return basis;
}

std::vector<Matrix> traceless_symmetric_basis(int n) {
  std::vector<Matrix> basis;
  // Diagonal part: orthonormalize diag(1,...,1,-k,0,...)/norm, k = 1..n-1.
  for (int k = 1; k < n; ++k) {
    Matrix E = Matrix::Zero(n, n);
    for (int a = 0; a < k; ++a) E(a, a) = 1.0;
    E(k, k) = -static_cast<double>(k);
    E /= std::sqrt(static_cast<double>(k) * (k + 1));
    basis.push_back(E);
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Matrix E = Matrix::Zero(n, n);
      E(a, b) = E(b, a) = inv_sqrt2;
      basis.push_back(E);
    }
  return basis;
}

DerivationBasis derivation_space(const BracketTensor& mu, bool symmetric_only) {
  const double nrm = mu.norm();
  if (nrm > 0.0) {
    const double res = jacobi_residual(mu.normalized());
    if (res > tol::jacobi) throw JacobiViolation(res);
  }
  const int n = mu.dim();
  std::vector<Matrix> param_basis;
  if (symmetric_only) {
    param_basis = symmetric_basis(n);
  } else {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Matrix E = Matrix::Zero(n, n);
        E(a, b) = 1.0;
        param_basis.push_back(E);
      }
  }
  const Eigen::Index m = static_cast<Eigen::Index>(param_basis.size());
  Matrix L(static_cast<Eigen::Index>(n) * n * n, m);
  for (Eigen::Index r = 0; r < m; ++r)
    L.col(r) = gl_infinitesimal_act(param_basis[r], mu).flatten();

  Eigen::JacobiSVD<Matrix> svd(L, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cutoff = (s.size() > 0 && s[0] > 0.0) ? tol::nullspace * s[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index t = 0; t < s.size(); ++t)
    if (s[t] > cutoff) ++rank;

  DerivationBasis out;
  out.dim = n;
  const Matrix& V = svd.matrixV();
  for (Eigen::Index r = rank; r < m; ++r) {
    Matrix D = Matrix::Zero(n, n);
    for (Eigen::Index t = 0; t < m; ++t) D += V(t, r) * param_basis[t];
    out.elements.push_back(D);
  }
  return out;
}

}  // namespace orbitflow
