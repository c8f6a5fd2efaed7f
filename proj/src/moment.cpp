#include "orbitflow/moment.hpp"

#include <cmath>

namespace orbitflow {

void ActionBasis::validate() const {
  const size_t m = generators.size();
  for (size_t r = 0; r < m; ++r)
    for (size_t s = r; s < m; ++s) {
      const double g = (generators[r] * generators[s].transpose()).trace();
      const double expected = (r == s) ? 1.0 : 0.0;
      if (std::abs(g - expected) > 1e-8)
        throw NonOrthonormalBasis("action basis generators are not trace-orthonormal");
    }
}

Matrix moment_bracket(const BracketTensor& mu) {
  const int n = mu.dim();
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Matrix A = mu.ad(i);
    m.noalias() += -4.0 * A.transpose() * A + 2.0 * A * A.transpose();
  }
  return 0.5 * (m + m.transpose());  // symmetric up to rounding
}

Matrix moment_generic(const ActionBasis& basis, const Vector& v) {
  basis.validate();
  if (basis.generators.empty()) throw NonOrthonormalBasis("empty action basis");
  const int n = static_cast<int>(basis.generators.front().rows());
  Matrix m = Matrix::Zero(n, n);
  for (const Matrix& E : basis.generators)
    m += 2.0 * basis.inner(basis.apply(E, v), v) * E;
  return m;
}

Matrix moment_projective(const BracketTensor& mu) {
  const double nsq = mu.dot(mu);
  if (nsq == 0.0) throw ZeroVector("moment_projective of the zero bracket");
  return moment_bracket(mu) / nsq;
}

ActionBasis bracket_action_basis(int n) {
  ActionBasis basis;
  basis.generators = symmetric_basis(n);
  basis.apply = [n](const Matrix& A, const Vector& v) {
    return gl_infinitesimal_act(A, BracketTensor::unflatten(n, v)).flatten();
  };
  basis.inner = [](const Vector& a, const Vector& b) { return a.dot(b); };
  return basis;
}

BracketTensor grad_norm_sq(const BracketTensor& mu) {
  const double nrm = mu.norm();
  if (nrm == 0.0) throw ZeroVector("gradient at the zero bracket");
  if (std::abs(nrm - 1.0) > 1e-10)
    throw DimensionMismatch("grad_norm_sq expects a unit-norm tensor");
  Matrix m = moment_bracket(mu);  // = m[mu] at unit norm
  BracketTensor g = gl_infinitesimal_act(m, mu);
  g *= 8.0;
  BracketTensor radial = mu;
  radial *= g.dot(mu);
  g -= radial;
  return g;
}

std::optional<double> is_distinguished(const BracketTensor& mu, double tolerance) {
  const double nsq = mu.dot(mu);
  if (nsq == 0.0) throw ZeroVector("is_distinguished of the zero bracket");
  BracketTensor w = gl_infinitesimal_act(moment_bracket(mu), mu);
  const double c = w.dot(mu) / nsq;
  BracketTensor resid = w;
  BracketTensor cmu = mu;
  cmu *= c;
  resid -= cmu;
  if (resid.norm() <= tolerance * std::sqrt(nsq)) return c;
  return std::nullopt;
}

}  // namespace orbitflow
