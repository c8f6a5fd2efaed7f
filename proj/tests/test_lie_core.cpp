#include <doctest.h>

#include <random>

#include "orbitflow/lie_core.hpp"
#include "test_support.hpp"

using namespace orbitflow;
using namespace testsupport;

namespace {

Vector basis_vec(int n, int i) {
  Vector e = Vector::Zero(n);
  e[i] = 1.0;
  return e;
}

Matrix expm(const Matrix& A) {
  // Scaling-and-squaring Taylor exponential, ample for the small test inputs.
  int s = 0;
  double nrm = A.norm();
  while (nrm > 0.25) {
    nrm /= 2;
    ++s;
  }
  Matrix B = A / std::pow(2.0, s);
  Matrix term = Matrix::Identity(A.rows(), A.cols());
  Matrix sum = term;
  for (int k = 1; k <= 20; ++k) {
    term = term * B / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

double tensor_diff(const BracketTensor& a, const BracketTensor& b) { return (a - b).norm(); }

}  // namespace

TEST_CASE("bracket_apply on the Heisenberg bracket") {
  BracketTensor mu = heisenberg();
  Vector e1 = basis_vec(3, 0), e2 = basis_vec(3, 1), e3 = basis_vec(3, 2);

  CHECK((mu.apply(e1, e2) - e3).norm() == doctest::Approx(0.0));
  CHECK(mu.apply(e1, e1).norm() == doctest::Approx(0.0));
  // Bilinearity: [e1+e2, e1-e2] = -2 e3.
  CHECK((mu.apply(e1 + e2, e1 - e2) + 2.0 * e3).norm() == doctest::Approx(0.0));
}

TEST_CASE("bracket_apply antisymmetry on random tensors") {
  std::mt19937 rng(11);
  for (int t = 0; t < 20; ++t) {
    BracketTensor mu = random_bracket(4, rng);
    Vector x = random_gaussian(4, 1, rng), y = random_gaussian(4, 1, rng);
    CHECK((mu.apply(x, y) + mu.apply(y, x)).norm() <= 1e-12 * (1 + mu.norm()));
  }
}

TEST_CASE("BracketTensor guards") {
  BracketTensor mu(3);
  CHECK_THROWS_AS(mu.set(0, 0, 2, 1.0), DimensionMismatch);
  CHECK_THROWS_AS(mu.apply(basis_vec(2, 0), basis_vec(2, 1)), DimensionMismatch);
  mu.set(0, 1, 2, 1.0);
  CHECK(mu.c(1, 0, 2) == doctest::Approx(-1.0));
}

TEST_CASE("jacobi_residual examples") {
  CHECK(jacobi_residual(BracketTensor(3)) == doctest::Approx(0.0));
  CHECK(jacobi_residual(heisenberg()) == doctest::Approx(0.0));

  // mu(e1,e2) = e3, mu(e1,e3) = e3, mu(e2,e3) = e1: the cyclic sum over
  // (1,2,3) equals mu(-e3, e2) = e1, so the residual is 1.
  BracketTensor bad(3);
  bad.set(0, 1, 2, 1.0);
  bad.set(0, 2, 2, 1.0);
  bad.set(1, 2, 0, 1.0);
  CHECK(jacobi_residual(bad) == doctest::Approx(1.0));
}

TEST_CASE("nilpotency_class examples") {
  CHECK(nilpotency_class(BracketTensor(3)) == 1);
  CHECK(nilpotency_class(heisenberg()) == 2);
  CHECK(nilpotency_class(filiform4()) == 3);

  // mu(e1,e2) = e2: solvable non-nilpotent, series stabilizes at span(e2).
  BracketTensor solvable(2);
  solvable.set(0, 1, 1, 1.0);
  CHECK(!nilpotency_class(solvable).has_value());

  BracketTensor bad(3);
  bad.set(0, 1, 2, 1.0);
  bad.set(0, 2, 2, 1.0);
  bad.set(1, 2, 0, 1.0);
  CHECK_THROWS_AS(nilpotency_class(bad), JacobiViolation);
}

TEST_CASE("gl_act examples") {
  BracketTensor mu = heisenberg();
  CHECK(tensor_diff(gl_act(Matrix::Identity(3, 3), mu), mu) == doctest::Approx(0.0));

  BracketTensor scaled = gl_act(3.0 * Matrix::Identity(3, 3), mu);
  BracketTensor third = mu;
  third *= 1.0 / 3.0;
  CHECK(tensor_diff(scaled, third) <= 1e-14);

  Matrix g = Matrix::Identity(3, 3);
  g(2, 2) = 2.0;
  BracketTensor acted = gl_act(g, mu);
  CHECK(acted.c(0, 1, 2) == doctest::Approx(2.0));

  CHECK_THROWS_AS(gl_act(Matrix::Zero(3, 3), mu), SingularMatrix);
}

TEST_CASE("gl_act composition property") {
  std::mt19937 rng(7);
  for (int t = 0; t < 10; ++t) {
    BracketTensor mu = random_bracket(4, rng);
    Matrix g = random_well_conditioned(4, 10.0, rng);
    Matrix h = random_well_conditioned(4, 10.0, rng);
    BracketTensor lhs = gl_act(g, gl_act(h, mu));
    BracketTensor rhs = gl_act(g * h, mu);
    CHECK(tensor_diff(lhs, rhs) <= 1e-12 * rhs.norm());
  }
}

TEST_CASE("gl_infinitesimal_act examples") {
  BracketTensor mu = heisenberg();

  BracketTensor id_act = gl_infinitesimal_act(Matrix::Identity(3, 3), mu);
  BracketTensor minus = mu;
  minus *= -1.0;
  CHECK(tensor_diff(id_act, minus) == doctest::Approx(0.0));

  Matrix D = Matrix::Identity(3, 3);
  D(2, 2) = 2.0;
  CHECK(gl_infinitesimal_act(D, mu).norm() == doctest::Approx(0.0));

  CHECK(gl_infinitesimal_act(Matrix::Zero(3, 3), mu).norm() == doctest::Approx(0.0));
}

TEST_CASE("gl_infinitesimal_act is the derivative of gl_act") {
  std::mt19937 rng(13);
  for (int t = 0; t < 10; ++t) {
    BracketTensor mu = random_bracket(4, rng);
    Matrix A = random_gaussian(4, 4, rng);
    const double h = 1e-5;
    BracketTensor plus = gl_act(expm(h * A), mu);
    BracketTensor minus = gl_act(expm(-h * A), mu);
    BracketTensor fd = plus - minus;
    fd *= 1.0 / (2.0 * h);
    BracketTensor exact = gl_infinitesimal_act(A, mu);
    CHECK(tensor_diff(fd, exact) <= 1e-6 * (1.0 + exact.norm()));
  }
}

TEST_CASE("derivation_space examples") {
  DerivationBasis all = derivation_space(BracketTensor(3), true);
  CHECK(all.elements.size() == 6);  // n(n+1)/2 for n = 3

  // Symmetric derivations of Heisenberg: d13 = d23 = 0 and d33 = d11 + d22,
  // leaving the three free parameters d11, d12, d22.
  DerivationBasis der = derivation_space(heisenberg(), true);
  CHECK(der.elements.size() == 3);

  // diag(1,1,2) lies in the span of the symmetric derivations.
  Matrix D = Matrix::Identity(3, 3);
  D(2, 2) = 2.0;
  Matrix residual = D;
  for (const Matrix& E : der.elements)
    residual -= (D.array() * E.array()).sum() * E;
  CHECK(residual.norm() <= 1e-9);

  // Every basis element really annihilates the bracket.
  BracketTensor mu = heisenberg();
  for (const Matrix& E : der.elements)
    CHECK(gl_infinitesimal_act(E, mu).norm() <= 1e-10 * E.norm() * mu.norm());
}

TEST_CASE("inner_product_V examples") {
  BracketTensor mu = heisenberg();
  CHECK(inner_product_V(mu, mu) == doctest::Approx(2.0));
  CHECK(inner_product_V(mu, BracketTensor(3)) == doctest::Approx(0.0));

  std::mt19937 rng(17);
  for (int t = 0; t < 10; ++t) {
    BracketTensor a = random_bracket(4, rng);
    BracketTensor b = random_bracket(4, rng);
    Matrix k = random_orthogonal(4, rng);
    double before = inner_product_V(a, b);
    double after = inner_product_V(gl_act(k, a), gl_act(k, b));
    CHECK(std::abs(before - after) <= 1e-10 * (1.0 + std::abs(before)));
  }
}

TEST_CASE("symmetric bases are trace-orthonormal") {
  for (int n : {2, 3, 4}) {
    auto sym = symmetric_basis(n);
    CHECK(static_cast<int>(sym.size()) == n * (n + 1) / 2);
    for (size_t a = 0; a < sym.size(); ++a)
      for (size_t b = 0; b < sym.size(); ++b) {
        double want = a == b ? 1.0 : 0.0;
        CHECK(std::abs((sym[a] * sym[b].transpose()).trace() - want) <= 1e-12);
      }
    auto tless = traceless_symmetric_basis(n);
    CHECK(static_cast<int>(tless.size()) == n * (n + 1) / 2 - 1);
    for (const Matrix& E : tless) CHECK(std::abs(E.trace()) <= 1e-12);
  }
}

TEST_CASE("flatten/unflatten round trip") {
  std::mt19937 rng(23);
  BracketTensor mu = random_bracket(5, rng);
  BracketTensor back = BracketTensor::unflatten(5, mu.flatten());
  CHECK(tensor_diff(mu, back) == doctest::Approx(0.0));
}
