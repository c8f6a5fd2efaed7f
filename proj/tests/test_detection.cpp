#include <doctest.h>

#include <random>

#include "orbitflow/detection.hpp"
#include "orbitflow/moment.hpp"
#include "test_support.hpp"

using namespace orbitflow;
using namespace testsupport;

namespace {

Matrix diag3(double a, double b, double c) {
  Matrix D = Matrix::Zero(3, 3);
  D.diagonal() << a, b, c;
  return D;
}

BracketTensor sample_in_W(const std::vector<BracketTensor>& basis, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  BracketTensor out(basis.front().dim());
  for (const BracketTensor& e : basis) {
    BracketTensor term = e;
    term *= gauss(rng);
    out += term;
  }
  return out;
}

}  // namespace

TEST_CASE("eigenspace_blocks examples") {
  BlockStructure b = eigenspace_blocks(diag3(1, 1, 2));
  CHECK(b.eigenvalues == std::vector<double>{1.0, 2.0});
  CHECK(b.block_sizes == std::vector<int>{2, 1});

  BlockStructure one = eigenspace_blocks(Matrix::Identity(4, 4));
  CHECK(one.block_sizes == std::vector<int>{4});

  std::mt19937 rng(51);
  Matrix Q = random_orthogonal(3, rng);
  Matrix D = Q.transpose() * diag3(1, 1, 2) * Q;
  BlockStructure rotated = eigenspace_blocks(D);
  CHECK(rotated.block_sizes == std::vector<int>{2, 1});
  CHECK(rotated.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(rotated.eigenvalues[1] == doctest::Approx(2.0));
  // Reconstruction from the reported basis.
  Vector evals(3);
  for (int c = 0; c < 3; ++c) evals[c] = rotated.eigenvalue_of(c);
  CHECK((rotated.basis * evals.asDiagonal() * rotated.basis.transpose() - D).norm() <= 1e-9);
}

TEST_CASE("common_refinement of commuting derivations") {
  std::vector<Matrix> Ds = {diag3(1, 1, 2), diag3(1, 2, 2)};
  BlockStructure b = common_refinement(Ds);
  CHECK(b.block_sizes == std::vector<int>{1, 1, 1});

  Matrix off = Matrix::Zero(3, 3);
  off(0, 1) = off(1, 0) = 1.0;
  CHECK_THROWS_AS(common_refinement({diag3(1, 2, 3), off}), NonCommutingDerivations);
}

TEST_CASE("in_W examples") {
  CHECK(in_W(heisenberg(), diag3(1, 1, 2)));
  // diag(1,2,3) is a derivation (1 + 2 = 3), so membership holds there too;
  // diag(1,2,4) breaks the additive relation and fails.
  CHECK(in_W(heisenberg(), diag3(1, 2, 3)));
  CHECK(!in_W(heisenberg(), diag3(1, 2, 4)));
  CHECK(in_W(heisenberg(), Matrix::Zero(3, 3)));
}

TEST_CASE("w_basis spans the kernel and is orthonormal") {
  Matrix D = diag3(1, 1, 2);
  auto basis = w_basis(3, {D});
  CHECK(basis.size() == 1);
  for (const BracketTensor& e : basis) {
    CHECK(std::abs(e.norm() - 1.0) <= 1e-10);
    CHECK(in_W(e, D));
  }
  // Heisenberg lies in the span.
  BracketTensor residual = heisenberg();
  for (const BracketTensor& e : basis) {
    BracketTensor proj = e;
    proj *= residual.dot(e);
    residual -= proj;
  }
  CHECK(residual.norm() <= 1e-9);
}

TEST_CASE("graded_bracket_check examples") {
  BlockStructure blocks = eigenspace_blocks(diag3(1, 1, 2));
  CHECK(graded_bracket_check(heisenberg(), blocks));
  CHECK(graded_bracket_check(BracketTensor(3), blocks));

  // A bracket outside W generically violates the grading.
  BracketTensor bad(3);
  bad.set(0, 2, 1, 1.0);  // lambda(V_1, V_2) meets V_1, but 1 + 2 = 3 is no eigenvalue
  CHECK(!graded_bracket_check(bad, blocks));
}

TEST_CASE("check_detection examples") {
  BlockStructure blocks = eigenspace_blocks(diag3(1, 1, 2));
  CHECK(check_detection(heisenberg(), blocks));

  // Random lambda outside W: search finds a violation.
  std::mt19937 rng(55);
  bool found_violation = false;
  for (int t = 0; t < 50 && !found_violation; ++t) {
    BracketTensor lam = random_bracket(3, rng);
    if (!in_W(lam, diag3(1, 1, 2)) && !check_detection(lam, blocks)) found_violation = true;
  }
  CHECK(found_violation);
}

TEST_CASE("detection and rank equality across derivation scenarios") {
  // Eigenvalue multisets with nontrivial W (additive relations present).
  const std::vector<std::vector<double>> scenarios = {
      {1, 1, 2}, {1, 2, 3}, {1, 1, 2, 2}, {1, 1, 2, 3, 4}, {1, 1, 1, 2, 2, 3}};
  std::mt19937 rng(57);
  for (const auto& evals : scenarios) {
    const int n = static_cast<int>(evals.size());
    Matrix Q = random_orthogonal(n, rng);
    Vector d(n);
    for (int i = 0; i < n; ++i) d[i] = evals[static_cast<size_t>(i)];
    Matrix D = Q * d.asDiagonal() * Q.transpose();
    D = 0.5 * (D + D.transpose());
    BlockStructure blocks = eigenspace_blocks(D);
    auto basis = w_basis(n, {D});
    REQUIRE(!basis.empty());
    for (int t = 0; t < 20; ++t) {
      BracketTensor lam = sample_in_W(basis, rng);
      CHECK(in_W(lam, D));
      CHECK(graded_bracket_check(lam, blocks));
      CHECK(check_detection(lam, blocks));
      auto [cap, horb] = tangent_intersection_rank(lam, blocks);
      CHECK(cap == horb);
    }
  }
}

TEST_CASE("W is a subspace") {
  Matrix D = diag3(1, 1, 2);
  auto basis = w_basis(3, {D});
  std::mt19937 rng(59);
  for (int t = 0; t < 10; ++t) {
    BracketTensor a = sample_in_W(basis, rng);
    BracketTensor b = sample_in_W(basis, rng);
    BracketTensor combo = a;
    combo *= 0.3;
    BracketTensor bb = b;
    bb *= -1.7;
    combo += bb;
    CHECK(in_W(combo, D));
  }
}

TEST_CASE("split_direct_sum examples") {
  BracketTensor heis_ab(4);  // Heisenberg(3) + abelian(1)
  heis_ab.set(0, 1, 2, 1.0);
  auto [a, b] = split_direct_sum(heis_ab, SumSplit{3, 1});
  CHECK((a - heisenberg()).norm() == doctest::Approx(0.0));
  CHECK(b.norm() == doctest::Approx(0.0));

  BracketTensor hh = direct_sum(heisenberg(), heisenberg());
  auto [h1, h2] = split_direct_sum(hh, SumSplit{3, 3});
  CHECK((h1 - heisenberg()).norm() == doctest::Approx(0.0));
  CHECK((h2 - heisenberg()).norm() == doctest::Approx(0.0));

  CHECK_THROWS_AS(split_direct_sum(heisenberg(), SumSplit{2, 1}), NotAnIdealSum);
}

TEST_CASE("check_sum_detection examples") {
  std::mt19937 rng(61);
  for (int t = 0; t < 20; ++t) {
    BracketTensor lam = direct_sum(random_bracket(3, rng), random_bracket(2, rng));
    CHECK(check_sum_detection(lam, SumSplit{3, 2}));
  }

  BracketTensor hh = direct_sum(heisenberg(), heisenberg());
  Matrix m = moment_bracket(hh);
  Matrix want = Matrix::Zero(6, 6);
  want.diagonal() << -4, -4, 4, -4, -4, 4;
  CHECK((m - want).norm() <= 1e-12);
  CHECK(check_sum_detection(hh, SumSplit{3, 3}));

  CHECK(check_sum_detection(BracketTensor(5), SumSplit{3, 2}));
  CHECK_THROWS_AS(check_sum_detection(heisenberg(), SumSplit{2, 1}), NotInW);
}

TEST_CASE("tangent_intersection_rank examples") {
  BlockStructure blocks = eigenspace_blocks(diag3(1, 1, 2));
  auto [cap, horb] = tangent_intersection_rank(heisenberg(), blocks);
  CHECK(cap == horb);
  CHECK(cap == 1);

  auto [zc, zh] = tangent_intersection_rank(BracketTensor(3), blocks);
  CHECK(zc == 0);
  CHECK(zh == 0);

  BracketTensor hh = direct_sum(heisenberg(), heisenberg());
  auto [sc, sh] = tangent_intersection_rank(hh, SumSplit{3, 3});
  CHECK(sc == sh);
}
