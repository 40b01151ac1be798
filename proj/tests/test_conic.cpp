#include "doctest.h"

#include <cmath>
#include <random>

#include "steer/conic.hpp"
#include "steer/matrix.hpp"

using namespace steer;

TEST_CASE("trace-constrained eigenvalue problem") {
  // max tr(1*X) s.t. X >= 0 (2x2), tr X = 1  ->  1
  ConicProgram p;
  int x = p.add_psd_block(2);
  p.add_objective(x, Eigen::MatrixXd::Identity(2, 2));
  int eq = p.add_equality(1.0);
  p.add_equality_term(eq, x, Eigen::MatrixXd::Identity(2, 2));
  auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.value == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.primal_residual <= 1e-8);
  CHECK(sol.dual_residual <= 1e-8);
  CHECK(sol.gap <= 1e-7);
}

TEST_CASE("scalar LP") {
  // max x s.t. x >= 0, x = 0.3
  ConicProgram p;
  int x = p.add_nonneg();
  p.add_objective(x, 1.0);
  int eq = p.add_equality(0.3);
  p.add_equality_term(eq, x, 1.0);
  auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.value == doctest::Approx(0.3).epsilon(1e-8));
}

TEST_CASE("max eigenvalue via SDP matches eig_herm") {
  // max tr[(Pi_{0|Z}+Pi_{+|X}) X], tr X = 1, X >= 0 -> 1 + 1/sqrt(2)
  CMatrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  CMatrix op = ketbra(0, 0, 2) + plus;

  ConicProgram p;
  int x = p.add_psd_block(4);
  p.add_objective(x, 0.5 * embed_hermitian(op));
  int eq = p.add_equality(1.0);
  p.add_equality_term(eq, x, 0.5 * Eigen::MatrixXd::Identity(4, 4));
  auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.value == doctest::Approx(1.0 + 1.0 / std::sqrt(2.0)).epsilon(1e-7));
  CHECK(sol.value == doctest::Approx(eig_herm(op).values(0)).epsilon(1e-7));
}

TEST_CASE("embed_hermitian properties") {
  CHECK((embed_hermitian(identity(2)) - Eigen::MatrixXd::Identity(4, 4)).norm() ==
        doctest::Approx(0.0));

  Eigen::MatrixXd ey = embed_hermitian(pauli_y());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ey);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
  CHECK(es.eigenvalues()(1) == doctest::Approx(-1.0));
  CHECK(es.eigenvalues()(2) == doctest::Approx(1.0));
  CHECK(es.eigenvalues()(3) == doctest::Approx(1.0));

  CMatrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  Eigen::MatrixXd ep = embed_hermitian(plus);
  CHECK(ep.trace() == doctest::Approx(2.0));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ep);
  lu.setThreshold(1e-10);
  CHECK(lu.rank() == 2);

  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 20; ++rep) {
    CMatrix m(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = Complex(g(rng), g(rng));
    CMatrix h = 0.5 * (m + CMatrix(m.adjoint()));
    Eigen::MatrixXd e = embed_hermitian(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ee(e, Eigen::EigenvaluesOnly);
    bool psd_c = is_psd(h, 1e-12);
    bool psd_r = ee.eigenvalues()(0) >= -1e-12;
    CHECK(psd_c == psd_r);
  }

  CMatrix nh(2, 2);
  nh << 0, 1, 0, 0;
  CHECK_THROWS(embed_hermitian(nh));
}

TEST_CASE("free variables: minimize over LMI") {
  // min t s.t. t*I - Q >= 0  ->  t = lambda_max(Q)
  Eigen::MatrixXd q(2, 2);
  q << 2.0, -0.7, -0.7, 0.5;
  ConicProgram p;
  p.sense = Sense::Minimize;
  int t = p.add_free();
  int r = p.add_psd_block(2);
  p.add_objective(t, 1.0);
  // R = t*I - Q, entrywise: R - t*I = -Q
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(2, 2);
      e(i, j) = e(j, i) = (i == j) ? 1.0 : 0.5;
      int eq = p.add_equality(-q(i, j));
      p.add_equality_term(eq, r, e);
      if (i == j) p.add_equality_term(eq, t, -1.0);
    }
  auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q, Eigen::EigenvaluesOnly);
  CHECK(sol.value == doctest::Approx(es.eigenvalues()(1)).epsilon(1e-7));
}

TEST_CASE("infeasible equalities detected") {
  ConicProgram p;
  int x = p.add_nonneg();
  p.add_objective(x, 1.0);
  int e1 = p.add_equality(1.0);
  p.add_equality_term(e1, x, 1.0);
  int e2 = p.add_equality(2.0);
  p.add_equality_term(e2, x, 1.0);
  auto sol = solve(p);
  CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("cone infeasibility detected") {
  // x >= 0, y >= 0, x + y = -1 : infeasible against the cone
  ConicProgram p;
  int x = p.add_nonneg();
  int y = p.add_nonneg();
  p.add_objective(x, 1.0);
  int eq = p.add_equality(-1.0);
  p.add_equality_term(eq, x, 1.0);
  p.add_equality_term(eq, y, 1.0);
  auto sol = solve(p);
  CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("unbounded problem detected") {
  // max x + y s.t. x - y = 0, x,y >= 0
  ConicProgram p;
  int x = p.add_nonneg();
  int y = p.add_nonneg();
  p.add_objective(x, 1.0);
  p.add_objective(y, 1.0);
  int eq = p.add_equality(0.0);
  p.add_equality_term(eq, x, 1.0);
  p.add_equality_term(eq, y, -1.0);
  auto sol = solve(p);
  CHECK(sol.status == SolveStatus::Unbounded);
}

TEST_CASE("redundant consistent rows are tolerated") {
  ConicProgram p;
  int x = p.add_psd_block(2);
  p.add_objective(x, Eigen::MatrixXd::Identity(2, 2));
  int e1 = p.add_equality(1.0);
  p.add_equality_term(e1, x, Eigen::MatrixXd::Identity(2, 2));
  int e2 = p.add_equality(1.0);  // duplicate
  p.add_equality_term(e2, x, Eigen::MatrixXd::Identity(2, 2));
  auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.value == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("certificate verification") {
  ConicProgram p;
  int x = p.add_psd_block(2);
  p.add_objective(x, Eigen::MatrixXd::Identity(2, 2));
  int eq = p.add_equality(1.0);
  p.add_equality_term(eq, x, Eigen::MatrixXd::Identity(2, 2));
  auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);

  auto rep = verify_certificate(p, sol);
  CHECK(rep.primal_eq_residual <= 1e-8);
  CHECK(rep.dual_slack_violation <= 1e-8);
  CHECK(rep.gap <= 1e-7);
  CHECK(rep.ok());

  // inject a primal fault and watch the residual light up
  auto tampered = sol;
  tampered.primal[x](0, 0) += 1e-3;
  auto bad = verify_certificate(p, tampered);
  CHECK(bad.primal_eq_residual == doctest::Approx(1e-3).epsilon(1e-3));
  CHECK(!bad.ok());
}

TEST_CASE("weak duality on random feasible programs") {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 10; ++rep) {
    ConicProgram p;
    int x = p.add_psd_block(3);
    int z = p.add_nonneg();
    Eigen::MatrixXd c(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c(i, j) = g(rng);
    c = 0.5 * (c + c.transpose()).eval();
    p.add_objective(x, c);
    p.add_objective(z, g(rng));
    int eq = p.add_equality(1.0);
    p.add_equality_term(eq, x, Eigen::MatrixXd::Identity(3, 3));
    p.add_equality_term(eq, z, 1.0);
    auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.gap <= 1e-7);
    auto repv = verify_certificate(p, sol);
    CHECK(repv.ok());
    // optimum dominates a hand-picked feasible point (X = I/4, z = 1/4)
    double feas = c.trace() / 4.0;
    CHECK(sol.value >= feas - 1e-7);
  }
}

TEST_CASE("solver determinism") {
  ConicProgram p;
  int x = p.add_psd_block(3);
  Eigen::MatrixXd c(3, 3);
  c << 1, 0.3, -0.1, 0.3, -2, 0.5, -0.1, 0.5, 0.7;
  p.add_objective(x, c);
  int eq = p.add_equality(1.0);
  p.add_equality_term(eq, x, Eigen::MatrixXd::Identity(3, 3));
  auto a = solve(p);
  auto b = solve(p);
  CHECK(a.value == b.value);
  CHECK((a.primal[x] - b.primal[x]).norm() == 0.0);
  CHECK(a.iterations == b.iterations);
}
