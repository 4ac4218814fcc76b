#include <cmath>

#include "ddlqr/error.hpp"
#include "ddlqr/sdp.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ddlqr;
using namespace ddlqr::sdp;

TEST_CASE("affine expressions") {
  AffineExpr e = AffineExpr::variable(0, 2.0) + 3.0 - AffineExpr::variable(1) + AffineExpr::variable(0);
  e.compress();
  Vector v(2);
  v << 1.0, 4.0;
  CHECK(e.evaluate(v) == doctest::Approx(3.0 * 1.0 + 3.0 - 4.0));
  CHECK(e.terms().size() == 2);
  CHECK(e.max_variable() == 1);
  CHECK(AffineExpr(5.0).is_constant());
}

TEST_CASE("affine matrices") {
  ConicProgram p;
  const AffineMatrix x = p.add_matrix_variable(2, 3);
  Vector v = Vector::LinSpaced(6, 1.0, 6.0);
  const Matrix xv = x.evaluate(v);
  Matrix c(2, 2);
  c << 1, 2, 3, 4;
  CHECK((c * x).evaluate(v) == c * xv);
  CHECK(x.transpose().evaluate(v) == xv.transpose());
  CHECK(x.block(0, 1, 2, 2).evaluate(v) == xv.block(0, 1, 2, 2));
  const AffineMatrix s = p.add_symmetric_variable(3);
  CHECK(p.num_variables() == 12);
  const Matrix sv = s.evaluate(Vector::LinSpaced(12, 1.0, 12.0));
  CHECK(sv == sv.transpose());
  CHECK_THROWS_AS(p.add_psd(x), InvalidInput);
  CHECK_THROWS_AS(p.add_psd(AffineMatrix::blocks(s, s, s.transpose(), s) + AffineMatrix::constant(Matrix::Zero(6, 6)) +
                            [&] {
                              AffineMatrix a(6, 6);
                              a(0, 1) = AffineExpr::variable(0);
                              return a;
                            }()),
                  InvalidInput);
}

TEST_CASE("2x2 LMI: minimize t with [[t,1],[1,t]] PSD") {
  ConicProgram p;
  const int t = p.add_variable();
  AffineMatrix m(2, 2);
  m(0, 0) = AffineExpr::variable(t);
  m(1, 1) = AffineExpr::variable(t);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  p.add_psd(m);
  p.set_objective(AffineExpr::variable(t));
  const ConicSolution s = solve(p);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.residuals.worst() <= kCertificateTolerance);
}

TEST_CASE("second-order cone: t >= ||(3, 4)||") {
  ConicProgram p;
  const int t = p.add_variable();
  p.add_soc(AffineExpr::variable(t), {3.0, 4.0});
  p.set_objective(AffineExpr::variable(t));
  const ConicSolution s = solve(p);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.values(t) == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("equality constrained cone program") {
  // minimize t subject to t >= ||(x, y)||, x + y = 6 -> x = y = 3, t = sqrt(18)
  ConicProgram p;
  const int t = p.add_variable(), x = p.add_variable(), y = p.add_variable();
  p.add_soc(AffineExpr::variable(t), {AffineExpr::variable(x), AffineExpr::variable(y)});
  p.add_equality(AffineExpr::variable(x) + AffineExpr::variable(y) - 6.0);
  p.set_objective(AffineExpr::variable(t));
  const ConicSolution s = solve(p);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.objective == doctest::Approx(std::sqrt(18.0)).epsilon(1e-7));
  CHECK(s.values(x) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("min trace(CX) over trace(X) = 1 equals lambda_min(C)") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::Index n = 2 + rep % 3;
    const Matrix g = testing::random_matrix(n, n, rng);
    const Matrix c = (g + g.transpose()).eval();
    ConicProgram p;
    const AffineMatrix x = p.add_symmetric_variable(n);
    p.add_psd(x);
    p.add_equality(x.trace() - 1.0);
    p.set_objective((c * x).trace());
    const ConicSolution s = solve(p);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(std::abs(s.objective - linalg::min_eigenvalue_symmetric(c)) < 1e-6);
    const Residuals r = measure_residuals(p, s.values);
    CHECK(r.worst() <= kCertificateTolerance);
  }
}

TEST_CASE("infeasible programs are detected") {
  SUBCASE("conic") {
    // x <= -1 and x >= 0 through two 1x1 LMIs
    ConicProgram p;
    const int x = p.add_variable();
    AffineMatrix a(1, 1), b(1, 1);
    a(0, 0) = -1.0 - AffineExpr::variable(x);
    b(0, 0) = AffineExpr::variable(x);
    p.add_psd(a);
    p.add_psd(b);
    p.set_objective(AffineExpr::variable(x));
    CHECK(solve(p).status == SolveStatus::infeasible);
  }
  SUBCASE("inconsistent equalities") {
    ConicProgram p;
    const int x = p.add_variable();
    p.add_equality(AffineExpr::variable(x) - 1.0);
    p.add_equality(AffineExpr::variable(x) - 2.0);
    p.set_objective(AffineExpr::variable(x));
    CHECK(solve(p).status == SolveStatus::infeasible);
  }
}

TEST_CASE("unbounded program is detected") {
  ConicProgram p;
  const int x = p.add_variable();
  AffineMatrix a(1, 1);
  a(0, 0) = AffineExpr::variable(x);
  p.add_psd(a);
  p.set_objective(-1.0 * AffineExpr::variable(x));
  CHECK(solve(p).status == SolveStatus::unbounded);
}

TEST_CASE("measure_residuals is independent of the solver") {
  ConicProgram p;
  const int x = p.add_variable();
  AffineMatrix a(2, 2);
  a(0, 0) = AffineExpr::variable(x);
  a(1, 1) = 1.0;
  a(0, 1) = 2.0;
  a(1, 0) = 2.0;
  p.add_psd(a);
  p.add_soc(AffineExpr::variable(x), {3.0});
  p.add_equality(AffineExpr::variable(x) - 1.0);
  Vector v(1);
  v << 1.0;
  const Residuals r = measure_residuals(p, v);
  CHECK(r.equality == 0.0);
  CHECK(r.psd_violation == doctest::Approx(-linalg::min_eigenvalue_symmetric(a.evaluate(v))));
  CHECK(r.soc_violation == doctest::Approx(2.0));
}

TEST_CASE("triplet dump lists the objective first") {
  ConicProgram p;
  const int x = p.add_variable();
  p.set_objective(2.0 * AffineExpr::variable(x) + 1.0);
  const std::string s = to_triplets(p);
  CHECK(s.find("0 0 2") != std::string::npos);
}
