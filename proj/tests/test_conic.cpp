#include <sstream>

#include <doctest.h>

#include "irsnoma/conic.hpp"
#include "irsnoma/errors.hpp"
#include "support.hpp"

using namespace irsnoma;
using namespace irsnoma::conic;

namespace {

ConeProgram eigen_program(const cmat& c, bool complex) {
  ConeProgram p;
  const int n = static_cast<int>(c.rows());
  p.add_matrix("X", n, complex);
  p.objective = AffineExpr::trace(0, c);
  p.add_linear(AffineExpr::trace(0, cmat::Identity(n, n)) - 1.0, Sense::Equal, "unit_trace");
  return p;
}

ConeProgram unit_circle_program() {
  // min t  s.t.  x + y >= 1,  x^2 + y^2 <= t
  ConeProgram p;
  const int x = p.add_scalar("x"), y = p.add_scalar("y"), t = p.add_scalar("t");
  p.objective = AffineExpr::scalar(t);
  p.add_linear(AffineExpr::scalar(x) + AffineExpr::scalar(y) - 1.0, Sense::GreaterEqual, "l");
  QuadraticConstraint q;
  q.terms = {AffineExpr::scalar(x), AffineExpr::scalar(y)};
  q.bound = AffineExpr::scalar(t);
  q.label = "q";
  p.add_quadratic(q);
  return p;
}

}  // namespace

TEST_SUITE("conic") {

TEST_CASE("linear program with bounds") {
  // min x + 3y  s.t.  x + 2y >= 2,  0 <= x <= 1,  y >= 0  ->  x = 1, y = 0.5
  ConeProgram p;
  const int x = p.add_scalar("x", 0.0, 1.0), y = p.add_scalar("y", 0.0);
  p.objective = AffineExpr::scalar(x) + 3.0 * AffineExpr::scalar(y);
  p.add_linear(AffineExpr::scalar(x) + 2.0 * AffineExpr::scalar(y) - 2.0, Sense::GreaterEqual,
               "cover");
  const SolverResult r = solve(p);
  REQUIRE(r.optimal());
  CHECK(r.objective == doctest::Approx(2.5).epsilon(1e-7));
  CHECK(r.scalar(x) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.scalar(y) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_NOTHROW(check_kkt(p, r));
}

TEST_CASE("minimum eigenvalue instances, real and complex") {
  Rng rng(5);
  for (int n = 2; n <= 6; ++n) {
    const cmat c = test::random_hermitian(rng, n);
    const SolverResult r = solve(eigen_program(c, true));
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(test::lambda_min(c)).epsilon(1e-7));
    CHECK_NOTHROW(check_kkt(eigen_program(c, true), r));

    const cmat cr = c.real().cast<std::complex<double>>();
    const SolverResult rr = solve(eigen_program(cr, false));
    REQUIRE(rr.optimal());
    CHECK(rr.objective == doctest::Approx(test::lambda_min(cr)).epsilon(1e-7));
  }
}

TEST_CASE("two-constraint SDR matches the dual scalar search") {
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const cvec a = rng.complex_normal_vector(3), b = rng.complex_normal_vector(3);
    const cmat A1 = a * a.adjoint(), A2 = b * b.adjoint();
    ConeProgram p;
    p.add_matrix("W", 3);
    p.objective = AffineExpr::trace(0, cmat::Identity(3, 3));
    p.add_linear(AffineExpr::trace(0, A1) - 1.0, Sense::GreaterEqual, "a");
    p.add_linear(AffineExpr::trace(0, A2) - 1.0, Sense::GreaterEqual, "b");
    const SolverResult r = solve(p);
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(test::two_constraint_sdr_oracle(A1, A2)).epsilon(1e-6));
  }
}

TEST_CASE("quadratic constraints through the Schur embedding") {
  const SolverResult r = solve(unit_circle_program());
  REQUIRE(r.optimal());
  CHECK(r.objective == doctest::Approx(0.5).epsilon(1e-7));

  // min t  s.t.  x^2 / y <= t,  x = 1,  y <= 2  ->  t = 0.5
  ConeProgram p;
  const int x = p.add_scalar("x", 1.0, 1.0), y = p.add_scalar("y", std::nullopt, 2.0),
            t = p.add_scalar("t");
  p.objective = AffineExpr::scalar(t);
  QuadraticConstraint q;
  q.terms = {AffineExpr::scalar(x)};
  q.bound = AffineExpr::scalar(t);
  q.denominator = AffineExpr::scalar(y);
  q.label = "frac";
  p.add_quadratic(q);
  const SolverResult r2 = solve(p);
  REQUIRE(r2.optimal());
  CHECK(r2.objective == doctest::Approx(0.5).epsilon(1e-7));
  CHECK_NOTHROW(check_kkt(p, r2));
}

TEST_CASE("2x2 LMI") {
  // min a + b  s.t.  [[a, 1], [1, b]] psd  ->  2
  ConeProgram p;
  const int a = p.add_scalar("a"), b = p.add_scalar("b");
  p.objective = AffineExpr::scalar(a) + AffineExpr::scalar(b);
  p.add_lmi2(AffineExpr::scalar(a), 1.0, AffineExpr::scalar(b), "lmi");
  const SolverResult r = solve(p);
  REQUIRE(r.optimal());
  CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("unit-diagonal constraints") {
  // min Re Tr(C V), diag V = 1, C = [[0, c], [c*, 0]]  ->  -2|c|
  const std::complex<double> c(0.6, -0.8);
  cmat C = cmat::Zero(2, 2);
  C(0, 1) = c;
  C(1, 0) = std::conj(c);
  ConeProgram p;
  p.add_matrix("V", 2);
  p.objective = AffineExpr::trace(0, C);
  p.add_diagonal(0, 0, 1.0, "d0");
  p.add_diagonal(0, 1, 1.0, "d1");
  const SolverResult r = solve(p);
  REQUIRE(r.optimal());
  CHECK(r.objective == doctest::Approx(-2.0).epsilon(1e-7));
  CHECK(std::abs(r.matrix(0)(0, 0) - 1.0) < 1e-7);
}

TEST_CASE("infeasible and unbounded programs are reported as statuses") {
  ConeProgram inf;
  inf.add_matrix("X", 2);
  inf.add_linear(AffineExpr::trace(0, cmat::Identity(2, 2)) + 1.0, Sense::Equal, "neg_trace");
  CHECK(solve(inf).status == SolveStatus::Infeasible);

  ConeProgram unb;
  const int x = unb.add_scalar("x", std::nullopt, 1.0);
  unb.objective = AffineExpr::scalar(x);
  CHECK(solve(unb).status == SolveStatus::Unbounded);
}

TEST_CASE("validation catches malformed programs") {
  ConeProgram p;
  p.add_scalar("x");
  p.objective = AffineExpr::scalar(3);
  CHECK_THROWS_AS(p.validate(), ModelingError);

  ConeProgram q;
  q.add_matrix("X", 2);
  q.objective = AffineExpr::trace(0, cmat::Identity(3, 3));
  CHECK_THROWS_AS(q.validate(), ModelingError);

  ConeProgram h;
  h.add_matrix("X", 2);
  cmat bad = cmat::Zero(2, 2);
  bad(0, 1) = 1.0;
  h.objective = AffineExpr::trace(0, bad);
  CHECK_THROWS_AS(h.validate(), ModelingError);
}

TEST_CASE("quadratic embedding structure") {
  QuadraticConstraint one;
  one.terms = {AffineExpr::scalar(0)};
  one.bound = AffineExpr::scalar(1);
  const QuadraticEmbedding e1 = embed_quadratic_as_psd(one, 2);
  CHECK(e1.aux_vars.empty());
  CHECK(e1.lmis.size() == 1);

  QuadraticConstraint two = one;
  two.terms.push_back(AffineExpr::scalar(1));
  two.weights = {1.0, 4.0};
  const QuadraticEmbedding e2 = embed_quadratic_as_psd(two, 2);
  CHECK(e2.aux_vars.size() == 2);
  CHECK(e2.lmis.size() == 2);
  CHECK(e2.linear.size() == 1);
}

TEST_CASE("real embedding preserves traces and round-trips") {
  Rng rng(3);
  for (int n = 1; n <= 4; ++n) {
    const cmat a = test::random_hermitian(rng, n);
    const cvec v = rng.complex_normal_vector(n);
    const cmat x = v * v.adjoint();
    const double direct = (a * x).trace().real();
    const double embedded = 0.5 * (real_embedding(a) * real_embedding(x)).trace();
    CHECK(embedded == doctest::Approx(direct).epsilon(1e-12));
    CHECK((from_real_embedding(real_embedding(x)) - x).norm() < 1e-12);
  }
}

TEST_CASE("text format round-trips exactly") {
  Rng rng(4);
  ConeProgram p = eigen_program(test::random_hermitian(rng, 3), true);
  const int s = p.add_scalar("s", 0.0, 2.5);
  p.objective += 1.0 / 3.0 * AffineExpr::scalar(s);
  QuadraticConstraint q;
  q.terms = {AffineExpr::scalar(s), AffineExpr::trace(0, cmat::Identity(3, 3))};
  q.weights = {1.0, 0.5};
  q.bound = 7.0;
  q.denominator = 2.0;
  q.label = "quad";
  p.add_quadratic(q);
  p.add_lmi2(AffineExpr::scalar(s), 0.1, 1.0, "lmi");
  p.add_diagonal(0, 1, 0.5, "diag");
  const std::string text = to_text(p);
  std::istringstream is(text);
  const ConeProgram back = read_text(is);
  CHECK(to_text(back) == text);
  const SolverResult a = solve(p), b = solve(back);
  CHECK(a.status == b.status);
  CHECK(a.objective == b.objective);
}

TEST_CASE("text format errors carry line numbers") {
  std::istringstream is("cone_program 1\nscalar \"x\" - -\nlinear \"l\" gt { 0 }\nend\n");
  try {
    read_text(is);
    FAIL("expected a ModelingError");
  } catch (const ModelingError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream missing("cone_program 1\nscalar \"x\" - -\n");
  CHECK_THROWS_AS(read_text(missing), ModelingError);
}

TEST_CASE("KKT check rejects tampered certificates") {
  Rng rng(6);
  const ConeProgram p = eigen_program(test::random_hermitian(rng, 3), true);
  SolverResult r = solve(p);
  REQUIRE(r.optimal());
  const KktReport rep = check_kkt(p, r);
  CHECK(rep.primal_residual <= 1e-6);
  CHECK(rep.dual_residual <= 1e-6);
  CHECK(std::abs(rep.gap) <= 1e-6);

  SolverResult bad = r;
  bad.primal.matrices[0] *= 1.5;  // breaks Tr X = 1
  CHECK_THROWS_AS(check_kkt(p, bad), CertificationError);

  bad = r;
  bad.certificate.multipliers *= 0.5;  // breaks the duality gap
  CHECK_THROWS_AS(check_kkt(p, bad), CertificationError);

  bad = r;
  bad.status = SolveStatus::NumericalFailure;
  CHECK_THROWS_AS(check_kkt(p, bad), DomainError);
}

}
