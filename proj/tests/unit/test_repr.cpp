#include <doctest.h>

#include <cmath>
#include <limits>

#include "pmitame/repr.hpp"
#include "support/test_support.hpp"

using namespace pmitame;
using namespace pmitame::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// m = 1, P = [x] (x-block), b = y: the simplest mixed-block instance.
PmiProblem scalar_xy() {
  const uint32_t n = 2;
  PolyMatrix P(1, n);
  P.set_entry(0, 0, Polynomial::variable(n, 0));
  return PmiProblem{std::move(P), Polynomial::variable(n, 1), 1, 1, std::nullopt, {"x", "y"}};
}

// m = 1, P = [y] with a zero objective is not expressible (b must be a
// y-polynomial; using b = 0 over one y variable works).
PmiProblem scalar_barrier() {
  const uint32_t n = 1;
  PolyMatrix P(1, n);
  P.set_entry(0, 0, Polynomial::variable(n, 0));
  return PmiProblem{std::move(P), Polynomial(n), 0, 1, std::nullopt, {"y"}};
}

MatrixVarProblem trace_objective(int m) {
  MatrixVarProblem prob;
  prob.m = m;
  Polynomial q(static_cast<uint32_t>(svec_size(m)));
  for (int i = 0; i < m; ++i) {
    q.add_term(Monomial::var(static_cast<uint32_t>(svec_index(i, i, m))), 1.0);
  }
  prob.q = q;
  return prob;
}

MatrixVarProblem entry00_objective() {
  MatrixVarProblem prob;
  prob.m = 2;
  Polynomial q(3);
  q.add_term(Monomial::var(static_cast<uint32_t>(svec_index(0, 0, 2))), 1.0);
  prob.q = q;
  return prob;
}

}  // namespace

TEST_CASE("indicator penalizes exactly the infeasible side") {
  const PmiProblem prob = example1();
  const auto obj = indicator_lagrangian(prob, 10.0);
  CHECK(obj->value(std::vector<double>{0.0, -1.0}) == doctest::Approx(-1.0));
  CHECK(obj->value(std::vector<double>{1.0, 1.0}) == doctest::Approx(11.0));
  CHECK(obj->value(std::vector<double>{0.0, 0.3}) == doctest::Approx(0.3));
  CHECK_FALSE(obj->smooth());
}

TEST_CASE("charpoly representation value and boundary neutrality") {
  const PmiProblem prob = example1();
  for (double lam : {0.1, 1.0, 7.0}) {
    const auto obj = charpoly_repr(prob, lam);
    // q_2 vanishes at the minimizer, so the product term drops out exactly.
    CHECK(obj->value(std::vector<double>{0.0, -1.0}) == doctest::Approx(-1.0));
  }
  const auto unit = charpoly_repr(prob, 1.0);
  CHECK(unit->value(std::vector<double>{0.0, 0.0}) == doctest::Approx(-2.0));

  const auto scalar = charpoly_repr(scalar_xy(), 1.0);
  CHECK(scalar->value(std::vector<double>{0.7, 0.2}) == doctest::Approx(0.2 - 0.7));
}

TEST_CASE("logdet representation") {
  const PmiProblem prob = example1();
  const auto obj = logdet_repr(prob, 1.0);
  CHECK(obj->value(std::vector<double>{0.0, 0.0}) == doctest::Approx(0.0));
  CHECK(obj->value(std::vector<double>{0.0, -1.0}) == kInf);

  const auto scalar = logdet_repr(scalar_barrier(), 1.0);
  CHECK(scalar->value(std::vector<double>{2.0}) == doctest::Approx(-std::log(2.0)));
  CHECK(scalar->gradient(std::vector<double>{2.0})[0] == doctest::Approx(-0.5));
  CHECK_THROWS_AS(scalar->gradient(std::vector<double>{-1.0}), std::domain_error);
}

TEST_CASE("det power representation") {
  const PmiProblem prob = example1();
  const auto obj = detr_repr(prob, 1.0, Rational::of(1, 2));
  CHECK(obj->value(std::vector<double>{0.0, 0.0}) == doctest::Approx(-1.0));
  CHECK(obj->value(std::vector<double>{0.0, -1.0}) == kInf);

  const auto scalar = detr_repr(scalar_barrier(), 1.0, Rational::of(1, 2));
  CHECK(scalar->value(std::vector<double>{4.0}) == doctest::Approx(-2.0));
  CHECK(scalar->gradient(std::vector<double>{4.0})[0] == doctest::Approx(-0.25));

  CHECK_THROWS_AS(detr_repr(prob, 1.0, Rational::of(3, 2)), std::invalid_argument);
}

TEST_CASE("factorization representation") {
  const auto trace_obj = factorization_repr(trace_objective(2), 1);
  for (int i = 0; i < 5; ++i) {
    auto v = random_point(2, -1.0, 1.0, 61, i);
    double nrm = std::hypot(v[0], v[1]);
    v[0] /= nrm;
    v[1] /= nrm;
    CHECK(trace_obj->value(v) == doctest::Approx(1.0));
  }

  const auto e00 = factorization_repr(entry00_objective(), 1);
  const std::vector<double> e1{1.0, 0.0};
  CHECK(e00->value(e1) == doctest::Approx(1.0));
  const auto g = e00->gradient(e1);
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(0.0));

  // Q(X) = X00*X11 - X01^2 = det X; zero for every rank-1 factor.
  MatrixVarProblem detq;
  detq.m = 2;
  Polynomial q(3);
  q.add_term(Monomial::var(0).times(Monomial::var(2)), 1.0);
  q.add_term(Monomial::var(1, 2), -1.0);
  detq.q = q;
  const auto det1 = factorization_repr(detq, 1);
  for (int i = 0; i < 5; ++i) {
    auto v = random_point(2, -1.0, 1.0, 67, i);
    const double nrm = std::hypot(v[0], v[1]);
    v[0] /= nrm;
    v[1] /= nrm;
    CHECK(det1->value(v) == doctest::Approx(0.0).epsilon(1e-12));
  }
  const auto det2 = factorization_repr(detq, 2);
  for (int i = 0; i < 5; ++i) {
    auto v = random_point(4, -1.0, 1.0, 71, i);
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    for (double& x : v) x /= nrm;
    const double x00 = v[0] * v[0] + v[2] * v[2];
    const double x01 = v[0] * v[1] + v[2] * v[3];
    const double x11 = v[1] * v[1] + v[3] * v[3];
    CHECK(det2->value(v) == doctest::Approx(x00 * x11 - x01 * x01));
  }

  CHECK_THROWS_AS(factorization_repr(detq, 3), std::invalid_argument);
}

TEST_CASE("factorization certificate") {
  const MatrixVarProblem trace2 = trace_objective(2);
  const std::vector<double> v{std::sqrt(0.5), std::sqrt(0.5)};
  const FactorizationState st = factorization_certificate(trace2, v, 1);
  CHECK(st.multiplier == doctest::Approx(1.0));
  CHECK(st.smin == doctest::Approx(0.0));
  CHECK(st.residual == doctest::Approx(0.0));
  CHECK(st.certified(1e-9));

  const MatrixVarProblem e00 = entry00_objective();
  const FactorizationState good = factorization_certificate(e00, std::vector<double>{0.0, 1.0}, 1);
  CHECK(good.multiplier == doctest::Approx(0.0));
  CHECK(good.smin == doctest::Approx(0.0));
  CHECK(good.certified(1e-9));

  const FactorizationState bad = factorization_certificate(e00, std::vector<double>{1.0, 0.0}, 1);
  CHECK(bad.multiplier == doctest::Approx(1.0));
  CHECK(bad.smin == doctest::Approx(-1.0));
  CHECK_FALSE(bad.certified(1e-7));
}

TEST_CASE("bound feasibility merit") {
  const PmiProblem prob = example1();
  const auto at_opt = bound_feasibility_merit(prob, -1.0);
  CHECK(at_opt->value(std::vector<double>{0.0, -1.0}) == doctest::Approx(0.0));

  const auto tight = bound_feasibility_merit(prob, -1.5);
  CHECK(tight->value(std::vector<double>{0.0, -1.0}) == doctest::Approx(0.25));

  const auto loose = bound_feasibility_merit(prob, 0.5);
  CHECK(loose->value(std::vector<double>{0.0, 0.0}) == doctest::Approx(0.0));

  // Merit vanishes exactly where the sign test passes and the bound holds.
  const CharPolyCoeffs qs = charpoly(prob.P);
  const auto merit = bound_feasibility_merit(prob, -0.25);
  for (int i = 0; i < 200; ++i) {
    const auto z = random_point(2, -1.5, 1.5, 73, i);
    const bool zero = merit->value(z) <= 1e-18;
    const bool in_set = psd_by_descartes(qs, z, 0.0) && prob.b.eval(z) <= -0.25;
    CHECK(zero == in_set);
  }
}

TEST_CASE("gradients match finite differences at interior points") {
  const PmiProblem prob = example1();
  const CharPolyCoeffs qs = charpoly(prob.P);

  const auto cp = charpoly_repr(prob, 0.3);
  const auto ld = logdet_repr(prob, 0.7);
  const auto dr = detr_repr(prob, 0.7, Rational::of(1, 2));
  const auto bm = bound_feasibility_merit(prob, -0.5);

  int interior = 0;
  for (int i = 0; i < 600 && interior < 25; ++i) {
    const auto z = random_point(2, -1.5, 1.5, 79, i);
    CHECK(max_grad_rel_err(*cp, z) < 1e-5);
    CHECK(max_grad_rel_err(*bm, z) < 1e-5);
    if (psd_by_descartes(qs, z, -1e-3)) {  // strictly inside the PD cone
      CHECK(max_grad_rel_err(*ld, z) < 1e-5);
      CHECK(max_grad_rel_err(*dr, z) < 1e-5);
      ++interior;
    }
  }
  CHECK(interior >= 25);
}

TEST_CASE("exact Hessians match finite differences of the gradient") {
  const PmiProblem prob = example1();
  const auto cp = charpoly_repr(prob, 0.4);
  const auto ld = logdet_repr(prob, 0.9);
  const auto dr = detr_repr(prob, 0.9, Rational::of(1, 3));
  const CharPolyCoeffs qs = charpoly(prob.P);

  auto check_hessian = [&](const Objective& obj, std::span<const double> z) {
    const SymMatrix h = obj.hessian(z);
    const double step = 1e-5;
    std::vector<double> zp(z.begin(), z.end()), zm(z.begin(), z.end());
    for (int i = 0; i < 2; ++i) {
      zp[i] = z[i] + step;
      zm[i] = z[i] - step;
      const auto gp = obj.gradient(zp);
      const auto gm = obj.gradient(zm);
      zp[i] = z[i];
      zm[i] = z[i];
      for (int j = 0; j < 2; ++j) {
        CHECK(rel_err(h(i, j), (gp[j] - gm[j]) / (2 * step)) < 1e-4);
      }
    }
  };

  int interior = 0;
  for (int i = 0; i < 400 && interior < 10; ++i) {
    const auto z = random_point(2, -1.2, 1.2, 83, i);
    check_hessian(*cp, z);
    if (psd_by_descartes(qs, z, -1e-2)) {
      check_hessian(*ld, z);
      check_hessian(*dr, z);
      ++interior;
    }
  }
  CHECK(interior >= 10);
}

TEST_CASE("definability table and recipes") {
  CHECK(classify_objective(ReprKind::indicator) == StructureLabel::SEMIALG);
  CHECK(classify_objective(ReprKind::charpoly) == StructureLabel::SEMIALG);
  CHECK(classify_objective(ReprKind::factorization) == StructureLabel::SEMIALG);
  CHECK(classify_objective(ReprKind::bound) == StructureLabel::SEMIALG);
  CHECK(classify_objective(ReprKind::logdet) == StructureLabel::EXP);
  CHECK(classify_objective(ReprKind::detr) == StructureLabel::EXP);

  const PmiProblem prob = example1();
  const std::vector<Interval> domain(2, Interval::whole());
  CHECK(classify(objective_recipe(prob, ReprKind::charpoly, 0.5), domain) ==
        StructureLabel::SEMIALG);
  CHECK(classify(objective_recipe(prob, ReprKind::logdet, 0.5), domain) == StructureLabel::EXP);
  CHECK(classify(objective_recipe(prob, ReprKind::detr, 0.5), domain) == StructureLabel::EXP);

  // The factorized objective expands to an honest polynomial in v.
  const Polynomial fpoly = factorization_value_polynomial(trace_objective(2), 2);
  const std::vector<Interval> vdom(4, Interval::whole());
  CHECK(classify(Expr::from_polynomial(fpoly), vdom) == StructureLabel::SEMIALG);
}

TEST_CASE("selector identifiers round-trip") {
  for (ReprKind k : {ReprKind::indicator, ReprKind::charpoly, ReprKind::factorization,
                     ReprKind::logdet, ReprKind::detr, ReprKind::bound}) {
    CHECK(repr_from_id(repr_id(k)) == k);
  }
  CHECK_FALSE(repr_from_id("nonsense").has_value());
}
