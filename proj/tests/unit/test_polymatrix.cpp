#include <doctest.h>

#include <cmath>

#include "pmitame/polymatrix.hpp"
#include "support/test_support.hpp"

using namespace pmitame;
using namespace pmitame::testing;

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// Coupled tolerances for the Descartes/eigenvalue comparison: the coefficient
// q_j scales like the j-th power of the matrix norm.
double descartes_scale(const SymMatrix& a) {
  return 1.0 + std::pow(a.frobenius_norm(), a.dim());
}

}  // namespace

TEST_CASE("matrix evaluation at points") {
  const PmiProblem prob = example1();
  const SymMatrix at_origin = prob.P.eval(std::vector<double>{0.0, 0.0});
  CHECK(at_origin(0, 0) == 1.0);
  CHECK(at_origin(0, 1) == 0.0);
  CHECK(at_origin(1, 1) == 1.0);

  const SymMatrix at_opt = prob.P.eval(std::vector<double>{0.0, -1.0});
  CHECK(at_opt(0, 0) == 1.0);
  CHECK(at_opt(0, 1) == 0.0);
  CHECK(at_opt(1, 1) == 0.0);

  const PolyMatrix zero(3, 2);
  const SymMatrix z = zero.eval(std::vector<double>{0.3, -0.7});
  CHECK(z.frobenius_norm() == 0.0);

  CHECK_THROWS_AS(prob.P.eval(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("charpoly of the planar instance matches the printed coefficients") {
  const CharPolyCoeffs qs = charpoly(example1().P);
  REQUIRE(qs.q.size() == 2);

  Polynomial q1(2);
  q1.add_term(Monomial::one(), 2.0);
  q1.add_term(Monomial::var(0, 2), -1.0);
  q1.add_term(Monomial::var(0).times(Monomial::var(1)), -16.0);
  q1.add_term(Monomial::var(1, 2), -1.0);

  Polynomial q2(2);
  q2.add_term(Monomial::var(0, 3).times(Monomial::var(1)), 16.0);
  q2.add_term(Monomial::var(0, 2), -2.0);
  q2.add_term(Monomial::var(0).times(Monomial::var(1)), -16.0);
  q2.add_term(Monomial::var(0).times(Monomial::var(1, 3)), 16.0);
  q2.add_term(Monomial::var(1, 2), -1.0);
  q2.add_term(Monomial::one(), 1.0);

  CHECK(max_coef_rel_diff(qs.q[0], q1) <= 1e-9);
  CHECK(max_coef_rel_diff(qs.q[1], q2) <= 1e-9);
}

TEST_CASE("charpoly of the constant identity gives binomial coefficients") {
  for (int m = 1; m <= 5; ++m) {
    PolyMatrix eye(m, 1);
    for (int i = 0; i < m; ++i) eye.set_entry(i, i, Polynomial::constant(1, 1.0));
    const CharPolyCoeffs qs = charpoly(eye);
    for (int j = 1; j <= m; ++j) {
      CHECK(qs.q[j - 1].coefficient(Monomial::one()) == doctest::Approx(binom(m, j)));
    }
  }
}

TEST_CASE("Faddeev-LeVerrier agrees with the cofactor-expansion oracle") {
  for (int trial = 0; trial < 25; ++trial) {
    const int m = 2 + trial % 3;
    const PolyMatrix P = random_polymatrix(m, 2, 2, 41, trial);
    const CharPolyCoeffs got = charpoly(P);
    const std::vector<Polynomial> want = charpoly_cofactor_oracle(P);
    REQUIRE(got.q.size() == want.size());
    for (std::size_t j = 0; j < want.size(); ++j) {
      CHECK(max_coef_rel_diff(got.q[j], want[j]) <= 1e-6);
    }
  }
}

TEST_CASE("charpoly coefficients evaluated at points match the numeric spectrum") {
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 2 + trial % 3;
    const PolyMatrix P = random_polymatrix(m, 3, 2, 43, trial);
    const CharPolyCoeffs qs = charpoly(P);
    const auto z = random_point(3, -1.0, 1.0, 47, trial);
    const SymMatrix a = P.eval(z);
    const auto ev = eigvals_sym(a);

    // Elementary symmetric functions of the eigenvalues.
    std::vector<double> esym(m + 1, 0.0);
    esym[0] = 1.0;
    for (int k = 0; k < m; ++k) {
      for (int j = std::min(k + 1, m); j >= 1; --j) esym[j] += ev[k] * esym[j - 1];
    }
    for (int j = 1; j <= m; ++j) {
      CHECK(rel_err(qs.q[j - 1].eval(z), esym[j]) <= 1e-6);
    }
    // q_m = det P.
    double det = 1.0;
    for (double v : ev) det *= v;
    CHECK(rel_err(qs.q[m - 1].eval(z), det) <= 1e-6);
  }
}

TEST_CASE("sign test matches the worked instance") {
  const CharPolyCoeffs qs = charpoly(example1().P);
  CHECK(psd_by_descartes(qs, std::vector<double>{0.0, -1.0}, 1e-9));
  CHECK_FALSE(psd_by_descartes(qs, std::vector<double>{1.0, 1.0}, 1e-9));

  PolyMatrix eye(3, 1);
  for (int i = 0; i < 3; ++i) eye.set_entry(i, i, Polynomial::constant(1, 1.0));
  const CharPolyCoeffs qi = charpoly(eye);
  CHECK(psd_by_descartes(qi, std::vector<double>{0.4}, 0.0));
}

TEST_CASE("sign test is equivalent to the eigenvalue test on random instances") {
  int checked = 0;
  for (int trial = 0; trial < 250; ++trial) {
    const int m = 2 + trial % 3;
    const PolyMatrix P = random_polymatrix(m, 2, 2, 53, trial);
    const CharPolyCoeffs qs = charpoly(P);
    const auto z = random_point(2, -1.5, 1.5, 59, trial);
    const SymMatrix a = P.eval(z);
    const double scale = descartes_scale(a);
    const bool by_sign = psd_by_descartes(qs, z, 1e-9 * scale);
    const bool by_eig = is_psd(a, 1e-7 * scale);
    CHECK(by_sign == by_eig);
    ++checked;
  }
  CHECK(checked == 250);
}

TEST_CASE("degree guard refuses runaway coefficient degrees") {
  PolyMatrix big(1, 1);
  Polynomial high(1);
  high.add_term(Monomial::var(0, 65), 1.0);
  big.set_entry(0, 0, high);
  CHECK_THROWS_AS(charpoly(big), std::domain_error);
}

TEST_CASE("scalar constraints fold in as diagonal blocks") {
  // g(y) = y >= 0 appended to [1 - y^2] as a block: feasible set becomes [0, 1].
  const uint32_t n = 1;
  PolyMatrix base(1, n);
  Polynomial p(n);
  p.add_term(Monomial::one(), 1.0);
  p.add_term(Monomial::var(0, 2), -1.0);
  base.set_entry(0, 0, p);
  PolyMatrix g(1, n);
  g.set_entry(0, 0, Polynomial::variable(n, 0));

  const PolyMatrix folded = PolyMatrix::block_diag({base, g});
  CHECK(folded.dim() == 2);
  const CharPolyCoeffs qs = charpoly(folded);
  CHECK(psd_by_descartes(qs, std::vector<double>{0.5}, 1e-12));
  CHECK_FALSE(psd_by_descartes(qs, std::vector<double>{-0.5}, 1e-12));
  CHECK_FALSE(psd_by_descartes(qs, std::vector<double>{1.5}, 1e-12));
}
