#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pmitame {

// Power product of variables, stored sparse: (variable index, exponent) pairs
// sorted by index, never with a zero exponent.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<std::pair<uint32_t, uint32_t>> factors);

  static Monomial one() { return Monomial{}; }
  static Monomial var(uint32_t index, uint32_t power = 1);

  const std::vector<std::pair<uint32_t, uint32_t>>& factors() const { return factors_; }
  uint32_t degree() const;
  uint32_t exponent(uint32_t var) const;
  // Number of variables needed to host this monomial (max index + 1).
  uint32_t min_vars() const;

  Monomial times(const Monomial& other) const;
  double eval(std::span<const double> point) const;

  bool operator==(const Monomial& other) const { return factors_ == other.factors_; }

 private:
  std::vector<std::pair<uint32_t, uint32_t>> factors_;
};

// Graded order: lower total degree first; within a degree, the monomial whose
// dense exponent vector is lexicographically larger comes first (so x^2 sorts
// before xy before y^2).
struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

// Sparse multivariate polynomial with double coefficients over variables
// indexed 0..num_vars-1. Canonical: no exactly-zero coefficients, terms kept
// in MonomialOrder. Immutable in normal use; all operations return new values.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, double, MonomialOrder>;

  Polynomial() = default;  // zero polynomial over zero variables
  explicit Polynomial(uint32_t num_vars) : num_vars_(num_vars) {}

  static Polynomial constant(uint32_t num_vars, double c);
  static Polynomial variable(uint32_t num_vars, uint32_t index);

  uint32_t num_vars() const { return num_vars_; }
  bool is_zero() const { return terms_.empty(); }
  uint32_t degree() const;
  std::size_t term_count() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }
  double coefficient(const Monomial& m) const;

  // Accumulates c into the coefficient of m, dropping the term if the result
  // is exactly zero.
  void add_term(const Monomial& m, double c);

  double eval(std::span<const double> point) const;
  Polynomial derivative(uint32_t var) const;

  bool operator==(const Polynomial& other) const;

 private:
  uint32_t num_vars_ = 0;
  TermMap terms_;
};

Polynomial operator+(const Polynomial& p, const Polynomial& q);
Polynomial operator-(const Polynomial& p, const Polynomial& q);
Polynomial operator-(const Polynomial& p);
Polynomial operator*(const Polynomial& p, const Polynomial& q);
Polynomial operator*(double c, const Polynomial& p);

std::vector<Polynomial> gradient(const Polynomial& p);
std::vector<std::vector<Polynomial>> hessian(const Polynomial& p);

// Human-readable form, e.g. "2 - x^2 - 16*x*y - y^2". Uses x0, x1, ... when
// no names are given.
std::string to_string(const Polynomial& p, std::span<const std::string> names = {});

}  // namespace pmitame
