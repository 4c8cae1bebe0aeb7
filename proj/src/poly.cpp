#include "pmitame/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pmitame {

namespace {

double int_pow(double base, uint32_t e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1u) r *= base;
    base *= base;
    e >>= 1u;
  }
  return r;
}

}  // namespace

Monomial::Monomial(std::vector<std::pair<uint32_t, uint32_t>> factors)
    : factors_(std::move(factors)) {
  std::sort(factors_.begin(), factors_.end());
  // merge duplicates, drop zero exponents
  std::vector<std::pair<uint32_t, uint32_t>> merged;
  for (const auto& [v, e] : factors_) {
    if (e == 0) continue;
    if (!merged.empty() && merged.back().first == v) {
      merged.back().second += e;
    } else {
      merged.emplace_back(v, e);
    }
  }
  factors_ = std::move(merged);
}

Monomial Monomial::var(uint32_t index, uint32_t power) {
  Monomial m;
  if (power > 0) m.factors_.emplace_back(index, power);
  return m;
}

uint32_t Monomial::degree() const {
  uint32_t d = 0;
  for (const auto& [v, e] : factors_) d += e;
  return d;
}

uint32_t Monomial::exponent(uint32_t var) const {
  for (const auto& [v, e] : factors_) {
    if (v == var) return e;
  }
  return 0;
}

uint32_t Monomial::min_vars() const {
  return factors_.empty() ? 0 : factors_.back().first + 1;
}

Monomial Monomial::times(const Monomial& other) const {
  std::vector<std::pair<uint32_t, uint32_t>> out;
  out.reserve(factors_.size() + other.factors_.size());
  auto a = factors_.begin();
  auto b = other.factors_.begin();
  while (a != factors_.end() && b != other.factors_.end()) {
    if (a->first < b->first) {
      out.push_back(*a++);
    } else if (b->first < a->first) {
      out.push_back(*b++);
    } else {
      out.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  out.insert(out.end(), a, factors_.end());
  out.insert(out.end(), b, other.factors_.end());
  Monomial m;
  m.factors_ = std::move(out);
  return m;
}

double Monomial::eval(std::span<const double> point) const {
  double r = 1.0;
  for (const auto& [v, e] : factors_) r *= int_pow(point[v], e);
  return r;
}

bool MonomialOrder::operator()(const Monomial& a, const Monomial& b) const {
  const uint32_t da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  // Dense lexicographic comparison by walking the sparse factor lists; the
  // monomial with the larger leading exponent vector sorts first.
  auto ia = a.factors().begin();
  auto ib = b.factors().begin();
  while (ia != a.factors().end() || ib != b.factors().end()) {
    const uint32_t va = ia != a.factors().end() ? ia->first : UINT32_MAX;
    const uint32_t vb = ib != b.factors().end() ? ib->first : UINT32_MAX;
    if (va < vb) return true;   // a has a positive exponent where b has 0
    if (vb < va) return false;
    if (ia->second != ib->second) return ia->second > ib->second;
    ++ia;
    ++ib;
  }
  return false;
}

Polynomial Polynomial::constant(uint32_t num_vars, double c) {
  Polynomial p(num_vars);
  p.add_term(Monomial::one(), c);
  return p;
}

Polynomial Polynomial::variable(uint32_t num_vars, uint32_t index) {
  if (index >= num_vars) throw std::invalid_argument("Polynomial::variable: index out of range");
  Polynomial p(num_vars);
  p.add_term(Monomial::var(index), 1.0);
  return p;
}

uint32_t Polynomial::degree() const {
  return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Monomial& m, double c) {
  if (c == 0.0) return;
  if (m.min_vars() > num_vars_) {
    throw std::invalid_argument("Polynomial::add_term: monomial references unknown variable");
  }
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::eval(std::span<const double> point) const {
  if (point.size() != num_vars_) {
    throw std::invalid_argument("Polynomial::eval: point dimension mismatch");
  }
  double s = 0.0;
  for (const auto& [m, c] : terms_) s += c * m.eval(point);
  return s;
}

Polynomial Polynomial::derivative(uint32_t var) const {
  Polynomial out(num_vars_);
  for (const auto& [m, c] : terms_) {
    const uint32_t e = m.exponent(var);
    if (e == 0) continue;
    std::vector<std::pair<uint32_t, uint32_t>> f;
    for (const auto& [v, k] : m.factors()) {
      if (v == var) {
        if (k > 1) f.emplace_back(v, k - 1);
      } else {
        f.emplace_back(v, k);
      }
    }
    Monomial dm;
    dm = Monomial(std::move(f));
    out.add_term(dm, c * static_cast<double>(e));
  }
  return out;
}

bool Polynomial::operator==(const Polynomial& other) const {
  return num_vars_ == other.num_vars_ &&
         std::equal(terms_.begin(), terms_.end(), other.terms_.begin(), other.terms_.end(),
                    [](const auto& a, const auto& b) {
                      return a.first == b.first && a.second == b.second;
                    }) &&
         terms_.size() == other.terms_.size();
}

namespace {

void check_same_space(const Polynomial& p, const Polynomial& q) {
  if (p.num_vars() != q.num_vars()) {
    throw std::invalid_argument("polynomial operation: variable-space mismatch");
  }
}

}  // namespace

Polynomial operator+(const Polynomial& p, const Polynomial& q) {
  check_same_space(p, q);
  Polynomial out = p;
  for (const auto& [m, c] : q.terms()) out.add_term(m, c);
  return out;
}

Polynomial operator-(const Polynomial& p, const Polynomial& q) {
  check_same_space(p, q);
  Polynomial out = p;
  for (const auto& [m, c] : q.terms()) out.add_term(m, -c);
  return out;
}

Polynomial operator-(const Polynomial& p) {
  Polynomial out(p.num_vars());
  for (const auto& [m, c] : p.terms()) out.add_term(m, -c);
  return out;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  check_same_space(p, q);
  Polynomial out(p.num_vars());
  for (const auto& [mp, cp] : p.terms()) {
    for (const auto& [mq, cq] : q.terms()) {
      out.add_term(mp.times(mq), cp * cq);
    }
  }
  return out;
}

Polynomial operator*(double c, const Polynomial& p) {
  Polynomial out(p.num_vars());
  for (const auto& [m, k] : p.terms()) out.add_term(m, c * k);
  return out;
}

std::vector<Polynomial> gradient(const Polynomial& p) {
  std::vector<Polynomial> g;
  g.reserve(p.num_vars());
  for (uint32_t i = 0; i < p.num_vars(); ++i) g.push_back(p.derivative(i));
  return g;
}

std::vector<std::vector<Polynomial>> hessian(const Polynomial& p) {
  const uint32_t n = p.num_vars();
  std::vector<std::vector<Polynomial>> h(n, std::vector<Polynomial>(n, Polynomial(n)));
  for (uint32_t i = 0; i < n; ++i) {
    const Polynomial di = p.derivative(i);
    for (uint32_t j = i; j < n; ++j) {
      Polynomial dij = di.derivative(j);
      h[j][i] = dij;
      h[i][j] = std::move(dij);
    }
  }
  return h;
}

std::string to_string(const Polynomial& p, std::span<const std::string> names) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    const double a = std::abs(c);
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    const bool unit = (a == 1.0) && !m.factors().empty();
    if (!unit) os << a;
    bool star = !unit;
    for (const auto& [v, e] : m.factors()) {
      if (star) os << "*";
      star = true;
      if (v < names.size()) {
        os << names[v];
      } else {
        os << "x" << v;
      }
      if (e > 1) os << "^" << e;
    }
  }
  return os.str();
}

}  // namespace pmitame
