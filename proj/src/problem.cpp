#include "pmitame/problem.hpp"

#include <stdexcept>

namespace pmitame {

bool Box::contains(std::span<const double> point, double slack) const {
  if (point.size() != bounds.size()) return false;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (point[i] < bounds[i][0] - slack || point[i] > bounds[i][1] + slack) return false;
  }
  return true;
}

void Box::validate() const {
  for (const auto& [lo, hi] : bounds) {
    if (!(lo < hi)) throw std::invalid_argument("Box: lower bound must be below upper bound");
  }
}

Box Box::cube(std::size_t n, double lo, double hi) {
  Box b;
  b.bounds.assign(n, {lo, hi});
  return b;
}

void PmiProblem::validate() const {
  if (k < 0 || l <= 0) throw std::invalid_argument("PmiProblem: need l >= 1 y-variables");
  if (P.num_vars() != static_cast<uint32_t>(k + l)) {
    throw std::invalid_argument("PmiProblem: P variable count must be k + l");
  }
  if (b.num_vars() != static_cast<uint32_t>(k + l)) {
    throw std::invalid_argument("PmiProblem: objective variable count must be k + l");
  }
  for (const auto& [mono, coef] : b.terms()) {
    for (const auto& [var, exp] : mono.factors()) {
      if (var < static_cast<uint32_t>(k)) {
        throw std::invalid_argument("PmiProblem: objective must reference only y-block variables");
      }
    }
  }
  if (box) {
    box->validate();
    if (box->size() != static_cast<std::size_t>(k + l)) {
      throw std::invalid_argument("PmiProblem: box dimension mismatch");
    }
  }
}

Box PmiProblem::search_box() const {
  if (box) return *box;
  return Box::cube(static_cast<std::size_t>(k + l), -2.0, 2.0);
}

int svec_size(int m) { return m * (m + 1) / 2; }

int svec_index(int i, int j, int m) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= m) throw std::invalid_argument("svec_index: out of range");
  return i * m - i * (i - 1) / 2 + (j - i);
}

void MatrixVarProblem::validate() const {
  if (m <= 0) throw std::invalid_argument("MatrixVarProblem: dimension must be positive");
  if (q.num_vars() != static_cast<uint32_t>(svec_size(m))) {
    throw std::invalid_argument("MatrixVarProblem: Q must have m(m+1)/2 variables");
  }
  if (!trace_one) {
    throw std::invalid_argument("MatrixVarProblem: only the unit-trace form is supported");
  }
}

}  // namespace pmitame
