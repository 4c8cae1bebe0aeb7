#pragma once

#include <span>
#include <vector>

#include "pmitame/linalg.hpp"
#include "pmitame/poly.hpp"

namespace pmitame {

// Symmetric matrix of polynomials. The lower triangle is the single source of
// truth, so entry(i, j) and entry(j, i) return the same canonical Polynomial.
class PolyMatrix {
 public:
  PolyMatrix(int dim, uint32_t num_vars);

  int dim() const { return dim_; }
  uint32_t num_vars() const { return num_vars_; }

  const Polynomial& entry(int i, int j) const;
  void set_entry(int i, int j, Polynomial p);

  SymMatrix eval(std::span<const double> point) const;
  uint32_t max_entry_degree() const;

  // Stacks blocks along the diagonal; useful for folding scalar constraints
  // g_i(x) >= 0 into one matrix constraint as 1x1 blocks.
  static PolyMatrix block_diag(const std::vector<PolyMatrix>& blocks);

 private:
  std::size_t index(int i, int j) const;

  int dim_;
  uint32_t num_vars_;
  std::vector<Polynomial> lower_;  // row-major lower triangle
};

// Coefficients q_1..q_m of det(t*I - P) = t^m + sum_j (-1)^j q_j t^{m-j}.
// With this sign convention q_j is the j-th elementary symmetric function of
// the eigenvalues, and q_m = det P.
struct CharPolyCoeffs {
  std::vector<Polynomial> q;
};

// Faddeev-LeVerrier recursion over the polynomial ring. Refuses inputs with
// m * deg(P) > 64, where coefficient degrees become unmanageable.
CharPolyCoeffs charpoly(const PolyMatrix& p);

// For a real symmetric matrix all roots of the characteristic polynomial are
// real, so P(point) is PSD exactly when every q_j(point) is non-negative
// (sign rule for polynomials with all-real roots).
bool psd_by_descartes(const CharPolyCoeffs& qs, std::span<const double> point, double tol);

}  // namespace pmitame
