#include "pmitame/polymatrix.hpp"

#include <stdexcept>
#include <utility>

namespace pmitame {

PolyMatrix::PolyMatrix(int dim, uint32_t num_vars)
    : dim_(dim), num_vars_(num_vars) {
  if (dim <= 0) throw std::invalid_argument("PolyMatrix: dimension must be positive");
  lower_.assign(static_cast<std::size_t>(dim) * (dim + 1) / 2, Polynomial(num_vars));
}

std::size_t PolyMatrix::index(int i, int j) const {
  if (i < 0 || j < 0 || i >= dim_ || j >= dim_) {
    throw std::invalid_argument("PolyMatrix: index out of range");
  }
  if (i < j) std::swap(i, j);
  return static_cast<std::size_t>(i) * (i + 1) / 2 + j;
}

const Polynomial& PolyMatrix::entry(int i, int j) const { return lower_[index(i, j)]; }

void PolyMatrix::set_entry(int i, int j, Polynomial p) {
  if (p.num_vars() != num_vars_) {
    throw std::invalid_argument("PolyMatrix::set_entry: variable-space mismatch");
  }
  lower_[index(i, j)] = std::move(p);
}

SymMatrix PolyMatrix::eval(std::span<const double> point) const {
  if (point.size() != num_vars_) {
    throw std::invalid_argument("PolyMatrix::eval: point dimension mismatch");
  }
  SymMatrix out(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j <= i; ++j) out.set(i, j, entry(i, j).eval(point));
  return out;
}

uint32_t PolyMatrix::max_entry_degree() const {
  uint32_t d = 0;
  for (const auto& p : lower_) d = std::max(d, p.degree());
  return d;
}

PolyMatrix PolyMatrix::block_diag(const std::vector<PolyMatrix>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("block_diag: no blocks");
  const uint32_t n = blocks.front().num_vars();
  int dim = 0;
  for (const auto& b : blocks) {
    if (b.num_vars() != n) throw std::invalid_argument("block_diag: variable-space mismatch");
    dim += b.dim();
  }
  PolyMatrix out(dim, n);
  int off = 0;
  for (const auto& b : blocks) {
    for (int i = 0; i < b.dim(); ++i)
      for (int j = 0; j <= i; ++j) out.set_entry(off + i, off + j, b.entry(i, j));
    off += b.dim();
  }
  return out;
}

CharPolyCoeffs charpoly(const PolyMatrix& p) {
  const int m = p.dim();
  const uint32_t n = p.num_vars();
  if (static_cast<uint64_t>(m) * p.max_entry_degree() > 64) {
    throw std::domain_error(
        "charpoly: m * deg(P) exceeds 64; coefficient degrees would be unmanageable");
  }

  // M_1 = P, c_1 = tr M_1; M_{k+1} = P (M_k - c_k I), c_{k+1} = tr M_{k+1} / (k+1).
  // Then det(tI - P) = t^m - sum_k c_k t^{m-k}, so q_j = (-1)^{j+1} c_j.
  using Mat = std::vector<std::vector<Polynomial>>;
  auto zero_mat = [&] { return Mat(m, std::vector<Polynomial>(m, Polynomial(n))); };

  Mat mk = zero_mat();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) mk[i][j] = p.entry(i, j);

  CharPolyCoeffs out;
  out.q.reserve(m);
  std::vector<Polynomial> c;
  c.reserve(m);

  for (int k = 1; k <= m; ++k) {
    Polynomial trace(n);
    for (int i = 0; i < m; ++i) trace = trace + mk[i][i];
    c.push_back((1.0 / k) * trace);

    if (k == m) break;
    Mat shifted = mk;
    for (int i = 0; i < m; ++i) shifted[i][i] = shifted[i][i] - c.back();
    Mat next = zero_mat();
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        Polynomial s(n);
        for (int r = 0; r < m; ++r) s = s + p.entry(i, r) * shifted[r][j];
        next[i][j] = std::move(s);
      }
    }
    mk = std::move(next);
  }

  double sign = 1.0;
  for (int j = 0; j < m; ++j) {
    out.q.push_back(sign * c[j]);
    sign = -sign;
  }
  return out;
}

bool psd_by_descartes(const CharPolyCoeffs& qs, std::span<const double> point, double tol) {
  for (const auto& qj : qs.q) {
    if (qj.eval(point) < -tol) return false;
  }
  return true;
}

}  // namespace pmitame
