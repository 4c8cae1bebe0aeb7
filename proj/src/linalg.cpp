#include "pmitame/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pmitame {

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

bool SymMatrix::all_finite() const {
  return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  if (dim_ != other.dim_) throw std::invalid_argument("SymMatrix: dimension mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double c) {
  for (double& v : a_) v *= c;
  return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) {
  a += b;
  return a;
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  SymMatrix out = a;
  out += -1.0 * b;
  return out;
}

SymMatrix operator*(double c, SymMatrix a) {
  a *= c;
  return a;
}

namespace {

// One sweep-style cyclic Jacobi diagonalization. Rotations are applied until
// the off-diagonal mass is negligible relative to the matrix norm.
void jacobi(const SymMatrix& input, std::vector<double>& values,
            std::vector<std::vector<double>>* vectors) {
  const int n = input.dim();
  if (!input.all_finite()) throw std::invalid_argument("eigvals_sym: non-finite input");

  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = input(i, j);

  std::vector<std::vector<double>> v;
  if (vectors) {
    v.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) v[i][i] = 1.0;
  }

  const double norm = std::max(input.frobenius_norm(), 1e-300);
  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (std::sqrt(2.0 * off) <= 1e-14 * norm) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p][q];
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = 0.5 * std::atan2(2.0 * apq, a[q][q] - a[p][p]);
        const double c = std::cos(theta), s = std::sin(theta);

        const double app = a[p][p], aqq = a[q][q];
        a[p][p] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
        a[q][q] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
        a[p][q] = a[q][p] = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a[r][p], arq = a[r][q];
          a[r][p] = a[p][r] = c * arp - s * arq;
          a[r][q] = a[q][r] = s * arp + c * arq;
        }
        if (vectors) {
          for (int r = 0; r < n; ++r) {
            const double vrp = v[r][p], vrq = v[r][q];
            v[r][p] = c * vrp - s * vrq;
            v[r][q] = s * vrp + c * vrq;
          }
        }
      }
    }
  }

  values.resize(n);
  for (int i = 0; i < n; ++i) values[i] = a[i][i];
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return values[i] < values[j]; });

  std::vector<double> sorted(n);
  for (int k = 0; k < n; ++k) sorted[k] = values[order[k]];
  values = std::move(sorted);

  if (vectors) {
    vectors->assign(n, std::vector<double>(n));
    for (int k = 0; k < n; ++k)
      for (int r = 0; r < n; ++r) (*vectors)[k][r] = v[r][order[k]];
  }
}

}  // namespace

std::vector<double> eigvals_sym(const SymMatrix& a) {
  std::vector<double> values;
  jacobi(a, values, nullptr);
  return values;
}

EigenDecomposition eig_sym(const SymMatrix& a) {
  EigenDecomposition d;
  jacobi(a, d.values, &d.vectors);
  return d;
}

bool is_psd(const SymMatrix& a, double tol) {
  if (tol < 0) throw std::invalid_argument("is_psd: negative tolerance");
  return eigvals_sym(a).front() >= -tol;
}

bool is_psd_default(const SymMatrix& a) {
  return is_psd(a, 1e-9 * (1.0 + a.frobenius_norm()));
}

std::optional<std::vector<double>> cholesky(const SymMatrix& a) {
  const int n = a.dim();
  std::vector<double> l(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
    const double ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / ljj;
    }
  }
  return l;
}

std::optional<double> logdet_chol(const SymMatrix& a) {
  auto l = cholesky(a);
  if (!l) return std::nullopt;
  const int n = a.dim();
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::log((*l)[static_cast<std::size_t>(i) * n + i]);
  return 2.0 * s;
}

namespace {

// Solves L y = b then L^T x = y.
std::vector<double> chol_solve(const std::vector<double>& l, int n, std::span<const double> b) {
  std::vector<double> x(b.begin(), b.end());
  for (int i = 0; i < n; ++i) {
    double s = x[i];
    for (int k = 0; k < i; ++k) s -= l[static_cast<std::size_t>(i) * n + k] * x[k];
    x[i] = s / l[static_cast<std::size_t>(i) * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k < n; ++k) s -= l[static_cast<std::size_t>(k) * n + i] * x[k];
    x[i] = s / l[static_cast<std::size_t>(i) * n + i];
  }
  return x;
}

}  // namespace

SymMatrix inverse_spd(const SymMatrix& a) {
  auto l = cholesky(a);
  if (!l) throw PosDefViolation("inverse_spd: matrix is not positive definite");
  const int n = a.dim();
  SymMatrix inv(n);
  std::vector<double> e(n, 0.0);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    const std::vector<double> col = chol_solve(*l, n, e);
    e[j] = 0.0;
    for (int i = j; i < n; ++i) inv.set(i, j, col[i]);
  }
  return inv;
}

std::optional<std::vector<double>> solve_spd(const SymMatrix& a, std::span<const double> rhs) {
  auto l = cholesky(a);
  if (!l) return std::nullopt;
  return chol_solve(*l, a.dim(), rhs);
}

double trace_product(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_product: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) s += a(i, j) * b(j, i);
  return s;
}

}  // namespace pmitame
