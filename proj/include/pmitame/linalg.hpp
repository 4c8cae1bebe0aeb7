#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace pmitame {

struct PosDefViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense real symmetric matrix. set() writes both triangles, so the symmetry
// invariant holds exactly at all times.
class SymMatrix {
 public:
  explicit SymMatrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim, 0.0) {
    if (dim <= 0) throw std::invalid_argument("SymMatrix: dimension must be positive");
  }

  static SymMatrix identity(int dim);

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
  void set(int i, int j, double v) {
    a_[static_cast<std::size_t>(i) * dim_ + j] = v;
    a_[static_cast<std::size_t>(j) * dim_ + i] = v;
  }

  double trace() const;
  double frobenius_norm() const;
  bool all_finite() const;

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator*=(double c);

 private:
  int dim_;
  std::vector<double> a_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double c, SymMatrix a);

struct EigenDecomposition {
  std::vector<double> values;               // ascending
  std::vector<std::vector<double>> vectors; // vectors[k] is the eigenvector of values[k]
};

// Cyclic Jacobi rotations; eigenvalues ascending.
std::vector<double> eigvals_sym(const SymMatrix& a);
EigenDecomposition eig_sym(const SymMatrix& a);

// True iff lambda_min(a) >= -tol.
bool is_psd(const SymMatrix& a, double tol);
// Default tolerance: 1e-9 * (1 + ||a||_F).
bool is_psd_default(const SymMatrix& a);

// Lower-triangular Cholesky factor; nullopt when the matrix is not
// numerically positive definite.
std::optional<std::vector<double>> cholesky(const SymMatrix& a);

// log det via Cholesky; nullopt signals a positive-definiteness violation
// (barrier callers map this to +infinity).
std::optional<double> logdet_chol(const SymMatrix& a);

// Inverse of a symmetric positive definite matrix. Throws PosDefViolation.
SymMatrix inverse_spd(const SymMatrix& a);

// Solves a*x = rhs for symmetric positive definite a; nullopt when the
// Cholesky factorization fails.
std::optional<std::vector<double>> solve_spd(const SymMatrix& a, std::span<const double> rhs);

// tr(a*b) for symmetric a, b.
double trace_product(const SymMatrix& a, const SymMatrix& b);

}  // namespace pmitame
