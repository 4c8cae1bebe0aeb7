#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "pmitame/problem.hpp"
#include "pmitame/rational.hpp"
#include "pmitame/tamecheck.hpp"

namespace pmitame {

enum class ReprKind { indicator, charpoly, factorization, logdet, detr, bound };

// Exact selector strings used by the CLI and file formats.
const char* repr_id(ReprKind kind);
std::optional<ReprKind> repr_from_id(std::string_view id);

// Unconstrained objective with value/gradient (and optionally an exact
// Hessian). Implementations are immutable closures over immutable problem
// data; value/gradient are pure and safe to call concurrently.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual int dim() const = 0;
  virtual ReprKind kind() const = 0;
  virtual double weight() const = 0;

  // May return +infinity where the representation declares it (barriers
  // outside the positive definite cone).
  virtual double value(std::span<const double> x) const = 0;
  // Defined wherever value is finite; callers must not request it elsewhere.
  virtual std::vector<double> gradient(std::span<const double> x) const = 0;

  virtual bool has_hessian() const { return false; }
  virtual SymMatrix hessian(std::span<const double> x) const;

  virtual bool smooth() const { return true; }
};

// b(y) + lambda * [P(x,y) not PSD]. Evaluation-only: non-smooth, excluded
// from descent solvers; the reported gradient is the gradient of b, valid
// away from the feasibility boundary.
std::unique_ptr<Objective> indicator_lagrangian(const PmiProblem& prob, double lambda,
                                                double psd_tol = 1e-9);

// b(y) - lambda * prod_j q_j(x,y), smooth everywhere, exact gradient and
// Hessian via the product rule over the characteristic-polynomial
// coefficients.
std::unique_ptr<Objective> charpoly_repr(const PmiProblem& prob, double lambda);

// b(y) + mu * (-log det P) on P > 0, +infinity elsewhere.
std::unique_ptr<Objective> logdet_repr(const PmiProblem& prob, double mu);

// b(y) + mu * (-det(P)^r) on P > 0, +infinity elsewhere; det^r computed as
// exp(r * log det) through the Cholesky factor to avoid overflow.
std::unique_ptr<Objective> detr_repr(const PmiProblem& prob, double mu, Rational r);

// Q(v^T v) over factors v in R^{rank x m}, flattened row-major. The unit
// trace constraint Tr(v^T v) = ||v||_F^2 = 1 is handled by the solver via
// projection onto the Frobenius unit sphere, not by this objective.
std::unique_ptr<Objective> factorization_repr(const MatrixVarProblem& prob, int rank);

// sum_j max(0, -q_j)^2 + max(0, b - bhat)^2: a C^1 merit that vanishes
// exactly on {P >= 0} intersected with {b <= bhat}. Pass bhat = +infinity to
// drop the bound term.
std::unique_ptr<Objective> bound_feasibility_merit(const PmiProblem& prob, double bhat);

// Stationarity certificate for the factorized problem at unit-norm v:
// with G the symmetric gradient of Q at X = v^T v, the multiplier forced by
// stationarity under Tr X = 1 is lambda = tr(G X), and S = G - lambda I must
// be PSD with S v^T = 0 at a global optimum of the lifted problem.
struct FactorizationState {
  std::vector<double> v;  // rank x m, row-major
  int rank = 0;
  int m = 0;
  double multiplier = 0.0;
  double smin = 0.0;      // lambda_min(S)
  double residual = 0.0;  // ||S v^T||_F

  bool certified(double tol) const { return smin >= -tol && residual <= tol; }
};

FactorizationState factorization_certificate(const MatrixVarProblem& prob,
                                             std::span<const double> v, int rank);

// Q composed with X = v^T v, expanded as a polynomial in the rank*m entries
// of v.
Polynomial factorization_value_polynomial(const MatrixVarProblem& prob, int rank);

// Definability class of each representation's defining formula. The charpoly,
// factorization, bound and indicator objectives are built from polynomials
// and piecewise-polynomial hinges (semialgebraic graphs); logdet and det^r
// need exp/log.
StructureLabel classify_objective(ReprKind kind);

// The actual defining expression for the representations whose formula fits
// the tamecheck grammar (charpoly, logdet, detr), built from the problem's
// own characteristic-polynomial coefficients.
ExprPtr objective_recipe(const PmiProblem& prob, ReprKind kind, double weight);

}  // namespace pmitame
