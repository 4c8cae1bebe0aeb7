#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pmitame/problem.hpp"
#include "pmitame/rational.hpp"
#include "pmitame/repr.hpp"

namespace pmitame {

// Geometric weight schedule from initial towards final. The factor direction
// must match (factor > 1 ascending, < 1 descending); the final weight is
// always included as the last stage.
struct Schedule {
  double initial = 1.0;
  double factor = 0.2;
  double final_weight = 1e-6;

  std::vector<double> weights() const;
};

struct SolveConfig {
  int max_iters = 600;
  double grad_tol = 1e-8;
  double armijo_c = 1e-4;       // sufficient-decrease constant, in (0, 1)
  double shrink_beta = 0.5;     // backtracking factor, in (0, 1)
  double step_init = 0.25;      // initial trial step length for gradient descent
  std::optional<Schedule> schedule;  // representation default when unset
  int restarts = 16;
  uint64_t seed = 0;
  std::optional<Box> box;       // overrides the problem box
  double feas_tol = 1e-7;       // PSD tolerance for the reported feasible flag
  bool use_newton = false;      // inner solver for continuation stages
  int max_start_tries = 64;     // resampling attempts for a finite start value

  // Factorization path.
  bool rank_escalation = true;
  double certificate_tol = 1e-7;

  // Bound/bisection path.
  double value_tol = 1e-3;      // final bracket width
  double merit_tol = 1e-10;     // merit level that counts as "non-empty"
  int emptiness_restarts = 32;
  std::optional<std::array<double, 2>> bracket;  // explicit [lo, hi] override

  // det^r power.
  Rational detr_power = Rational::of(1, 2);

  std::optional<double> stop_value;  // inner solves stop once value <= this

  void validate() const;
};

struct TrajectoryPoint {
  int stage = 0;
  double weight = 0.0;
  int iter = 0;
  double value = 0.0;
  double grad_norm = 0.0;
  std::vector<double> point;
};

struct InnerResult {
  std::vector<double> point;
  double value = 0.0;
  double grad_norm = 0.0;
  int iters = 0;
  std::vector<TrajectoryPoint> trajectory;  // start plus every accepted iterate
};

// Armijo-backtracking gradient descent along the normalized negative
// gradient. Terminates on the gradient tolerance, the iteration cap, a failed
// line search, or the first accepted step that leaves the box.
InnerResult minimize_gd(const Objective& obj, std::span<const double> start,
                        const SolveConfig& cfg, int stage = 0, double weight = 0.0);

// Damped Newton with Armijo line search along the Newton direction, falling
// back to steepest descent whenever the Hessian is not positive definite.
// Uses the objective's exact Hessian when available, otherwise central finite
// differences of the gradient.
InnerResult minimize_newton(const Objective& obj, std::span<const double> start,
                            const SolveConfig& cfg, int stage = 0, double weight = 0.0);

enum class SolveStatus { success, no_feasible_point, unbounded };

struct BisectionStep {
  double lo = 0.0;
  double hi = 0.0;
  double mid = 0.0;
  bool nonempty = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::no_feasible_point;
  std::string rep;
  std::vector<double> best_point;
  double best_value = 0.0;  // objective value at the best point
  bool feasible = false;    // recomputed from the problem, never cached
  int iterations = 0;       // total inner iterations across stages/restarts
  std::vector<TrajectoryPoint> trajectory;  // first restart's chain
  std::optional<FactorizationState> certificate;
  std::vector<BisectionStep> bisection_history;
  std::optional<std::array<double, 2>> bhat_interval;
};

// Penalty/barrier continuation with multistart: every accepted iterate is a
// candidate, and the best box-interior point that passes the PSD feasibility
// check (tolerance cfg.feas_tol) by objective value wins.
SolveResult continuation_solve(const PmiProblem& prob, ReprKind kind, const SolveConfig& cfg);

// Projected gradient on the Frobenius unit sphere, with the stationarity
// certificate evaluated at the result and optional escalation to rank+1 when
// the certificate fails.
SolveResult solve_factorized(const MatrixVarProblem& prob, int rank, const SolveConfig& cfg);

// Bracketed midpoint bisection on the bound bhat, deciding emptiness of
// {P >= 0} intersect {b <= bhat} by multistart descent on the feasibility
// merit. Maintains: intersection empty at lo, non-empty at hi.
SolveResult bisection_solve(const PmiProblem& prob, const SolveConfig& cfg);

// CSV with header stage,weight,iter,value,grad_norm,<one column per variable>.
void write_trajectory_csv(std::ostream& os, const SolveResult& result,
                          std::span<const std::string> names);

}  // namespace pmitame
