#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pmitame/problem.hpp"

namespace pmitame {

struct GridSpec {
  Box box;
  double h = 1e-2;           // step size
  double feas_tol = 1e-9;    // relative: accept lambda_min >= -feas_tol*(1+||A||_F)
  uint64_t cap = 100000000;  // refuse grids with more points than this

  void validate() const;
};

struct OracleResult {
  uint64_t feasible_count = 0;
  std::optional<std::vector<double>> best_point;
  double best_value = 0.0;  // meaningless when best_point is empty
  double h = 0.0;
};

// Exhaustive scan of the grid; feasibility decided by eigenvalues of the
// evaluated matrix (deliberately independent of the Descartes production
// path). Argmin ties within 1e-12 resolve to the lexicographically smallest
// point. Returns an empty result when no grid point is feasible.
OracleResult grid_solve(const PmiProblem& prob, const GridSpec& spec);

// A boxed objective with an optional feasibility predicate, gridded at step
// h: the common ground for minimizer-representation checks.
struct GridProblem {
  std::function<double(std::span<const double>)> objective;
  std::function<bool(std::span<const double>)> feasible;  // may be null: all feasible
  Box box;
  double h = 1e-2;
};

GridProblem as_grid_problem(const PmiProblem& prob, const GridSpec& spec);

struct VerifyReport {
  bool pass = false;
  double max_violation = 0.0;
  std::vector<double> witness;  // argmax violation
};

// Samples N points in the box and checks |f(z) - g(h_map(z))| <=
// 1e-9 * (1 + |f(z)|), the pointwise representation identity.
VerifyReport verify_representation(
    const std::function<double(std::span<const double>)>& f,
    const std::function<double(std::span<const double>)>& g,
    const std::function<std::vector<double>(std::span<const double>)>& h_map,
    const Box& sample_box, int samples, uint64_t seed);

struct MinimizerReport {
  bool pass = false;
  std::vector<double> argmin_f;
  std::vector<double> mapped_argmin_g;
  double max_coord_gap = 0.0;  // over the best matching pair
};

// Grid argmins of both problems; passes when some pair of near-minimal points
// (values within 1e-12 of each side's minimum) satisfies
// |argmin_f - h_map(argmin_g)| <= tol per coordinate.
MinimizerReport verify_minimizer_representation(
    const GridProblem& f, const GridProblem& g,
    const std::function<std::vector<double>(std::span<const double>)>& h_map,
    double tol_per_coord);

}  // namespace pmitame
