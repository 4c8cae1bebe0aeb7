#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "pmitame/oracle.hpp"
#include "pmitame/solver.hpp"
#include "support/test_support.hpp"

using namespace pmitame;
using namespace pmitame::testing;

namespace {

// Ad-hoc objective from lambdas, for driver tests.
class FunctionObjective final : public Objective {
 public:
  FunctionObjective(int dim, std::function<double(std::span<const double>)> f,
                    std::function<std::vector<double>(std::span<const double>)> g)
      : dim_(dim), f_(std::move(f)), g_(std::move(g)) {}

  int dim() const override { return dim_; }
  ReprKind kind() const override { return ReprKind::charpoly; }
  double weight() const override { return 0.0; }
  double value(std::span<const double> x) const override { return f_(x); }
  std::vector<double> gradient(std::span<const double> x) const override { return g_(x); }

 private:
  int dim_;
  std::function<double(std::span<const double>)> f_;
  std::function<std::vector<double>(std::span<const double>)> g_;
};

MatrixVarProblem diag_trace_objective(std::vector<double> diag) {
  MatrixVarProblem prob;
  prob.m = static_cast<int>(diag.size());
  Polynomial q(static_cast<uint32_t>(svec_size(prob.m)));
  for (int i = 0; i < prob.m; ++i) {
    q.add_term(Monomial::var(static_cast<uint32_t>(svec_index(i, i, prob.m))), diag[i]);
  }
  prob.q = q;
  return prob;
}

}  // namespace

TEST_CASE("gradient descent on a strongly convex scalar") {
  FunctionObjective quad(
      1, [](std::span<const double> x) { return x[0] * x[0]; },
      [](std::span<const double> x) { return std::vector<double>{2.0 * x[0]}; });
  SolveConfig cfg;
  cfg.max_iters = 2000;
  const InnerResult res = minimize_gd(quad, std::vector<double>{1.0}, cfg);
  CHECK(std::abs(res.point[0]) < 1e-6);

  // Constant objective: zero gradient at the start, nothing moves.
  FunctionObjective flat(
      2, [](std::span<const double>) { return 3.5; },
      [](std::span<const double>) { return std::vector<double>{0.0, 0.0}; });
  const InnerResult still = minimize_gd(flat, std::vector<double>{0.4, -0.2}, cfg);
  CHECK(still.point == std::vector<double>{0.4, -0.2});
  CHECK(still.iters == 0);
}

TEST_CASE("gradient descent finds the barrier center") {
  const PmiProblem prob = example1();
  const auto obj = logdet_repr(prob, 1.0);
  SolveConfig cfg;
  cfg.max_iters = 5000;
  cfg.grad_tol = 1e-8;
  const InnerResult res = minimize_gd(*obj, std::vector<double>{0.0, 0.0}, cfg);
  CHECK(res.grad_norm <= 1e-8);

  // Independent check: dense grid argmin of the same mu = 1 objective.
  double best = 1e300;
  std::vector<double> arg{0.0, 0.0};
  for (double x = -1.2; x <= 1.2; x += 4e-3) {
    for (double y = -1.2; y <= 1.2; y += 4e-3) {
      const double v = obj->value(std::vector<double>{x, y});
      if (v < best) {
        best = v;
        arg = {x, y};
      }
    }
  }
  CHECK(std::abs(res.point[0] - arg[0]) < 1e-2);
  CHECK(std::abs(res.point[1] - arg[1]) < 1e-2);
}

TEST_CASE("newton solves a quadratic in two steps") {
  FunctionObjective quad(
      1, [](std::span<const double> x) { return (x[0] - 3.0) * (x[0] - 3.0); },
      [](std::span<const double> x) { return std::vector<double>{2.0 * (x[0] - 3.0)}; });
  SolveConfig cfg;
  const InnerResult res = minimize_newton(quad, std::vector<double>{0.0}, cfg);
  CHECK(res.iters <= 2);
  CHECK(res.point[0] == doctest::Approx(3.0));
}

TEST_CASE("newton reaches a stationary point of the charpoly objective") {
  const PmiProblem prob = example1();
  const auto obj = charpoly_repr(prob, 0.45);
  SolveConfig cfg;
  cfg.max_iters = 4000;
  cfg.box = Box::cube(2, -4.0, 4.0);
  const InnerResult res = minimize_newton(*obj, std::vector<double>{0.2, -0.2}, cfg);
  if (res.grad_norm <= 1e-8) {
    const auto fd = fd_gradient(*obj, res.point);
    for (double gi : fd) CHECK(std::abs(gi) < 1e-4);
  } else {
    // Ended on the box; still must be a monotone descent run.
    CHECK(res.value <= obj->value(std::vector<double>{0.2, -0.2}));
  }
}

TEST_CASE("newton falls back to descent on an indefinite saddle") {
  FunctionObjective saddle(
      2, [](std::span<const double> x) { return x[0] * x[0] - x[1] * x[1]; },
      [](std::span<const double> x) {
        return std::vector<double>{2.0 * x[0], -2.0 * x[1]};
      });
  SolveConfig cfg;
  cfg.max_iters = 200;
  cfg.box = Box::cube(2, -3.0, 3.0);
  const InnerResult res = minimize_newton(saddle, std::vector<double>{1.0, 1.0}, cfg);
  CHECK(res.value <= 0.0);  // moved off the start downhill, no crash
}

TEST_CASE("armijo keeps trajectories monotone") {
  const PmiProblem prob = example1();
  const auto obj = charpoly_repr(prob, 0.05);
  SolveConfig cfg;
  cfg.box = prob.search_box();
  for (int r = 0; r < 5; ++r) {
    const auto start = random_point(2, -1.0, 1.0, 97, r);
    if (!std::isfinite(obj->value(start))) continue;
    const InnerResult res = minimize_gd(*obj, start, cfg);
    for (std::size_t i = 1; i < res.trajectory.size(); ++i) {
      CHECK(res.trajectory[i].value <= res.trajectory[i - 1].value);
    }
  }
}

TEST_CASE("infeasible barrier start is rejected") {
  const PmiProblem prob = example1();
  const auto obj = logdet_repr(prob, 1.0);
  SolveConfig cfg;
  CHECK_THROWS_AS(minimize_gd(*obj, std::vector<double>{0.0, -1.5}, cfg), std::domain_error);
}

TEST_CASE("the non-smooth indicator is excluded from descent") {
  const PmiProblem prob = example1();
  const auto obj = indicator_lagrangian(prob, 10.0);
  SolveConfig cfg;
  CHECK_THROWS_AS(minimize_gd(*obj, std::vector<double>{0.0, 0.0}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(minimize_newton(*obj, std::vector<double>{0.0, 0.0}, cfg),
                  std::invalid_argument);
}

TEST_CASE("continuation with the barrier reproduces the boundary minimum") {
  const PmiProblem prob = example1();
  SolveConfig cfg;
  cfg.restarts = 8;
  cfg.seed = 7;
  cfg.use_newton = true;
  const SolveResult res = continuation_solve(prob, ReprKind::logdet, cfg);
  REQUIRE(res.status == SolveStatus::success);
  CHECK(std::abs(res.best_value - (-1.0)) < 1e-2);
  CHECK(std::abs(res.best_point[0]) < 1e-2);
  CHECK(std::abs(res.best_point[1] + 1.0) < 1e-2);
  CHECK(res.feasible);
}

TEST_CASE("continuation on the trivial interval problem") {
  const PmiProblem prob = interval1d();
  SolveConfig cfg;
  cfg.restarts = 4;
  cfg.seed = 3;
  cfg.use_newton = true;
  const SolveResult res = continuation_solve(prob, ReprKind::logdet, cfg);
  REQUIRE(res.status == SolveStatus::success);
  CHECK(std::abs(res.best_value - (-1.0)) < 1e-2);

  const SolveResult dres = continuation_solve(prob, ReprKind::detr, cfg);
  REQUIRE(dres.status == SolveStatus::success);
  CHECK(std::abs(dres.best_value - (-1.0)) < 5e-2);
}

TEST_CASE("continuation with the charpoly penalty keeps a verified feasible point") {
  const PmiProblem prob = example1();
  SolveConfig cfg;
  cfg.restarts = 16;
  cfg.seed = 1;
  cfg.step_init = 0.01;
  const SolveResult res = continuation_solve(prob, ReprKind::charpoly, cfg);
  REQUIRE(res.status == SolveStatus::success);
  CHECK(res.best_value <= -0.95);
  CHECK(res.feasible);
  CHECK(is_psd(prob.P.eval(res.best_point), 1e-7));
}

TEST_CASE("continuation reports when nothing feasible exists") {
  const PmiProblem prob = infeasible1d();
  SolveConfig cfg;
  cfg.restarts = 4;
  cfg.seed = 5;
  const SolveResult res = continuation_solve(prob, ReprKind::charpoly, cfg);
  CHECK(res.status == SolveStatus::no_feasible_point);
}

TEST_CASE("identical configurations give bit-identical trajectories") {
  const PmiProblem prob = example1();
  SolveConfig cfg;
  cfg.restarts = 4;
  cfg.seed = 11;
  cfg.use_newton = true;
  const SolveResult a = continuation_solve(prob, ReprKind::logdet, cfg);
  const SolveResult b = continuation_solve(prob, ReprKind::logdet, cfg);
  REQUIRE(a.trajectory.size() == b.trajectory.size());
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    CHECK(a.trajectory[i].value == b.trajectory[i].value);
    CHECK(a.trajectory[i].point == b.trajectory[i].point);
  }
  CHECK(a.best_point == b.best_point);
}

TEST_CASE("factorized solve on linear objectives") {
  SolveConfig cfg;
  cfg.seed = 13;
  cfg.restarts = 6;
  cfg.grad_tol = 1e-10;
  cfg.max_iters = 3000;

  const SolveResult res = solve_factorized(diag_trace_objective({1.0, 2.0}), 1, cfg);
  REQUIRE(res.status == SolveStatus::success);
  CHECK(res.best_value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(std::abs(res.best_point[0]) - 1.0) < 1e-4);
  REQUIRE(res.certificate.has_value());
  CHECK(res.certificate->certified(1e-7));
  CHECK(res.certificate->smin == doctest::Approx(0.0).epsilon(1e-6));

  const SolveResult swapped = solve_factorized(diag_trace_objective({2.0, 1.0}), 1, cfg);
  CHECK(swapped.best_value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(std::abs(swapped.best_point[1]) - 1.0) < 1e-4);
}

TEST_CASE("factorized solve reaches a mixed-rank optimum") {
  // Q(X) = (tr(diag(1,2) X) - 1.5)^2: optimum 0 needs a mixed spectrum.
  MatrixVarProblem prob;
  prob.m = 2;
  Polynomial lin(3);
  lin.add_term(Monomial::var(0), 1.0);
  lin.add_term(Monomial::var(2), 2.0);
  lin.add_term(Monomial::one(), -1.5);
  prob.q = lin * lin;

  SolveConfig cfg;
  cfg.seed = 17;
  cfg.restarts = 6;
  const SolveResult res = solve_factorized(prob, 2, cfg);
  REQUIRE(res.status == SolveStatus::success);
  CHECK(res.best_value == doctest::Approx(0.0).epsilon(1e-8));
  REQUIRE(res.certificate.has_value());
  CHECK(res.certificate->certified(1e-6));

  // Grid oracle over the 2x2 unit-trace PSD cone X = [[a, c], [c, 1-a]]; the
  // objective only sees the diagonal, so scanning a suffices.
  double grid_best = 1e300;
  for (double a = 0.0; a <= 1.0; a += 1e-4) {
    const double t = a + 2.0 * (1.0 - a);
    grid_best = std::min(grid_best, (t - 1.5) * (t - 1.5));
  }
  CHECK(res.best_value <= grid_best + 1e-3);
}

TEST_CASE("bisection brackets the optimum of the planar instance") {
  const PmiProblem prob = example1();
  SolveConfig cfg;
  cfg.seed = 19;
  cfg.bracket = {{-2.0, 0.0}};
  cfg.value_tol = 1e-3;
  const SolveResult res = bisection_solve(prob, cfg);
  REQUIRE(res.status == SolveStatus::success);
  REQUIRE(res.bhat_interval.has_value());
  const double bhat = (*res.bhat_interval)[1];
  CHECK(bhat >= -1.001);
  CHECK(bhat <= -0.999);
  CHECK(std::abs(res.best_point[0]) < 5e-2);
  CHECK(std::abs(res.best_point[1] + 1.0) < 5e-2);

  // Bracket invariant along the recorded history.
  double lo = -2.0, hi = 0.0;
  for (const auto& step : res.bisection_history) {
    CHECK(step.lo == lo);
    CHECK(step.hi == hi);
    CHECK(step.mid == doctest::Approx(0.5 * (lo + hi)));
    if (step.nonempty) {
      hi = step.mid;
    } else {
      lo = step.mid;
    }
  }
  CHECK(hi - lo <= cfg.value_tol);
}

TEST_CASE("bisection on the trivial interval and on an empty spectrahedron") {
  SolveConfig cfg;
  cfg.seed = 23;
  cfg.value_tol = 1e-3;
  const SolveResult res = bisection_solve(interval1d(), cfg);
  REQUIRE(res.status == SolveStatus::success);
  CHECK(std::abs(res.best_value + 1.0) <= 2e-3);

  const SolveResult empty = bisection_solve(infeasible1d(), cfg);
  CHECK(empty.status == SolveStatus::no_feasible_point);
}

TEST_CASE("configuration validation") {
  SolveConfig cfg;
  cfg.armijo_c = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolveConfig{};
  cfg.restarts = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolveConfig{};
  cfg.schedule = Schedule{1e-3, 0.5, 1e-1};  // ascending endpoints, shrinking factor
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.schedule = Schedule{1e-3, std::sqrt(10.0), 1e-1};
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.schedule->weights().size() == 5);
  CHECK(cfg.schedule->weights().back() == 1e-1);
}

TEST_CASE("trajectory csv uses the documented header") {
  const PmiProblem prob = interval1d();
  SolveConfig cfg;
  cfg.restarts = 1;
  cfg.use_newton = true;
  const SolveResult res = continuation_solve(prob, ReprKind::logdet, cfg);
  std::ostringstream os;
  write_trajectory_csv(os, res, std::vector<std::string>{"y"});
  const std::string out = os.str();
  CHECK(out.rfind("stage,weight,iter,value,grad_norm,y\n", 0) == 0);
}
