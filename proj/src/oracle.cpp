#include "pmitame/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pmitame/rng.hpp"

namespace pmitame {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void GridSpec::validate() const {
  box.validate();
  if (!(h > 0)) throw std::invalid_argument("GridSpec: step must be positive");
  if (box.size() == 0) throw std::invalid_argument("GridSpec: empty box");
}

namespace {

struct Grid {
  const Box& box;
  double h;
  std::vector<uint64_t> counts;  // points per dimension
  uint64_t total = 1;

  Grid(const Box& b, double step, uint64_t cap) : box(b), h(step) {
    counts.reserve(b.size());
    for (const auto& [lo, hi] : b.bounds) {
      const auto n = static_cast<uint64_t>(std::floor((hi - lo) / step + 1e-12)) + 1;
      counts.push_back(n);
      if (total > cap / n) {
        throw std::invalid_argument("grid_solve: grid point count exceeds the configured cap");
      }
      total *= n;
    }
  }

  void point(uint64_t flat, std::vector<double>& out) const {
    for (std::size_t d = box.size(); d-- > 0;) {
      const uint64_t i = flat % counts[d];
      flat /= counts[d];
      out[d] = box.bounds[d][0] + static_cast<double>(i) * h;
    }
  }
};

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Two-pass streaming argmin with the 1e-12 tie window; no per-point storage
// so the cap can be large.
template <typename Feasible, typename Value>
OracleResult scan(const Grid& grid, Feasible&& feasible, Value&& value) {
  OracleResult res;
  res.h = grid.h;
  std::vector<double> x(grid.box.size());

  double min_val = kInf;
  for (uint64_t f = 0; f < grid.total; ++f) {
    grid.point(f, x);
    if (!feasible(x)) continue;
    ++res.feasible_count;
    min_val = std::min(min_val, value(x));
  }
  if (res.feasible_count == 0) return res;

  std::vector<double> best;
  for (uint64_t f = 0; f < grid.total; ++f) {
    grid.point(f, x);
    if (!feasible(x)) continue;
    if (value(x) > min_val + 1e-12) continue;
    if (best.empty() || lex_less(x, best)) best = x;
  }
  res.best_point = best;
  res.best_value = value(*res.best_point);
  return res;
}

}  // namespace

OracleResult grid_solve(const PmiProblem& prob, const GridSpec& spec) {
  prob.validate();
  spec.validate();
  if (spec.box.size() != static_cast<std::size_t>(prob.num_vars())) {
    throw std::invalid_argument("grid_solve: box dimension mismatch");
  }
  const Grid grid(spec.box, spec.h, spec.cap);
  auto feasible = [&](const std::vector<double>& x) {
    const SymMatrix a = prob.P.eval(x);
    return is_psd(a, spec.feas_tol * (1.0 + a.frobenius_norm()));
  };
  auto value = [&](const std::vector<double>& x) { return prob.b.eval(x); };
  return scan(grid, feasible, value);
}

GridProblem as_grid_problem(const PmiProblem& prob, const GridSpec& spec) {
  GridProblem gp;
  gp.box = spec.box;
  gp.h = spec.h;
  const double tol = spec.feas_tol;
  gp.objective = [prob](std::span<const double> x) { return prob.b.eval(x); };
  gp.feasible = [prob, tol](std::span<const double> x) {
    const SymMatrix a = prob.P.eval(x);
    return is_psd(a, tol * (1.0 + a.frobenius_norm()));
  };
  return gp;
}

VerifyReport verify_representation(
    const std::function<double(std::span<const double>)>& f,
    const std::function<double(std::span<const double>)>& g,
    const std::function<std::vector<double>(std::span<const double>)>& h_map,
    const Box& sample_box, int samples, uint64_t seed) {
  VerifyReport rep;
  rep.pass = true;
  std::vector<double> z(sample_box.size());
  for (int s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = counter_uniform_in(sample_box.bounds[i][0], sample_box.bounds[i][1], seed, s, i);
    }
    const double fv = f(z);
    const std::vector<double> hz = h_map(z);
    const double gv = g(hz);
    const double violation = std::abs(fv - gv) - 1e-9 * (1.0 + std::abs(fv));
    if (violation > rep.max_violation) {
      rep.max_violation = violation;
      rep.witness = z;
    }
    if (violation > 0) rep.pass = false;
  }
  rep.max_violation = std::max(rep.max_violation, 0.0);
  return rep;
}

namespace {

// All grid points whose value lies within 1e-12 of the grid minimum, capped.
std::vector<std::vector<double>> near_minimal_set(const GridProblem& gp, std::size_t cap) {
  const Grid grid(gp.box, gp.h, 100000000ULL);
  std::vector<double> x(gp.box.size());

  double min_val = kInf;
  bool any = false;
  for (uint64_t f = 0; f < grid.total; ++f) {
    grid.point(f, x);
    if (gp.feasible && !gp.feasible(x)) continue;
    any = true;
    min_val = std::min(min_val, gp.objective(x));
  }
  if (!any) throw std::domain_error("verify_minimizer_representation: problem is infeasible");

  std::vector<std::vector<double>> out;
  for (uint64_t f = 0; f < grid.total && out.size() < cap; ++f) {
    grid.point(f, x);
    if (gp.feasible && !gp.feasible(x)) continue;
    if (gp.objective(x) <= min_val + 1e-12) out.push_back(x);
  }
  return out;
}

}  // namespace

MinimizerReport verify_minimizer_representation(
    const GridProblem& f, const GridProblem& g,
    const std::function<std::vector<double>(std::span<const double>)>& h_map,
    double tol_per_coord) {
  const auto f_mins = near_minimal_set(f, 4096);
  const auto g_mins = near_minimal_set(g, 4096);

  MinimizerReport rep;
  rep.max_coord_gap = kInf;
  // The definition asks only for one matching pair of global minimizers.
  for (const auto& pg : g_mins) {
    const std::vector<double> mg = h_map(pg);
    for (const auto& pf : f_mins) {
      double gap = 0.0;
      for (std::size_t i = 0; i < pf.size(); ++i) gap = std::max(gap, std::abs(pf[i] - mg[i]));
      if (gap < rep.max_coord_gap) {
        rep.max_coord_gap = gap;
        rep.argmin_f = pf;
        rep.mapped_argmin_g = mg;
      }
    }
  }
  rep.pass = rep.max_coord_gap <= tol_per_coord;
  return rep;
}

}  // namespace pmitame
