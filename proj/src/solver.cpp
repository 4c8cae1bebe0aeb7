#include "pmitame/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pmitame/rng.hpp"

namespace pmitame {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<double> Schedule::weights() const {
  if (initial <= 0 || final_weight <= 0 || factor <= 0 || factor == 1.0) {
    throw std::invalid_argument("Schedule: weights must be positive and factor != 1");
  }
  const bool ascending = final_weight > initial;
  if ((ascending && factor < 1.0) || (!ascending && factor > 1.0)) {
    throw std::invalid_argument("Schedule: factor direction does not match endpoints");
  }
  std::vector<double> out;
  double w = initial;
  const int cap = 512;
  while (static_cast<int>(out.size()) < cap) {
    if ((ascending && w >= final_weight) || (!ascending && w <= final_weight)) break;
    out.push_back(w);
    w *= factor;
  }
  out.push_back(final_weight);
  return out;
}

void SolveConfig::validate() const {
  if (!(armijo_c > 0 && armijo_c < 1)) throw std::invalid_argument("SolveConfig: armijo_c in (0,1)");
  if (!(shrink_beta > 0 && shrink_beta < 1)) {
    throw std::invalid_argument("SolveConfig: shrink_beta in (0,1)");
  }
  if (restarts < 1) throw std::invalid_argument("SolveConfig: restarts >= 1");
  if (max_iters < 1) throw std::invalid_argument("SolveConfig: max_iters >= 1");
  if (schedule) (void)schedule->weights();
}

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void record(InnerResult& res, int stage, double weight, int iter, double value,
            double grad_norm, std::span<const double> point) {
  res.trajectory.push_back(TrajectoryPoint{
      stage, weight, iter, value, grad_norm, std::vector<double>(point.begin(), point.end())});
}

struct LineSearchEnv {
  const Objective& obj;
  const SolveConfig& cfg;
  const Box* box;  // may be null: unbounded search
  int stage;
  double weight;
};

enum class StepKind { gradient, newton };

InnerResult descend(const LineSearchEnv& env, std::span<const double> start, StepKind kind) {
  if (!env.obj.smooth()) {
    throw std::invalid_argument("minimize: objective is non-smooth; descent solvers exclude it");
  }
  const SolveConfig& cfg = env.cfg;
  InnerResult res;
  res.point.assign(start.begin(), start.end());
  res.value = env.obj.value(res.point);
  if (!std::isfinite(res.value)) {
    throw std::domain_error("minimize: start value is not finite");
  }

  std::vector<double> g = env.obj.gradient(res.point);
  res.grad_norm = norm2(g);
  record(res, env.stage, env.weight, 0, res.value, res.grad_norm, res.point);

  std::vector<double> trial(res.point.size());
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    if (res.grad_norm <= cfg.grad_tol) break;
    if (cfg.stop_value && res.value <= *cfg.stop_value) break;

    // Direction and the Armijo decrease slope.
    std::vector<double> dir(g.size());
    double slope = 0.0;  // directional derivative along dir
    bool unit_step = false;
    if (kind == StepKind::newton) {
      SymMatrix h = env.obj.has_hessian()
                        ? env.obj.hessian(res.point)
                        : [&] {
                            // Central finite differences of the gradient,
                            // symmetrized.
                            const int n = static_cast<int>(res.point.size());
                            const double eps = 1e-5;
                            std::vector<std::vector<double>> d(n);
                            std::vector<double> xp(res.point), xm(res.point);
                            for (int i = 0; i < n; ++i) {
                              xp[i] += eps;
                              xm[i] -= eps;
                              const auto gp = env.obj.gradient(xp);
                              const auto gm = env.obj.gradient(xm);
                              xp[i] = res.point[i];
                              xm[i] = res.point[i];
                              d[i].resize(n);
                              for (int j = 0; j < n; ++j) d[i][j] = (gp[j] - gm[j]) / (2 * eps);
                            }
                            SymMatrix fd(n);
                            for (int i = 0; i < n; ++i)
                              for (int j = 0; j <= i; ++j) fd.set(i, j, 0.5 * (d[i][j] + d[j][i]));
                            return fd;
                          }();
      std::vector<double> rhs(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = -g[i];
      if (auto d = solve_spd(h, rhs)) {
        dir = std::move(*d);
        slope = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) slope += g[i] * dir[i];
        unit_step = true;
        if (slope >= 0.0) {
          // Numerically non-descent Newton direction: fall back.
          unit_step = false;
        }
      }
      if (!unit_step) {
        for (std::size_t i = 0; i < g.size(); ++i) dir[i] = -g[i] / res.grad_norm;
        slope = -res.grad_norm;
      }
    } else {
      for (std::size_t i = 0; i < g.size(); ++i) dir[i] = -g[i] / res.grad_norm;
      slope = -res.grad_norm;
    }

    double t = unit_step ? 1.0 : cfg.step_init;
    bool accepted = false;
    double trial_value = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < dir.size(); ++i) trial[i] = res.point[i] + t * dir[i];
      trial_value = env.obj.value(trial);
      if (std::isfinite(trial_value) && trial_value <= res.value + cfg.armijo_c * t * slope) {
        accepted = true;
        break;
      }
      t *= cfg.shrink_beta;
    }
    if (!accepted) break;

    res.point = trial;
    res.value = trial_value;
    res.iters = iter;
    const bool inside = !env.box || env.box->contains(res.point);
    if (inside) {
      g = env.obj.gradient(res.point);
      res.grad_norm = norm2(g);
    }
    record(res, env.stage, env.weight, iter, res.value, res.grad_norm, res.point);
    if (!inside) break;  // box exit: stop without error
  }
  return res;
}

}  // namespace

InnerResult minimize_gd(const Objective& obj, std::span<const double> start,
                        const SolveConfig& cfg, int stage, double weight) {
  cfg.validate();
  LineSearchEnv env{obj, cfg, cfg.box ? &*cfg.box : nullptr, stage, weight};
  return descend(env, start, StepKind::gradient);
}

InnerResult minimize_newton(const Objective& obj, std::span<const double> start,
                            const SolveConfig& cfg, int stage, double weight) {
  cfg.validate();
  LineSearchEnv env{obj, cfg, cfg.box ? &*cfg.box : nullptr, stage, weight};
  return descend(env, start, StepKind::newton);
}

namespace {

Schedule default_schedule(ReprKind kind) {
  if (kind == ReprKind::charpoly) {
    return Schedule{1e-3, std::sqrt(10.0), 1e-1};
  }
  return Schedule{1.0, 0.2, 1e-6};  // barrier path mu -> 0
}

std::vector<double> sample_in_box(const Box& box, uint64_t seed, uint64_t restart,
                                  uint64_t attempt) {
  std::vector<double> x(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    x[i] = counter_uniform_in(box.bounds[i][0], box.bounds[i][1], seed, restart, attempt, i);
  }
  return x;
}

std::unique_ptr<Objective> make_repr(const PmiProblem& prob, ReprKind kind, double weight,
                                     const SolveConfig& cfg) {
  switch (kind) {
    case ReprKind::charpoly: return charpoly_repr(prob, weight);
    case ReprKind::logdet: return logdet_repr(prob, weight);
    case ReprKind::detr: return detr_repr(prob, weight, cfg.detr_power);
    default:
      throw std::invalid_argument("continuation_solve: representation must be one of "
                                  "charpoly/logdet/detr");
  }
}

// Streaming best-feasible tracker with deterministic (value, then
// lexicographic point) tie-breaking.
class BestFeasible {
 public:
  BestFeasible(const PmiProblem& prob, const Box& box, double feas_tol)
      : prob_(prob), box_(box), feas_tol_(feas_tol) {}

  void consider(std::span<const double> point) {
    const double b = prob_.b.eval(point);
    if (found_ && (b > value_ || (b == value_ && !lex_less(point, best_)))) return;
    if (!box_.contains(point)) return;
    if (!is_psd(prob_.P.eval(point), feas_tol_)) return;
    value_ = b;
    best_.assign(point.begin(), point.end());
    found_ = true;
  }

  bool found() const { return found_; }
  double value() const { return value_; }
  const std::vector<double>& point() const { return best_; }

 private:
  const PmiProblem& prob_;
  const Box& box_;
  double feas_tol_;
  bool found_ = false;
  double value_ = kInf;
  std::vector<double> best_;
};

}  // namespace

SolveResult continuation_solve(const PmiProblem& prob, ReprKind kind, const SolveConfig& cfg) {
  cfg.validate();
  prob.validate();

  const Box box = cfg.box ? *cfg.box : prob.search_box();
  const std::vector<double> weights =
      (cfg.schedule ? *cfg.schedule : default_schedule(kind)).weights();

  SolveConfig inner_cfg = cfg;
  inner_cfg.box = box;

  SolveResult result;
  result.rep = repr_id(kind);
  BestFeasible best(prob, box, cfg.feas_tol);

  // Build one objective per stage weight; they are immutable and shared
  // across restarts.
  std::vector<std::unique_ptr<Objective>> stage_obj;
  stage_obj.reserve(weights.size());
  for (double w : weights) stage_obj.push_back(make_repr(prob, kind, w, cfg));

  for (int r = 0; r < cfg.restarts; ++r) {
    // Resample until the first stage value is finite (barriers need an
    // interior start).
    std::vector<double> start;
    bool have_start = false;
    for (int attempt = 0; attempt < cfg.max_start_tries; ++attempt) {
      start = sample_in_box(box, cfg.seed, static_cast<uint64_t>(r), attempt);
      if (std::isfinite(stage_obj.front()->value(start))) {
        have_start = true;
        break;
      }
    }
    if (!have_start) continue;

    std::vector<double> x = start;
    for (std::size_t si = 0; si < weights.size(); ++si) {
      if (!std::isfinite(stage_obj[si]->value(x))) break;  // warm start left the domain
      InnerResult inner = cfg.use_newton
                              ? minimize_newton(*stage_obj[si], x, inner_cfg,
                                                static_cast<int>(si), weights[si])
                              : minimize_gd(*stage_obj[si], x, inner_cfg,
                                            static_cast<int>(si), weights[si]);
      result.iterations += inner.iters;
      for (const auto& tp : inner.trajectory) best.consider(tp.point);
      if (r == 0) {
        result.trajectory.insert(result.trajectory.end(), inner.trajectory.begin(),
                                 inner.trajectory.end());
      }
      // Warm start from the last in-box iterate of this stage.
      bool found_inside = false;
      for (auto it = inner.trajectory.rbegin(); it != inner.trajectory.rend(); ++it) {
        if (box.contains(it->point)) {
          x = it->point;
          found_inside = true;
          break;
        }
      }
      if (!found_inside) break;
    }
  }

  if (!best.found()) {
    result.status = SolveStatus::no_feasible_point;
    return result;
  }
  result.status = SolveStatus::success;
  result.best_point = best.point();
  result.best_value = best.value();
  result.feasible = is_psd(prob.P.eval(result.best_point), cfg.feas_tol);
  return result;
}

namespace {

void normalize(std::vector<double>& v) {
  const double n = norm2(v);
  if (n == 0.0) throw std::domain_error("solve_factorized: zero factor");
  for (double& x : v) x /= n;
}

// Projected gradient on the Frobenius unit sphere: step along the negative
// Riemannian gradient, renormalize, Armijo on the retracted point.
InnerResult sphere_descent(const Objective& obj, std::vector<double> v, const SolveConfig& cfg,
                           int stage) {
  normalize(v);
  InnerResult res;
  res.point = std::move(v);
  res.value = obj.value(res.point);

  auto riemannian = [&](const std::vector<double>& at) {
    const std::vector<double> g = obj.gradient(at);
    double dot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * at[i];
    std::vector<double> rg(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) rg[i] = g[i] - dot * at[i];
    return rg;
  };

  std::vector<double> rg = riemannian(res.point);
  res.grad_norm = norm2(rg);
  record(res, stage, 0.0, 0, res.value, res.grad_norm, res.point);

  std::vector<double> trial(res.point.size());
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    if (res.grad_norm <= cfg.grad_tol) break;

    double t = cfg.step_init;
    bool accepted = false;
    double trial_value = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < trial.size(); ++i) {
        trial[i] = res.point[i] - (t / res.grad_norm) * rg[i];
      }
      normalize(trial);
      trial_value = obj.value(trial);
      if (trial_value <= res.value - cfg.armijo_c * t * res.grad_norm) {
        accepted = true;
        break;
      }
      t *= cfg.shrink_beta;
    }
    if (!accepted) break;

    res.point = trial;
    res.value = trial_value;
    res.iters = iter;
    rg = riemannian(res.point);
    res.grad_norm = norm2(rg);
    record(res, stage, 0.0, iter, res.value, res.grad_norm, res.point);
  }
  return res;
}

}  // namespace

SolveResult solve_factorized(const MatrixVarProblem& prob, int rank, const SolveConfig& cfg) {
  cfg.validate();
  prob.validate();
  if (rank < 1 || rank > prob.m) {
    throw std::invalid_argument("solve_factorized: rank out of range");
  }

  SolveResult result;
  result.rep = repr_id(ReprKind::factorization);

  struct Candidate {
    std::vector<double> v;
    double value = kInf;
    int rank = 0;
    bool set = false;
  } best;

  for (int r = 0; r < cfg.restarts; ++r) {
    int cur_rank = rank;
    // Random factor on the unit sphere.
    std::vector<double> v(static_cast<std::size_t>(cur_rank) * prob.m);
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = counter_uniform_in(-1.0, 1.0, cfg.seed, 0x66AC, r, i);
    }
    normalize(v);

    while (true) {
      const auto obj = factorization_repr(prob, cur_rank);
      InnerResult inner = sphere_descent(*obj, v, cfg, cur_rank);
      result.iterations += inner.iters;
      if (r == 0) {
        result.trajectory.insert(result.trajectory.end(), inner.trajectory.begin(),
                                 inner.trajectory.end());
      }

      const FactorizationState cert =
          factorization_certificate(prob, inner.point, cur_rank);
      const bool improved =
          !best.set || inner.value < best.value ||
          (inner.value == best.value && lex_less(inner.point, best.v));
      if (improved) {
        best = Candidate{inner.point, inner.value, cur_rank, true};
      }
      if (cert.certified(cfg.certificate_tol) || !cfg.rank_escalation || cur_rank >= prob.m) {
        break;
      }
      // Escalate: embed v as the first rows of a rank+1 factor with a small
      // deterministic perturbation row, then renormalize.
      ++cur_rank;
      std::vector<double> grown(static_cast<std::size_t>(cur_rank) * prob.m, 0.0);
      std::copy(inner.point.begin(), inner.point.end(), grown.begin());
      for (int j = 0; j < prob.m; ++j) {
        grown[static_cast<std::size_t>(cur_rank - 1) * prob.m + j] =
            1e-3 * (counter_uniform(cfg.seed, 0xE5CA, r * 131 + cur_rank, j) - 0.5);
      }
      normalize(grown);
      v = std::move(grown);
    }
  }

  result.status = SolveStatus::success;
  result.best_point = best.v;
  result.best_value = best.value;
  result.certificate = factorization_certificate(prob, best.v, best.rank);
  // X = v^T v is PSD by construction; feasibility reduces to the unit trace.
  result.feasible = std::abs(norm2(best.v) - 1.0) <= cfg.feas_tol;
  return result;
}

namespace {

struct EmptinessProbe {
  const PmiProblem& prob;
  const SolveConfig& cfg;
  Box box;
  uint64_t phase = 0;  // bumped per query so start samples never repeat
  int total_iters = 0;

  // Returns the witness point when the intersection {P >= 0, b <= bhat} is
  // non-empty at merit level cfg.merit_tol; nullopt when all restarts fail
  // (declared empty).
  std::optional<std::vector<double>> witness(double bhat) {
    ++phase;
    const auto merit = bound_feasibility_merit(prob, bhat);
    SolveConfig inner = cfg;
    inner.box = box;
    inner.stop_value = 0.1 * cfg.merit_tol;
    for (int r = 0; r < cfg.emptiness_restarts; ++r) {
      std::vector<double> start(box.size());
      for (std::size_t i = 0; i < box.size(); ++i) {
        start[i] = counter_uniform_in(box.bounds[i][0], box.bounds[i][1], cfg.seed,
                                      0xB15EC7 + phase, r, i);
      }
      const InnerResult res = minimize_gd(*merit, start, inner);
      total_iters += res.iters;
      if (res.value <= cfg.merit_tol) return res.point;
    }
    return std::nullopt;
  }
};

}  // namespace

SolveResult bisection_solve(const PmiProblem& prob, const SolveConfig& cfg) {
  cfg.validate();
  prob.validate();

  SolveResult result;
  result.rep = repr_id(ReprKind::bound);
  EmptinessProbe probe{prob, cfg, cfg.box ? *cfg.box : prob.search_box()};

  double lo = 0.0, hi = 0.0;
  std::vector<double> witness;

  if (cfg.bracket) {
    lo = (*cfg.bracket)[0];
    hi = (*cfg.bracket)[1];
    if (!(lo < hi)) throw std::invalid_argument("bisection_solve: bracket must satisfy lo < hi");
    if (probe.witness(lo)) {
      throw std::invalid_argument("bisection_solve: bracket lower end is not empty");
    }
    auto w = probe.witness(hi);
    if (!w) {
      result.status = SolveStatus::no_feasible_point;
      result.iterations = probe.total_iters;
      return result;
    }
    witness = std::move(*w);
  } else {
    // Feasibility of P alone establishes the non-empty end.
    auto w = probe.witness(kInf);
    if (!w) {
      result.status = SolveStatus::no_feasible_point;
      result.iterations = probe.total_iters;
      return result;
    }
    witness = std::move(*w);
    hi = prob.b.eval(witness);
    // Doubling expansion downwards until the intersection goes empty.
    double step = 1.0;
    bool found_empty = false;
    for (int k = 0; k < 60; ++k) {
      const double cand = hi - step;
      if (auto w2 = probe.witness(cand)) {
        witness = std::move(*w2);
        hi = prob.b.eval(witness);
      } else {
        lo = cand;
        found_empty = true;
        break;
      }
      step *= 2.0;
    }
    if (!found_empty) {
      result.status = SolveStatus::unbounded;
      result.iterations = probe.total_iters;
      return result;
    }
  }

  while (hi - lo > cfg.value_tol) {
    const double mid = 0.5 * (lo + hi);
    auto w = probe.witness(mid);
    result.bisection_history.push_back(BisectionStep{lo, hi, mid, w.has_value()});
    if (w) {
      witness = std::move(*w);
      hi = mid;
    } else {
      lo = mid;
    }
  }

  result.status = SolveStatus::success;
  result.best_point = witness;
  result.best_value = prob.b.eval(witness);
  result.feasible = is_psd(prob.P.eval(witness), cfg.feas_tol);
  result.bhat_interval = {{lo, hi}};
  result.iterations = probe.total_iters;
  return result;
}

void write_trajectory_csv(std::ostream& os, const SolveResult& result,
                          std::span<const std::string> names) {
  os << "stage,weight,iter,value,grad_norm";
  const std::size_t n = result.trajectory.empty() ? names.size()
                                                  : result.trajectory.front().point.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i < names.size()) {
      os << "," << names[i];
    } else {
      os << ",x" << i;
    }
  }
  os << "\n";
  os.precision(17);
  for (const auto& tp : result.trajectory) {
    os << tp.stage << "," << tp.weight << "," << tp.iter << "," << tp.value << ","
       << tp.grad_norm;
    for (double v : tp.point) os << "," << v;
    os << "\n";
  }
}

}  // namespace pmitame
