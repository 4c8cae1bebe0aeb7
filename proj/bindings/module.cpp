// Python bindings for the core operations: problems, representations,
// solvers, the grid oracle, and the definability classifier.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <variant>

#include "pmitame/oracle.hpp"
#include "pmitame/problem_io.hpp"
#include "pmitame/solver.hpp"
#include "pmitame/tamecheck.hpp"

namespace py = pybind11;
using namespace pmitame;

namespace {

Polynomial make_polynomial(uint32_t num_vars,
                           const std::vector<std::pair<std::vector<uint32_t>, double>>& terms) {
  Polynomial p(num_vars);
  for (const auto& [exps, coef] : terms) {
    if (exps.size() != num_vars) {
      throw std::invalid_argument("Polynomial: exps length must equal num_vars");
    }
    std::vector<std::pair<uint32_t, uint32_t>> factors;
    for (uint32_t v = 0; v < num_vars; ++v) {
      if (exps[v] > 0) factors.emplace_back(v, exps[v]);
    }
    p.add_term(Monomial(std::move(factors)), coef);
  }
  return p;
}

std::vector<std::pair<std::vector<uint32_t>, double>> polynomial_terms(const Polynomial& p) {
  std::vector<std::pair<std::vector<uint32_t>, double>> out;
  for (const auto& [mono, coef] : p.terms()) {
    std::vector<uint32_t> exps(p.num_vars(), 0);
    for (const auto& [v, e] : mono.factors()) exps[v] = e;
    out.emplace_back(std::move(exps), coef);
  }
  return out;
}

SolveConfig config_from_kwargs(int restarts, uint64_t seed,
                               std::optional<std::tuple<double, double, double>> schedule,
                               bool newton, double step, int max_iters, double value_tol) {
  SolveConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = seed;
  cfg.use_newton = newton;
  if (schedule) {
    cfg.schedule = Schedule{std::get<0>(*schedule), std::get<1>(*schedule), std::get<2>(*schedule)};
  }
  if (step > 0) cfg.step_init = step;
  if (max_iters > 0) cfg.max_iters = max_iters;
  cfg.value_tol = value_tol;
  return cfg;
}

py::dict result_to_dict(const SolveResult& res) {
  py::dict d;
  d["rep"] = res.rep;
  d["status"] = res.status == SolveStatus::success          ? "success"
                : res.status == SolveStatus::no_feasible_point ? "no_feasible_point"
                                                               : "unbounded";
  d["best_point"] = res.best_point;
  d["best_value"] = res.best_value;
  d["feasible"] = res.feasible;
  d["iterations"] = res.iterations;
  if (res.certificate) {
    py::dict c;
    c["lambda"] = res.certificate->multiplier;
    c["lambda_min_S"] = res.certificate->smin;
    c["residual"] = res.certificate->residual;
    c["rank"] = res.certificate->rank;
    c["certified"] = res.certificate->certified(1e-7);
    d["certificate"] = c;
  }
  if (res.bhat_interval) {
    d["bhat_interval"] = std::make_pair((*res.bhat_interval)[0], (*res.bhat_interval)[1]);
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(pmitame, m) {
  m.doc() = "Polynomial matrix inequality solver toolkit";

  py::register_exception<ProblemFormatError>(m, "ProblemFormatError", PyExc_ValueError);
  py::register_exception<PosDefViolation>(m, "PosDefViolation", PyExc_ArithmeticError);

  py::class_<Polynomial>(m, "Polynomial")
      .def(py::init(&make_polynomial), py::arg("num_vars"), py::arg("terms"))
      .def_property_readonly("num_vars", &Polynomial::num_vars)
      .def_property_readonly("degree", &Polynomial::degree)
      .def("eval",
           [](const Polynomial& p, const std::vector<double>& z) { return p.eval(z); })
      .def("terms", &polynomial_terms)
      .def("__str__", [](const Polynomial& p) { return to_string(p); });

  py::class_<PmiProblem>(m, "PmiProblem")
      .def_readonly("k", &PmiProblem::k)
      .def_readonly("l", &PmiProblem::l)
      .def_readonly("var_names", &PmiProblem::var_names)
      .def_property_readonly("objective", [](const PmiProblem& p) { return p.b; })
      .def("eval_matrix",
           [](const PmiProblem& p, const std::vector<double>& z) {
             const SymMatrix a = p.P.eval(z);
             std::vector<std::vector<double>> rows(a.dim(), std::vector<double>(a.dim()));
             for (int i = 0; i < a.dim(); ++i)
               for (int j = 0; j < a.dim(); ++j) rows[i][j] = a(i, j);
             return rows;
           })
      .def("charpoly",
           [](const PmiProblem& p) { return charpoly(p.P).q; })
      .def("feasible",
           [](const PmiProblem& p, const std::vector<double>& z, double tol) {
             return is_psd(p.P.eval(z), tol);
           },
           py::arg("point"), py::arg("tol") = 1e-7);

  py::class_<MatrixVarProblem>(m, "MatrixVarProblem")
      .def_readonly("m", &MatrixVarProblem::m)
      .def_property_readonly("Q", [](const MatrixVarProblem& p) { return p.q; });

  m.def("load_problem", [](const std::string& path) -> py::object {
    const AnyProblem any = load_problem(path);
    if (const auto* pmi = std::get_if<PmiProblem>(&any)) return py::cast(*pmi);
    return py::cast(std::get<MatrixVarProblem>(any));
  });

  m.def("parse_problem", [](const std::string& text) -> py::object {
    const AnyProblem any = problem_from_json(nlohmann::json::parse(text));
    if (const auto* pmi = std::get_if<PmiProblem>(&any)) return py::cast(*pmi);
    return py::cast(std::get<MatrixVarProblem>(any));
  });

  py::class_<Objective>(m, "Objective")
      .def_property_readonly("dim", &Objective::dim)
      .def("value", [](const Objective& o, const std::vector<double>& z) { return o.value(z); })
      .def("gradient",
           [](const Objective& o, const std::vector<double>& z) { return o.gradient(z); });

  m.def(
      "objective",
      [](const PmiProblem& prob, const std::string& rep, double weight,
         std::pair<long long, long long> power) -> std::unique_ptr<Objective> {
        const auto kind = repr_from_id(rep);
        if (!kind) throw std::invalid_argument("unknown representation id: " + rep);
        switch (*kind) {
          case ReprKind::indicator: return indicator_lagrangian(prob, weight);
          case ReprKind::charpoly: return charpoly_repr(prob, weight);
          case ReprKind::logdet: return logdet_repr(prob, weight);
          case ReprKind::detr:
            return detr_repr(prob, weight, Rational::of(power.first, power.second));
          case ReprKind::bound: return bound_feasibility_merit(prob, weight);
          default:
            throw std::invalid_argument("factorization objectives come from matrixvar problems");
        }
      },
      py::arg("problem"), py::arg("rep"), py::arg("weight"),
      py::arg("power") = std::make_pair(1LL, 2LL));

  m.def(
      "solve",
      [](const PmiProblem& prob, const std::string& rep, int restarts, uint64_t seed,
         std::optional<std::tuple<double, double, double>> schedule, bool newton, double step,
         int max_iters, double value_tol) {
        const auto kind = repr_from_id(rep);
        if (!kind) throw std::invalid_argument("unknown representation id: " + rep);
        const SolveConfig cfg =
            config_from_kwargs(restarts, seed, schedule, newton, step, max_iters, value_tol);
        if (*kind == ReprKind::bound) return result_to_dict(bisection_solve(prob, cfg));
        return result_to_dict(continuation_solve(prob, *kind, cfg));
      },
      py::arg("problem"), py::arg("rep") = "logdet", py::arg("restarts") = 16,
      py::arg("seed") = 0, py::arg("schedule") = std::nullopt, py::arg("newton") = false,
      py::arg("step") = 0.0, py::arg("max_iters") = 0, py::arg("value_tol") = 1e-3);

  m.def(
      "solve_factorized",
      [](const MatrixVarProblem& prob, int rank, int restarts, uint64_t seed, double step,
         int max_iters) {
        SolveConfig cfg;
        cfg.restarts = restarts;
        cfg.seed = seed;
        if (step > 0) cfg.step_init = step;
        if (max_iters > 0) cfg.max_iters = max_iters;
        cfg.grad_tol = 1e-10;
        return result_to_dict(solve_factorized(prob, rank, cfg));
      },
      py::arg("problem"), py::arg("rank") = 1, py::arg("restarts") = 8, py::arg("seed") = 0,
      py::arg("step") = 0.0, py::arg("max_iters") = 0);

  m.def(
      "grid_oracle",
      [](const PmiProblem& prob, double h, std::optional<std::vector<std::pair<double, double>>> box,
         uint64_t cap) {
        GridSpec spec;
        spec.h = h;
        spec.cap = cap;
        if (box) {
          for (const auto& [lo, hi] : *box) spec.box.bounds.push_back({lo, hi});
        } else if (prob.box) {
          spec.box = *prob.box;
        } else {
          throw std::invalid_argument("grid_oracle needs a box");
        }
        const OracleResult res = grid_solve(prob, spec);
        py::dict d;
        d["feasible_count"] = res.feasible_count;
        d["h"] = res.h;
        if (res.best_point) {
          d["best_point"] = *res.best_point;
          d["best_value"] = res.best_value;
        } else {
          d["best_point"] = py::none();
          d["best_value"] = py::none();
        }
        return d;
      },
      py::arg("problem"), py::arg("h") = 1e-2, py::arg("box") = std::nullopt,
      py::arg("cap") = 100000000ULL);

  m.def(
      "classify",
      [](const std::string& expr_text,
         const std::map<std::string, std::pair<double, double>>& domains) {
        std::vector<std::string> names;
        const ExprPtr expr = parse_expr(expr_text, &names);
        std::vector<Interval> domain(names.size(), Interval::whole());
        for (const auto& [name, iv] : domains) {
          bool found = false;
          for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) {
              domain[i] = Interval::of(iv.first, iv.second);
              found = true;
            }
          }
          if (!found) throw std::invalid_argument("unknown variable " + name);
        }
        return std::string(to_string(classify(expr, domain)));
      },
      py::arg("expr"), py::arg("domains") = std::map<std::string, std::pair<double, double>>{});

  m.def("classify_objective", [](const std::string& rep) {
    const auto kind = repr_from_id(rep);
    if (!kind) throw std::invalid_argument("unknown representation id: " + rep);
    return std::string(to_string(classify_objective(*kind)));
  });
}
