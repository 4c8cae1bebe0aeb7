// Command-line front end: solve / charpoly / oracle / classify.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "pmitame/oracle.hpp"
#include "pmitame/problem_io.hpp"
#include "pmitame/solver.hpp"
#include "pmitame/tamecheck.hpp"

using namespace pmitame;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNoFeasiblePoint = 2;

// Every error path prints a machine-parsable code line first, then the
// human-readable detail.
[[noreturn]] void fail(const char* code, const std::string& message) {
  std::cerr << code << "\n" << message << "\n";
  std::exit(kExitInputError);
}

AnyProblem load_or_fail(const std::string& path) {
  try {
    return load_problem(path);
  } catch (const ProblemFormatError& e) {
    fail("E_INPUT", e.what());
  }
}

Box parse_box_flag(const std::string& text, std::size_t dims) {
  Box box;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string part = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                         : comma - pos);
    const std::size_t colon = part.find(':');
    if (colon == std::string::npos) fail("E_INPUT", "--box expects lo:hi[,lo:hi...]");
    try {
      box.bounds.push_back({std::stod(part.substr(0, colon)), std::stod(part.substr(colon + 1))});
    } catch (const std::exception&) {
      fail("E_INPUT", "--box expects numeric lo:hi pairs");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (box.bounds.size() == 1 && dims > 1) {
    box.bounds.assign(dims, box.bounds[0]);  // one pair broadcasts to all variables
  }
  if (box.bounds.size() != dims) fail("E_INPUT", "--box dimension mismatch");
  try {
    box.validate();
  } catch (const std::exception& e) {
    fail("E_INPUT", e.what());
  }
  return box;
}

Schedule parse_schedule_flag(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? std::string::npos : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    fail("E_INPUT", "--schedule expects initial:factor:final");
  }
  Schedule s;
  try {
    s.initial = std::stod(text.substr(0, c1));
    s.factor = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    s.final_weight = std::stod(text.substr(c2 + 1));
    (void)s.weights();
  } catch (const std::exception& e) {
    fail("E_INPUT", std::string("bad --schedule: ") + e.what());
  }
  return s;
}

Rational parse_power_flag(const std::string& text) {
  try {
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
      const double v = std::stod(text);
      // Accept a plain decimal only when it is an exact small rational.
      for (long long den = 1; den <= 64; ++den) {
        const double num = v * den;
        if (num == static_cast<long long>(num)) {
          return Rational::of(static_cast<long long>(num), den);
        }
      }
      fail("E_INPUT", "--power must be a rational p/q");
    }
    return Rational::of(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const std::exception& e) {
    fail("E_INPUT", std::string("bad --power: ") + e.what());
  }
}

json point_json(const std::vector<double>& p) {
  json a = json::array();
  for (double v : p) a.push_back(v);
  return a;
}

json result_json(const SolveResult& res) {
  json doc;
  doc["rep"] = res.rep;
  doc["status"] = res.status == SolveStatus::success          ? "success"
                  : res.status == SolveStatus::no_feasible_point ? "no_feasible_point"
                                                                 : "unbounded";
  doc["best_point"] = point_json(res.best_point);
  doc["best_value"] = res.best_value;
  doc["feasible"] = res.feasible;
  doc["iterations"] = res.iterations;
  if (res.certificate) {
    doc["certified"] = res.certificate->certified(1e-7);
    doc["certificate"] = json{{"lambda", res.certificate->multiplier},
                              {"lambda_min_S", res.certificate->smin},
                              {"residual", res.certificate->residual},
                              {"rank", res.certificate->rank}};
  }
  if (res.bhat_interval) {
    doc["bhat_interval"] = json::array({(*res.bhat_interval)[0], (*res.bhat_interval)[1]});
  }
  return doc;
}

void print_result_text(const SolveResult& res) {
  std::cout << "rep=" << res.rep;
  if (res.status != SolveStatus::success) {
    std::cout << " status="
              << (res.status == SolveStatus::no_feasible_point ? "no_feasible_point"
                                                               : "unbounded")
              << "\n";
    return;
  }
  std::cout << " value=" << res.best_value << " point=(";
  for (std::size_t i = 0; i < res.best_point.size(); ++i) {
    std::cout << (i ? ", " : "") << res.best_point[i];
  }
  std::cout << ") feasible=" << (res.feasible ? "yes" : "no");
  if (res.certificate) {
    std::cout << " certified=" << (res.certificate->certified(1e-7) ? "yes" : "no");
  }
  if (res.bhat_interval) {
    std::cout << " bhat=[" << (*res.bhat_interval)[0] << ", " << (*res.bhat_interval)[1] << "]";
  }
  std::cout << " iters=" << res.iterations << "\n";
}

struct SolveArgs {
  std::string problem_path;
  std::string rep = "logdet";
  int restarts = 16;
  uint64_t seed = 0;
  std::string schedule;
  int rank = 1;
  std::string power;
  std::string out_csv;
  std::string box;
  bool as_json = false;
  bool newton = false;
  double step = 0.0;
  int max_iters = 0;
};

SolveResult run_one(const AnyProblem& any, ReprKind kind, const SolveArgs& args,
                    SolveConfig cfg) {
  if (kind == ReprKind::indicator) {
    fail("E_KIND_MISMATCH", "the indicator representation is evaluation-only; "
                            "pick charpoly, logdet, detr, bound, or factorization");
  }
  if (const auto* pmi = std::get_if<PmiProblem>(&any)) {
    if (kind == ReprKind::factorization) {
      fail("E_KIND_MISMATCH", "factorization applies to matrixvar problems only");
    }
    if (kind == ReprKind::bound) return bisection_solve(*pmi, cfg);
    return continuation_solve(*pmi, kind, cfg);
  }
  const auto& mv = std::get<MatrixVarProblem>(any);
  if (kind != ReprKind::factorization) {
    fail("E_KIND_MISMATCH", "matrixvar problems solve via the factorization representation");
  }
  return solve_factorized(mv, args.rank, cfg);
}

int cmd_solve(const SolveArgs& args) {
  const AnyProblem any = load_or_fail(args.problem_path);

  SolveConfig cfg;
  cfg.restarts = args.restarts;
  cfg.seed = args.seed;
  cfg.use_newton = args.newton;
  if (!args.schedule.empty()) cfg.schedule = parse_schedule_flag(args.schedule);
  if (!args.power.empty()) cfg.detr_power = parse_power_flag(args.power);
  if (args.step > 0) cfg.step_init = args.step;
  if (args.max_iters > 0) cfg.max_iters = args.max_iters;
  if (!args.box.empty()) {
    const std::size_t dims = std::holds_alternative<PmiProblem>(any)
                                 ? std::get<PmiProblem>(any).num_vars()
                                 : std::get<MatrixVarProblem>(any).m * args.rank;
    cfg.box = parse_box_flag(args.box, dims);
  }

  std::vector<ReprKind> kinds;
  if (args.rep == "all") {
    if (std::holds_alternative<PmiProblem>(any)) {
      kinds = {ReprKind::charpoly, ReprKind::logdet, ReprKind::detr, ReprKind::bound};
    } else {
      kinds = {ReprKind::factorization};
    }
  } else {
    const auto kind = repr_from_id(args.rep);
    if (!kind) fail("E_REP", "unknown representation id: " + args.rep);
    kinds = {*kind};
  }

  json all = json::array();
  bool any_success = false;
  SolveResult last;
  for (ReprKind kind : kinds) {
    SolveResult res = run_one(any, kind, args, cfg);
    any_success = any_success || res.status == SolveStatus::success;
    if (!args.as_json) print_result_text(res);
    all.push_back(result_json(res));
    last = std::move(res);
  }
  if (args.as_json) {
    std::cout << (kinds.size() == 1 ? all[0].dump(2) : all.dump(2)) << "\n";
  }
  if (!args.out_csv.empty()) {
    std::ofstream csv(args.out_csv);
    if (!csv) fail("E_INPUT", "cannot open " + args.out_csv);
    std::vector<std::string> names;
    if (const auto* pmi = std::get_if<PmiProblem>(&any)) names = pmi->var_names;
    write_trajectory_csv(csv, last, names);
  }
  return any_success ? kExitOk : kExitNoFeasiblePoint;
}

int cmd_charpoly(const std::string& path, const std::string& at, bool as_json) {
  const AnyProblem any = load_or_fail(path);
  const auto* pmi = std::get_if<PmiProblem>(&any);
  if (!pmi) fail("E_KIND_MISMATCH", "charpoly needs a pmi problem");

  CharPolyCoeffs qs;
  try {
    qs = charpoly(pmi->P);
  } catch (const std::domain_error& e) {
    fail("E_INPUT", e.what());
  }

  std::vector<double> point;
  if (!at.empty()) {
    std::size_t pos = 0;
    while (pos <= at.size()) {
      const std::size_t comma = at.find(',', pos);
      try {
        point.push_back(std::stod(at.substr(pos, comma - pos)));
      } catch (const std::exception&) {
        fail("E_INPUT", "--at expects a comma-separated point");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (point.size() != static_cast<std::size_t>(pmi->num_vars())) {
      fail("E_INPUT", "--at dimension mismatch");
    }
  }

  if (as_json) {
    json doc;
    json coeffs = json::array();
    for (const auto& q : qs.q) coeffs.push_back(polynomial_to_json(q));
    doc["q"] = coeffs;
    if (!point.empty()) {
      json vals = json::array();
      for (const auto& q : qs.q) vals.push_back(q.eval(point));
      doc["q_at"] = vals;
    }
    std::cout << doc.dump(2) << "\n";
  } else {
    for (std::size_t j = 0; j < qs.q.size(); ++j) {
      std::cout << "q" << (j + 1) << " = " << to_string(qs.q[j], pmi->var_names);
      if (!point.empty()) std::cout << "  ->  " << qs.q[j].eval(point);
      std::cout << "\n";
    }
  }
  return kExitOk;
}

int cmd_oracle(const std::string& path, double h, uint64_t cap, const std::string& box_flag,
               bool as_json) {
  const AnyProblem any = load_or_fail(path);
  const auto* pmi = std::get_if<PmiProblem>(&any);
  if (!pmi) fail("E_KIND_MISMATCH", "oracle needs a pmi problem");

  GridSpec spec;
  spec.h = h;
  spec.cap = cap;
  if (!box_flag.empty()) {
    spec.box = parse_box_flag(box_flag, static_cast<std::size_t>(pmi->num_vars()));
  } else if (pmi->box) {
    spec.box = *pmi->box;
  } else {
    fail("E_INPUT", "oracle needs a box (problem file \"box\" or --box)");
  }

  OracleResult res;
  try {
    res = grid_solve(*pmi, spec);
  } catch (const std::invalid_argument& e) {
    fail("E_INPUT", e.what());
  }

  json doc;
  doc["feasible_count"] = res.feasible_count;
  doc["h"] = res.h;
  if (res.best_point) {
    doc["best_point"] = point_json(*res.best_point);
    doc["best_value"] = res.best_value;
  } else {
    doc["best_point"] = nullptr;
    doc["best_value"] = nullptr;
  }
  if (as_json) {
    std::cout << doc.dump(2) << "\n";
  } else if (res.best_point) {
    std::cout << "feasible points: " << res.feasible_count << "\nbest value: " << res.best_value
              << "\nbest point: " << doc["best_point"].dump() << "\n";
  } else {
    std::cout << "no feasible grid point\n";
  }
  return res.best_point ? kExitOk : kExitNoFeasiblePoint;
}

int cmd_classify(const std::string& expr_text, const std::vector<std::string>& var_flags) {
  ExprPtr expr;
  std::vector<std::string> names;
  try {
    expr = parse_expr(expr_text, &names);
  } catch (const std::invalid_argument& e) {
    fail("E_INPUT", e.what());
  }

  std::vector<Interval> domain(names.size(), Interval::whole());
  for (const auto& flag : var_flags) {
    const auto eq = flag.find('=');
    if (eq == std::string::npos) fail("E_INPUT", "--var expects name=[lo,hi]");
    const std::string name = flag.substr(0, eq);
    Interval iv{0, 0};
    try {
      iv = parse_interval(flag.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      fail("E_INPUT", e.what());
    }
    bool found = false;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) {
        domain[i] = iv;
        found = true;
      }
    }
    if (!found) fail("E_INPUT", "--var names unknown variable " + name);
  }

  std::cout << to_string(classify(expr, domain)) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial matrix inequality solver toolkit"};
  app.require_subcommand(1);

  SolveArgs sargs;
  auto* solve = app.add_subcommand("solve", "Minimize b subject to P(x,y) >= 0");
  solve->add_option("--problem", sargs.problem_path, "problem JSON file")->required();
  solve->add_option("--rep", sargs.rep,
                    "representation: charpoly|logdet|detr|bound|factorization|all");
  solve->add_option("--restarts", sargs.restarts, "multistart count");
  solve->add_option("--seed", sargs.seed, "random seed");
  solve->add_option("--schedule", sargs.schedule, "weight schedule initial:factor:final");
  solve->add_option("--rank", sargs.rank, "factorization rank");
  solve->add_option("--power", sargs.power, "det power p/q for the detr representation");
  solve->add_option("--out", sargs.out_csv, "trajectory CSV path");
  solve->add_option("--box", sargs.box, "search box lo:hi[,lo:hi...]");
  solve->add_option("--step", sargs.step, "initial step length for gradient descent");
  solve->add_option("--max-iters", sargs.max_iters, "inner iteration cap");
  solve->add_flag("--json", sargs.as_json, "emit the result as JSON");
  solve->add_flag("--newton", sargs.newton, "use damped Newton for continuation stages");

  std::string cp_path, cp_at;
  bool cp_json = false;
  auto* cp = app.add_subcommand("charpoly", "Print the characteristic-polynomial coefficients");
  cp->add_option("--problem", cp_path, "problem JSON file")->required();
  cp->add_option("--at", cp_at, "also evaluate the coefficients at this point");
  cp->add_flag("--json", cp_json, "emit term lists as JSON");

  std::string or_path, or_box;
  double or_h = 1e-2;
  uint64_t or_cap = 100000000ULL;
  bool or_json = false;
  auto* orc = app.add_subcommand("oracle", "Brute-force grid scan of the feasible set");
  orc->set_help_flag("--help", "print help");  // frees -h for the grid step
  orc->add_option("--problem", or_path, "problem JSON file")->required();
  orc->add_option("--h", or_h, "grid step");
  orc->add_option("--cap", or_cap, "maximum number of grid points");
  orc->add_option("--box", or_box, "grid box lo:hi[,lo:hi...]");
  orc->add_flag("--json", or_json, "emit the result as JSON");

  std::string cl_expr;
  std::vector<std::string> cl_vars;
  auto* cl = app.add_subcommand("classify", "Definability class of an s-expression");
  cl->add_option("expr", cl_expr, "prefix s-expression, e.g. \"(exp x)\"")->required();
  cl->add_option("--var", cl_vars, "variable domain name=[lo,hi] (repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(sargs);
    if (cp->parsed()) return cmd_charpoly(cp_path, cp_at, cp_json);
    if (orc->parsed()) return cmd_oracle(or_path, or_h, or_cap, or_box, or_json);
    if (cl->parsed()) return cmd_classify(cl_expr, cl_vars);
  } catch (const std::exception& e) {
    fail("E_INTERNAL", e.what());
  }
  return kExitInputError;
}
