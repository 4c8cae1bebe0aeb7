#include "pmitame/problem_io.hpp"

#include <fstream>

namespace pmitame {

using nlohmann::json;

json polynomial_to_json(const Polynomial& p) {
  json terms = json::array();
  for (const auto& [mono, coef] : p.terms()) {
    json exps = json::array();
    for (uint32_t v = 0; v < p.num_vars(); ++v) exps.push_back(mono.exponent(v));
    terms.push_back(json{{"coef", coef}, {"exps", exps}});
  }
  return terms;
}

Polynomial polynomial_from_json(const json& terms, uint32_t num_vars) {
  if (!terms.is_array()) throw ProblemFormatError("polynomial: expected an array of terms");
  Polynomial p(num_vars);
  for (const auto& term : terms) {
    if (!term.is_object() || !term.contains("coef") || !term.contains("exps")) {
      throw ProblemFormatError("polynomial term: expected {\"coef\": c, \"exps\": [...]}");
    }
    const auto& exps = term["exps"];
    if (!exps.is_array() || exps.size() != num_vars) {
      throw ProblemFormatError("polynomial term: exps length must equal the variable count");
    }
    std::vector<std::pair<uint32_t, uint32_t>> factors;
    for (uint32_t v = 0; v < num_vars; ++v) {
      const auto e = exps[v];
      if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<long long>() >= 0)) {
        throw ProblemFormatError("polynomial term: exponents must be non-negative integers");
      }
      const auto ev = e.get<uint32_t>();
      if (ev > 0) factors.emplace_back(v, ev);
    }
    p.add_term(Monomial(std::move(factors)), term["coef"].get<double>());
  }
  return p;
}

namespace {

std::optional<Box> box_from_json(const json& doc, std::size_t expect) {
  if (!doc.contains("box")) return std::nullopt;
  const auto& b = doc["box"];
  if (!b.is_array() || b.size() != expect) {
    throw ProblemFormatError("box: expected one [lo, hi] pair per variable");
  }
  Box box;
  for (const auto& pair : b) {
    if (!pair.is_array() || pair.size() != 2) {
      throw ProblemFormatError("box: expected [lo, hi] pairs");
    }
    box.bounds.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  try {
    box.validate();
  } catch (const std::invalid_argument& e) {
    throw ProblemFormatError(e.what());
  }
  return box;
}

PmiProblem pmi_from_json(const json& doc) {
  if (!doc.contains("vars") || !doc["vars"].is_array() || doc["vars"].empty()) {
    throw ProblemFormatError("pmi: missing vars list");
  }
  std::vector<std::string> names;
  int k = 0, l = 0;
  bool seen_y = false;
  for (const auto& v : doc["vars"]) {
    if (!v.is_object() || !v.contains("name") || !v.contains("block")) {
      throw ProblemFormatError("pmi: each var needs {\"name\", \"block\"}");
    }
    const std::string block = v["block"].get<std::string>();
    names.push_back(v["name"].get<std::string>());
    if (block == "x") {
      if (seen_y) throw ProblemFormatError("pmi: x-block variables must precede the y-block");
      ++k;
    } else if (block == "y") {
      seen_y = true;
      ++l;
    } else {
      throw ProblemFormatError("pmi: block must be \"x\" or \"y\"");
    }
  }
  const auto n = static_cast<uint32_t>(k + l);

  if (!doc.contains("objective")) throw ProblemFormatError("pmi: missing objective");
  if (!doc.contains("matrix") || !doc["matrix"].is_object()) {
    throw ProblemFormatError("pmi: missing matrix");
  }
  const auto& mat = doc["matrix"];
  if (!mat.contains("dim") || !mat.contains("entries")) {
    throw ProblemFormatError("pmi: matrix needs dim and entries");
  }
  const int m = mat["dim"].get<int>();
  if (m <= 0) throw ProblemFormatError("pmi: matrix dim must be positive");
  const auto& entries = mat["entries"];
  const std::size_t expect = static_cast<std::size_t>(m) * (m + 1) / 2;
  if (!entries.is_array() || entries.size() != expect) {
    throw ProblemFormatError("pmi: entries must list the row-major lower triangle");
  }

  PolyMatrix P(m, n);
  std::size_t idx = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) P.set_entry(i, j, polynomial_from_json(entries[idx++], n));
  }

  PmiProblem prob{std::move(P), polynomial_from_json(doc["objective"], n), k, l,
                  box_from_json(doc, n), std::move(names)};
  try {
    prob.validate();
  } catch (const std::invalid_argument& e) {
    throw ProblemFormatError(e.what());
  }
  return prob;
}

MatrixVarProblem matrixvar_from_json(const json& doc) {
  if (!doc.contains("m")) throw ProblemFormatError("matrixvar: missing m");
  const int m = doc["m"].get<int>();
  if (m <= 0) throw ProblemFormatError("matrixvar: m must be positive");
  if (!doc.contains("Q")) throw ProblemFormatError("matrixvar: missing Q");

  MatrixVarProblem prob;
  prob.m = m;
  prob.q = polynomial_from_json(doc["Q"], static_cast<uint32_t>(svec_size(m)));
  prob.trace_one = doc.value("trace_one", true);
  if (doc.contains("vars")) {
    for (const auto& v : doc["vars"]) {
      prob.var_names.push_back(v.is_object() ? v["name"].get<std::string>()
                                             : v.get<std::string>());
    }
    if (prob.var_names.size() != static_cast<std::size_t>(svec_size(m))) {
      throw ProblemFormatError("matrixvar: vars must name the m(m+1)/2 svec entries");
    }
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        prob.var_names.push_back("X" + std::to_string(i) + std::to_string(j));
      }
  }
  try {
    prob.validate();
  } catch (const std::invalid_argument& e) {
    throw ProblemFormatError(e.what());
  }
  return prob;
}

}  // namespace

AnyProblem problem_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind")) {
    throw ProblemFormatError("problem: missing kind");
  }
  const std::string kind = doc["kind"].get<std::string>();
  if (kind == "pmi") return pmi_from_json(doc);
  if (kind == "matrixvar") return matrixvar_from_json(doc);
  throw ProblemFormatError("problem: kind must be \"pmi\" or \"matrixvar\"");
}

nlohmann::json problem_to_json(const AnyProblem& prob) {
  json doc;
  if (const auto* pmi = std::get_if<PmiProblem>(&prob)) {
    doc["kind"] = "pmi";
    json vars = json::array();
    for (int i = 0; i < pmi->num_vars(); ++i) {
      const std::string name = i < static_cast<int>(pmi->var_names.size())
                                   ? pmi->var_names[i]
                                   : "v" + std::to_string(i);
      vars.push_back(json{{"block", i < pmi->k ? "x" : "y"}, {"name", name}});
    }
    doc["vars"] = vars;
    doc["objective"] = polynomial_to_json(pmi->b);
    json entries = json::array();
    for (int i = 0; i < pmi->P.dim(); ++i)
      for (int j = 0; j <= i; ++j) entries.push_back(polynomial_to_json(pmi->P.entry(i, j)));
    doc["matrix"] = json{{"dim", pmi->P.dim()}, {"entries", entries}};
    if (pmi->box) {
      json b = json::array();
      for (const auto& [lo, hi] : pmi->box->bounds) b.push_back(json::array({lo, hi}));
      doc["box"] = b;
    }
  } else {
    const auto& mv = std::get<MatrixVarProblem>(prob);
    doc["kind"] = "matrixvar";
    doc["m"] = mv.m;
    doc["Q"] = polynomial_to_json(mv.q);
    doc["trace_one"] = mv.trace_one;
    json vars = json::array();
    for (const auto& n : mv.var_names) vars.push_back(json{{"name", n}});
    doc["vars"] = vars;
  }
  return doc;
}

AnyProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ProblemFormatError("cannot open problem file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ProblemFormatError(std::string("problem file is not valid JSON: ") + e.what());
  }
  return problem_from_json(doc);
}

}  // namespace pmitame
