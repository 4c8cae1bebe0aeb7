#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "pmitame/problem.hpp"

namespace pmitame {

struct ProblemFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using AnyProblem = std::variant<PmiProblem, MatrixVarProblem>;

// Term-list form: [{"coef": c, "exps": [e0, ..., e_{n-1}]}, ...]
nlohmann::json polynomial_to_json(const Polynomial& p);
Polynomial polynomial_from_json(const nlohmann::json& terms, uint32_t num_vars);

// Problem document schema:
//   kind:      "pmi" | "matrixvar"
//   vars:      [{"name": ..., "block": "x"|"y"}, ...]        (pmi; x block first)
//   objective: term list over the declared variables          (pmi; y block only)
//   matrix:    {"dim": m, "entries": [lower-triangle term lists, row-major]}
//   m, Q:      dimension and term list over X_ij (i <= j)     (matrixvar)
//   box:       [[lo, hi], ...]                                 (optional)
//   trace_one: bool                                            (matrixvar)
AnyProblem problem_from_json(const nlohmann::json& doc);
nlohmann::json problem_to_json(const AnyProblem& prob);

AnyProblem load_problem(const std::filesystem::path& path);

}  // namespace pmitame
