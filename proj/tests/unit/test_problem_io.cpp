#include <doctest.h>

#include "pmitame/problem_io.hpp"
#include "support/test_support.hpp"

using namespace pmitame;
using namespace pmitame::testing;
using nlohmann::json;

namespace {

json ex1_doc() {
  return json::parse(R"JSON({
    "kind": "pmi",
    "vars": [{"name": "x", "block": "x"}, {"name": "y", "block": "y"}],
    "objective": [{"coef": 1.0, "exps": [0, 1]}],
    "matrix": {
      "dim": 2,
      "entries": [
        [{"coef": 1.0, "exps": [0, 0]}, {"coef": -16.0, "exps": [1, 1]}],
        [{"coef": 1.0, "exps": [1, 0]}],
        [{"coef": 1.0, "exps": [0, 0]}, {"coef": -1.0, "exps": [2, 0]},
         {"coef": -1.0, "exps": [0, 2]}]
      ]
    },
    "box": [[-2.0, 2.0], [-2.0, 2.0]]
  })JSON");
}

}  // namespace

TEST_CASE("pmi documents parse to the expected problem") {
  const AnyProblem any = problem_from_json(ex1_doc());
  const auto& prob = std::get<PmiProblem>(any);
  CHECK(prob.k == 1);
  CHECK(prob.l == 1);
  CHECK(prob.var_names == std::vector<std::string>{"x", "y"});
  const PmiProblem want = example1();
  CHECK(prob.b == want.b);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j <= i; ++j) CHECK(prob.P.entry(i, j) == want.P.entry(i, j));
}

TEST_CASE("parse, serialize, parse is the identity") {
  const AnyProblem first = problem_from_json(ex1_doc());
  const json serialized = problem_to_json(first);
  const AnyProblem second = problem_from_json(serialized);
  CHECK(problem_to_json(second) == serialized);

  // Same for a matrix-variable document.
  const json mv = json::parse(R"JSON({
    "kind": "matrixvar",
    "m": 2,
    "Q": [{"coef": 1.0, "exps": [1, 0, 0]}, {"coef": 2.0, "exps": [0, 0, 1]}],
    "trace_one": true
  })JSON");
  const AnyProblem mv1 = problem_from_json(mv);
  const json mv_serialized = problem_to_json(mv1);
  CHECK(problem_to_json(problem_from_json(mv_serialized)) == mv_serialized);
  CHECK(std::get<MatrixVarProblem>(mv1).m == 2);
}

TEST_CASE("objective referencing the x block is a hard error") {
  json doc = ex1_doc();
  doc["objective"] = json::array({json{{"coef", 1.0}, {"exps", {1, 0}}}});
  CHECK_THROWS_AS(problem_from_json(doc), ProblemFormatError);
}

TEST_CASE("block order and schema violations are rejected") {
  json doc = ex1_doc();
  doc["vars"] = json::array({json{{"name", "y"}, {"block", "y"}},
                             json{{"name", "x"}, {"block", "x"}}});
  CHECK_THROWS_AS(problem_from_json(doc), ProblemFormatError);

  json bad_exps = ex1_doc();
  bad_exps["objective"] = json::array({json{{"coef", 1.0}, {"exps", {0, 1, 0}}}});
  CHECK_THROWS_AS(problem_from_json(bad_exps), ProblemFormatError);

  json no_kind = ex1_doc();
  no_kind.erase("kind");
  CHECK_THROWS_AS(problem_from_json(no_kind), ProblemFormatError);

  json bad_box = ex1_doc();
  bad_box["box"] = json::array({json::array({2.0, -2.0}), json::array({-2.0, 2.0})});
  CHECK_THROWS_AS(problem_from_json(bad_box), ProblemFormatError);
}

TEST_CASE("polynomial terms serialize in canonical order") {
  const PmiProblem prob = example1();
  const json terms = polynomial_to_json(charpoly(prob.P).q[0]);
  REQUIRE(terms.size() == 4);
  // Graded order: constant first, then the degree-2 terms x^2, xy, y^2.
  CHECK(terms[0]["exps"] == json::array({0, 0}));
  CHECK(terms[1]["exps"] == json::array({2, 0}));
  CHECK(terms[2]["exps"] == json::array({1, 1}));
  CHECK(terms[3]["exps"] == json::array({0, 2}));
}
