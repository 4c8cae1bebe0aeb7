#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pmitame/poly.hpp"
#include "pmitame/polymatrix.hpp"

namespace pmitame {

// Per-variable closed interval bounds.
struct Box {
  std::vector<std::array<double, 2>> bounds;

  std::size_t size() const { return bounds.size(); }
  bool contains(std::span<const double> point, double slack = 0.0) const;
  void validate() const;  // lower < upper per coordinate

  static Box cube(std::size_t n, double lo, double hi);
};

// min b(y) subject to P(x, y) >= 0 (PSD), with x the first k variables and y
// the remaining l variables of a shared (k+l)-variable space.
struct PmiProblem {
  PolyMatrix P;
  Polynomial b;  // must reference only y-block variables (indices k..k+l-1)
  int k = 0;
  int l = 0;
  std::optional<Box> box;
  std::vector<std::string> var_names;  // optional; x-block then y-block

  int num_vars() const { return k + l; }
  void validate() const;
  // Search box: explicit box if present, else [-2, 2] per variable.
  Box search_box() const;
};

// Index of entry (i, j), i <= j, in the packed upper-triangle vectorization
// used for matrix-variable objectives: (0,0), (0,1), ..., (0,m-1), (1,1), ...
int svec_index(int i, int j, int m);
int svec_size(int m);

// min Q(X) over symmetric X >= 0 with Tr(X) = 1, Q given as a polynomial in
// the svec coordinates of X.
struct MatrixVarProblem {
  int m = 0;
  Polynomial q;  // over svec_size(m) variables
  bool trace_one = true;
  std::vector<std::string> var_names;  // optional; svec order

  void validate() const;
};

}  // namespace pmitame
