#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pmitame/poly.hpp"
#include "pmitame/rational.hpp"

namespace pmitame {

// Closed interval with +-infinity endpoints allowed. Arithmetic is outward
// conservative: results always contain the true range, so over-approximation
// can only cause false rejections downstream, never false acceptance.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval of(double lo, double hi);
  static Interval whole();
  static Interval point(double v) { return Interval{v, v}; }

  bool bounded() const;
  bool contains(const Interval& inner) const { return lo <= inner.lo && inner.hi <= hi; }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

Interval iadd(const Interval& a, const Interval& b);
Interval imul(const Interval& a, const Interval& b);
Interval ineg(const Interval& a);
Interval irecip(const Interval& a);
Interval ipow(const Interval& a, const Rational& r);
Interval iexp(const Interval& a);
Interval ilog(const Interval& a);
Interval isin(const Interval& a);
Interval icos(const Interval& a);

// Smallest supported structure whose definable sets contain the expression's
// graph. NOT_DEFINABLE_HERE means "not definable in the structures this tool
// supports", not a proof of non-definability.
enum class StructureLabel { SEMIALG, AN, EXP, AN_EXP, NOT_DEFINABLE_HERE };

const char* to_string(StructureLabel label);
StructureLabel lub(StructureLabel a, StructureLabel b);

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Expression tree over the curated primitive set: polynomials (+, *, neg,
// integer powers), rational powers, exp/log, reciprocal, and restricted
// analytic sin/cos carrying an explicit bounded domain interval.
class Expr {
 public:
  enum class Kind {
    constant,
    variable,
    add,
    mul,
    neg,
    pow,
    exp_fn,
    log_fn,
    recip,
    restricted,
  };

  static ExprPtr constant(double value);
  static ExprPtr variable(int index);
  static ExprPtr add(ExprPtr a, ExprPtr b);
  static ExprPtr mul(ExprPtr a, ExprPtr b);
  static ExprPtr neg(ExprPtr a);
  static ExprPtr pow(ExprPtr base, Rational exponent);
  static ExprPtr exp(ExprPtr a);
  static ExprPtr log(ExprPtr a);
  static ExprPtr recip(ExprPtr a);
  // name must be "sin" or "cos"; domain must be a bounded interval.
  static ExprPtr restricted(const std::string& name, ExprPtr arg, Interval domain);

  // Sum of coef * prod var^e terms for an existing polynomial.
  static ExprPtr from_polynomial(const Polynomial& p);

  Kind kind() const { return kind_; }
  double constant_value() const { return value_; }
  int variable_index() const { return var_; }
  const Rational& exponent() const { return exponent_; }
  const std::string& fn_name() const { return name_; }
  const Interval& domain() const { return domain_; }
  const ExprPtr& child(int i) const { return children_[i]; }
  int child_count() const { return static_cast<int>(children_.size()); }

  int max_var() const;
  // Numeric evaluation; a restricted node evaluates to 0 outside its declared
  // domain, matching the restricted-function convention.
  double eval(std::span<const double> point) const;

 private:
  Kind kind_;
  double value_ = 0.0;
  int var_ = -1;
  Rational exponent_{0, 1};
  std::string name_;
  Interval domain_{0.0, 0.0};
  std::vector<ExprPtr> children_;

  explicit Expr(Kind k) : kind_(k) {}
};

struct ClassifyResult {
  StructureLabel label = StructureLabel::SEMIALG;
  Interval range = Interval::point(0.0);
};

// Bottom-up interval propagation plus label join. domain gives one interval
// per variable index; missing entries default to the whole line.
ClassifyResult classify_full(const ExprPtr& e, std::span<const Interval> domain);
StructureLabel classify(const ExprPtr& e, std::span<const Interval> domain);

// Samples e on a uniform grid of n points over the interval and counts the
// maximal runs where e > level. A sampling heuristic: the reported count is a
// lower bound on the number of connected components of {x : e(x) > level}.
int count_components_1d(const ExprPtr& e, double level, const Interval& interval, int samples);

// Prefix s-expression parser, e.g. "(sin (recip x) :domain (0 1])".
// Variables are assigned indices in order of first appearance; names are
// reported through var_names when non-null.
ExprPtr parse_expr(std::string_view text, std::vector<std::string>* var_names = nullptr);

// Interval literal parser, e.g. "[0, 12.6]" or "(0 1]". Bracket style is
// accepted but not distinguished; classification works on closed hulls.
Interval parse_interval(std::string_view text);

}  // namespace pmitame
