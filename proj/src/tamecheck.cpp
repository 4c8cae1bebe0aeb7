#include "pmitame/tamecheck.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pmitame {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Interval Interval::of(double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
    throw std::invalid_argument("Interval: invalid endpoints");
  }
  return Interval{lo, hi};
}

Interval Interval::whole() { return Interval{-kInf, kInf}; }

bool Interval::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

namespace {

// Multiplication on extended reals with the convention 0 * inf = 0, which is
// safe here because a zero factor means the exact product is zero.
double xmul(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

}  // namespace

Interval iadd(const Interval& a, const Interval& b) { return Interval{a.lo + b.lo, a.hi + b.hi}; }

Interval imul(const Interval& a, const Interval& b) {
  const double c[4] = {xmul(a.lo, b.lo), xmul(a.lo, b.hi), xmul(a.hi, b.lo), xmul(a.hi, b.hi)};
  return Interval{std::min({c[0], c[1], c[2], c[3]}), std::max({c[0], c[1], c[2], c[3]})};
}

Interval ineg(const Interval& a) { return Interval{-a.hi, -a.lo}; }

Interval irecip(const Interval& a) {
  if (a.lo > 0.0 || a.hi < 0.0) {
    return Interval{1.0 / a.hi, 1.0 / a.lo};
  }
  // Zero inside (or on the edge of) the range: the image is unbounded.
  return Interval::whole();
}

Interval ipow(const Interval& a, const Rational& r) {
  if (r.num == 0) return Interval::point(1.0);
  auto pow_pt = [&](double v) { return std::pow(v, r.to_double()); };
  if (r.is_integer()) {
    const long long e = r.num;
    if (e > 0) {
      if (e % 2 == 1 || a.lo >= 0.0) return Interval{pow_pt(a.lo), pow_pt(a.hi)};
      if (a.hi <= 0.0) return Interval{pow_pt(a.hi), pow_pt(a.lo)};
      return Interval{0.0, std::max(pow_pt(a.lo), pow_pt(a.hi))};  // even power across 0
    }
    return irecip(ipow(a, Rational::of(-e, 1)));
  }
  // True rational power: defined here only for non-negative bases.
  const Interval base{std::max(a.lo, 0.0), std::max(a.hi, 0.0)};
  if (r.num > 0) return Interval{pow_pt(base.lo), pow_pt(base.hi)};
  return irecip(ipow(base, Rational::of(-r.num, r.den)));
}

Interval iexp(const Interval& a) { return Interval{std::exp(a.lo), std::exp(a.hi)}; }

Interval ilog(const Interval& a) {
  if (a.hi <= 0.0) return Interval{-kInf, -kInf};
  return Interval{a.lo <= 0.0 ? -kInf : std::log(a.lo), std::log(a.hi)};
}

namespace {

Interval bounded_trig(const Interval& a, bool is_sin) {
  if (!a.bounded() || a.hi - a.lo >= 2.0 * M_PI) return Interval{-1.0, 1.0};
  double lo = kInf, hi = -kInf;
  auto visit = [&](double t) {
    const double v = is_sin ? std::sin(t) : std::cos(t);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  visit(a.lo);
  visit(a.hi);
  // Interior critical points of sin are at pi/2 + k*pi, of cos at k*pi.
  const double first_crit = is_sin ? 0.5 * M_PI : 0.0;
  const double k = std::ceil((a.lo - first_crit) / M_PI);
  for (double t = first_crit + k * M_PI; t <= a.hi; t += M_PI) {
    if (t >= a.lo) visit(t);
  }
  return Interval{std::max(lo, -1.0), std::min(hi, 1.0)};
}

}  // namespace

Interval isin(const Interval& a) { return bounded_trig(a, true); }
Interval icos(const Interval& a) { return bounded_trig(a, false); }

const char* to_string(StructureLabel label) {
  switch (label) {
    case StructureLabel::SEMIALG: return "SEMIALG";
    case StructureLabel::AN: return "AN";
    case StructureLabel::EXP: return "EXP";
    case StructureLabel::AN_EXP: return "AN_EXP";
    case StructureLabel::NOT_DEFINABLE_HERE: return "NOT_DEFINABLE_HERE";
  }
  return "?";
}

StructureLabel lub(StructureLabel a, StructureLabel b) {
  if (a == StructureLabel::NOT_DEFINABLE_HERE || b == StructureLabel::NOT_DEFINABLE_HERE) {
    return StructureLabel::NOT_DEFINABLE_HERE;
  }
  auto has_an = [](StructureLabel s) {
    return s == StructureLabel::AN || s == StructureLabel::AN_EXP;
  };
  auto has_exp = [](StructureLabel s) {
    return s == StructureLabel::EXP || s == StructureLabel::AN_EXP;
  };
  const bool an = has_an(a) || has_an(b);
  const bool ex = has_exp(a) || has_exp(b);
  if (an && ex) return StructureLabel::AN_EXP;
  if (an) return StructureLabel::AN;
  if (ex) return StructureLabel::EXP;
  return StructureLabel::SEMIALG;
}

ExprPtr Expr::constant(double value) {
  auto e = std::shared_ptr<Expr>(new Expr(Kind::constant));
  e->value_ = value;
  return e;
}

ExprPtr Expr::variable(int index) {
  if (index < 0) throw std::invalid_argument("Expr::variable: negative index");
  auto e = std::shared_ptr<Expr>(new Expr(Kind::variable));
  e->var_ = index;
  return e;
}

ExprPtr Expr::add(ExprPtr a, ExprPtr b) {
  if (!a || !b) throw std::invalid_argument("Expr::add: null child");
  auto e = std::shared_ptr<Expr>(new Expr(Kind::add));
  e->children_ = {std::move(a), std::move(b)};
  return e;
}

ExprPtr Expr::mul(ExprPtr a, ExprPtr b) {
  if (!a || !b) throw std::invalid_argument("Expr::mul: null child");
  auto e = std::shared_ptr<Expr>(new Expr(Kind::mul));
  e->children_ = {std::move(a), std::move(b)};
  return e;
}

ExprPtr Expr::neg(ExprPtr a) {
  if (!a) throw std::invalid_argument("Expr::neg: null child");
  auto e = std::shared_ptr<Expr>(new Expr(Kind::neg));
  e->children_ = {std::move(a)};
  return e;
}

ExprPtr Expr::pow(ExprPtr base, Rational exponent) {
  if (!base) throw std::invalid_argument("Expr::pow: null child");
  auto e = std::shared_ptr<Expr>(new Expr(Kind::pow));
  e->children_ = {std::move(base)};
  e->exponent_ = exponent;
  return e;
}

ExprPtr Expr::exp(ExprPtr a) {
  if (!a) throw std::invalid_argument("Expr::exp: null child");
  auto e = std::shared_ptr<Expr>(new Expr(Kind::exp_fn));
  e->children_ = {std::move(a)};
  return e;
}

ExprPtr Expr::log(ExprPtr a) {
  if (!a) throw std::invalid_argument("Expr::log: null child");
  auto e = std::shared_ptr<Expr>(new Expr(Kind::log_fn));
  e->children_ = {std::move(a)};
  return e;
}

ExprPtr Expr::recip(ExprPtr a) {
  if (!a) throw std::invalid_argument("Expr::recip: null child");
  auto e = std::shared_ptr<Expr>(new Expr(Kind::recip));
  e->children_ = {std::move(a)};
  return e;
}

ExprPtr Expr::restricted(const std::string& name, ExprPtr arg, Interval domain) {
  if (name != "sin" && name != "cos") {
    throw std::invalid_argument("Expr::restricted: unsupported primitive " + name);
  }
  if (!domain.bounded()) {
    throw std::invalid_argument("Expr::restricted: declared domain must be bounded");
  }
  if (!arg) throw std::invalid_argument("Expr::restricted: null child");
  auto e = std::shared_ptr<Expr>(new Expr(Kind::restricted));
  e->name_ = name;
  e->domain_ = domain;
  e->children_ = {std::move(arg)};
  return e;
}

ExprPtr Expr::from_polynomial(const Polynomial& p) {
  ExprPtr sum;
  for (const auto& [mono, coef] : p.terms()) {
    ExprPtr term = Expr::constant(coef);
    for (const auto& [var, exp] : mono.factors()) {
      ExprPtr v = Expr::variable(static_cast<int>(var));
      if (exp > 1) v = Expr::pow(std::move(v), Rational::of(static_cast<long long>(exp), 1));
      term = Expr::mul(std::move(term), std::move(v));
    }
    sum = sum ? Expr::add(std::move(sum), std::move(term)) : std::move(term);
  }
  return sum ? sum : Expr::constant(0.0);
}

int Expr::max_var() const {
  int m = kind_ == Kind::variable ? var_ : -1;
  for (const auto& c : children_) m = std::max(m, c->max_var());
  return m;
}

double Expr::eval(std::span<const double> point) const {
  switch (kind_) {
    case Kind::constant: return value_;
    case Kind::variable:
      if (static_cast<std::size_t>(var_) >= point.size()) {
        throw std::invalid_argument("Expr::eval: point dimension mismatch");
      }
      return point[var_];
    case Kind::add: return children_[0]->eval(point) + children_[1]->eval(point);
    case Kind::mul: return children_[0]->eval(point) * children_[1]->eval(point);
    case Kind::neg: return -children_[0]->eval(point);
    case Kind::pow: return std::pow(children_[0]->eval(point), exponent_.to_double());
    case Kind::exp_fn: return std::exp(children_[0]->eval(point));
    case Kind::log_fn: return std::log(children_[0]->eval(point));
    case Kind::recip: return 1.0 / children_[0]->eval(point);
    case Kind::restricted: {
      const double t = children_[0]->eval(point);
      if (!domain_.contains(t)) return 0.0;
      return name_ == "sin" ? std::sin(t) : std::cos(t);
    }
  }
  throw std::logic_error("Expr::eval: unreachable");
}

namespace {

ClassifyResult classify_node(const Expr& e, std::span<const Interval> domain) {
  using K = Expr::Kind;
  auto reject = [](const Interval& range) {
    return ClassifyResult{StructureLabel::NOT_DEFINABLE_HERE, range};
  };

  switch (e.kind()) {
    case K::constant:
      return {StructureLabel::SEMIALG, Interval::point(e.constant_value())};
    case K::variable: {
      const auto idx = static_cast<std::size_t>(e.variable_index());
      const Interval r = idx < domain.size() ? domain[idx] : Interval::whole();
      return {StructureLabel::SEMIALG, r};
    }
    default: break;
  }

  std::vector<ClassifyResult> kids;
  kids.reserve(e.child_count());
  StructureLabel label = StructureLabel::SEMIALG;
  for (int i = 0; i < e.child_count(); ++i) {
    kids.push_back(classify_node(*e.child(i), domain));
    label = lub(label, kids.back().label);
  }
  if (label == StructureLabel::NOT_DEFINABLE_HERE) {
    return reject(Interval::whole());
  }

  switch (e.kind()) {
    case K::add: return {label, iadd(kids[0].range, kids[1].range)};
    case K::mul: return {label, imul(kids[0].range, kids[1].range)};
    case K::neg: return {label, ineg(kids[0].range)};
    case K::recip: return {label, irecip(kids[0].range)};
    case K::pow: {
      const Rational& r = e.exponent();
      if (!r.is_integer() && kids[0].range.lo < 0.0) {
        // A genuine rational power needs a non-negative base; the graph
        // y^q = x^p, y >= 0 is semialgebraic only there.
        return reject(Interval::whole());
      }
      return {label, ipow(kids[0].range, r)};
    }
    case K::exp_fn: return {lub(label, StructureLabel::EXP), iexp(kids[0].range)};
    case K::log_fn: return {lub(label, StructureLabel::EXP), ilog(kids[0].range)};
    case K::restricted: {
      const Interval& arg = kids[0].range;
      if (!arg.bounded() || !e.domain().contains(arg)) {
        // Unbounded oscillation escape hatch: the argument leaves the declared
        // compact domain, so the graph is not covered by the restricted
        // primitive.
        return reject(Interval{-1.0, 1.0});
      }
      const Interval r = e.fn_name() == "sin" ? isin(arg) : icos(arg);
      return {lub(label, StructureLabel::AN), r};
    }
    default: break;
  }
  throw std::logic_error("classify: unreachable");
}

}  // namespace

ClassifyResult classify_full(const ExprPtr& e, std::span<const Interval> domain) {
  if (!e) throw std::invalid_argument("classify: null expression");
  return classify_node(*e, domain);
}

StructureLabel classify(const ExprPtr& e, std::span<const Interval> domain) {
  return classify_full(e, domain).label;
}

int count_components_1d(const ExprPtr& e, double level, const Interval& interval, int samples) {
  if (!e) throw std::invalid_argument("count_components_1d: null expression");
  if (samples < 2) throw std::invalid_argument("count_components_1d: need at least 2 samples");
  if (e->max_var() > 0) {
    throw std::invalid_argument("count_components_1d: expression must be univariate");
  }
  int count = 0;
  bool inside = false;
  for (int i = 0; i < samples; ++i) {
    const double x = interval.lo + (interval.hi - interval.lo) * i / (samples - 1);
    const double v = e->eval(std::span<const double>(&x, 1));
    const bool above = v > level;
    if (above && !inside) ++count;
    inside = above;
  }
  return count;
}

// --- s-expression parser ---------------------------------------------------

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;
  std::vector<std::string>* names;
  std::vector<std::string> local_names;

  std::vector<std::string>& name_table() { return names ? *names : local_names; }

  void skip_ws() {
    while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ',')) {
      ++pos;
    }
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    if (pos >= text.size()) throw std::invalid_argument("expression parse error: unexpected end");
    return text[pos];
  }

  void expect(char c) {
    if (peek() != c) {
      throw std::invalid_argument(std::string("expression parse error: expected '") + c + "'");
    }
    ++pos;
  }

  std::string token() {
    skip_ws();
    const std::size_t start = pos;
    while (pos < text.size()) {
      const char c = text[pos];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '[' ||
          c == ']' || c == ',') {
        break;
      }
      ++pos;
    }
    if (pos == start) throw std::invalid_argument("expression parse error: empty token");
    return std::string(text.substr(start, pos - start));
  }

  static bool looks_numeric(const std::string& t) {
    const char c = t[0];
    return std::isdigit(static_cast<unsigned char>(c)) ||
           ((c == '-' || c == '+' || c == '.') && t.size() > 1);
  }

  double number(const std::string& t) {
    if (t == "inf" || t == "+inf") return kInf;
    if (t == "-inf") return -kInf;
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("expression parse error: bad number " + t);
    return v;
  }

  Rational rational(const std::string& t) {
    const auto slash = t.find('/');
    if (slash == std::string::npos) {
      return Rational::of(std::stoll(t), 1);
    }
    return Rational::of(std::stoll(t.substr(0, slash)), std::stoll(t.substr(slash + 1)));
  }

  Interval interval_literal() {
    skip_ws();
    if (pos >= text.size() || (text[pos] != '(' && text[pos] != '[')) {
      throw std::invalid_argument("expression parse error: expected interval");
    }
    ++pos;
    const double lo = number(token());
    const double hi = number(token());
    skip_ws();
    if (pos >= text.size() || (text[pos] != ')' && text[pos] != ']')) {
      throw std::invalid_argument("expression parse error: unterminated interval");
    }
    ++pos;
    return Interval::of(lo, hi);
  }

  ExprPtr atom(const std::string& t) {
    if (looks_numeric(t)) return Expr::constant(number(t));
    auto& table = name_table();
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (table[i] == t) return Expr::variable(static_cast<int>(i));
    }
    table.push_back(t);
    return Expr::variable(static_cast<int>(table.size() - 1));
  }

  ExprPtr expr() {
    skip_ws();
    if (peek() != '(') return atom(token());
    expect('(');
    const std::string op = token();

    auto fold = [&](auto combine) {
      std::vector<ExprPtr> args;
      while (peek() != ')') args.push_back(expr());
      expect(')');
      if (args.empty()) throw std::invalid_argument("expression parse error: empty form");
      ExprPtr acc = args[0];
      for (std::size_t i = 1; i < args.size(); ++i) acc = combine(acc, args[i]);
      return std::pair<ExprPtr, std::size_t>{acc, args.size()};
    };

    if (op == "+") return fold([](ExprPtr a, ExprPtr b) { return Expr::add(a, b); }).first;
    if (op == "*") return fold([](ExprPtr a, ExprPtr b) { return Expr::mul(a, b); }).first;
    if (op == "-") {
      std::vector<ExprPtr> args;
      while (peek() != ')') args.push_back(expr());
      expect(')');
      if (args.empty()) throw std::invalid_argument("expression parse error: empty form");
      if (args.size() == 1) return Expr::neg(args[0]);
      ExprPtr acc = args[0];
      for (std::size_t i = 1; i < args.size(); ++i) acc = Expr::add(acc, Expr::neg(args[i]));
      return acc;
    }
    if (op == "pow") {
      ExprPtr base = expr();
      const Rational r = rational(token());
      expect(')');
      return Expr::pow(std::move(base), r);
    }
    if (op == "exp" || op == "log" || op == "recip") {
      ExprPtr arg = expr();
      expect(')');
      if (op == "exp") return Expr::exp(std::move(arg));
      if (op == "log") return Expr::log(std::move(arg));
      return Expr::recip(std::move(arg));
    }
    if (op == "sin" || op == "cos") {
      ExprPtr arg = expr();
      skip_ws();
      const std::string key = token();
      if (key != ":domain") {
        throw std::invalid_argument("expression parse error: " + op + " needs :domain (a b)");
      }
      const Interval dom = interval_literal();
      expect(')');
      return Expr::restricted(op, std::move(arg), dom);
    }
    throw std::invalid_argument("expression parse error: unknown operator " + op);
  }
};

}  // namespace

ExprPtr parse_expr(std::string_view text, std::vector<std::string>* var_names) {
  Parser p{text, 0, var_names, {}};
  ExprPtr e = p.expr();
  if (!p.eof()) throw std::invalid_argument("expression parse error: trailing input");
  return e;
}

Interval parse_interval(std::string_view text) {
  Parser p{text, 0, nullptr, {}};
  const Interval iv = p.interval_literal();
  if (!p.eof()) throw std::invalid_argument("interval parse error: trailing input");
  return iv;
}

}  // namespace pmitame
