#include "pmitame/repr.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace pmitame {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* repr_id(ReprKind kind) {
  switch (kind) {
    case ReprKind::indicator: return "indicator";
    case ReprKind::charpoly: return "charpoly";
    case ReprKind::factorization: return "factorization";
    case ReprKind::logdet: return "logdet";
    case ReprKind::detr: return "detr";
    case ReprKind::bound: return "bound";
  }
  return "?";
}

std::optional<ReprKind> repr_from_id(std::string_view id) {
  for (ReprKind k : {ReprKind::indicator, ReprKind::charpoly, ReprKind::factorization,
                     ReprKind::logdet, ReprKind::detr, ReprKind::bound}) {
    if (id == repr_id(k)) return k;
  }
  return std::nullopt;
}

SymMatrix Objective::hessian(std::span<const double>) const {
  throw std::logic_error("Objective: exact Hessian not available for this representation");
}

namespace {

std::vector<double> eval_polys(const std::vector<Polynomial>& polys,
                               std::span<const double> x) {
  std::vector<double> out;
  out.reserve(polys.size());
  for (const auto& p : polys) out.push_back(p.eval(x));
  return out;
}

struct PolyWithDerivs {
  Polynomial p;
  std::vector<Polynomial> grad;
  std::vector<std::vector<Polynomial>> hess;

  explicit PolyWithDerivs(Polynomial poly)
      : p(std::move(poly)), grad(gradient(p)), hess(hessian(p)) {}

  double value_at(std::span<const double> x) const { return p.eval(x); }
  std::vector<double> grad_at(std::span<const double> x) const { return eval_polys(grad, x); }
  SymMatrix hess_at(std::span<const double> x) const {
    const int n = static_cast<int>(p.num_vars());
    SymMatrix h(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) h.set(i, j, hess[i][j].eval(x));
    return h;
  }
};

// ---------------------------------------------------------------------------

class IndicatorObjective final : public Objective {
 public:
  IndicatorObjective(const PmiProblem& prob, double lambda, double psd_tol)
      : prob_(prob), qs_(charpoly(prob.P)), b_(prob.b), lambda_(lambda), psd_tol_(psd_tol) {}

  int dim() const override { return prob_.num_vars(); }
  ReprKind kind() const override { return ReprKind::indicator; }
  double weight() const override { return lambda_; }
  bool smooth() const override { return false; }

  double value(std::span<const double> x) const override {
    const bool psd = psd_by_descartes(qs_, x, psd_tol_);
    return b_.value_at(x) + (psd ? 0.0 : lambda_);
  }

  std::vector<double> gradient(std::span<const double> x) const override {
    // The indicator contributes zero almost everywhere.
    return b_.grad_at(x);
  }

 private:
  PmiProblem prob_;
  CharPolyCoeffs qs_;
  PolyWithDerivs b_;
  double lambda_;
  double psd_tol_;
};

// ---------------------------------------------------------------------------

class CharpolyObjective final : public Objective {
 public:
  CharpolyObjective(const PmiProblem& prob, double lambda)
      : n_(prob.num_vars()), b_(prob.b), lambda_(lambda) {
    for (auto& qj : charpoly(prob.P).q) q_.emplace_back(std::move(qj));
  }

  int dim() const override { return n_; }
  ReprKind kind() const override { return ReprKind::charpoly; }
  double weight() const override { return lambda_; }

  double value(std::span<const double> x) const override {
    double prod = 1.0;
    for (const auto& qj : q_) prod *= qj.value_at(x);
    return b_.value_at(x) - lambda_ * prod;
  }

  std::vector<double> gradient(std::span<const double> x) const override {
    const auto m = q_.size();
    std::vector<double> vals(m);
    for (std::size_t j = 0; j < m; ++j) vals[j] = q_[j].value_at(x);
    const auto loo = leave_one_out(vals);

    std::vector<double> g = b_.grad_at(x);
    for (std::size_t j = 0; j < m; ++j) {
      const auto gj = q_[j].grad_at(x);
      for (int i = 0; i < n_; ++i) g[i] -= lambda_ * loo[j] * gj[i];
    }
    return g;
  }

  bool has_hessian() const override { return true; }

  SymMatrix hessian(std::span<const double> x) const override {
    const auto m = q_.size();
    std::vector<double> vals(m);
    std::vector<std::vector<double>> grads(m);
    for (std::size_t j = 0; j < m; ++j) {
      vals[j] = q_[j].value_at(x);
      grads[j] = q_[j].grad_at(x);
    }
    const auto loo = leave_one_out(vals);

    SymMatrix h = b_.hess_at(x);
    for (std::size_t j = 0; j < m; ++j) {
      const SymMatrix hj = q_[j].hess_at(x);
      for (int a = 0; a < n_; ++a)
        for (int c = 0; c <= a; ++c) h.set(a, c, h(a, c) - lambda_ * loo[j] * hj(a, c));
    }
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < m; ++k) {
        if (k == j) continue;
        double p2 = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
          if (i != j && i != k) p2 *= vals[i];
        }
        for (int a = 0; a < n_; ++a)
          for (int c = 0; c <= a; ++c) {
            h.set(a, c, h(a, c) - lambda_ * p2 * grads[j][a] * grads[k][c]);
          }
      }
    }
    return h;
  }

 private:
  static std::vector<double> leave_one_out(const std::vector<double>& vals) {
    const auto m = vals.size();
    std::vector<double> prefix(m + 1, 1.0), suffix(m + 1, 1.0);
    for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] * vals[i];
    for (std::size_t i = m; i-- > 0;) suffix[i] = suffix[i + 1] * vals[i];
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) out[i] = prefix[i] * suffix[i + 1];
    return out;
  }

  int n_;
  PolyWithDerivs b_;
  double lambda_;
  std::vector<PolyWithDerivs> q_;
};

// ---------------------------------------------------------------------------

// Shared machinery for the determinant barriers: per-variable entrywise
// derivative matrices of P and their second derivatives.
class BarrierBase : public Objective {
 public:
  BarrierBase(const PmiProblem& prob, double mu)
      : n_(prob.num_vars()), m_(prob.P.dim()), P_(prob.P), b_(prob.b), mu_(mu) {
    dP_.reserve(n_);
    for (int i = 0; i < n_; ++i) {
      PolyMatrix d(m_, P_.num_vars());
      for (int r = 0; r < m_; ++r)
        for (int c = 0; c <= r; ++c) d.set_entry(r, c, P_.entry(r, c).derivative(i));
      dP_.push_back(std::move(d));
    }
    d2P_.reserve(static_cast<std::size_t>(n_) * (n_ + 1) / 2);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j <= i; ++j) {
        PolyMatrix d(m_, P_.num_vars());
        for (int r = 0; r < m_; ++r)
          for (int c = 0; c <= r; ++c) d.set_entry(r, c, dP_[i].entry(r, c).derivative(j));
        d2P_.push_back(std::move(d));
      }
    }
  }

  int dim() const override { return n_; }
  double weight() const override { return mu_; }

 protected:
  struct BarrierEval {
    double logdet;
    SymMatrix inv;
    std::vector<double> trace_inv_d;            // t_i = tr(P^-1 dP_i)
    std::vector<std::vector<double>> inv_d;     // P^-1 dP_i, dense row-major
  };

  std::optional<double> logdet_at(std::span<const double> x) const {
    return logdet_chol(P_.eval(x));
  }

  BarrierEval barrier_eval(std::span<const double> x, bool with_second) const {
    const SymMatrix a = P_.eval(x);
    const auto ld = logdet_chol(a);
    if (!ld) {
      throw std::domain_error("barrier gradient requested outside the positive definite cone");
    }
    BarrierEval ev{*ld, inverse_spd(a), {}, {}};
    ev.trace_inv_d.resize(n_);
    if (with_second) ev.inv_d.resize(n_);
    for (int i = 0; i < n_; ++i) {
      const SymMatrix di = dP_[i].eval(x);
      double t = 0.0;
      for (int r = 0; r < m_; ++r)
        for (int c = 0; c < m_; ++c) t += ev.inv(r, c) * di(c, r);
      ev.trace_inv_d[i] = t;
      if (with_second) {
        std::vector<double> prod(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int r = 0; r < m_; ++r)
          for (int c = 0; c < m_; ++c) {
            double s = 0.0;
            for (int k = 0; k < m_; ++k) s += ev.inv(r, k) * di(k, c);
            prod[static_cast<std::size_t>(r) * m_ + c] = s;
          }
        ev.inv_d[i] = std::move(prod);
      }
    }
    return ev;
  }

  // tr(P^-1 dP_i P^-1 dP_j) from cached products.
  double trace_pair(const BarrierEval& ev, int i, int j) const {
    double s = 0.0;
    for (int r = 0; r < m_; ++r)
      for (int c = 0; c < m_; ++c) {
        s += ev.inv_d[i][static_cast<std::size_t>(r) * m_ + c] *
             ev.inv_d[j][static_cast<std::size_t>(c) * m_ + r];
      }
    return s;
  }

  // tr(P^-1 d2P_ij) evaluated at x.
  double trace_second(const BarrierEval& ev, std::span<const double> x, int i, int j) const {
    if (i < j) std::swap(i, j);
    const SymMatrix e = d2P_[static_cast<std::size_t>(i) * (i + 1) / 2 + j].eval(x);
    double s = 0.0;
    for (int r = 0; r < m_; ++r)
      for (int c = 0; c < m_; ++c) s += ev.inv(r, c) * e(c, r);
    return s;
  }

  int n_;
  int m_;
  PolyMatrix P_;
  PolyWithDerivs b_;
  double mu_;
  std::vector<PolyMatrix> dP_;
  std::vector<PolyMatrix> d2P_;  // packed lower triangle over (i, j)
};

class LogdetObjective final : public BarrierBase {
 public:
  using BarrierBase::BarrierBase;

  ReprKind kind() const override { return ReprKind::logdet; }

  double value(std::span<const double> x) const override {
    const auto ld = logdet_at(x);
    if (!ld) return kInf;
    return b_.value_at(x) - mu_ * *ld;
  }

  std::vector<double> gradient(std::span<const double> x) const override {
    const BarrierEval ev = barrier_eval(x, false);
    std::vector<double> g = b_.grad_at(x);
    for (int i = 0; i < n_; ++i) g[i] -= mu_ * ev.trace_inv_d[i];
    return g;
  }

  bool has_hessian() const override { return true; }

  SymMatrix hessian(std::span<const double> x) const override {
    const BarrierEval ev = barrier_eval(x, true);
    SymMatrix h = b_.hess_at(x);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j <= i; ++j) {
        const double second = trace_pair(ev, i, j) - trace_second(ev, x, i, j);
        h.set(i, j, h(i, j) + mu_ * second);
      }
    return h;
  }
};

class DetPowerObjective final : public BarrierBase {
 public:
  DetPowerObjective(const PmiProblem& prob, double mu, Rational r)
      : BarrierBase(prob, mu), r_(r), rd_(r.to_double()) {
    if (!(rd_ > 0.0 && rd_ < 1.0)) {
      throw std::invalid_argument("detr_repr: power must lie in (0, 1)");
    }
  }

  ReprKind kind() const override { return ReprKind::detr; }
  const Rational& power() const { return r_; }

  double value(std::span<const double> x) const override {
    const auto ld = logdet_at(x);
    if (!ld) return kInf;
    return b_.value_at(x) - mu_ * std::exp(rd_ * *ld);
  }

  std::vector<double> gradient(std::span<const double> x) const override {
    const BarrierEval ev = barrier_eval(x, false);
    const double detr = std::exp(rd_ * ev.logdet);
    std::vector<double> g = b_.grad_at(x);
    for (int i = 0; i < n_; ++i) g[i] -= mu_ * rd_ * detr * ev.trace_inv_d[i];
    return g;
  }

  bool has_hessian() const override { return true; }

  SymMatrix hessian(std::span<const double> x) const override {
    const BarrierEval ev = barrier_eval(x, true);
    const double detr = std::exp(rd_ * ev.logdet);
    SymMatrix h = b_.hess_at(x);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j <= i; ++j) {
        const double dti_dj = -trace_pair(ev, i, j) + trace_second(ev, x, i, j);
        const double second =
            -rd_ * detr * (rd_ * ev.trace_inv_d[i] * ev.trace_inv_d[j] + dti_dj);
        h.set(i, j, h(i, j) + mu_ * second);
      }
    return h;
  }

 private:
  Rational r_;
  double rd_;
};

// ---------------------------------------------------------------------------

class FactorizationObjective final : public Objective {
 public:
  FactorizationObjective(const MatrixVarProblem& prob, int rank)
      : m_(prob.m), rank_(rank), q_(prob.q), dq_(pmitame::gradient(prob.q)) {
    if (rank < 1 || rank > m_) {
      throw std::invalid_argument("factorization_repr: rank out of range");
    }
  }

  int dim() const override { return rank_ * m_; }
  ReprKind kind() const override { return ReprKind::factorization; }
  double weight() const override { return 0.0; }

  double value(std::span<const double> v) const override {
    return q_.eval(svec_of(v));
  }

  std::vector<double> gradient(std::span<const double> v) const override {
    const auto sv = svec_of(v);
    // Symmetric gradient G of Q with respect to X: off-diagonal svec entries
    // split evenly between (i, j) and (j, i).
    SymMatrix g(m_);
    for (int i = 0; i < m_; ++i)
      for (int j = i; j < m_; ++j) {
        const double d = dq_[svec_index(i, j, m_)].eval(sv);
        g.set(i, j, i == j ? d : 0.5 * d);
      }
    std::vector<double> out(static_cast<std::size_t>(rank_) * m_, 0.0);
    for (int a = 0; a < rank_; ++a)
      for (int i = 0; i < m_; ++i) {
        double s = 0.0;
        for (int j = 0; j < m_; ++j) s += v[static_cast<std::size_t>(a) * m_ + j] * g(j, i);
        out[static_cast<std::size_t>(a) * m_ + i] = 2.0 * s;
      }
    return out;
  }

  std::vector<double> svec_of(std::span<const double> v) const {
    if (v.size() != static_cast<std::size_t>(rank_) * m_) {
      throw std::invalid_argument("factorization objective: wrong v dimension");
    }
    std::vector<double> sv(svec_size(m_), 0.0);
    for (int i = 0; i < m_; ++i)
      for (int j = i; j < m_; ++j) {
        double s = 0.0;
        for (int a = 0; a < rank_; ++a) {
          s += v[static_cast<std::size_t>(a) * m_ + i] * v[static_cast<std::size_t>(a) * m_ + j];
        }
        sv[svec_index(i, j, m_)] = s;
      }
    return sv;
  }

 private:
  int m_;
  int rank_;
  Polynomial q_;
  std::vector<Polynomial> dq_;
};

// ---------------------------------------------------------------------------

class BoundMeritObjective final : public Objective {
 public:
  BoundMeritObjective(const PmiProblem& prob, double bhat)
      : n_(prob.num_vars()), b_(prob.b), bhat_(bhat) {
    for (auto& qj : charpoly(prob.P).q) q_.emplace_back(std::move(qj));
  }

  int dim() const override { return n_; }
  ReprKind kind() const override { return ReprKind::bound; }
  double weight() const override { return bhat_; }

  double value(std::span<const double> x) const override {
    double s = 0.0;
    for (const auto& qj : q_) {
      const double h = std::max(0.0, -qj.value_at(x));
      s += h * h;
    }
    if (std::isfinite(bhat_)) {
      const double h = std::max(0.0, b_.value_at(x) - bhat_);
      s += h * h;
    }
    return s;
  }

  std::vector<double> gradient(std::span<const double> x) const override {
    std::vector<double> g(n_, 0.0);
    for (const auto& qj : q_) {
      const double h = std::max(0.0, -qj.value_at(x));
      if (h == 0.0) continue;
      const auto gj = qj.grad_at(x);
      for (int i = 0; i < n_; ++i) g[i] -= 2.0 * h * gj[i];
    }
    if (std::isfinite(bhat_)) {
      const double h = std::max(0.0, b_.value_at(x) - bhat_);
      if (h > 0.0) {
        const auto gb = b_.grad_at(x);
        for (int i = 0; i < n_; ++i) g[i] += 2.0 * h * gb[i];
      }
    }
    return g;
  }

 private:
  int n_;
  PolyWithDerivs b_;
  double bhat_;
  std::vector<PolyWithDerivs> q_;
};

}  // namespace

std::unique_ptr<Objective> indicator_lagrangian(const PmiProblem& prob, double lambda,
                                                double psd_tol) {
  if (lambda <= 0) throw std::invalid_argument("indicator_lagrangian: lambda must be positive");
  prob.validate();
  return std::make_unique<IndicatorObjective>(prob, lambda, psd_tol);
}

std::unique_ptr<Objective> charpoly_repr(const PmiProblem& prob, double lambda) {
  if (lambda <= 0) throw std::invalid_argument("charpoly_repr: lambda must be positive");
  prob.validate();
  return std::make_unique<CharpolyObjective>(prob, lambda);
}

std::unique_ptr<Objective> logdet_repr(const PmiProblem& prob, double mu) {
  if (mu <= 0) throw std::invalid_argument("logdet_repr: mu must be positive");
  prob.validate();
  return std::make_unique<LogdetObjective>(prob, mu);
}

std::unique_ptr<Objective> detr_repr(const PmiProblem& prob, double mu, Rational r) {
  if (mu <= 0) throw std::invalid_argument("detr_repr: mu must be positive");
  prob.validate();
  return std::make_unique<DetPowerObjective>(prob, mu, r);
}

std::unique_ptr<Objective> factorization_repr(const MatrixVarProblem& prob, int rank) {
  prob.validate();
  return std::make_unique<FactorizationObjective>(prob, rank);
}

std::unique_ptr<Objective> bound_feasibility_merit(const PmiProblem& prob, double bhat) {
  prob.validate();
  return std::make_unique<BoundMeritObjective>(prob, bhat);
}

FactorizationState factorization_certificate(const MatrixVarProblem& prob,
                                             std::span<const double> v, int rank) {
  prob.validate();
  const int m = prob.m;
  if (v.size() != static_cast<std::size_t>(rank) * m) {
    throw std::invalid_argument("factorization_certificate: wrong v dimension");
  }

  // X = v^T v and the symmetric gradient G of Q at X.
  std::vector<double> sv(svec_size(m), 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      double s = 0.0;
      for (int a = 0; a < rank; ++a) {
        s += v[static_cast<std::size_t>(a) * m + i] * v[static_cast<std::size_t>(a) * m + j];
      }
      sv[svec_index(i, j, m)] = s;
    }
  const auto dq = gradient(prob.q);
  SymMatrix g(m), x(m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const double d = dq[svec_index(i, j, m)].eval(sv);
      g.set(i, j, i == j ? d : 0.5 * d);
      x.set(i, j, sv[svec_index(i, j, m)]);
    }

  FactorizationState st;
  st.v.assign(v.begin(), v.end());
  st.rank = rank;
  st.m = m;
  st.multiplier = trace_product(g, x);

  SymMatrix s_v = g;
  for (int i = 0; i < m; ++i) s_v.set(i, i, s_v(i, i) - st.multiplier);
  st.smin = eigvals_sym(s_v).front();

  double res = 0.0;
  for (int a = 0; a < rank; ++a) {
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += s_v(i, j) * v[static_cast<std::size_t>(a) * m + j];
      res += s * s;
    }
  }
  st.residual = std::sqrt(res);
  return st;
}

Polynomial factorization_value_polynomial(const MatrixVarProblem& prob, int rank) {
  prob.validate();
  const int m = prob.m;
  const uint32_t nv = static_cast<uint32_t>(rank * m);
  // X_ij as polynomials in the entries of v.
  std::vector<Polynomial> x_entries;
  x_entries.reserve(svec_size(m));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      Polynomial e(nv);
      for (int a = 0; a < rank; ++a) {
        e = e + Polynomial::variable(nv, a * m + i) * Polynomial::variable(nv, a * m + j);
      }
      x_entries.push_back(std::move(e));
    }
  // Substitute into Q monomial by monomial.
  Polynomial out(nv);
  for (const auto& [mono, coef] : prob.q.terms()) {
    Polynomial term = Polynomial::constant(nv, coef);
    for (const auto& [var, exp] : mono.factors()) {
      for (uint32_t e = 0; e < exp; ++e) term = term * x_entries[var];
    }
    out = out + term;
  }
  return out;
}

StructureLabel classify_objective(ReprKind kind) {
  switch (kind) {
    case ReprKind::indicator:
      // Indicator of a semialgebraic set: graph is semialgebraic.
      return StructureLabel::SEMIALG;
    case ReprKind::charpoly:
    case ReprKind::factorization:
      return StructureLabel::SEMIALG;
    case ReprKind::bound:
      // Squared hinges of polynomials: piecewise polynomial with
      // semialgebraic graph.
      return StructureLabel::SEMIALG;
    case ReprKind::logdet:
    case ReprKind::detr:
      return StructureLabel::EXP;
  }
  throw std::invalid_argument("classify_objective: unknown representation");
}

ExprPtr objective_recipe(const PmiProblem& prob, ReprKind kind, double weight) {
  prob.validate();
  const CharPolyCoeffs qs = charpoly(prob.P);
  const ExprPtr b = Expr::from_polynomial(prob.b);

  switch (kind) {
    case ReprKind::charpoly: {
      ExprPtr prod = Expr::constant(weight);
      for (const auto& qj : qs.q) prod = Expr::mul(prod, Expr::from_polynomial(qj));
      return Expr::add(b, Expr::neg(prod));
    }
    case ReprKind::logdet: {
      const ExprPtr det = Expr::from_polynomial(qs.q.back());  // q_m = det P
      return Expr::add(b, Expr::mul(Expr::constant(weight), Expr::neg(Expr::log(det))));
    }
    case ReprKind::detr: {
      // det^r written as exp(r log det); the representative power 1/2 stands
      // in for any rational r in (0, 1).
      const ExprPtr det = Expr::from_polynomial(qs.q.back());
      const ExprPtr detr = Expr::exp(Expr::mul(Expr::constant(0.5), Expr::log(det)));
      return Expr::add(b, Expr::mul(Expr::constant(weight), Expr::neg(detr)));
    }
    default:
      throw std::invalid_argument(
          "objective_recipe: only charpoly/logdet/detr formulas fit the expression grammar");
  }
}

}  // namespace pmitame
