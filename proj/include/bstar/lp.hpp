#pragma once

// Linear programs in the form
//
//   minimize    c^T z + offset
//   subject to  A_ub z <= b_ub,  A_eq z = b_eq,  lb <= z <= ub
//
// together with the l1 reformulations used by the trust-region solver and an
// exact bounded-variable revised simplex solver.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bstar/errors.hpp"

namespace bstar {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using Triplet = Eigen::Triplet<double>;

struct LPProblem {
  Eigen::VectorXd c;
  double offset = 0.0;
  SparseMatrix a_ub;
  Eigen::VectorXd b_ub;
  SparseMatrix a_eq;
  Eigen::VectorXd b_eq;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;
  std::vector<std::string> names;

  int num_vars() const { return static_cast<int>(c.size()); }

  void validate() const {
    const auto n = c.size();
    require(lb.size() == n && ub.size() == n, "LP bounds do not match variable count");
    require(a_ub.cols() == n && a_eq.cols() == n, "LP constraint matrices have wrong column count");
    require(a_ub.rows() == b_ub.size(), "A_ub and b_ub row counts differ");
    require(a_eq.rows() == b_eq.size(), "A_eq and b_eq row counts differ");
    require(names.empty() || static_cast<Eigen::Index>(names.size()) == n,
            "LP variable names do not match variable count");
    for (Eigen::Index i = 0; i < n; ++i)
      require(lb[i] <= ub[i], "LP variable " + std::to_string(i) + " has lb > ub");
  }
};

// Sparse affine expression sum_k coeff_k * z[index_k] + constant.
struct AffineExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  double eval(const Eigen::VectorXd& z) const {
    double v = constant;
    for (const auto& [i, a] : terms) v += a * z[i];
    return v;
  }
};

// Incremental triplet-based assembly of an LPProblem.
class LPBuilder {
 public:
  LPBuilder() = default;

  explicit LPBuilder(const LPProblem& p) {
    p.validate();
    for (int j = 0; j < p.num_vars(); ++j)
      add_variable(p.lb[j], p.ub[j], p.c[j], p.names.empty() ? std::string() : p.names[j]);
    offset_ = p.offset;
    for (int k = 0; k < p.a_ub.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(p.a_ub, k); it; ++it)
        ub_.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int k = 0; k < p.a_eq.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(p.a_eq, k); it; ++it)
        eq_.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    b_ub_.assign(p.b_ub.data(), p.b_ub.data() + p.b_ub.size());
    b_eq_.assign(p.b_eq.data(), p.b_eq.data() + p.b_eq.size());
  }

  int add_variable(double lb, double ub, double cost = 0.0, std::string name = {}) {
    require(lb <= ub, "variable lower bound exceeds upper bound");
    lb_.push_back(lb);
    ub_bound_.push_back(ub);
    c_.push_back(cost);
    names_.push_back(std::move(name));
    return static_cast<int>(c_.size()) - 1;
  }

  // sum terms <= rhs
  int add_le(const std::vector<std::pair<int, double>>& terms, double rhs) {
    const int row = static_cast<int>(b_ub_.size());
    for (const auto& [j, a] : terms) {
      check_var(j);
      ub_.emplace_back(row, j, a);
    }
    b_ub_.push_back(rhs);
    return row;
  }

  // sum terms == rhs
  int add_eq(const std::vector<std::pair<int, double>>& terms, double rhs) {
    const int row = static_cast<int>(b_eq_.size());
    for (const auto& [j, a] : terms) {
      check_var(j);
      eq_.emplace_back(row, j, a);
    }
    b_eq_.push_back(rhs);
    return row;
  }

  void add_cost(int j, double cost) {
    check_var(j);
    c_[j] += cost;
  }
  void add_offset(double v) { offset_ += v; }

  int num_vars() const { return static_cast<int>(c_.size()); }

  LPProblem build() const {
    LPProblem p;
    const int n = num_vars();
    p.c = Eigen::Map<const Eigen::VectorXd>(c_.data(), n);
    p.lb = Eigen::Map<const Eigen::VectorXd>(lb_.data(), n);
    p.ub = Eigen::Map<const Eigen::VectorXd>(ub_bound_.data(), n);
    p.offset = offset_;
    p.a_ub.resize(static_cast<int>(b_ub_.size()), n);
    p.a_ub.setFromTriplets(ub_.begin(), ub_.end());
    p.b_ub = Eigen::Map<const Eigen::VectorXd>(b_ub_.data(), b_ub_.size());
    p.a_eq.resize(static_cast<int>(b_eq_.size()), n);
    p.a_eq.setFromTriplets(eq_.begin(), eq_.end());
    p.b_eq = Eigen::Map<const Eigen::VectorXd>(b_eq_.data(), b_eq_.size());
    const bool named = std::any_of(names_.begin(), names_.end(), [](auto& s) { return !s.empty(); });
    if (named) p.names = names_;
    return p;
  }

 private:
  void check_var(int j) const {
    require(j >= 0 && j < num_vars(), "expression references unknown variable " + std::to_string(j));
  }

  std::vector<double> c_, lb_, ub_bound_;
  std::vector<std::string> names_;
  double offset_ = 0.0;
  std::vector<Triplet> ub_, eq_;
  std::vector<double> b_ub_, b_eq_;
};

struct WeightedTerm {
  AffineExpr expr;
  double weight = 1.0;
};

// Adds weight * |expr| to the objective through one epigraph variable z >= 0
// with z >= expr and z >= -expr.
inline int add_l1_epigraph(LPBuilder& b, const AffineExpr& expr, double weight) {
  if (!(weight > 0.0)) throw InvalidInput("l1 term weight must be positive");
  const int z = b.add_variable(0.0, kInf, weight);
  auto terms = expr.terms;
  terms.emplace_back(z, -1.0);
  b.add_le(terms, -expr.constant);
  for (auto& t : terms) t.second = -t.second;
  terms.back().second = -1.0;
  b.add_le(terms, expr.constant);
  return z;
}

inline LPProblem l1_epigraph(const LPProblem& problem, const std::vector<WeightedTerm>& terms) {
  LPBuilder b(problem);
  for (const auto& t : terms) add_l1_epigraph(b, t.expr, t.weight);
  return b.build();
}

// Elastic split expr = p - n with p, n >= 0 and cost w_pos * p + w_neg * n.
// With w_pos = w_neg = w this prices w * |expr|; with w_pos = 0 it prices the
// hinge w * max(0, -expr). Uses one equality row instead of two inequalities.
inline std::pair<int, int> add_elastic(LPBuilder& b, const AffineExpr& expr, double w_pos,
                                       double w_neg) {
  if (w_pos < 0.0 || !(w_neg > 0.0)) throw InvalidInput("elastic weights must be positive");
  const int p = b.add_variable(0.0, kInf, w_pos);
  const int n = b.add_variable(0.0, kInf, w_neg);
  auto terms = expr.terms;
  terms.emplace_back(p, -1.0);
  terms.emplace_back(n, 1.0);
  b.add_eq(terms, -expr.constant);
  return {p, n};
}

enum class LPStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

inline const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::kOptimal: return "optimal";
    case LPStatus::kInfeasible: return "infeasible";
    case LPStatus::kUnbounded: return "unbounded";
    case LPStatus::kIterationLimit: return "iteration-limit";
  }
  return "unknown";
}

struct LPSolution {
  LPStatus status = LPStatus::kIterationLimit;
  Eigen::VectorXd z;
  double objective = 0.0;
  Eigen::VectorXd duals_ub;  // <= 0 at optimum for a minimization
  Eigen::VectorXd duals_eq;
  long iterations = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-8;
  double pivot_tol = 1e-10;
  double optimality_tol = 1e-9;
  long max_iterations = 100000;
  int refactor_interval = 64;
  int degenerate_switch = 50;  // consecutive degenerate pivots before Bland's rule
};

class LPSolver {
 public:
  virtual ~LPSolver() = default;
  virtual LPSolution solve(const LPProblem& problem) const = 0;
};

namespace detail {

// Bounded-variable primal revised simplex over an explicit dense basis inverse.
class Simplex {
 public:
  Simplex(const LPProblem& p, const SimplexOptions& opt) : opt_(opt) {
    p.validate();
    n_struct_ = p.num_vars();
    m_ub_ = static_cast<int>(p.b_ub.size());
    m_ = m_ub_ + static_cast<int>(p.b_eq.size());
    b_.resize(m_);
    b_ << p.b_ub, p.b_eq;

    std::vector<Triplet> trip;
    trip.reserve(p.a_ub.nonZeros() + p.a_eq.nonZeros() + m_ub_);
    for (int k = 0; k < p.a_ub.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(p.a_ub, k); it; ++it)
        trip.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < p.a_eq.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(p.a_eq, k); it; ++it)
        trip.emplace_back(m_ub_ + it.row(), it.col(), it.value());
    for (int i = 0; i < m_ub_; ++i) trip.emplace_back(i, n_struct_ + i, 1.0);
    cols_.clear();
    const int n_cols = n_struct_ + m_ub_;
    SparseMatrix a(m_, n_cols);
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();
    cols_.resize(n_cols);
    for (int j = 0; j < n_cols; ++j)
      for (SparseMatrix::InnerIterator it(a, j); it; ++it)
        if (it.value() != 0.0) cols_[j].emplace_back(static_cast<int>(it.row()), it.value());

    lb_.resize(n_cols);
    ub_.resize(n_cols);
    cost_.assign(n_cols, 0.0);
    for (int j = 0; j < n_struct_; ++j) {
      lb_[j] = p.lb[j];
      ub_[j] = p.ub[j];
      cost_[j] = p.c[j];
    }
    for (int i = 0; i < m_ub_; ++i) {
      lb_[n_struct_ + i] = 0.0;
      ub_[n_struct_ + i] = kInf;
    }
  }

  LPSolution run() {
    LPSolution sol;
    crash();
    bool need_phase1 = n_art_ > 0;
    if (need_phase1) {
      std::vector<double> phase1(cost_.size(), 0.0);
      for (int j = first_art_; j < static_cast<int>(cost_.size()); ++j) phase1[j] = 1.0;
      const LPStatus s = iterate(phase1);
      sol.iterations = iterations_;
      if (s == LPStatus::kIterationLimit) {
        sol.status = s;
        return finish(sol);
      }
      double infeas = 0.0;
      for (int j = first_art_; j < static_cast<int>(x_.size()); ++j) infeas += x_[j];
      if (infeas > opt_.feasibility_tol * std::max(1.0, b_.lpNorm<Eigen::Infinity>())) {
        sol.status = LPStatus::kInfeasible;
        return finish(sol);
      }
      drop_artificials();
    }
    const LPStatus s = iterate(cost_);
    sol.status = s;
    sol.iterations = iterations_;
    return finish(sol);
  }

 private:
  enum class State : std::uint8_t { kBasic, kLower, kUpper, kFree };

  void crash() {
    const int n_cols = static_cast<int>(cols_.size());
    x_.assign(n_cols, 0.0);
    state_.assign(n_cols, State::kFree);
    for (int j = 0; j < n_cols; ++j) {
      if (lb_[j] > 0.0) {
        x_[j] = lb_[j];
      } else if (ub_[j] < 0.0) {
        x_[j] = ub_[j];
      }
      if (x_[j] == lb_[j])
        state_[j] = State::kLower;
      else if (x_[j] == ub_[j])
        state_[j] = State::kUpper;
    }
    Eigen::VectorXd r = b_;
    for (int j = 0; j < n_cols; ++j)
      if (x_[j] != 0.0)
        for (const auto& [i, a] : cols_[j]) r[i] -= a * x_[j];

    basis_.assign(m_, -1);
    // Slack columns first, then structural singletons that stay within bounds.
    for (int i = 0; i < m_ub_; ++i) {
      if (r[i] >= 0.0) {
        basis_[i] = n_struct_ + i;
        state_[n_struct_ + i] = State::kBasic;
      }
    }
    for (int j = 0; j < n_struct_; ++j) {
      if (cols_[j].size() != 1 || state_[j] == State::kBasic || lb_[j] == ub_[j]) continue;
      const auto [i, a] = cols_[j].front();
      if (basis_[i] != -1) continue;
      const double v = (r[i] + a * x_[j]) / a;
      if (v >= lb_[j] && v <= ub_[j]) {
        r[i] += a * x_[j];
        x_[j] = 0.0;
        basis_[i] = j;
        state_[j] = State::kBasic;
      }
    }
    first_art_ = n_cols;
    n_art_ = 0;
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] != -1) continue;
      const double sign = r[i] >= 0.0 ? 1.0 : -1.0;
      cols_.push_back({{i, sign}});
      lb_.push_back(0.0);
      ub_.push_back(kInf);
      cost_.push_back(0.0);
      x_.push_back(0.0);
      state_.push_back(State::kBasic);
      basis_[i] = static_cast<int>(cols_.size()) - 1;
      ++n_art_;
    }
    refactor();
  }

  // Rebuilds the dense basis inverse and recomputes basic values from scratch.
  void refactor() {
    Eigen::MatrixXd bm = Eigen::MatrixXd::Zero(m_, m_);
    for (int k = 0; k < m_; ++k)
      for (const auto& [i, a] : cols_[basis_[k]]) bm(i, k) = a;
    binv_ = bm.partialPivLu().inverse();
    Eigen::VectorXd r = b_;
    for (int j = 0; j < static_cast<int>(cols_.size()); ++j)
      if (state_[j] != State::kBasic && x_[j] != 0.0)
        for (const auto& [i, a] : cols_[j]) r[i] -= a * x_[j];
    const Eigen::VectorXd xb = binv_ * r;
    for (int k = 0; k < m_; ++k) x_[basis_[k]] = xb[k];
    since_refactor_ = 0;
  }

  LPStatus iterate(const std::vector<double>& cost) {
    int degenerate_run = 0;
    bool bland = false;
    Eigen::VectorXd cb(m_), y(m_), alpha(m_);
    const double dtol = opt_.optimality_tol * std::max(1.0, max_abs(cost));
    while (true) {
      if (iterations_ >= opt_.max_iterations) return LPStatus::kIterationLimit;
      for (int k = 0; k < m_; ++k) cb[k] = cost[basis_[k]];
      y.noalias() = binv_.transpose() * cb;

      // Pricing.
      int q = -1;
      double dir = 0.0;
      double best = 0.0;
      for (int j = 0; j < static_cast<int>(cols_.size()); ++j) {
        const State s = state_[j];
        if (s == State::kBasic || lb_[j] == ub_[j]) continue;
        double d = cost[j];
        for (const auto& [i, a] : cols_[j]) d -= a * y[i];
        double this_dir = 0.0;
        if (d < -dtol && (s == State::kLower || s == State::kFree) && x_[j] < ub_[j])
          this_dir = 1.0;
        else if (d > dtol && (s == State::kUpper || s == State::kFree) && x_[j] > lb_[j])
          this_dir = -1.0;
        if (this_dir == 0.0) continue;
        if (bland) {
          q = j;
          dir = this_dir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
          dir = this_dir;
        }
      }
      if (q < 0) return LPStatus::kOptimal;

      alpha.setZero();
      for (const auto& [i, a] : cols_[q]) alpha.noalias() += binv_.col(i) * a;

      // Ratio test; basic k moves at rate -dir * alpha[k].
      double basic_theta = kInf;
      for (int k = 0; k < m_; ++k) {
        const double l = ratio_limit(k, dir, alpha[k]);
        basic_theta = std::min(basic_theta, l);
      }
      int leave = -1;
      for (int k = 0; k < m_; ++k) {
        const double l = ratio_limit(k, dir, alpha[k]);
        if (l > basic_theta + 1e-12) continue;
        if (leave < 0) {
          leave = k;
        } else if (bland ? basis_[k] < basis_[leave]
                         : std::abs(alpha[k]) > std::abs(alpha[leave])) {
          leave = k;
        }
      }
      const double own = dir > 0.0 ? ub_[q] - x_[q] : x_[q] - lb_[q];
      double theta = basic_theta;
      if (own <= basic_theta) {
        theta = own;
        leave = -1;
      } else if (leave >= 0) {
        theta = std::max(0.0, ratio_limit(leave, dir, alpha[leave]));
      }
      if (theta == kInf) return LPStatus::kUnbounded;
      ++iterations_;

      if (theta <= 1e-12) {
        if (++degenerate_run > opt_.degenerate_switch) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      // Move.
      x_[q] += dir * theta;
      for (int k = 0; k < m_; ++k) x_[basis_[k]] -= dir * theta * alpha[k];

      if (leave < 0) {
        // Bound flip of the entering variable.
        if (dir > 0.0) {
          x_[q] = ub_[q];
          state_[q] = State::kUpper;
        } else {
          x_[q] = lb_[q];
          state_[q] = State::kLower;
        }
        continue;
      }

      const int out = basis_[leave];
      const double rate = -dir * alpha[leave];
      if (rate < 0.0) {
        x_[out] = lb_[out];
        state_[out] = State::kLower;
      } else {
        x_[out] = ub_[out];
        state_[out] = State::kUpper;
      }
      basis_[leave] = q;
      state_[q] = State::kBasic;

      // Product-form update of the explicit inverse.
      const Eigen::RowVectorXd pivot_row = binv_.row(leave) / alpha[leave];
      alpha[leave] = 0.0;
      binv_.noalias() -= alpha * pivot_row;
      binv_.row(leave) = pivot_row;

      if (++since_refactor_ >= opt_.refactor_interval) refactor();
    }
  }

  // Pivots zero-valued artificials out of the basis and pins all artificials to zero.
  void drop_artificials() {
    const int n_cols = static_cast<int>(cols_.size());
    for (int k = 0; k < m_; ++k) {
      if (basis_[k] < first_art_) continue;
      const Eigen::RowVectorXd row = binv_.row(k);
      int entering = -1;
      double best = 1e-7;
      for (int j = 0; j < first_art_; ++j) {
        if (state_[j] == State::kBasic) continue;
        double v = 0.0;
        for (const auto& [i, a] : cols_[j]) v += row[i] * a;
        if (std::abs(v) > best) {
          best = std::abs(v);
          entering = j;
        }
      }
      const int art = basis_[k];
      if (entering >= 0) {
        basis_[k] = entering;
        state_[entering] = State::kBasic;
        state_[art] = State::kLower;
        x_[art] = 0.0;
        refactor();
      }
    }
    for (int j = first_art_; j < n_cols; ++j) {
      ub_[j] = 0.0;
      if (state_[j] != State::kBasic) x_[j] = 0.0;
    }
    refactor();
  }

  LPSolution& finish(LPSolution& sol) {
    sol.z.resize(n_struct_);
    for (int j = 0; j < n_struct_; ++j) sol.z[j] = x_[j];
    double obj = 0.0;
    for (int j = 0; j < n_struct_; ++j) obj += cost_[j] * x_[j];
    sol.objective = obj;
    if (sol.status == LPStatus::kOptimal) {
      Eigen::VectorXd cb(m_);
      for (int k = 0; k < m_; ++k) cb[k] = cost_[basis_[k]];
      const Eigen::VectorXd y = binv_.transpose() * cb;
      sol.duals_ub = y.head(m_ub_);
      sol.duals_eq = y.tail(m_ - m_ub_);
    }
    return sol;
  }

  // Step length at which basic k reaches a bound; infinite when it does not block.
  double ratio_limit(int k, double dir, double a) const {
    if (std::abs(a) <= opt_.pivot_tol) return kInf;
    const double rate = -dir * a;
    const int j = basis_[k];
    if (rate < 0.0) return lb_[j] == -kInf ? kInf : std::max(0.0, x_[j] - lb_[j]) / -rate;
    return ub_[j] == kInf ? kInf : std::max(0.0, ub_[j] - x_[j]) / rate;
  }

  static double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }

  SimplexOptions opt_;
  int n_struct_ = 0;
  int m_ub_ = 0;
  int m_ = 0;
  Eigen::VectorXd b_;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> lb_, ub_, cost_, x_;
  std::vector<State> state_;
  std::vector<int> basis_;
  Eigen::MatrixXd binv_;
  int first_art_ = 0;
  int n_art_ = 0;
  long iterations_ = 0;
  int since_refactor_ = 0;
};

}  // namespace detail

class RevisedSimplex final : public LPSolver {
 public:
  explicit RevisedSimplex(SimplexOptions opt = {}) : opt_(opt) {}

  LPSolution solve(const LPProblem& problem) const override {
    LPSolution sol = detail::Simplex(problem, opt_).run();
    sol.objective += problem.offset;
    return sol;
  }

  const SimplexOptions& options() const { return opt_; }

 private:
  SimplexOptions opt_;
};

inline LPSolution solve_lp(const LPProblem& problem, const SimplexOptions& opt = {}) {
  return RevisedSimplex(opt).solve(problem);
}

// Largest violation of any constraint or bound by z.
inline double max_violation(const LPProblem& p, const Eigen::VectorXd& z) {
  double v = 0.0;
  if (p.b_ub.size() > 0) v = std::max(v, (p.a_ub * z - p.b_ub).maxCoeff());
  if (p.b_eq.size() > 0) v = std::max(v, (p.a_eq * z - p.b_eq).cwiseAbs().maxCoeff());
  for (int j = 0; j < p.num_vars(); ++j) v = std::max({v, p.lb[j] - z[j], z[j] - p.ub[j]});
  return v;
}

// CPLEX-LP-style text dump for cross-checking with external solvers.
inline void write_lp_text(std::ostream& os, const LPProblem& p) {
  auto var = [&](int j) {
    return p.names.empty() || p.names[j].empty() ? "z" + std::to_string(j) : p.names[j];
  };
  auto row = [&](const SparseMatrix& a, int r) {
    std::string s;
    for (int j = 0; j < a.cols(); ++j) {
      const double v = a.coeff(r, j);
      if (v == 0.0) continue;
      s += (v < 0 ? " - " : " + ") + std::to_string(std::abs(v)) + " " + var(j);
    }
    return s.empty() ? std::string(" 0 z0") : s;
  };
  os.precision(17);
  os << "\\ offset " << p.offset << "\nMinimize\n obj:";
  for (int j = 0; j < p.num_vars(); ++j)
    if (p.c[j] != 0.0) os << (p.c[j] < 0 ? " - " : " + ") << std::abs(p.c[j]) << " " << var(j);
  os << "\nSubject To\n";
  const SparseMatrix ub_rows = p.a_ub;
  const SparseMatrix eq_rows = p.a_eq;
  for (int r = 0; r < ub_rows.rows(); ++r) os << " u" << r << ":" << row(ub_rows, r) << " <= " << p.b_ub[r] << "\n";
  for (int r = 0; r < eq_rows.rows(); ++r) os << " e" << r << ":" << row(eq_rows, r) << " = " << p.b_eq[r] << "\n";
  os << "Bounds\n";
  for (int j = 0; j < p.num_vars(); ++j) {
    if (p.lb[j] == -kInf && p.ub[j] == kInf) {
      os << " " << var(j) << " free\n";
      continue;
    }
    os << " ";
    if (p.lb[j] == -kInf) os << "-inf"; else os << p.lb[j];
    os << " <= " << var(j) << " <= ";
    if (p.ub[j] == kInf) os << "+inf"; else os << p.ub[j];
    os << "\n";
  }
  os << "End\n";
}

}  // namespace bstar
