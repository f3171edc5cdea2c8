#pragma once

// Trust-region sequential linear programming on an l1 merit function.
//
// A ConstraintSet evaluates blocks of residuals at a point x. Every block
// contributes weight * (scale) * penalty(value) to the merit, where the
// penalty is |r| for objective and equality blocks and max(0, -h) for
// inequality blocks (h >= 0 is feasible). Each iteration replaces the
// residuals by their first-order models, minimizes the resulting piecewise
// linear merit inside a box trust region with an LP, and accepts the step
// when the actual decrease is a reasonable fraction of the predicted one.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "bstar/errors.hpp"
#include "bstar/ipm.hpp"
#include "bstar/lp.hpp"

namespace bstar {

using SparseRow = std::vector<std::pair<int, double>>;

enum class TermKind { kObjective, kEquality, kInequality };

// Residual values of one block and, when requested, one gradient row per
// component. An empty row marks a component that is held constant in the
// linear model (used for inactive contacts far from the constraint).
struct TermBlock {
  TermKind kind = TermKind::kEquality;
  double weight = 1.0;
  Eigen::VectorXd value;
  std::vector<SparseRow> rows;
};

struct Evaluation {
  double constant = 0.0;  // constant part of the objective (1 for feasibility)
  std::vector<TermBlock> blocks;
};

class ConstraintSet {
 public:
  virtual ~ConstraintSet() = default;
  virtual int num_vars() const = 0;
  // Hard variable bounds; +-inf where free.
  virtual Eigen::VectorXd lower() const = 0;
  virtual Eigen::VectorXd upper() const = 0;
  virtual Evaluation evaluate(const Eigen::VectorXd& x, bool with_gradients) const = 0;
  // Maps an updated point back to its canonical chart (angle wrapping).
  virtual void normalize(Eigen::VectorXd& /*x*/) const {}
};

struct TrustRegion {
  double radius = 0.1;
  double shrink = 0.5;
  double grow = 1.5;
  double accept_ratio = 0.1;
  double radius_min = 1e-6;
  double radius_max = 1.0;

  void validate() const {
    require(radius_min > 0 && radius_min <= radius && radius <= radius_max,
            "trust region needs 0 < radius_min <= radius <= radius_max");
    require(shrink > 0 && shrink < 1, "trust region shrink factor must lie in (0, 1)");
    require(grow > 1, "trust region grow factor must exceed 1");
    require(accept_ratio > 0 && accept_ratio < 1, "acceptance ratio must lie in (0, 1)");
  }
};

struct MeritParams {
  double w_eq = 1e3;
  double w_ineq = 1e3;
  double tol_step = 1e-6;
  double tol_merit = 1e-8;

  void validate() const {
    require(w_eq > 0 && w_ineq > 0, "merit weights must be positive");
    require(tol_step > 0 && tol_merit > 0, "convergence tolerances must be positive");
  }
};

struct InnerOptions {
  TrustRegion tr;
  MeritParams mp;
  int max_iterations = 100;
  // After a rejected step, restore the equality residuals at the trial point
  // with a few minimum-norm least-squares corrections (second-order
  // correction) before giving up on the step.
  bool second_order_correction = true;
  std::shared_ptr<const LPSolver> solver;  // defaults to InteriorPointSolver
};

struct InnerIteration {
  int iteration = 0;
  double merit = 0.0;  // merit at the current iterate before the step
  double radius = 0.0;
  double step_norm = 0.0;  // infinity norm of the LP step
  double rho = 0.0;
  bool accepted = false;
  bool corrected = false;  // accepted after a second-order correction
  double max_eq_violation = 0.0;
  double max_ineq_violation = 0.0;
};

struct InnerResult {
  Eigen::VectorXd x;
  double merit = 0.0;
  int iterations = 0;
  bool converged = false;
  double max_eq_violation = 0.0;
  double max_ineq_violation = 0.0;
  double radius = 0.0;  // trust region radius on exit
  long lp_iterations = 0;
  int merit_increases = 0;  // accepted steps that raised the merit; always 0 when correct
  std::vector<InnerIteration> trace;
};

inline double block_scale(TermKind kind, const MeritParams& mp) {
  switch (kind) {
    case TermKind::kEquality:
      return mp.w_eq;
    case TermKind::kInequality:
      return mp.w_ineq;
    default:
      return 1.0;
  }
}

inline double penalty(TermKind kind, double v) {
  return kind == TermKind::kInequality ? std::max(0.0, -v) : std::abs(v);
}

inline double merit(const Evaluation& e, const MeritParams& mp) {
  double m = e.constant;
  for (const auto& b : e.blocks) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < b.value.size(); ++i) s += penalty(b.kind, b.value[i]);
    m += b.weight * block_scale(b.kind, mp) * s;
  }
  return m;
}

inline double merit(const Eigen::VectorXd& x, const ConstraintSet& cs, const MeritParams& mp) {
  return merit(cs.evaluate(x, false), mp);
}

inline std::pair<double, double> max_violations(const Evaluation& e) {
  double eq = 0.0, ineq = 0.0;
  for (const auto& b : e.blocks) {
    for (Eigen::Index i = 0; i < b.value.size(); ++i) {
      if (b.kind == TermKind::kEquality) eq = std::max(eq, std::abs(b.value[i]));
      if (b.kind == TermKind::kInequality) ineq = std::max(ineq, -b.value[i]);
    }
  }
  return {eq, ineq};
}

// Merit of the first-order model at x + delta.
inline double linearized_merit(const Evaluation& e, const Eigen::VectorXd& delta, const MeritParams& mp) {
  double m = e.constant;
  for (const auto& b : e.blocks) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < b.value.size(); ++i) {
      double v = b.value[i];
      if (!b.rows.empty())
        for (const auto& [j, a] : b.rows[i]) v += a * delta[j];
      s += penalty(b.kind, v);
    }
    m += b.weight * block_scale(b.kind, mp) * s;
  }
  return m;
}

// Dense first-order model of a vector residual at x0.
struct AffineModel {
  Eigen::VectorXd x0;
  Eigen::VectorXd value;
  Eigen::MatrixXd jacobian;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const { return value + jacobian * (x - x0); }
};

// Residual function returning its value and, when jac is non-null, its
// dense Jacobian.
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& x, Eigen::MatrixXd* jac)>;

inline AffineModel linearize(const ResidualFn& residual, const Eigen::VectorXd& x0) {
  AffineModel m;
  m.x0 = x0;
  m.value = residual(x0, &m.jacobian);
  if (!m.value.allFinite() || !m.jacobian.allFinite())
    throw NumericalDomainError("residual or derivative is not finite at the expansion point");
  return m;
}

// ConstraintSet assembled from plain residual functions; handy for small
// problems and tests.
class FunctionalConstraintSet final : public ConstraintSet {
 public:
  struct Term {
    TermKind kind;
    double weight;
    ResidualFn fn;
  };

  FunctionalConstraintSet(int n, double objective_constant = 0.0)
      : n_(n),
        constant_(objective_constant),
        lo_(Eigen::VectorXd::Constant(n, -kInf)),
        hi_(Eigen::VectorXd::Constant(n, kInf)) {}

  void add(TermKind kind, double weight, ResidualFn fn) {
    require(weight > 0, "term weight must be positive");
    terms_.push_back({kind, weight, std::move(fn)});
  }
  void set_bounds(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    require(lo.size() == n_ && hi.size() == n_, "bound vectors must match the variable count");
    lo_ = std::move(lo);
    hi_ = std::move(hi);
  }

  int num_vars() const override { return n_; }
  Eigen::VectorXd lower() const override { return lo_; }
  Eigen::VectorXd upper() const override { return hi_; }

  Evaluation evaluate(const Eigen::VectorXd& x, bool with_gradients) const override {
    Evaluation e;
    e.constant = constant_;
    for (const auto& t : terms_) {
      TermBlock b;
      b.kind = t.kind;
      b.weight = t.weight;
      if (with_gradients) {
        const AffineModel m = linearize(t.fn, x);
        b.value = m.value;
        for (Eigen::Index r = 0; r < m.jacobian.rows(); ++r) {
          SparseRow row;
          for (Eigen::Index c = 0; c < m.jacobian.cols(); ++c)
            if (m.jacobian(r, c) != 0.0) row.emplace_back(static_cast<int>(c), m.jacobian(r, c));
          b.rows.push_back(std::move(row));
        }
      } else {
        b.value = t.fn(x, nullptr);
      }
      e.blocks.push_back(std::move(b));
    }
    return e;
  }

 private:
  int n_;
  double constant_;
  Eigen::VectorXd lo_, hi_;
  std::vector<Term> terms_;
};

namespace detail {

struct StepModel {
  Eigen::VectorXd delta;
  double model_merit = 0.0;  // linearized merit at delta
  long lp_iterations = 0;
};

// Minimizes the linearized merit over the box |delta| <= radius intersected
// with the hard bounds. Penalties use the split form r = p - n, which is
// the same LP as the slack epigraph after eliminating one inequality.
inline StepModel solve_step(const Evaluation& e, const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi, double radius, const MeritParams& mp,
                            const LPSolver& solver) {
  const int n = static_cast<int>(x.size());
  LPBuilder b;
  for (int j = 0; j < n; ++j) {
    const double l = std::min(0.0, std::max(-radius, lo[j] - x[j]));
    const double u = std::max(0.0, std::min(radius, hi[j] - x[j]));
    b.add_variable(l, u);
  }
  double constant = e.constant;
  for (const auto& blk : e.blocks) {
    const double w = blk.weight * block_scale(blk.kind, mp);
    for (Eigen::Index i = 0; i < blk.value.size(); ++i) {
      const double v = blk.value[i];
      const SparseRow* row = blk.rows.empty() ? nullptr : &blk.rows[i];
      if (row == nullptr || row->empty()) {
        constant += w * penalty(blk.kind, v);
        continue;
      }
      AffineExpr expr{*row, v};
      if (blk.kind == TermKind::kInequality)
        add_elastic(b, expr, 0.0, w);
      else
        add_elastic(b, expr, w, w);
    }
  }
  b.add_offset(constant);
  const LPProblem lp = b.build();
  const LPSolution sol = solver.solve(lp);
  if (sol.status != LPStatus::kOptimal)
    throw NumericalDomainError(std::string("trust-region LP not solved: ") + to_string(sol.status));
  StepModel s;
  s.delta = sol.z.head(n);
  s.model_merit = sol.objective;
  s.lp_iterations = sol.iterations;
  return s;
}

// Second-order correction: the minimum-norm change dc that removes the
// equality residual observed at the trial point x + delta, linearized there.
// delta + dc is clipped back into the trust box and the hard bounds. Returns
// nothing when there is no equality residual to correct.
inline std::optional<Eigen::VectorXd> correction_step(const Evaluation& at_trial, const Eigen::VectorXd& x,
                                                      const Eigen::VectorXd& delta, const Eigen::VectorXd& lo,
                                                      const Eigen::VectorXd& hi, double radius) {
  const Eigen::Index n = x.size();
  std::vector<const SparseRow*> rows;
  std::vector<double> values;
  for (const auto& blk : at_trial.blocks) {
    if (blk.kind != TermKind::kEquality) continue;
    for (std::size_t i = 0; i < blk.rows.size(); ++i) {
      if (blk.rows[i].empty()) continue;
      rows.push_back(&blk.rows[i]);
      values.push_back(blk.value[static_cast<Eigen::Index>(i)]);
    }
  }
  if (rows.empty()) return std::nullopt;
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, n);
  for (Eigen::Index r = 0; r < m; ++r)
    for (const auto& [col, a] : *rows[r]) j(r, col) += a;
  const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(values.data(), m);
  Eigen::VectorXd lower(n), upper(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    lower[k] = std::max(-radius, lo[k] - x[k]);
    upper[k] = std::min(radius, hi[k] - x[k]);
  }
  // Components that hit the box are frozen there and the rest of the
  // residual is redistributed over the free ones.
  Eigen::VectorXd out = delta;
  Eigen::VectorXd free = Eigen::VectorXd::Ones(n);
  for (int round = 0; round < n + 1; ++round) {
    const Eigen::VectorXd r = c + j * (out - delta);
    const Eigen::MatrixXd jf = j * free.asDiagonal();
    Eigen::MatrixXd jjt = jf * jf.transpose();
    jjt.diagonal().array() += 1e-12 * (1.0 + jjt.diagonal().maxCoeff());
    const Eigen::VectorXd dc = -jf.transpose() * jjt.ldlt().solve(r);
    if (!dc.allFinite()) return std::nullopt;
    bool clipped = false;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (free[k] == 0.0) continue;
      const double v = out[k] + dc[k];
      if (v < lower[k] || v > upper[k]) {
        out[k] = std::clamp(v, lower[k], upper[k]);
        free[k] = 0.0;
        clipped = true;
      } else {
        out[k] = v;
      }
    }
    if (!clipped || free.sum() == 0.0) break;
  }
  return out;
}

inline void check_finite(const Evaluation& e) {
  for (const auto& b : e.blocks) {
    if (!b.value.allFinite()) throw NumericalDomainError("residual is not finite");
    for (const auto& row : b.rows)
      for (const auto& [j, a] : row)
        if (!std::isfinite(a)) throw NumericalDomainError("residual derivative is not finite");
  }
}

}  // namespace detail

inline constexpr int kCorrectionPasses = 3;
// Relative accuracy of the subproblem optimum.
inline constexpr double kModelTolerance = 1e-9;

inline InnerResult inner_solve(const Eigen::VectorXd& start, const ConstraintSet& cs,
                               const InnerOptions& opt = {}) {
  opt.tr.validate();
  opt.mp.validate();
  require(start.size() == cs.num_vars(), "start point has the wrong dimension");
  const std::shared_ptr<const LPSolver> solver =
      opt.solver ? opt.solver : std::make_shared<InteriorPointSolver>();
  const Eigen::VectorXd lo = cs.lower();
  const Eigen::VectorXd hi = cs.upper();

  InnerResult res;
  res.x = start.cwiseMax(lo).cwiseMin(hi);
  cs.normalize(res.x);
  Evaluation cur = cs.evaluate(res.x, true);
  detail::check_finite(cur);
  res.merit = merit(cur, opt.mp);
  double radius = opt.tr.radius;

  for (int it = 1; it <= opt.max_iterations; ++it) {
    res.iterations = it;
    InnerIteration rec;
    rec.iteration = it;
    rec.merit = res.merit;
    rec.radius = radius;
    std::tie(rec.max_eq_violation, rec.max_ineq_violation) = max_violations(cur);

    const detail::StepModel step = detail::solve_step(cur, res.x, lo, hi, radius, opt.mp, *solver);
    res.lp_iterations += step.lp_iterations;
    const double predicted = res.merit - step.model_merit;
    rec.step_norm = step.delta.lpNorm<Eigen::Infinity>();
    if (predicted < kModelTolerance * (1.0 + std::abs(res.merit))) {
      // The model cannot improve beyond LP accuracy: first-order stationary
      // for this radius.
      res.trace.push_back(rec);
      res.converged = true;
      break;
    }
    const auto try_step = [&](const Eigen::VectorXd& delta, Evaluation& ev, double& m) {
      Eigen::VectorXd trial = (res.x + delta).cwiseMax(lo).cwiseMin(hi);
      cs.normalize(trial);
      ev = cs.evaluate(trial, true);
      detail::check_finite(ev);
      m = merit(ev, opt.mp);
      return trial;
    };
    Evaluation next;
    double trial_merit = 0.0;
    Eigen::VectorXd trial = try_step(step.delta, next, trial_merit);
    rec.rho = (res.merit - trial_merit) / predicted;
    rec.accepted = rec.rho >= opt.tr.accept_ratio;
    if (!rec.accepted && opt.second_order_correction) {
      // Restore the equalities at the trial point with a few Newton-type
      // corrections linearized where the residual is evaluated.
      Eigen::VectorXd delta = step.delta;
      Evaluation at = next;
      for (int pass = 0; pass < kCorrectionPasses; ++pass) {
        const auto soc = detail::correction_step(at, res.x, delta, lo, hi, radius);
        if (!soc) break;
        delta = *soc;
        Evaluation next2;
        double merit2 = 0.0;
        Eigen::VectorXd trial2 = try_step(delta, next2, merit2);
        const double rho2 = (res.merit - merit2) / predicted;
        if (rho2 >= opt.tr.accept_ratio) {
          rec.rho = rho2;
          rec.accepted = rec.corrected = true;
          rec.step_norm = delta.lpNorm<Eigen::Infinity>();
          trial = std::move(trial2);
          next = std::move(next2);
          trial_merit = merit2;
          break;
        }
        at = std::move(next2);
      }
    }
    const double actual = res.merit - trial_merit;
    res.trace.push_back(rec);

    if (rec.accepted) {
      if (trial_merit > res.merit) ++res.merit_increases;
      res.x = trial;
      res.merit = trial_merit;
      cur = std::move(next);
      radius = std::min(radius * opt.tr.grow, opt.tr.radius_max);
      if (rec.step_norm < opt.mp.tol_step || actual < opt.mp.tol_merit) {
        res.converged = true;
        break;
      }
    } else {
      radius *= opt.tr.shrink;
      if (radius < opt.tr.radius_min) {
        // Every step the region still admits is below tol_step.
        res.converged = true;
        break;
      }
    }
  }
  res.radius = radius;
  std::tie(res.max_eq_violation, res.max_ineq_violation) = max_violations(cur);
  return res;
}

}  // namespace bstar
