#pragma once

// Sparse primal-dual interior-point LP solver (Mehrotra predictor-corrector on
// the normal equations). It scales with the sparsity of the problem rather than
// with a dense basis, which is what the trust-region subproblems need once the
// path grows. Problems it cannot finish are handed to the exact simplex, which
// also owns infeasibility and unboundedness classification.

#include <Eigen/OrderingMethods>
#include <Eigen/Sparse>
#include <cmath>
#include <vector>

#include "bstar/lp.hpp"

namespace bstar {

struct InteriorPointOptions {
  double tol = 1e-10;         // relative primal, dual and gap tolerance
  int max_iterations = 200;
  double step_fraction = 0.995;
  double regularization = 0;
  double pivot_tol = 1e-30;
  SimplexOptions fallback;
};

namespace detail {

// Up-looking sparse LDL^T with a fill-reducing ordering. Pivots that vanish
// relative to the diagonal are replaced by a huge value, which removes that
// component from the solve instead of failing; this is how degenerate vertices
// are handled in the normal equations.
class SparseLdl {
 public:
  void analyze(const SparseMatrix& k) {
    n_ = static_cast<int>(k.rows());
    Eigen::AMDOrdering<int> amd;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
    amd(k, perm);
    p_.assign(perm.indices().data(), perm.indices().data() + n_);
    pinv_.assign(n_, 0);
    for (int i = 0; i < n_; ++i) pinv_[p_[i]] = i;
    parent_.assign(n_, -1);
    std::vector<int> flag(n_), lnz(n_, 0);
    for (int j = 0; j < n_; ++j) {
      flag[j] = j;
      for (SparseMatrix::InnerIterator it(k, p_[j]); it; ++it) {
        int i = pinv_[it.row()];
        if (i >= j) continue;
        for (; flag[i] != j; i = parent_[i]) {
          if (parent_[i] == -1) parent_[i] = j;
          ++lnz[i];
          flag[i] = j;
        }
      }
    }
    lp_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) lp_[j + 1] = lp_[j] + lnz[j];
    li_.assign(lp_[n_], 0);
    lx_.assign(lp_[n_], 0.0);
    d_.assign(n_, 0.0);
  }

  void factorize(const SparseMatrix& k, double pivot_tol) {
    std::vector<double> y(n_, 0.0);
    std::vector<int> pattern(n_), flag(n_), lnz(n_, 0);
    for (int j = 0; j < n_; ++j) {
      int top = n_;
      flag[j] = j;
      double diag = 0.0;
      for (SparseMatrix::InnerIterator it(k, p_[j]); it; ++it) {
        int i = pinv_[it.row()];
        if (i > j) continue;
        y[i] += it.value();
        if (i == j) diag = it.value();
        int len = 0;
        for (; flag[i] != j; i = parent_[i]) {
          pattern[len++] = i;
          flag[i] = j;
        }
        while (len > 0) pattern[--top] = pattern[--len];
      }
      d_[j] = y[j];
      y[j] = 0.0;
      for (; top < n_; ++top) {
        const int i = pattern[top];
        const double yi = y[i];
        y[i] = 0.0;
        const int end = lp_[i] + lnz[i];
        for (int q = lp_[i]; q < end; ++q) y[li_[q]] -= lx_[q] * yi;
        const double l = yi / d_[i];
        d_[j] -= l * yi;
        li_[end] = j;
        lx_[end] = l;
        ++lnz[i];
      }
      if (!(d_[j] > pivot_tol * std::max(1.0, std::abs(diag)))) d_[j] = 1e128;
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x(n_);
    for (int i = 0; i < n_; ++i) x[i] = b[p_[i]];
    for (int j = 0; j < n_; ++j)
      for (int q = lp_[j]; q < lp_[j + 1]; ++q) x[li_[q]] -= lx_[q] * x[j];
    for (int j = 0; j < n_; ++j) x[j] /= d_[j];
    for (int j = n_ - 1; j >= 0; --j)
      for (int q = lp_[j]; q < lp_[j + 1]; ++q) x[j] -= lx_[q] * x[li_[q]];
    Eigen::VectorXd out(n_);
    for (int i = 0; i < n_; ++i) out[p_[i]] = x[i];
    return out;
  }

 private:
  int n_ = 0;
  std::vector<int> p_, pinv_, parent_, lp_, li_;
  std::vector<double> lx_, d_;
};

class InteriorPoint {
 public:
  InteriorPoint(const LPProblem& p, const InteriorPointOptions& opt) : p_(p), opt_(opt) {
    p.validate();
    n_orig_ = p.num_vars();
    m_eq_ = static_cast<int>(p.b_eq.size());
    m_ub_ = static_cast<int>(p.b_ub.size());
    m_ = m_eq_ + m_ub_;

    // Columns: original variables, one extra column per free variable (its
    // negative part), then one slack per inequality row.
    std::vector<int> free_cols;
    for (int j = 0; j < n_orig_; ++j)
      if (!std::isfinite(p.lb[j]) && !std::isfinite(p.ub[j])) free_cols.push_back(j);
    n_ = n_orig_ + static_cast<int>(free_cols.size()) + m_ub_;
    c_ = Eigen::VectorXd::Zero(n_);
    lo_ = Eigen::VectorXd::Zero(n_);
    hi_ = Eigen::VectorXd::Constant(n_, kInf);
    c_.head(n_orig_) = p.c;
    lo_.head(n_orig_) = p.lb;
    hi_.head(n_orig_) = p.ub;
    neg_of_.assign(n_orig_, -1);
    std::vector<Triplet> trip;
    auto copy = [&](const SparseMatrix& a, int row0) {
      for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
          const int j = static_cast<int>(it.col());
          trip.emplace_back(row0 + static_cast<int>(it.row()), j, it.value());
          if (neg_of_[j] >= 0) trip.emplace_back(row0 + static_cast<int>(it.row()), neg_of_[j], -it.value());
        }
    };
    int col = n_orig_;
    for (int j : free_cols) {
      neg_of_[j] = col;
      lo_[j] = 0.0;
      lo_[col] = 0.0;
      c_[col] = -p.c[j];
      ++col;
    }
    copy(p.a_eq, 0);
    copy(p.a_ub, m_eq_);
    for (int i = 0; i < m_ub_; ++i) trip.emplace_back(m_eq_ + i, col + i, 1.0);
    a_.resize(m_, n_);
    a_.setFromTriplets(trip.begin(), trip.end());
    at_ = a_.transpose();
    b_.resize(m_);
    b_ << p.b_eq, p.b_ub;
    has_lo_.resize(n_);
    has_hi_.resize(n_);
    fixed_.resize(n_);
    for (int j = 0; j < n_; ++j) {
      // Fixed variables stay at their value and carry no barrier.
      fixed_[j] = lo_[j] == hi_[j];
      has_lo_[j] = !fixed_[j] && std::isfinite(lo_[j]);
      has_hi_[j] = !fixed_[j] && std::isfinite(hi_[j]);
    }
  }

  // Returns false when the iteration fails to certify an optimum.
  bool run(LPSolution& sol) {
    if (m_ == 0) return false;
    initial_point();
    const double bnorm = 1.0 + b_.lpNorm<Eigen::Infinity>();
    const double cnorm = 1.0 + c_.lpNorm<Eigen::Infinity>();
    SparseLdl ldlt;
    bool analyzed = false;
    Eigen::VectorXd dx(n_), dy(m_), dzl(n_), dzu(n_);
    Eigen::VectorXd ax(n_), ay(m_), azl(n_), azu(n_);

    for (int it = 0; it < opt_.max_iterations; ++it) {
      sol.iterations = it + 1;
      const Eigen::VectorXd rp = b_ - a_ * x_;
      Eigen::VectorXd rd = c_ - at_ * y_ - zl_ + zu_;
      for (int j = 0; j < n_; ++j)
        if (fixed_[j]) rd[j] = 0.0;
      const double pobj = c_.dot(x_);
      const double dobj = dual_objective();
      const double mu = complementarity() / std::max(1, num_pairs_);
      if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(mu)) return false;
      if (rp.lpNorm<Eigen::Infinity>() <= opt_.tol * bnorm && rd.lpNorm<Eigen::Infinity>() <= opt_.tol * cnorm &&
          std::abs(pobj - dobj) <= opt_.tol * (1.0 + std::abs(pobj))) {
        finish(sol);
        return true;
      }

      // theta^-1 = zl/xl + zu/xu; fixed variables do not move.
      Eigen::VectorXd theta = Eigen::VectorXd::Zero(n_);
      for (int j = 0; j < n_; ++j) {
        if (fixed_[j]) continue;
        double d = opt_.regularization;
        if (has_lo_[j]) d += zl_[j] / gap_lo(j);
        if (has_hi_[j]) d += zu_[j] / gap_hi(j);
        theta[j] = 1.0 / d;
      }
      SparseMatrix adat = a_ * theta.asDiagonal() * at_;
      for (int i = 0; i < m_; ++i) adat.coeffRef(i, i) += 0.0;  // keep the diagonal in the pattern
      for (int i = 0; i < m_; ++i) adat.coeffRef(i, i) += opt_.regularization * std::max(1.0, adat.coeff(i, i));
      if (!analyzed) {
        ldlt.analyze(adat);
        analyzed = true;
      }
      ldlt.factorize(adat, opt_.pivot_tol);

      // Predictor with zero centering.
      Eigen::VectorXd rl = Eigen::VectorXd::Zero(n_), ru = Eigen::VectorXd::Zero(n_);
      for (int j = 0; j < n_; ++j) {
        if (has_lo_[j]) rl[j] = -gap_lo(j) * zl_[j];
        if (has_hi_[j]) ru[j] = -gap_hi(j) * zu_[j];
      }
      direction(ldlt, theta, rp, rd, rl, ru, ax, ay, azl, azu);
      const double ap = primal_step(ax), ad = dual_step(azl, azu);
      double mu_aff = 0.0;
      for (int j = 0; j < n_; ++j) {
        if (has_lo_[j]) mu_aff += (gap_lo(j) + ap * ax[j]) * (zl_[j] + ad * azl[j]);
        if (has_hi_[j]) mu_aff += (gap_hi(j) - ap * ax[j]) * (zu_[j] + ad * azu[j]);
      }
      mu_aff /= std::max(1, num_pairs_);
      const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

      // Corrector with centering and the second-order term.
      for (int j = 0; j < n_; ++j) {
        if (has_lo_[j]) rl[j] = sigma * mu - gap_lo(j) * zl_[j] - ax[j] * azl[j];
        if (has_hi_[j]) ru[j] = sigma * mu - gap_hi(j) * zu_[j] + ax[j] * azu[j];
      }
      direction(ldlt, theta, rp, rd, rl, ru, dx, dy, dzl, dzu);
      if (!dx.allFinite() || !dy.allFinite()) return false;
      const double sp = std::min(1.0, opt_.step_fraction * primal_step(dx));
      const double sd = std::min(1.0, opt_.step_fraction * dual_step(dzl, dzu));
      x_ += sp * dx;
      y_ += sd * dy;
      zl_ += sd * dzl;
      zu_ += sd * dzu;
    }
    return false;
  }

 private:
  double gap_lo(int j) const { return x_[j] - lo_[j]; }
  double gap_hi(int j) const { return hi_[j] - x_[j]; }

  void initial_point() {
    x_.resize(n_);
    zl_ = Eigen::VectorXd::Zero(n_);
    zu_ = Eigen::VectorXd::Zero(n_);
    y_ = Eigen::VectorXd::Zero(m_);
    num_pairs_ = 0;
    for (int j = 0; j < n_; ++j) {
      const double z0 = 1.0 + std::abs(c_[j]);
      if (fixed_[j]) {
        x_[j] = lo_[j];
      } else if (has_lo_[j] && has_hi_[j]) {
        x_[j] = lo_[j] + 0.5 * (hi_[j] - lo_[j]);
      } else if (has_lo_[j]) {
        x_[j] = lo_[j] + 1.0;
      } else {
        x_[j] = hi_[j] - 1.0;
      }
      if (has_lo_[j]) {
        zl_[j] = z0;
        ++num_pairs_;
      }
      if (has_hi_[j]) {
        zu_[j] = z0;
        ++num_pairs_;
      }
    }
  }

  double complementarity() const {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) {
      if (has_lo_[j]) s += gap_lo(j) * zl_[j];
      if (has_hi_[j]) s += gap_hi(j) * zu_[j];
    }
    return s;
  }

  double dual_objective() const {
    double d = b_.dot(y_);
    for (int j = 0; j < n_; ++j) {
      if (has_lo_[j]) d += lo_[j] * zl_[j];
      if (has_hi_[j]) d -= hi_[j] * zu_[j];
    }
    // Fixed columns contribute their reduced cost at the fixed value.
    const Eigen::VectorXd aty = at_ * y_;
    for (int j = 0; j < n_; ++j)
      if (fixed_[j]) d += (c_[j] - aty[j]) * lo_[j];
    return d;
  }

  // Solves the reduced Newton system for right-hand sides rp, rd and the
  // complementarity targets rl (lower) and ru (upper).
  void direction(const SparseLdl& ldlt, const Eigen::VectorXd& theta,
                 const Eigen::VectorXd& rp, const Eigen::VectorXd& rd, const Eigen::VectorXd& rl,
                 const Eigen::VectorXd& ru, Eigen::VectorXd& dx, Eigen::VectorXd& dy, Eigen::VectorXd& dzl,
                 Eigen::VectorXd& dzu) const {
    Eigen::VectorXd rhat = rd;
    for (int j = 0; j < n_; ++j) {
      if (has_lo_[j]) rhat[j] -= rl[j] / gap_lo(j);
      if (has_hi_[j]) rhat[j] += ru[j] / gap_hi(j);
    }
    const Eigen::VectorXd trhat = theta.cwiseProduct(rhat);
    dy = ldlt.solve(rp + a_ * trhat);
    dx = theta.cwiseProduct(at_ * dy - rhat);
    // Iterative refinement on the primal equations A dx = rp, which the
    // regularized and ill-conditioned normal equations only satisfy loosely.
    for (int pass = 0; pass < 3; ++pass) {
      const Eigen::VectorXd e = rp - a_ * dx;
      if (e.lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + rp.lpNorm<Eigen::Infinity>())) break;
      const Eigen::VectorXd ddy = ldlt.solve(e);
      dy += ddy;
      dx += theta.cwiseProduct(at_ * ddy);
    }
    dzl.setZero();
    dzu.setZero();
    for (int j = 0; j < n_; ++j) {
      if (has_lo_[j]) dzl[j] = (rl[j] - zl_[j] * dx[j]) / gap_lo(j);
      if (has_hi_[j]) dzu[j] = (ru[j] + zu_[j] * dx[j]) / gap_hi(j);
    }
  }

  double primal_step(const Eigen::VectorXd& dx) const {
    double a = kInf;
    for (int j = 0; j < n_; ++j) {
      if (has_lo_[j] && dx[j] < 0) a = std::min(a, -gap_lo(j) / dx[j]);
      if (has_hi_[j] && dx[j] > 0) a = std::min(a, gap_hi(j) / dx[j]);
    }
    return a;
  }

  double dual_step(const Eigen::VectorXd& dzl, const Eigen::VectorXd& dzu) const {
    double a = kInf;
    for (int j = 0; j < n_; ++j) {
      if (has_lo_[j] && dzl[j] < 0) a = std::min(a, -zl_[j] / dzl[j]);
      if (has_hi_[j] && dzu[j] < 0) a = std::min(a, -zu_[j] / dzu[j]);
    }
    return a;
  }

  void finish(LPSolution& sol) const {
    sol.status = LPStatus::kOptimal;
    sol.z = x_.head(n_orig_);
    for (int j = 0; j < n_orig_; ++j) {
      if (neg_of_[j] >= 0) sol.z[j] -= x_[neg_of_[j]];
      // Snap onto bounds the interior iterate approaches but never touches.
      sol.z[j] = std::clamp(sol.z[j], p_.lb[j], p_.ub[j]);
    }
    sol.objective = p_.c.dot(sol.z) + p_.offset;
    sol.duals_eq = y_.head(m_eq_);
    sol.duals_ub = y_.tail(m_ub_);
  }

  const LPProblem& p_;
  InteriorPointOptions opt_;
  int n_orig_ = 0, n_ = 0, m_eq_ = 0, m_ub_ = 0, m_ = 0, num_pairs_ = 0;
  SparseMatrix a_, at_;
  Eigen::VectorXd b_, c_, lo_, hi_;
  std::vector<char> has_lo_, has_hi_, fixed_;
  std::vector<int> neg_of_;
  Eigen::VectorXd x_, y_, zl_, zu_;
};

}  // namespace detail

class InteriorPointSolver final : public LPSolver {
 public:
  explicit InteriorPointSolver(InteriorPointOptions opt = {}) : opt_(opt) {}

  LPSolution solve(const LPProblem& problem) const override {
    LPSolution sol;
    if (detail::InteriorPoint(problem, opt_).run(sol)) return sol;
    const long ipm_iterations = sol.iterations;
    sol = RevisedSimplex(opt_.fallback).solve(problem);
    sol.iterations += ipm_iterations;
    return sol;
  }

  const InteriorPointOptions& options() const { return opt_; }

 private:
  InteriorPointOptions opt_;
};

}  // namespace bstar
