#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lnsforge/errors.hpp"
#include "lnsforge/mip.hpp"

namespace lnsforge {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

struct LpResult {
  LpStatus status = LpStatus::IterationLimit;
  Assignment x;       // structural values, valid when Optimal
  double objective = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
};

namespace detail {

// Two-phase primal simplex over the bounded computational form
//   Ax + s = b,  lb <= x <= ub,  0 <= s < inf,
// with a dense tableau T = B^{-1} [A | I | R] where R holds the artificial
// columns (-e_i) for rows that start infeasible. Dantzig pricing, switching
// permanently to Bland's rule after 3(n+m) consecutive degenerate pivots.
class BoundedSimplex {
 public:
  BoundedSimplex(const MipInstance& inst, const std::vector<double>& lb,
                 const std::vector<double>& ub)
      : n_(inst.num_vars()), m_(inst.num_constraints()), lb_(lb), ub_(ub) {
    for (int j = 0; j < n_; ++j) {
      if (!std::isfinite(lb_[j]) || !std::isfinite(ub_[j]))
        throw PreconditionError("solve_lp: variable " +
                                inst.variables[j].name +
                                " has an infinite bound");
    }
    // Slacks occupy columns n .. n+m-1.
    lb_.resize(n_ + m_, 0.0);
    ub_.resize(n_ + m_, kInf);

    // Nonbasic structurals start at their lower bound.
    std::vector<double> start(n_);
    for (int j = 0; j < n_; ++j) start[j] = lb_[j];

    std::vector<double> residual(m_);
    for (int i = 0; i < m_; ++i) {
      double act = 0.0;
      for (const auto& [j, coef] : inst.constraints[i].terms)
        act += coef * start[j];
      residual[i] = inst.constraints[i].rhs - act;
    }

    int n_art = 0;
    for (int i = 0; i < m_; ++i)
      if (residual[i] < 0.0) ++n_art;
    ncols_ = n_ + m_ + n_art;
    first_art_ = n_ + m_;

    tableau_.assign(static_cast<std::size_t>(m_) * ncols_, 0.0);
    basis_.assign(m_, -1);
    value_.assign(m_, 0.0);
    state_.assign(ncols_, AtLower);
    lb_.resize(ncols_, 0.0);
    ub_.resize(ncols_, kInf);

    int art = first_art_;
    for (int i = 0; i < m_; ++i) {
      // Rows needing an artificial enter the basis with B^{-1} = -1 on that
      // row, so the stored row is negated.
      const double sign = residual[i] < 0.0 ? -1.0 : 1.0;
      double* row = row_ptr(i);
      for (const auto& [j, coef] : inst.constraints[i].terms)
        row[j] = sign * coef;
      row[n_ + i] = sign;
      if (residual[i] < 0.0) {
        row[art] = 1.0;  // sign * (-1)
        basis_[i] = art;
        value_[i] = -residual[i];
        state_[art] = Basic;
        ++art;
      } else {
        basis_[i] = n_ + i;
        value_[i] = residual[i];
        state_[n_ + i] = Basic;
      }
    }
  }

  LpResult solve(const MipInstance& inst, int iteration_limit) {
    LpResult result;
    int iters_left = iteration_limit;

    if (first_art_ < ncols_) {
      std::vector<double> phase1_cost(ncols_, 0.0);
      for (int j = first_art_; j < ncols_; ++j) phase1_cost[j] = 1.0;
      const LoopExit exit = run(phase1_cost, iters_left);
      result.iterations = iteration_limit - iters_left;
      if (exit == LoopExit::IterationLimit) {
        result.status = LpStatus::IterationLimit;
        return result;
      }
      double infeas = 0.0;
      for (int i = 0; i < m_; ++i)
        if (basis_[i] >= first_art_) infeas += value_[i];
      if (infeas > kPhase1Tol) {
        result.status = LpStatus::Infeasible;
        result.iterations = iteration_limit - iters_left;
        return result;
      }
      // Freeze artificials at zero; a basic artificial left at ~0 simply
      // blocks movement through its row until a degenerate pivot ejects it.
      for (int j = first_art_; j < ncols_; ++j) ub_[j] = 0.0;
    }

    std::vector<double> cost(ncols_, 0.0);
    for (int j = 0; j < n_; ++j) cost[j] = inst.variables[j].obj_coef;
    const LoopExit exit = run(cost, iters_left);
    result.iterations = iteration_limit - iters_left;
    switch (exit) {
      case LoopExit::Optimal: {
        result.status = LpStatus::Optimal;
        result.x = extract();
        result.objective = 0.0;
        for (int j = 0; j < n_; ++j)
          result.objective += inst.variables[j].obj_coef * result.x[j];
        break;
      }
      case LoopExit::Unbounded:
        result.status = LpStatus::Unbounded;
        break;
      case LoopExit::IterationLimit:
        result.status = LpStatus::IterationLimit;
        break;
    }
    return result;
  }

 private:
  enum State : unsigned char { Basic, AtLower, AtUpper };
  enum class LoopExit { Optimal, Unbounded, IterationLimit };

  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kCostTol = 1e-9;
  static constexpr double kPhase1Tol = 1e-6;
  static constexpr double kDegenTol = 1e-9;

  double* row_ptr(int i) {
    return tableau_.data() + static_cast<std::size_t>(i) * ncols_;
  }

  double nonbasic_value(int j) const {
    return state_[j] == AtUpper ? ub_[j] : lb_[j];
  }

  Assignment extract() const {
    Assignment x(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) x[j] = nonbasic_value(j);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) x[basis_[i]] = value_[i];
    return x;
  }

  LoopExit run(const std::vector<double>& cost, int& iters_left) {
    bool bland = false;
    int degenerate_streak = 0;
    const int bland_trigger = 3 * (n_ + m_);
    std::vector<double> reduced(ncols_);

    while (iters_left > 0) {
      --iters_left;

      // Reduced costs d = c - c_B^T T.
      for (int j = 0; j < ncols_; ++j) reduced[j] = cost[j];
      for (int i = 0; i < m_; ++i) {
        const double cb = cost[basis_[i]];
        if (cb == 0.0) continue;
        const double* row = tableau_.data() + static_cast<std::size_t>(i) * ncols_;
        for (int j = 0; j < ncols_; ++j) reduced[j] -= cb * row[j];
      }

      int enter = -1, dir = 0;
      double best = kCostTol;
      for (int j = 0; j < ncols_; ++j) {
        if (state_[j] == Basic || lb_[j] == ub_[j]) continue;
        double improvement = 0.0;
        int d = 0;
        if (state_[j] == AtLower && reduced[j] < -kCostTol) {
          improvement = -reduced[j];
          d = +1;
        } else if (state_[j] == AtUpper && reduced[j] > kCostTol) {
          improvement = reduced[j];
          d = -1;
        } else {
          continue;
        }
        if (bland) {  // first eligible index
          enter = j;
          dir = d;
          break;
        }
        if (improvement > best) {
          best = improvement;
          enter = j;
          dir = d;
        }
      }
      if (enter < 0) return LoopExit::Optimal;

      // Ratio test: entering moves by delta >= 0 in direction dir.
      double delta = ub_[enter] - lb_[enter];  // own bound flip
      int leave_row = -1;
      bool leave_at_upper = false;
      for (int i = 0; i < m_; ++i) {
        const double a = dir * row_ptr(i)[enter];
        if (std::abs(a) <= kPivotTol) continue;
        const int bi = basis_[i];
        double limit;
        bool at_upper;
        if (a > 0.0) {  // basic value decreases toward its lower bound
          limit = (value_[i] - lb_[bi]) / a;
          at_upper = false;
        } else {  // basic value increases toward its upper bound
          if (ub_[bi] == kInf) continue;
          limit = (ub_[bi] - value_[i]) / (-a);
          at_upper = true;
        }
        if (limit < 0.0) limit = 0.0;
        const bool tighter =
            limit < delta - kDegenTol ||
            (limit < delta + kDegenTol && leave_row >= 0 &&
             (bland ? bi < basis_[leave_row]
                    : std::abs(row_ptr(i)[enter]) >
                          std::abs(row_ptr(leave_row)[enter])));
        if (leave_row < 0 ? limit < delta : tighter) {
          delta = std::min(delta, limit);
          leave_row = i;
          leave_at_upper = at_upper;
        }
      }

      if (delta == kInf) return LoopExit::Unbounded;

      if (delta <= kDegenTol) {
        if (++degenerate_streak > bland_trigger) bland = true;
      } else {
        degenerate_streak = 0;
      }

      if (leave_row < 0) {
        // Bound flip: entering runs to its opposite bound, basis unchanged.
        for (int i = 0; i < m_; ++i)
          value_[i] -= dir * row_ptr(i)[enter] * delta;
        state_[enter] = state_[enter] == AtLower ? AtUpper : AtLower;
        continue;
      }

      const double enter_value =
          dir > 0 ? lb_[enter] + delta : ub_[enter] - delta;
      for (int i = 0; i < m_; ++i) {
        if (i == leave_row) continue;
        value_[i] -= dir * row_ptr(i)[enter] * delta;
      }
      const int leaving = basis_[leave_row];
      state_[leaving] = leave_at_upper ? AtUpper : AtLower;

      // Pivot the tableau on (leave_row, enter).
      double* prow = row_ptr(leave_row);
      const double piv = prow[enter];
      const double inv = 1.0 / piv;
      for (int j = 0; j < ncols_; ++j) prow[j] *= inv;
      prow[enter] = 1.0;
      for (int i = 0; i < m_; ++i) {
        if (i == leave_row) continue;
        double* row = row_ptr(i);
        const double factor = row[enter];
        if (factor == 0.0) continue;
        for (int j = 0; j < ncols_; ++j) row[j] -= factor * prow[j];
        row[enter] = 0.0;
      }
      basis_[leave_row] = enter;
      state_[enter] = Basic;
      value_[leave_row] = enter_value;
    }
    return LoopExit::IterationLimit;
  }

  int n_, m_, ncols_ = 0, first_art_ = 0;
  std::vector<double> lb_, ub_;
  std::vector<double> tableau_;
  std::vector<int> basis_;
  std::vector<double> value_;
  std::vector<State> state_;
};

}  // namespace detail

// LP relaxation solve with explicit bound overrides (used by branch and
// bound, which tightens integer bounds per node).
inline LpResult solve_lp_bounds(const MipInstance& inst,
                                const std::vector<double>& lb,
                                const std::vector<double>& ub,
                                int iteration_limit = 20000) {
  if (iteration_limit <= 0)
    throw InvalidParameterError("solve_lp: iteration_limit must be positive");
  if (lb.size() != static_cast<std::size_t>(inst.num_vars()) ||
      ub.size() != static_cast<std::size_t>(inst.num_vars()))
    throw DimensionError("solve_lp_bounds: bound vector length mismatch");
  for (int j = 0; j < inst.num_vars(); ++j) {
    if (lb[j] > ub[j] + kFeasTol) {
      LpResult r;
      r.status = LpStatus::Infeasible;
      return r;
    }
  }
  detail::BoundedSimplex simplex(inst, lb, ub);
  return simplex.solve(inst, iteration_limit);
}

inline LpResult solve_lp(const MipInstance& inst, int iteration_limit = 20000) {
  std::vector<double> lb(inst.num_vars()), ub(inst.num_vars());
  for (int j = 0; j < inst.num_vars(); ++j) {
    lb[j] = inst.variables[j].lb;
    ub[j] = inst.variables[j].ub;
  }
  return solve_lp_bounds(inst, lb, ub, iteration_limit);
}

}  // namespace lnsforge
