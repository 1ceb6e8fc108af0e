#pragma once

// Test-only reference implementations: brute-force enumeration over binary
// assignments, LP vertex enumeration, and a small dense linear solver.
// These stay independent of the solver code paths they are used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "lnsforge/lp.hpp"
#include "lnsforge/mip.hpp"

namespace oracle {

using lnsforge::Assignment;
using lnsforge::MipInstance;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct BruteForceResult {
  double objective = kInf;
  std::optional<Assignment> best;
  long feasible_count = 0;
};

// Exhaustive minimum over all 0/1 settings of the integer variables of a
// pure-binary instance (continuous variables must be absent).
inline BruteForceResult brute_force_binary(const MipInstance& inst,
                                           double tol = 1e-6) {
  const int ni = inst.num_integer_vars();
  BruteForceResult res;
  Assignment x(static_cast<std::size_t>(inst.num_vars()), 0.0);
  for (long mask = 0; mask < (1L << ni); ++mask) {
    for (int k = 0; k < ni; ++k)
      x[inst.integer_indices[k]] = (mask >> k) & 1 ? 1.0 : 0.0;
    if (!lnsforge::check_feasibility(inst, x, tol).feasible()) continue;
    ++res.feasible_count;
    const double obj = lnsforge::evaluate_objective(inst, x);
    if (obj < res.objective) {
      res.objective = obj;
      res.best = x;
    }
  }
  return res;
}

// Same, restricted to assignments within Hamming distance eta of center.
inline BruteForceResult brute_force_hamming_ball(const MipInstance& inst,
                                                 const Assignment& center,
                                                 int eta, double tol = 1e-6) {
  const int ni = inst.num_integer_vars();
  BruteForceResult res;
  Assignment x(static_cast<std::size_t>(inst.num_vars()), 0.0);
  for (long mask = 0; mask < (1L << ni); ++mask) {
    int dist = 0;
    for (int k = 0; k < ni; ++k) {
      const int j = inst.integer_indices[k];
      const double v = (mask >> k) & 1 ? 1.0 : 0.0;
      x[j] = v;
      if (std::abs(v - std::round(center[j])) > 0.5) ++dist;
    }
    if (dist > eta) continue;
    if (!lnsforge::check_feasibility(inst, x, tol).feasible()) continue;
    ++res.feasible_count;
    const double obj = lnsforge::evaluate_objective(inst, x);
    if (obj < res.objective) {
      res.objective = obj;
      res.best = x;
    }
  }
  return res;
}

// Brute force over the integer variables of a mixed instance, completing
// each setting with an LP over the remaining variables (used to check the
// diving energy and sub-MIP derivations on small mixed instances).
inline double brute_force_with_lp_completion(const MipInstance& inst) {
  const int ni = inst.num_integer_vars();
  double best = kInf;
  for (long mask = 0; mask < (1L << ni); ++mask) {
    MipInstance fixed = inst;
    for (int k = 0; k < ni; ++k) {
      const double v = (mask >> k) & 1 ? 1.0 : 0.0;
      fixed.variables[inst.integer_indices[k]].lb = v;
      fixed.variables[inst.integer_indices[k]].ub = v;
    }
    const lnsforge::LpResult lp = lnsforge::solve_lp(fixed);
    if (lp.status == lnsforge::LpStatus::Optimal)
      best = std::min(best, lp.objective);
  }
  return best;
}

// Gaussian elimination with partial pivoting; nullopt when singular.
inline std::optional<std::vector<double>> solve_linear(
    std::vector<std::vector<double>> a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-10) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

struct VertexEnumResult {
  bool feasible = false;
  double objective = kInf;
};

// Enumerates every vertex of {Ax <= b, lb <= x <= ub}: choose k rows to be
// tight and n-k variables pinned to a bound, solve the k x k system over the
// free variables, and keep feasible solutions. The box is bounded, so the
// polytope (when nonempty) attains its minimum at such a vertex.
inline VertexEnumResult enumerate_vertices(const MipInstance& inst,
                                           double tol = 1e-7) {
  const int n = inst.num_vars();
  const int m = inst.num_constraints();
  VertexEnumResult result;

  std::vector<double> lb(n), ub(n), c(n);
  for (int j = 0; j < n; ++j) {
    lb[j] = inst.variables[j].lb;
    ub[j] = inst.variables[j].ub;
    c[j] = inst.variables[j].obj_coef;
  }
  std::vector<std::vector<double>> dense(m, std::vector<double>(n, 0.0));
  std::vector<double> rhs(m);
  for (int i = 0; i < m; ++i) {
    for (const auto& [j, coef] : inst.constraints[i].terms)
      dense[i][j] = coef;
    rhs[i] = inst.constraints[i].rhs;
  }

  const auto check_point = [&](const std::vector<double>& x) {
    for (int j = 0; j < n; ++j)
      if (x[j] < lb[j] - tol || x[j] > ub[j] + tol) return;
    for (int i = 0; i < m; ++i) {
      double act = 0.0;
      for (int j = 0; j < n; ++j) act += dense[i][j] * x[j];
      if (act > rhs[i] + tol) return;
    }
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += c[j] * x[j];
    result.feasible = true;
    result.objective = std::min(result.objective, obj);
  };

  // Iterate over subsets S of rows (tight) and F of variables (free) with
  // |F| = |S|; the remaining variables take every lower/upper combination.
  for (int rows_mask = 0; rows_mask < (1 << m); ++rows_mask) {
    std::vector<int> tight;
    for (int i = 0; i < m; ++i)
      if (rows_mask & (1 << i)) tight.push_back(i);
    const int k = static_cast<int>(tight.size());
    if (k > n) continue;

    std::vector<int> free_vars;
    const std::function<void(int)> choose_free = [&](int start) {
      if (static_cast<int>(free_vars.size()) == k) {
        std::vector<int> pinned;
        for (int j = 0; j < n; ++j)
          if (std::find(free_vars.begin(), free_vars.end(), j) ==
              free_vars.end())
            pinned.push_back(j);
        const int np = static_cast<int>(pinned.size());
        for (long bmask = 0; bmask < (1L << np); ++bmask) {
          std::vector<double> x(n, 0.0);
          for (int p = 0; p < np; ++p)
            x[pinned[p]] = (bmask >> p) & 1 ? ub[pinned[p]] : lb[pinned[p]];
          if (k == 0) {
            check_point(x);
            continue;
          }
          std::vector<std::vector<double>> sys(k, std::vector<double>(k));
          std::vector<double> sys_rhs(k);
          for (int r = 0; r < k; ++r) {
            double moved = rhs[tight[r]];
            for (int p = 0; p < np; ++p)
              moved -= dense[tight[r]][pinned[p]] * x[pinned[p]];
            sys_rhs[r] = moved;
            for (int fcol = 0; fcol < k; ++fcol)
              sys[r][fcol] = dense[tight[r]][free_vars[fcol]];
          }
          const auto sol = solve_linear(sys, sys_rhs);
          if (!sol) continue;
          for (int fcol = 0; fcol < k; ++fcol) x[free_vars[fcol]] = (*sol)[fcol];
          check_point(x);
        }
        return;
      }
      for (int j = start; j < n; ++j) {
        free_vars.push_back(j);
        choose_free(j + 1);
        free_vars.pop_back();
      }
    };
    choose_free(0);
  }
  return result;
}

}  // namespace oracle
