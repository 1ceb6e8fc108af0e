#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "lnsforge/errors.hpp"

namespace lnsforge {

// Absolute tolerance for feasibility and integrality checks everywhere.
inline constexpr double kFeasTol = 1e-6;

struct Variable {
  std::string name;
  double lb = 0.0;
  double ub = 0.0;
  bool is_integer = false;
  double obj_coef = 0.0;
};

// One <= row: sum(terms) <= rhs. Rows of other senses are rewritten into
// this form at load time.
struct Constraint {
  std::string name;
  std::vector<std::pair<int, double>> terms;  // (var_index, coefficient)
  double rhs = 0.0;
};

struct Assignment {
  std::vector<double> values;

  Assignment() = default;
  explicit Assignment(std::vector<double> v) : values(std::move(v)) {}
  explicit Assignment(std::size_t n, double fill = 0.0) : values(n, fill) {}
  Assignment(std::initializer_list<double> v) : values(v) {}

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  bool operator==(const Assignment& o) const { return values == o.values; }
};

// min c^T x  s.t.  Ax <= b, lb <= x <= ub, x_i integral for i in I.
// Normalized instance: every constraint has sense <=. All integer variables
// in this toolkit are binary.
struct MipInstance {
  std::string name;
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::vector<int> integer_indices;  // sorted; kept in sync by finalize()

  int num_vars() const { return static_cast<int>(variables.size()); }
  int num_constraints() const { return static_cast<int>(constraints.size()); }
  int num_integer_vars() const {
    return static_cast<int>(integer_indices.size());
  }

  std::vector<double> objective() const {
    std::vector<double> c(variables.size());
    for (std::size_t j = 0; j < variables.size(); ++j)
      c[j] = variables[j].obj_coef;
    return c;
  }

  // Recomputes integer_indices and checks structural invariants.
  void finalize() {
    integer_indices.clear();
    for (int j = 0; j < num_vars(); ++j) {
      const Variable& v = variables[j];
      if (!(v.lb <= v.ub))
        throw InvalidParameterError("variable " + v.name + ": lb > ub");
      if (!std::isfinite(v.obj_coef))
        throw InvalidParameterError("variable " + v.name +
                                    ": non-finite objective coefficient");
      if (v.is_integer) {
        if (std::abs(v.lb - std::round(v.lb)) > kFeasTol ||
            std::abs(v.ub - std::round(v.ub)) > kFeasTol)
          throw InvalidParameterError("integer variable " + v.name +
                                      ": non-integral bounds");
        integer_indices.push_back(j);
      }
    }
    for (const Constraint& row : constraints) {
      std::vector<bool> seen(variables.size(), false);
      for (const auto& [j, coef] : row.terms) {
        if (j < 0 || j >= num_vars())
          throw InvalidParameterError("constraint " + row.name +
                                      ": variable index out of range");
        if (seen[static_cast<std::size_t>(j)])
          throw InvalidParameterError("constraint " + row.name +
                                      ": duplicate variable index");
        seen[static_cast<std::size_t>(j)] = true;
        if (!std::isfinite(coef))
          throw InvalidParameterError("constraint " + row.name +
                                      ": non-finite coefficient");
      }
      if (!std::isfinite(row.rhs))
        throw InvalidParameterError("constraint " + row.name +
                                    ": non-finite rhs");
    }
  }

  bool all_integers_binary() const {
    for (int j : integer_indices) {
      if (variables[j].lb != 0.0 || variables[j].ub != 1.0) return false;
    }
    return true;
  }
};

struct FeasibilityReport {
  struct BoundViolation {
    int var;
    double amount;
  };
  struct RowViolation {
    int row;
    double amount;
  };
  struct IntegralityViolation {
    int var;
    double distance;
  };

  std::vector<BoundViolation> bound_violations;
  std::vector<RowViolation> constraint_violations;
  std::vector<IntegralityViolation> integrality_violations;

  bool feasible() const {
    return bound_violations.empty() && constraint_violations.empty() &&
           integrality_violations.empty();
  }
};

inline void require_matching_length(const MipInstance& inst,
                                    const Assignment& x, const char* where) {
  if (x.size() != static_cast<std::size_t>(inst.num_vars()))
    throw DimensionError(std::string(where) + ": assignment length " +
                         std::to_string(x.size()) + " != variable count " +
                         std::to_string(inst.num_vars()));
}

inline double evaluate_objective(const MipInstance& inst, const Assignment& x) {
  require_matching_length(inst, x, "evaluate_objective");
  double obj = 0.0;
  for (int j = 0; j < inst.num_vars(); ++j)
    obj += inst.variables[j].obj_coef * x[j];
  return obj;
}

inline double row_activity(const Constraint& row, const Assignment& x) {
  double a = 0.0;
  for (const auto& [j, coef] : row.terms) a += coef * x[j];
  return a;
}

inline FeasibilityReport check_feasibility(const MipInstance& inst,
                                           const Assignment& x,
                                           double tol = kFeasTol) {
  require_matching_length(inst, x, "check_feasibility");
  FeasibilityReport report;
  for (int j = 0; j < inst.num_vars(); ++j) {
    const Variable& v = inst.variables[j];
    if (x[j] < v.lb - tol)
      report.bound_violations.push_back({j, v.lb - x[j]});
    else if (x[j] > v.ub + tol)
      report.bound_violations.push_back({j, x[j] - v.ub});
  }
  for (int i = 0; i < inst.num_constraints(); ++i) {
    const double act = row_activity(inst.constraints[i], x);
    if (act > inst.constraints[i].rhs + tol)
      report.constraint_violations.push_back(
          {i, act - inst.constraints[i].rhs});
  }
  for (int j : inst.integer_indices) {
    const double d = std::abs(x[j] - std::round(x[j]));
    if (d > tol) report.integrality_violations.push_back({j, d});
  }
  return report;
}

inline bool is_integral_feasible(const MipInstance& inst, const Assignment& x,
                                 double tol = kFeasTol) {
  return check_feasibility(inst, x, tol).feasible();
}

// Reduced problem obtained by substituting fixed variable values into the
// parent. free_to_parent maps sub variable index -> parent variable index;
// fixed_offset is the objective contribution of the substituted variables.
struct SubMip {
  MipInstance instance;
  std::vector<int> free_to_parent;
  double fixed_offset = 0.0;

  // Scatters a sub-space assignment over base (parent-space values).
  Assignment lift_values(const Assignment& y, const Assignment& base) const {
    Assignment out = base;
    for (std::size_t k = 0; k < free_to_parent.size(); ++k)
      out[free_to_parent[k]] = y[k];
    return out;
  }
};

namespace detail {

// Core substitution: variables where fixed_mask is true are replaced by
// their value in x. Rows whose terms all vanish are dropped when satisfied;
// a violated vanished row makes the reduction infeasible, which the caller
// interprets (error for derive_submip, +inf energy for diving).
struct SubstitutionResult {
  SubMip sub;
  bool infeasible_row = false;
};

inline SubstitutionResult substitute_fixed(const MipInstance& inst,
                                           const Assignment& x,
                                           const std::vector<bool>& fixed_mask,
                                           double tol = kFeasTol) {
  SubstitutionResult res;
  MipInstance& out = res.sub.instance;
  out.name = inst.name + "#sub";

  std::vector<int> parent_to_sub(inst.num_vars(), -1);
  for (int j = 0; j < inst.num_vars(); ++j) {
    if (fixed_mask[j]) {
      res.sub.fixed_offset += inst.variables[j].obj_coef * x[j];
    } else {
      parent_to_sub[j] = static_cast<int>(res.sub.free_to_parent.size());
      res.sub.free_to_parent.push_back(j);
      out.variables.push_back(inst.variables[j]);
    }
  }

  for (const Constraint& row : inst.constraints) {
    Constraint reduced;
    reduced.name = row.name;
    double rhs = row.rhs;
    for (const auto& [j, coef] : row.terms) {
      if (fixed_mask[j])
        rhs -= coef * x[j];
      else
        reduced.terms.emplace_back(parent_to_sub[j], coef);
    }
    reduced.rhs = rhs;
    if (reduced.terms.empty()) {
      if (rhs < -tol) res.infeasible_row = true;
      continue;  // satisfied constant row: drop
    }
    out.constraints.push_back(std::move(reduced));
  }
  out.finalize();
  return res;
}

}  // namespace detail

// Fixes every variable outside `unassign` except the continuous ones, which
// stay free at every LNS step. Requires x feasible so the restriction of x
// to the free variables is itself feasible for the sub-MIP.
inline SubMip derive_submip(const MipInstance& inst, const Assignment& x,
                            const std::vector<int>& unassign) {
  require_matching_length(inst, x, "derive_submip");
  std::vector<bool> is_integer(inst.num_vars(), false);
  for (int j : inst.integer_indices) is_integer[j] = true;

  std::vector<bool> fixed(inst.num_vars(), false);
  for (int j : inst.integer_indices) fixed[j] = true;
  for (int j : unassign) {
    if (j < 0 || j >= inst.num_vars() || !is_integer[j])
      throw InvalidActionError(
          "derive_submip: unassign index " + std::to_string(j) +
          " is not an integer variable of " + inst.name);
    fixed[j] = false;
  }

  if (!check_feasibility(inst, x).feasible())
    throw PreconditionError("derive_submip: incumbent assignment infeasible");

  auto res = detail::substitute_fixed(inst, x, fixed);
  if (res.infeasible_row)
    throw InternalError(
        "derive_submip: substitution produced a violated constant row from a "
        "feasible incumbent");
  return res.sub;
}

// Restriction of a parent-space assignment to the sub-MIP's variables.
inline Assignment restrict_assignment(const SubMip& sub,
                                      const Assignment& parent_x) {
  Assignment y(sub.free_to_parent.size());
  for (std::size_t k = 0; k < sub.free_to_parent.size(); ++k)
    y[k] = parent_x[sub.free_to_parent[k]];
  return y;
}

inline Assignment lift_assignment(const SubMip& sub, const Assignment& y,
                                  const Assignment& parent_x) {
  if (y.size() != static_cast<std::size_t>(sub.instance.num_vars()))
    throw DimensionError("lift_assignment: sub assignment length mismatch");
  if (!check_feasibility(sub.instance, y).feasible())
    throw PreconditionError(
        "lift_assignment: assignment infeasible for the sub-MIP");
  return sub.lift_values(y, parent_x);
}

// Appends the local-branching row restricting the feasible set to the
// Hamming ball of radius eta around x on the integer variables:
//   sum_{i in I: x_i=0} x'_i + sum_{i in I: x_i=1} (1 - x'_i) <= eta
// rewritten with the constants moved to the right-hand side.
inline MipInstance add_local_branching_constraint(const MipInstance& inst,
                                                  const Assignment& x,
                                                  int eta) {
  require_matching_length(inst, x, "add_local_branching_constraint");
  if (eta < 1)
    throw InvalidParameterError("add_local_branching_constraint: eta < 1");
  if (!inst.all_integers_binary())
    throw UnsupportedError(
        "add_local_branching_constraint: non-binary integer variable");
  if (!is_integral_feasible(inst, x))
    throw PreconditionError(
        "add_local_branching_constraint: center assignment not "
        "integral-feasible");

  MipInstance out = inst;
  Constraint row;
  row.name = "local_branching";
  int ones = 0;
  for (int j : inst.integer_indices) {
    if (std::round(x[j]) >= 0.5) {
      row.terms.emplace_back(j, -1.0);
      ++ones;
    } else {
      row.terms.emplace_back(j, 1.0);
    }
  }
  row.rhs = static_cast<double>(eta - ones);
  out.constraints.push_back(std::move(row));
  return out;
}

inline int hamming_distance(const MipInstance& inst, const Assignment& a,
                            const Assignment& b) {
  int d = 0;
  for (int j : inst.integer_indices)
    if (std::abs(std::round(a[j]) - std::round(b[j])) > 0.5) ++d;
  return d;
}

}  // namespace lnsforge
