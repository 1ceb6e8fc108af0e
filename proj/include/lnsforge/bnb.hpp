#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <vector>

#include "lnsforge/errors.hpp"
#include "lnsforge/lp.hpp"
#include "lnsforge/mip.hpp"

namespace lnsforge {

struct SolveBudget {
  long max_nodes = 100000;
  long max_time_ms = 3600000;  // checked between node expansions only
  double gap_tol = 1e-9;

  void validate() const {
    if (max_nodes <= 0 || max_time_ms <= 0)
      throw InvalidParameterError("SolveBudget: limits must be positive");
    if (gap_tol < 0.0 || gap_tol >= 1.0)
      throw InvalidParameterError("SolveBudget: gap_tol must be in [0, 1)");
  }
};

enum class MipStatus {
  Optimal,
  FeasibleBudgetExhausted,
  Infeasible,
  NoSolutionBudgetExhausted
};

inline const char* to_string(MipStatus s) {
  switch (s) {
    case MipStatus::Optimal: return "optimal";
    case MipStatus::FeasibleBudgetExhausted: return "feasible_budget_exhausted";
    case MipStatus::Infeasible: return "infeasible";
    case MipStatus::NoSolutionBudgetExhausted:
      return "no_solution_budget_exhausted";
  }
  return "?";
}

inline bool budget_exhausted(MipStatus s) {
  return s == MipStatus::FeasibleBudgetExhausted ||
         s == MipStatus::NoSolutionBudgetExhausted;
}

struct MipSolveResult {
  MipStatus status = MipStatus::NoSolutionBudgetExhausted;
  std::optional<Assignment> incumbent;
  std::optional<double> objective;
  double lower_bound = -std::numeric_limits<double>::infinity();
  long nodes_expanded = 0;
};

namespace detail {

struct BnbNode {
  std::shared_ptr<const BnbNode> parent;
  int var = -1;  // branching variable; -1 for the root
  double new_lb = 0.0;
  double new_ub = 0.0;
  double bound;  // LP objective of the parent relaxation
  long id;
};

struct NodeOrder {
  // priority_queue keeps the "largest" on top, so invert: best bound first,
  // then FIFO on creation id for determinism.
  bool operator()(const std::shared_ptr<const BnbNode>& a,
                  const std::shared_ptr<const BnbNode>& b) const {
    if (a->bound != b->bound) return a->bound > b->bound;
    return a->id > b->id;
  }
};

inline void apply_node_bounds(const BnbNode* node, std::vector<double>& lb,
                              std::vector<double>& ub) {
  // Collect the chain root-to-leaf so child tightenings override the parent.
  std::vector<const BnbNode*> chain;
  for (const BnbNode* n = node; n != nullptr; n = n->parent.get())
    if (n->var >= 0) chain.push_back(n);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    lb[(*it)->var] = (*it)->new_lb;
    ub[(*it)->var] = (*it)->new_ub;
  }
}

}  // namespace detail

// Exact branch and bound over LP relaxations: best-bound node selection,
// most-fractional branching with lowest-index tie-break.
inline MipSolveResult solve_mip(
    const MipInstance& inst, const SolveBudget& budget,
    const std::optional<Assignment>& warm_start = std::nullopt,
    int lp_iteration_limit = 20000) {
  budget.validate();
  const auto start_time = std::chrono::steady_clock::now();
  const auto elapsed_ms = [&start_time]() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start_time)
        .count();
  };

  MipSolveResult result;
  if (warm_start) {
    require_matching_length(inst, *warm_start, "solve_mip warm start");
    if (!is_integral_feasible(inst, *warm_start))
      throw PreconditionError("solve_mip: warm start is not integral-feasible");
    result.incumbent = *warm_start;
    result.objective = evaluate_objective(inst, *warm_start);
  }

  std::vector<double> root_lb(inst.num_vars()), root_ub(inst.num_vars());
  for (int j = 0; j < inst.num_vars(); ++j) {
    root_lb[j] = inst.variables[j].lb;
    root_ub[j] = inst.variables[j].ub;
  }

  std::priority_queue<std::shared_ptr<const detail::BnbNode>,
                      std::vector<std::shared_ptr<const detail::BnbNode>>,
                      detail::NodeOrder>
      open;
  long next_id = 0;
  {
    auto root = std::make_shared<detail::BnbNode>();
    root->bound = -std::numeric_limits<double>::infinity();
    root->id = next_id++;
    open.push(std::move(root));
  }

  const auto finish = [&](bool proved, bool tree_exhausted = false) {
    if (result.incumbent) {
      result.status =
          proved ? MipStatus::Optimal : MipStatus::FeasibleBudgetExhausted;
      if (tree_exhausted) result.lower_bound = *result.objective;
      result.lower_bound = std::min(result.lower_bound, *result.objective);
    } else {
      result.status = proved ? MipStatus::Infeasible
                             : MipStatus::NoSolutionBudgetExhausted;
      if (proved) result.lower_bound = std::numeric_limits<double>::infinity();
    }
    return result;
  };

  const auto gap_closed = [&]() {
    if (!result.objective) return false;
    const double inc = *result.objective;
    return (inc - result.lower_bound) / std::max(std::abs(inc), 1e-9) <=
           budget.gap_tol;
  };

  std::vector<double> lb(root_lb.size()), ub(root_ub.size());
  while (!open.empty()) {
    if (result.nodes_expanded >= budget.max_nodes ||
        elapsed_ms() >= budget.max_time_ms)
      return finish(false);

    const auto node = open.top();
    open.pop();

    // Best-bound order makes the popped bound the global lower bound,
    // capped at the incumbent: a subtree pruned by the strict-improvement
    // cutoff may still contain an optimum equal to the incumbent.
    if (std::isfinite(node->bound))
      result.lower_bound = std::max(result.lower_bound, node->bound);
    if (result.objective)
      result.lower_bound = std::min(result.lower_bound, *result.objective);
    if (gap_closed()) return finish(true);
    if (result.objective && node->bound >= *result.objective - 1e-9)
      continue;  // cannot strictly improve

    lb = root_lb;
    ub = root_ub;
    detail::apply_node_bounds(node.get(), lb, ub);

    const LpResult lp = solve_lp_bounds(inst, lb, ub, lp_iteration_limit);
    ++result.nodes_expanded;

    if (lp.status == LpStatus::Infeasible) continue;
    if (lp.status != LpStatus::Optimal) return finish(false);
    if (result.objective && lp.objective >= *result.objective - 1e-9) continue;

    // Most-fractional integer variable, lowest index on ties.
    int branch_var = -1;
    double best_frac = 1e-6;
    for (int j : inst.integer_indices) {
      const double v = lp.x[j];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac) {
        best_frac = frac;
        branch_var = j;
      }
    }

    if (branch_var < 0) {
      Assignment candidate = lp.x;
      for (int j : inst.integer_indices) candidate[j] = std::round(lp.x[j]);
      if (is_integral_feasible(inst, candidate)) {
        const double obj = evaluate_objective(inst, candidate);
        if (!result.objective || obj < *result.objective - 1e-9) {
          result.incumbent = std::move(candidate);
          result.objective = obj;
          if (gap_closed()) return finish(true);
        }
      }
      continue;
    }

    const double v = lp.x[branch_var];
    auto down = std::make_shared<detail::BnbNode>();
    down->parent = node;
    down->var = branch_var;
    down->new_lb = lb[branch_var];
    down->new_ub = std::floor(v);
    down->bound = lp.objective;
    down->id = next_id++;
    open.push(std::move(down));

    auto up = std::make_shared<detail::BnbNode>();
    up->parent = node;
    up->var = branch_var;
    up->new_lb = std::ceil(v);
    up->new_ub = ub[branch_var];
    up->bound = lp.objective;
    up->id = next_id++;
    open.push(std::move(up));
  }

  // Tree exhausted: the incumbent (if any) is proved optimal.
  return finish(true, /*tree_exhausted=*/true);
}

}  // namespace lnsforge
