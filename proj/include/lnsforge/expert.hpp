#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lnsforge/bnb.hpp"
#include "lnsforge/errors.hpp"
#include "lnsforge/graph.hpp"
#include "lnsforge/lp.hpp"
#include "lnsforge/mip.hpp"
#include "lnsforge/nn.hpp"
#include "lnsforge/util.hpp"

namespace lnsforge {

struct ExpertStep {
  Assignment x_t;
  Assignment x_next;
  std::vector<int> action;  // integer variables whose value changed
  int eta = 0;
  MipStatus solver_status = MipStatus::NoSolutionBudgetExhausted;
  double objective_next = 0.0;

  bool stalled() const { return action.empty(); }
};

// One local-branching expert move: solve the instance restricted to the
// Hamming ball of radius eta around x_t, warm-started at x_t. The minimal
// unassignment set is the diff between x_t and the incumbent.
inline ExpertStep expert_step(const MipInstance& inst, const Assignment& x_t,
                              int eta, const SolveBudget& budget) {
  if (eta < 1) throw InvalidParameterError("expert_step: eta < 1");
  const MipInstance ball = add_local_branching_constraint(inst, x_t, eta);
  const MipSolveResult solved = solve_mip(ball, budget, x_t);

  ExpertStep step;
  step.x_t = x_t;
  step.eta = eta;
  step.solver_status = solved.status;
  step.x_next = *solved.incumbent;  // warm start guarantees an incumbent
  step.objective_next = *solved.objective;
  for (int j : inst.integer_indices)
    if (std::abs(std::round(x_t[j]) - std::round(step.x_next[j])) > 0.5)
      step.action.push_back(j);
  return step;
}

struct Trajectory {
  std::string instance_id;
  std::vector<ExpertStep> steps;
  std::string initial_source;  // "diving" or "bnb-incumbent"
};

struct ExpertConfig {
  double eta_fraction = 0.2;  // eta = max(1, ceil(fraction * |I|))
  int eta_override = 0;       // > 0 pins eta directly
  int t_max = 30;
  SolveBudget budget{50000, 3600000, 1e-9};

  int eta_for(const MipInstance& inst) const {
    if (eta_override > 0) return eta_override;
    const int ni = inst.num_integer_vars();
    return std::max(1, static_cast<int>(
                           std::ceil(eta_fraction * ni - 1e-12)));
  }
};

// Rolls the expert forward from x0. Stops at t_max, after two consecutive
// stalled steps, or at a proven fixed point (an optimal in-ball solve that
// leaves the assignment unchanged repeats forever).
inline Trajectory generate_trajectory(const MipInstance& inst,
                                      const std::string& instance_id,
                                      const Assignment& x0,
                                      const std::string& initial_source,
                                      const ExpertConfig& cfg) {
  if (!is_integral_feasible(inst, x0))
    throw PreconditionError("generate_trajectory: x0 infeasible for " +
                            instance_id);
  Trajectory traj;
  traj.instance_id = instance_id;
  traj.initial_source = initial_source;

  const int eta = cfg.eta_for(inst);
  Assignment x = x0;
  int consecutive_stalled = 0;
  for (int t = 0; t < cfg.t_max; ++t) {
    ExpertStep step = expert_step(inst, x, eta, cfg.budget);
    const bool stalled = step.stalled();
    const bool optimal = step.solver_status == MipStatus::Optimal;
    x = step.x_next;
    traj.steps.push_back(std::move(step));
    if (stalled && optimal) break;  // fixed point within the ball
    if (stalled) {
      if (++consecutive_stalled >= 2) break;
    } else {
      consecutive_stalled = 0;
    }
    // A ball covering every integer variable makes an optimal solve global.
    if (optimal && eta >= inst.num_integer_vars()) break;
  }
  return traj;
}

struct TrajectoryBatch {
  std::vector<Trajectory> trajectories;  // aligned with the input instances
  std::vector<std::pair<std::string, std::string>> skipped;  // id, reason
};

// initial_assignment returns nullopt when no start is obtainable; such
// instances are skipped with a recorded reason.
inline TrajectoryBatch generate_trajectories(
    const std::vector<const MipInstance*>& instances,
    const std::vector<std::string>& instance_ids,
    const std::function<std::optional<Assignment>(const MipInstance&)>&
        initial_assignment,
    const std::string& initial_source, const ExpertConfig& cfg,
    int workers = 1) {
  if (instances.size() != instance_ids.size())
    throw DimensionError("generate_trajectories: id/instance count mismatch");
  std::vector<std::optional<Trajectory>> slots(instances.size());
  std::vector<std::optional<std::string>> reasons(instances.size());

  parallel_for(static_cast<int>(instances.size()), workers, [&](int i) {
    const MipInstance& inst = *instances[i];
    std::optional<Assignment> x0;
    try {
      x0 = initial_assignment(inst);
    } catch (const std::exception& e) {
      reasons[i] = std::string("initial assignment failed: ") + e.what();
      return;
    }
    if (!x0) {
      reasons[i] = "no initial assignment obtainable";
      return;
    }
    slots[i] = generate_trajectory(inst, instance_ids[i], *x0, initial_source,
                                   cfg);
  });

  TrajectoryBatch batch;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i])
      batch.trajectories.push_back(std::move(*slots[i]));
    else
      batch.skipped.emplace_back(instance_ids[i],
                                 reasons[i].value_or("unknown"));
  }
  return batch;
}

// Imitation samples: one per expert step, with the history window holding
// the assignments up to and including x_t and labels from a_t.
inline std::vector<TrainSample> nns_training_samples(
    const MipInstance& inst, const Trajectory& traj,
    const std::optional<Assignment>& lp_root, int window) {
  std::vector<TrainSample> out;
  HistoryWindow history;
  history.window = window;
  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    const ExpertStep& step = traj.steps[t];
    history.push(step.x_t);
    TrainSample s;
    s.graph = encode(inst, lp_root, &history, window);
    s.integer_nodes = inst.integer_indices;
    s.labels.assign(inst.integer_indices.size(), 0.0);
    for (int j : step.action) {
      const auto it = std::lower_bound(inst.integer_indices.begin(),
                                       inst.integer_indices.end(), j);
      s.labels[static_cast<std::size_t>(it - inst.integer_indices.begin())] =
          1.0;
    }
    s.tag = traj.instance_id + "#t" + std::to_string(t);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace lnsforge
