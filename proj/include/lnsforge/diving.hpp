#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lnsforge/bnb.hpp"
#include "lnsforge/errors.hpp"
#include "lnsforge/graph.hpp"
#include "lnsforge/lp.hpp"
#include "lnsforge/mip.hpp"
#include "lnsforge/nn.hpp"
#include "lnsforge/rng.hpp"
#include "lnsforge/util.hpp"

namespace lnsforge {

// Objective value of the best completion of a full integer assignment:
// continuous variables are set by the LP over the substituted instance.
// Infeasible assignments (or LPs that hit the iteration limit) score +inf.
inline double diving_energy(const MipInstance& inst,
                            const std::vector<double>& x_integer,
                            int lp_iteration_limit = 20000) {
  const double inf = std::numeric_limits<double>::infinity();
  if (x_integer.size() != static_cast<std::size_t>(inst.num_integer_vars()))
    throw DimensionError("diving_energy: integer assignment length mismatch");

  Assignment x(static_cast<std::size_t>(inst.num_vars()), 0.0);
  std::vector<bool> fixed(inst.num_vars(), false);
  for (std::size_t k = 0; k < x_integer.size(); ++k) {
    const double v = x_integer[k];
    if (std::abs(v - std::round(v)) > kFeasTol || v < -kFeasTol ||
        v > 1.0 + kFeasTol)
      throw InvalidParameterError("diving_energy: non-binary value");
    const int j = inst.integer_indices[k];
    x[j] = std::round(v);
    fixed[j] = true;
  }

  const auto res = detail::substitute_fixed(inst, x, fixed);
  if (res.infeasible_row) return inf;
  if (res.sub.instance.num_vars() == 0) return res.sub.fixed_offset;

  const LpResult lp = solve_lp(res.sub.instance, lp_iteration_limit);
  switch (lp.status) {
    case LpStatus::Optimal:
      return res.sub.fixed_offset + lp.objective;
    case LpStatus::IterationLimit:
      std::cerr << "warning: diving_energy LP hit the iteration limit on "
                << inst.name << "; treating as infeasible\n";
      return inf;
    default:
      return inf;
  }
}

// Training sample for the diving model: predict a collected feasible
// assignment's integer values from the instance (no history features).
inline std::vector<TrainSample> diving_training_samples(
    const MipInstance& inst, const std::vector<Assignment>& targets,
    const std::optional<Assignment>& lp_root) {
  std::vector<TrainSample> out;
  const BipartiteGraph g = encode(inst, lp_root, nullptr, 0);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Assignment& target = targets[t];
    require_matching_length(inst, target, "diving target");
    if (!is_integral_feasible(inst, target))
      throw PreconditionError("diving target infeasible for " + inst.name);
    TrainSample s;
    s.graph = g;
    s.integer_nodes = inst.integer_indices;
    s.labels.reserve(inst.integer_indices.size());
    for (int j : inst.integer_indices)
      s.labels.push_back(std::round(target[j]));
    s.tag = inst.name + "#target" + std::to_string(t);
    out.push_back(std::move(s));
  }
  return out;
}

inline TrainResult train_diving(
    const std::vector<std::pair<const MipInstance*, std::vector<Assignment>>>&
        dataset,
    const std::vector<std::pair<const MipInstance*, std::vector<Assignment>>>&
        valid_dataset,
    const TrainConfig& cfg, int lp_iteration_limit = 20000) {
  const auto build = [&](const auto& set) {
    std::vector<TrainSample> samples;
    for (const auto& [inst, targets] : set) {
      std::optional<Assignment> lp_root;
      const LpResult lp = solve_lp(*inst, lp_iteration_limit);
      if (lp.status == LpStatus::Optimal) lp_root = lp.x;
      auto s = diving_training_samples(*inst, targets, lp_root);
      samples.insert(samples.end(), std::make_move_iterator(s.begin()),
                     std::make_move_iterator(s.end()));
    }
    return samples;
  };
  return train_policy(build(dataset), build(valid_dataset), cfg,
                      /*history_window=*/0, "diving");
}

struct DivingSample {
  std::vector<std::pair<int, double>> partial;     // var index -> fixed value
  std::vector<std::pair<int, double>> confidence;  // var index -> label prob
  std::optional<Assignment> completed;
  std::optional<double> objective;
  MipStatus solve_status = MipStatus::NoSolutionBudgetExhausted;
};

struct DiveConfig {
  int n_samples = 8;
  double coverage = 0.5;  // fraction of integer variables to fix
  SolveBudget budget;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct DiveResult {
  Assignment best;
  double objective = std::numeric_limits<double>::infinity();
  int best_sample = -1;  // -1 when the fallback produced the assignment
  bool used_fallback = false;
  std::vector<DivingSample> samples;
};

// Samples integer assignments from the model, keeps the most confident
// fraction fixed, completes each partial assignment through a sub-MIP
// solve, and returns the best feasible completion. Sample k draws from a
// stream derived from (seed, k), so prefixes are stable as n_samples grows.
inline DiveResult dive(const MipInstance& inst, const PolicyParams& params,
                       const DiveConfig& cfg) {
  if (params.kind != "diving")
    throw InvalidParameterError("dive: model kind is '" + params.kind +
                                "', expected 'diving'");
  if (cfg.coverage < 0.0 || cfg.coverage > 1.0)
    throw InvalidParameterError("dive: coverage must be in [0, 1]");
  cfg.budget.validate();

  const int ni = inst.num_integer_vars();
  std::optional<Assignment> lp_root;
  {
    const LpResult lp = solve_lp(inst);
    if (lp.status == LpStatus::Optimal) lp_root = lp.x;
  }
  const BipartiteGraph g = encode(inst, lp_root, nullptr, params.history_window);
  const PolicyOutput out = policy_forward(params, g, inst.integer_indices);

  const int n_fix = std::min<int>(
      ni, static_cast<int>(std::ceil(cfg.coverage * ni - 1e-12)));

  DiveResult result;
  result.samples.resize(static_cast<std::size_t>(std::max(0, cfg.n_samples)));

  parallel_for(cfg.n_samples, cfg.workers, [&](int k) {
    DivingSample& sample = result.samples[k];
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(k)));

    std::vector<double> value(ni), conf(ni);
    for (int i = 0; i < ni; ++i) {
      value[i] = rng.bernoulli(out.mu[i]) ? 1.0 : 0.0;
      conf[i] = value[i] > 0.5 ? out.mu[i] : 1.0 - out.mu[i];
    }
    std::vector<int> order(ni);
    for (int i = 0; i < ni; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&conf](int a, int b) { return conf[a] > conf[b]; });

    Assignment base(static_cast<std::size_t>(inst.num_vars()), 0.0);
    std::vector<bool> fixed(inst.num_vars(), false);
    for (int r = 0; r < n_fix; ++r) {
      const int pos = order[r];
      const int j = inst.integer_indices[pos];
      base[j] = value[pos];
      fixed[j] = true;
      sample.partial.emplace_back(j, value[pos]);
      sample.confidence.emplace_back(j, conf[pos]);
    }
    std::sort(sample.partial.begin(), sample.partial.end());
    std::sort(sample.confidence.begin(), sample.confidence.end());

    const auto res = detail::substitute_fixed(inst, base, fixed);
    if (res.infeasible_row) {
      sample.solve_status = MipStatus::Infeasible;
      return;
    }
    const MipSolveResult solved = solve_mip(res.sub.instance, cfg.budget);
    sample.solve_status = solved.status;
    if (!solved.incumbent) return;
    Assignment full = res.sub.lift_values(*solved.incumbent, base);
    if (!check_feasibility(inst, full).feasible()) return;
    sample.objective = evaluate_objective(inst, full);
    sample.completed = std::move(full);
  });

  for (int k = 0; k < cfg.n_samples; ++k) {
    const DivingSample& s = result.samples[k];
    if (s.completed && *s.objective < result.objective) {
      result.objective = *s.objective;
      result.best = *s.completed;
      result.best_sample = k;
    }
  }
  if (result.best_sample >= 0) return result;

  // Declared fallback: a plain solve on the full instance with the same
  // budget.
  const MipSolveResult fallback = solve_mip(inst, cfg.budget);
  if (fallback.incumbent) {
    result.best = *fallback.incumbent;
    result.objective = *fallback.objective;
    result.used_fallback = true;
    return result;
  }
  throw EpisodeError("dive: no feasible completion and fallback solve found "
                     "no assignment for " +
                     inst.name);
}

}  // namespace lnsforge
