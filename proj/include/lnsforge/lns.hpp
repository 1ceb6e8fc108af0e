#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lnsforge/bnb.hpp"
#include "lnsforge/diving.hpp"
#include "lnsforge/errors.hpp"
#include "lnsforge/expert.hpp"
#include "lnsforge/graph.hpp"
#include "lnsforge/lp.hpp"
#include "lnsforge/mip.hpp"
#include "lnsforge/nn.hpp"
#include "lnsforge/primal_gap.hpp"
#include "lnsforge/rng.hpp"
#include "lnsforge/util.hpp"

namespace lnsforge {

struct SamplerConfig {
  double epsilon = 0.01;
  double tau = 0.5;
  std::uint64_t seed = 0;

  void validate() const {
    if (epsilon <= 0.0)
      throw InvalidParameterError("SamplerConfig: epsilon must be > 0");
    if (tau <= 0.0)
      throw InvalidParameterError("SamplerConfig: tau must be > 0");
  }
};

struct AdaptiveSizeConfig {
  double initial_fraction = 0.2;
  double alpha = 1.5;
  double min_fraction = 0.01;
  double max_fraction = 0.5;

  void validate() const {
    if (alpha <= 1.0)
      throw InvalidParameterError("AdaptiveSizeConfig: alpha must be > 1");
    if (!(min_fraction <= initial_fraction &&
          initial_fraction <= max_fraction) ||
        min_fraction <= 0.0 || max_fraction > 1.0)
      throw InvalidParameterError(
          "AdaptiveSizeConfig: need 0 < min <= initial <= max <= 1");
  }
};

// Sequential sampling without replacement with weight (mu_i + eps)^(1/tau)
// per remaining variable; returns exactly eta distinct variable indices,
// ascending.
inline std::vector<int> select_neighborhood(
    const std::vector<double>& mu, const std::vector<int>& integer_indices,
    int eta, const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  const int ni = static_cast<int>(integer_indices.size());
  if (mu.size() != integer_indices.size())
    throw DimensionError("select_neighborhood: mu length mismatch");
  if (eta < 0 || eta > ni)
    throw InvalidParameterError("select_neighborhood: eta out of [0, |I|]");

  std::vector<int> remaining(integer_indices);
  std::vector<double> weight(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] < -1e-12 || mu[i] > 1.0 + 1e-12)
      throw InvalidParameterError("select_neighborhood: mu outside [0, 1]");
    weight[i] = std::pow(mu[i] + cfg.epsilon, 1.0 / cfg.tau);
  }

  std::vector<int> chosen;
  chosen.reserve(eta);
  for (int pick = 0; pick < eta; ++pick) {
    double total = 0.0;
    for (double w : weight) total += w;
    const double u = rng.uniform_real() * total;
    double acc = 0.0;
    std::size_t sel = weight.size() - 1;
    for (std::size_t i = 0; i < weight.size(); ++i) {
      acc += weight[i];
      if (u < acc) {
        sel = i;
        break;
      }
    }
    chosen.push_back(remaining[sel]);
    remaining.erase(remaining.begin() + static_cast<long>(sel));
    weight.erase(weight.begin() + static_cast<long>(sel));
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

inline std::vector<int> select_neighborhood(const std::vector<double>& mu,
                                            const std::vector<int>& I,
                                            int eta,
                                            const SamplerConfig& cfg) {
  Rng rng(cfg.seed);
  return select_neighborhood(mu, I, eta, cfg, rng);
}

// Uniform neighborhood choice (the random-destroy baseline).
inline std::vector<int> random_neighborhood(
    const std::vector<int>& integer_indices, int eta, Rng& rng) {
  if (eta < 0 || eta > static_cast<int>(integer_indices.size()))
    throw InvalidParameterError("random_neighborhood: eta out of [0, |I|]");
  auto chosen = rng.sample_without_replacement(integer_indices,
                                               static_cast<std::size_t>(eta));
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

inline std::vector<int> random_neighborhood(
    const std::vector<int>& integer_indices, int eta, std::uint64_t seed) {
  Rng rng(seed);
  return random_neighborhood(integer_indices, eta, rng);
}

struct LnsStepResult {
  Assignment x_next;
  MipStatus status = MipStatus::Optimal;
};

// Unassigns the action set, solves the sub-MIP warm-started with the
// current restriction, and lifts the incumbent. The warm start means the
// objective can never regress, even on a timeout.
inline LnsStepResult lns_step(const MipInstance& inst, const Assignment& x_t,
                              const std::vector<int>& action,
                              const SolveBudget& budget) {
  if (action.empty()) return {x_t, MipStatus::Optimal};
  const SubMip sub = derive_submip(inst, x_t, action);
  const Assignment warm = restrict_assignment(sub, x_t);
  const MipSolveResult solved = solve_mip(sub.instance, budget, warm);
  return {lift_assignment(sub, *solved.incumbent, x_t), solved.status};
}

// Multiplicative neighborhood-size update: grow on a provably optimal
// sub-MIP solve, shrink when the budget ran out, clamped to the range.
inline double update_fraction(double fraction, MipStatus status,
                              const AdaptiveSizeConfig& cfg) {
  cfg.validate();
  if (status == MipStatus::Optimal)
    return std::min(fraction * cfg.alpha, cfg.max_fraction);
  return std::max(fraction / cfg.alpha, cfg.min_fraction);
}

struct NeuralPolicy {
  const PolicyParams* params = nullptr;
};
struct RandomPolicy {};
struct ExpertPolicy {
  SolveBudget budget{50000, 3600000, 1e-9};
};
using PolicySpec = std::variant<NeuralPolicy, RandomPolicy, ExpertPolicy>;

struct DiveInit {
  const PolicyParams* params = nullptr;
  int n_samples = 8;
  double coverage = 0.5;
  SolveBudget budget;
};
struct BnbInit {
  SolveBudget budget;
};
using InitSpec = std::variant<DiveInit, BnbInit>;

inline const char* policy_name(const PolicySpec& p) {
  if (std::holds_alternative<NeuralPolicy>(p)) return "neural";
  if (std::holds_alternative<ExpertPolicy>(p)) return "expert";
  return "random";
}

struct EpisodeStep {
  int t = 0;
  int eta = 0;
  std::vector<int> action;
  std::string status;  // sub-MIP solve status; "init" for step 0
  double objective = 0.0;
  double gap = 0.0;
  double reward = 0.0;  // recorded as -gap; not consumed by training
  long elapsed_ms = 0;
};

struct EpisodeRecord {
  std::string instance_id;
  std::uint64_t run_seed = 0;
  std::vector<EpisodeStep> steps;  // step 0 describes the initial assignment

  double final_objective() const {
    return steps.empty() ? std::numeric_limits<double>::quiet_NaN()
                         : steps.back().objective;
  }
  double final_gap() const {
    return steps.empty() ? 1.0 : steps.back().gap;
  }
};

struct EpisodeConfig {
  SamplerConfig sampler;
  AdaptiveSizeConfig size;
  SolveBudget submip_budget{2000, 2000, 1e-9};
  int max_steps = 20;
  long max_time_ms = 0;  // 0 disables the wall-clock limit
  double best_known = 0.0;
};

// Runs one LNS episode: initial assignment, then per step encode -> policy
// -> neighborhood -> sub-MIP solve -> adaptive size update.
inline EpisodeRecord run_episode(const MipInstance& inst,
                                 const std::string& instance_id,
                                 const PolicySpec& policy,
                                 const InitSpec& init,
                                 const EpisodeConfig& cfg,
                                 std::uint64_t seed) {
  cfg.size.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed_ms = [&start]() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
  };

  EpisodeRecord record;
  record.instance_id = instance_id;
  record.run_seed = seed;

  Assignment x;
  if (const auto* d = std::get_if<DiveInit>(&init)) {
    if (d->params == nullptr)
      throw EpisodeError("run_episode: dive init needs a diving model");
    DiveConfig dc;
    dc.n_samples = d->n_samples;
    dc.coverage = d->coverage;
    dc.budget = d->budget;
    dc.seed = mix_seed(seed, 0xd1feULL);
    x = dive(inst, *d->params, dc).best;
  } else {
    const auto& b = std::get<BnbInit>(init);
    const MipSolveResult solved = solve_mip(inst, b.budget);
    if (!solved.incumbent)
      throw EpisodeError("run_episode: no initial assignment for " +
                         instance_id + " (" + to_string(solved.status) + ")");
    x = *solved.incumbent;
  }

  const int ni = inst.num_integer_vars();
  Rng rng(mix_seed(seed, 0x5e1ecfULL));

  // The root relaxation is solved once per episode and reused as a feature.
  std::optional<Assignment> lp_root;
  const auto* neural = std::get_if<NeuralPolicy>(&policy);
  if (neural != nullptr) {
    if (neural->params == nullptr)
      throw EpisodeError("run_episode: neural policy needs a model");
    const LpResult lp = solve_lp(inst);
    if (lp.status == LpStatus::Optimal) lp_root = lp.x;
  }
  HistoryWindow history;
  if (neural != nullptr) history.window = neural->params->history_window;

  const auto record_step = [&](int t, int eta, std::vector<int> action,
                               const std::string& status, double objective) {
    EpisodeStep s;
    s.t = t;
    s.eta = eta;
    s.action = std::move(action);
    s.status = status;
    s.objective = objective;
    s.gap = primal_gap(objective, cfg.best_known);
    s.reward = -s.gap;
    s.elapsed_ms = elapsed_ms();
    record.steps.push_back(std::move(s));
  };

  record_step(0, 0, {}, "init", evaluate_objective(inst, x));

  double fraction = cfg.size.initial_fraction;
  for (int t = 1; t <= cfg.max_steps; ++t) {
    if (cfg.max_time_ms > 0 && elapsed_ms() >= cfg.max_time_ms) break;
    const int eta =
        std::min(ni, std::max(1, static_cast<int>(std::ceil(
                                     fraction * ni - 1e-12))));

    std::vector<int> action;
    MipStatus status;
    Assignment x_next;
    if (neural != nullptr) {
      history.push(x);
      const BipartiteGraph g =
          encode(inst, lp_root, &history, neural->params->history_window);
      const PolicyOutput out =
          policy_forward(*neural->params, g, inst.integer_indices);
      action =
          select_neighborhood(out.mu, inst.integer_indices, eta, cfg.sampler,
                              rng);
      const LnsStepResult res = lns_step(inst, x, action, cfg.submip_budget);
      x_next = res.x_next;
      status = res.status;
    } else if (std::holds_alternative<RandomPolicy>(policy)) {
      action = random_neighborhood(inst.integer_indices, eta, rng);
      const LnsStepResult res = lns_step(inst, x, action, cfg.submip_budget);
      x_next = res.x_next;
      status = res.status;
    } else {
      // The expert both selects the neighborhood and computes the next
      // assignment through the same local-branching solve.
      const auto& ep = std::get<ExpertPolicy>(policy);
      ExpertStep step = expert_step(inst, x, eta, ep.budget);
      action = step.action;
      x_next = step.x_next;
      status = step.solver_status;
    }

    x = x_next;
    record_step(t, eta, action, to_string(status),
                evaluate_objective(inst, x));
    fraction = update_fraction(fraction, status, cfg.size);

    // A provably optimal solve over every integer variable is a global
    // optimality proof: either the sub-MIP freed all of I, or the expert's
    // Hamming ball covered the whole cube.
    if (status == MipStatus::Optimal &&
        (action.size() == static_cast<std::size_t>(ni) ||
         (std::holds_alternative<ExpertPolicy>(policy) && eta >= ni)))
      break;
  }
  return record;
}

struct ParallelRunResult {
  std::vector<EpisodeRecord> runs;
  // Best objective across runs at each step index (pointwise minimum of
  // the per-run best-so-far curves).
  std::vector<double> aggregate_objective;
};

inline std::vector<double> best_so_far_objectives(const EpisodeRecord& r,
                                                  std::size_t length) {
  std::vector<double> out;
  out.reserve(length);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < length; ++t) {
    if (t < r.steps.size()) best = std::min(best, r.steps[t].objective);
    out.push_back(best);
  }
  return out;
}

// Independent episodes with seeds base_seed + k; the aggregate output is
// the best incumbent across runs at every step.
inline ParallelRunResult run_parallel(const MipInstance& inst,
                                      const std::string& instance_id,
                                      int n_runs, std::uint64_t base_seed,
                                      const PolicySpec& policy,
                                      const InitSpec& init,
                                      const EpisodeConfig& cfg,
                                      int workers = 1) {
  if (n_runs < 1) throw InvalidParameterError("run_parallel: n_runs < 1");
  ParallelRunResult result;
  result.runs.resize(static_cast<std::size_t>(n_runs));
  std::vector<std::optional<std::string>> failures(n_runs);
  parallel_for(n_runs, workers, [&](int k) {
    try {
      result.runs[k] = run_episode(inst, instance_id, policy, init, cfg,
                                   base_seed + static_cast<std::uint64_t>(k));
    } catch (const std::exception& e) {
      failures[k] = e.what();
    }
  });
  std::vector<EpisodeRecord> ok;
  for (int k = 0; k < n_runs; ++k)
    if (!failures[k]) ok.push_back(std::move(result.runs[k]));
  if (ok.empty())
    throw EpisodeError("run_parallel: all runs failed (" +
                       failures[0].value_or("unknown") + ")");
  result.runs = std::move(ok);

  std::size_t length = 0;
  for (const EpisodeRecord& r : result.runs)
    length = std::max(length, r.steps.size());
  result.aggregate_objective.assign(length,
                                    std::numeric_limits<double>::infinity());
  for (const EpisodeRecord& r : result.runs) {
    const auto curve = best_so_far_objectives(r, length);
    for (std::size_t t = 0; t < length; ++t)
      result.aggregate_objective[t] =
          std::min(result.aggregate_objective[t], curve[t]);
  }
  return result;
}

}  // namespace lnsforge
