#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "lnsforge/errors.hpp"
#include "lnsforge/mip.hpp"
#include "lnsforge/rng.hpp"

namespace lnsforge {

enum class InstanceFamily { SetCover, CombinatorialAuction, GeneralizedAssignment };

inline const char* to_string(InstanceFamily f) {
  switch (f) {
    case InstanceFamily::SetCover: return "setcover";
    case InstanceFamily::CombinatorialAuction: return "auction";
    case InstanceFamily::GeneralizedAssignment: return "gap";
  }
  return "?";
}

inline InstanceFamily family_from_string(const std::string& s) {
  if (s == "setcover") return InstanceFamily::SetCover;
  if (s == "auction") return InstanceFamily::CombinatorialAuction;
  if (s == "gap") return InstanceFamily::GeneralizedAssignment;
  throw InvalidParameterError("unknown instance family: " + s);
}

struct SplitFractions {
  double train = 0.70;
  double valid = 0.15;
  double test = 0.15;
};

struct GeneratorConfig {
  InstanceFamily family = InstanceFamily::SetCover;
  int n_vars = 40;
  int n_cons = 25;
  double density = 0.15;
  std::uint64_t seed = 1;
  int count = 1;
  SplitFractions split;

  void validate() const {
    if (n_vars < 4) throw InvalidParameterError("generator: n_vars < 4");
    if (n_cons < 1) throw InvalidParameterError("generator: n_cons < 1");
    if (count < 1) throw InvalidParameterError("generator: count < 1");
    if (!(density > 0.0 && density <= 1.0))
      throw InvalidParameterError("generator: density must be in (0, 1]");
    const double sum = split.train + split.valid + split.test;
    if (std::abs(sum - 1.0) > 1e-9)
      throw InvalidParameterError("generator: split fractions must sum to 1");
  }
};

struct SplitSizes {
  int train = 0;
  int valid = 0;
  int test = 0;
};

inline SplitSizes split_sizes(int count, const SplitFractions& f) {
  SplitSizes s;
  s.train = static_cast<int>(std::lround(count * f.train));
  s.valid = static_cast<int>(std::lround(count * f.valid));
  if (s.train + s.valid > count) s.valid = count - s.train;
  s.test = count - s.train - s.valid;
  return s;
}

namespace detail {

inline Variable make_binary(const std::string& name, double obj) {
  Variable v;
  v.name = name;
  v.lb = 0.0;
  v.ub = 1.0;
  v.is_integer = true;
  v.obj_coef = obj;
  return v;
}

// Min-cost set cover: columns are sets, rows are universe elements. Every
// element is covered by at least one set, so the all-ones point is feasible.
inline MipInstance gen_set_cover(const GeneratorConfig& cfg, Rng& rng) {
  MipInstance inst;
  std::vector<std::vector<int>> covers(cfg.n_cons);
  for (int j = 0; j < cfg.n_vars; ++j) {
    inst.variables.push_back(
        make_binary("x" + std::to_string(j), rng.uniform_real(1.0, 10.0)));
    for (int i = 0; i < cfg.n_cons; ++i)
      if (rng.bernoulli(cfg.density)) covers[i].push_back(j);
  }
  for (int i = 0; i < cfg.n_cons; ++i) {
    if (covers[i].empty())
      covers[i].push_back(rng.uniform_int(0, cfg.n_vars - 1));
    Constraint row;
    row.name = "cover_e" + std::to_string(i);
    for (int j : covers[i]) row.terms.emplace_back(j, -1.0);
    row.rhs = -1.0;  // sum x_j >= 1 in <= form
    inst.constraints.push_back(std::move(row));
  }
  inst.finalize();
  return inst;
}

// Winner determination for a combinatorial auction: bids are columns, items
// are rows, each item sold at most once. Maximization of bid prices becomes
// minimization of their negation; the all-zeros point is feasible.
inline MipInstance gen_auction(const GeneratorConfig& cfg, Rng& rng) {
  MipInstance inst;
  const int n_items = cfg.n_cons;
  std::vector<double> item_value(n_items);
  for (int i = 0; i < n_items; ++i) item_value[i] = rng.uniform_real(1.0, 2.0);

  std::vector<std::vector<int>> bids_on_item(n_items);
  for (int j = 0; j < cfg.n_vars; ++j) {
    std::vector<int> bundle;
    for (int i = 0; i < n_items; ++i)
      if (rng.bernoulli(cfg.density)) bundle.push_back(i);
    if (bundle.empty()) bundle.push_back(rng.uniform_int(0, n_items - 1));
    double price = 0.0;
    for (int i : bundle) price += item_value[i];
    price *= rng.uniform_real(0.8, 1.4);
    inst.variables.push_back(make_binary("bid" + std::to_string(j), -price));
    for (int i : bundle) bids_on_item[i].push_back(j);
  }
  for (int i = 0; i < n_items; ++i) {
    if (bids_on_item[i].empty()) {
      const int j = rng.uniform_int(0, cfg.n_vars - 1);
      bids_on_item[i].push_back(j);
      inst.variables[j].obj_coef -= item_value[i];
    }
    Constraint row;
    row.name = "item" + std::to_string(i);
    for (int j : bids_on_item[i]) row.terms.emplace_back(j, 1.0);
    row.rhs = 1.0;
    inst.constraints.push_back(std::move(row));
  }
  inst.finalize();
  return inst;
}

// Generalized assignment: tasks x agents grid with T*A <= n_vars binaries.
// Capacities are sized around a random witness assignment, so that witness
// stays feasible by construction.
inline MipInstance gen_generalized_assignment(const GeneratorConfig& cfg,
                                              Rng& rng) {
  int agents = 2;
  for (int a = 2; a * a <= cfg.n_vars; ++a)
    if (cfg.n_vars % a == 0) agents = a;
  const int tasks = cfg.n_vars / agents;

  MipInstance inst;
  std::vector<std::vector<double>> weight(tasks, std::vector<double>(agents));
  for (int t = 0; t < tasks; ++t)
    for (int a = 0; a < agents; ++a) {
      weight[t][a] = rng.uniform_real(1.0, 10.0);
      inst.variables.push_back(
          make_binary("x_t" + std::to_string(t) + "_a" + std::to_string(a),
                      rng.uniform_real(1.0, 10.0)));
    }

  std::vector<double> load(agents, 0.0);
  for (int t = 0; t < tasks; ++t) {
    const int a = rng.uniform_int(0, agents - 1);
    load[a] += weight[t][a];
  }

  const auto var_index = [agents](int t, int a) { return t * agents + a; };
  for (int t = 0; t < tasks; ++t) {
    // sum_a x_{t,a} = 1, emitted directly in normalized <= form.
    Constraint le, ge;
    le.name = "assign_t" + std::to_string(t) + "#le";
    ge.name = "assign_t" + std::to_string(t) + "#ge";
    for (int a = 0; a < agents; ++a) {
      le.terms.emplace_back(var_index(t, a), 1.0);
      ge.terms.emplace_back(var_index(t, a), -1.0);
    }
    le.rhs = 1.0;
    ge.rhs = -1.0;
    inst.constraints.push_back(std::move(le));
    inst.constraints.push_back(std::move(ge));
  }
  for (int a = 0; a < agents; ++a) {
    Constraint cap;
    cap.name = "cap_a" + std::to_string(a);
    for (int t = 0; t < tasks; ++t)
      cap.terms.emplace_back(var_index(t, a), weight[t][a]);
    cap.rhs = load[a] * rng.uniform_real(1.15, 1.45) + 1.0;
    inst.constraints.push_back(std::move(cap));
  }
  inst.finalize();
  return inst;
}

inline Assignment witness_for(const MipInstance& inst, InstanceFamily family,
                              Rng& rng) {
  Assignment w(static_cast<std::size_t>(inst.num_vars()), 0.0);
  switch (family) {
    case InstanceFamily::SetCover:
      for (int j = 0; j < inst.num_vars(); ++j) w[j] = 1.0;
      break;
    case InstanceFamily::CombinatorialAuction:
      break;  // all zeros
    case InstanceFamily::GeneralizedAssignment: {
      // Greedy repair: put each task on its least-loaded feasible agent.
      // The capacity rows were sized around a witness, so this succeeds.
      std::vector<const Constraint*> caps;
      for (const Constraint& row : inst.constraints)
        if (row.name.rfind("cap_", 0) == 0) caps.push_back(&row);
      std::vector<double> slack(caps.size());
      for (std::size_t a = 0; a < caps.size(); ++a) slack[a] = caps[a]->rhs;
      std::vector<double> coef_of(inst.num_vars(), 0.0);
      std::vector<int> agent_of(inst.num_vars(), -1);
      for (std::size_t a = 0; a < caps.size(); ++a)
        for (const auto& [j, c] : caps[a]->terms) {
          coef_of[j] = c;
          agent_of[j] = static_cast<int>(a);
        }
      const int agents = static_cast<int>(caps.size());
      const int tasks = agents > 0 ? inst.num_vars() / agents : 0;
      for (int t = 0; t < tasks; ++t) {
        int best = -1;
        double best_slack = -1.0;
        for (int a = 0; a < agents; ++a) {
          const int j = t * agents + a;
          const double rem = slack[a] - coef_of[j];
          if (rem >= 0.0 && rem > best_slack) {
            best_slack = rem;
            best = a;
          }
        }
        if (best < 0) return w;  // leave infeasible; caller retries
        w[t * agents + best] = 1.0;
        slack[best] -= coef_of[t * agents + best];
      }
      break;
    }
  }
  (void)rng;
  return w;
}

}  // namespace detail

// Deterministic, seeded generation. Instance k derives its own stream from
// (seed, k), so generation order and parallelism do not affect output.
inline std::vector<MipInstance> generate(const GeneratorConfig& cfg) {
  cfg.validate();
  std::vector<MipInstance> out;
  out.reserve(cfg.count);
  for (int k = 0; k < cfg.count; ++k) {
    MipInstance inst;
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      Rng rng(mix_seed(mix_seed(cfg.seed, static_cast<std::uint64_t>(k)),
                       static_cast<std::uint64_t>(attempt)));
      switch (cfg.family) {
        case InstanceFamily::SetCover:
          inst = detail::gen_set_cover(cfg, rng);
          break;
        case InstanceFamily::CombinatorialAuction:
          inst = detail::gen_auction(cfg, rng);
          break;
        case InstanceFamily::GeneralizedAssignment:
          inst = detail::gen_generalized_assignment(cfg, rng);
          break;
      }
      const Assignment w = detail::witness_for(inst, cfg.family, rng);
      ok = check_feasibility(inst, w).feasible();
    }
    if (!ok)
      throw GenerationError("generator: no feasible construction after 100 "
                            "attempts (instance " +
                            std::to_string(k) + ")");
    char idx[16];
    std::snprintf(idx, sizeof(idx), "%04d", k);
    inst.name = std::string(to_string(cfg.family)) + "_s" +
                std::to_string(cfg.seed) + "_" + idx;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace lnsforge
