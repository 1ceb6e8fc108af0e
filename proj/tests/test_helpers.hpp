#pragma once

// Shared builders for small hand-rolled instances used across the suites.

#include <string>
#include <vector>

#include "lnsforge/generators.hpp"
#include "lnsforge/mip.hpp"
#include "lnsforge/rng.hpp"

namespace testutil {

using lnsforge::Assignment;
using lnsforge::Constraint;
using lnsforge::MipInstance;
using lnsforge::Variable;

inline Variable binary(const std::string& name, double obj) {
  Variable v;
  v.name = name;
  v.lb = 0.0;
  v.ub = 1.0;
  v.is_integer = true;
  v.obj_coef = obj;
  return v;
}

inline Variable continuous(const std::string& name, double lb, double ub,
                           double obj) {
  Variable v;
  v.name = name;
  v.lb = lb;
  v.ub = ub;
  v.is_integer = false;
  v.obj_coef = obj;
  return v;
}

inline Constraint row(const std::string& name,
                      std::vector<std::pair<int, double>> terms, double rhs) {
  Constraint c;
  c.name = name;
  c.terms = std::move(terms);
  c.rhs = rhs;
  return c;
}

inline MipInstance make_instance(const std::string& name,
                                 std::vector<Variable> vars,
                                 std::vector<Constraint> rows) {
  MipInstance inst;
  inst.name = name;
  inst.variables = std::move(vars);
  inst.constraints = std::move(rows);
  inst.finalize();
  return inst;
}

// 0/1 knapsack as minimization: maximize value => minimize -value.
inline MipInstance knapsack(int n, std::uint64_t seed) {
  lnsforge::Rng rng(seed);
  std::vector<Variable> vars;
  Constraint cap;
  cap.name = "capacity";
  double total_w = 0.0;
  for (int j = 0; j < n; ++j) {
    const double w = rng.uniform_real(1.0, 10.0);
    vars.push_back(binary("item" + std::to_string(j),
                          -rng.uniform_real(1.0, 10.0)));
    cap.terms.emplace_back(j, w);
    total_w += w;
  }
  cap.rhs = 0.45 * total_w;
  return make_instance("knapsack" + std::to_string(seed), std::move(vars),
                       {std::move(cap)});
}

// Small random feasible binary instance (set-cover flavored).
inline MipInstance small_binary_instance(int n_vars, int n_rows,
                                         std::uint64_t seed) {
  lnsforge::GeneratorConfig cfg;
  cfg.family = lnsforge::InstanceFamily::SetCover;
  cfg.n_vars = n_vars;
  cfg.n_cons = n_rows;
  cfg.density = 0.4;
  cfg.seed = seed;
  cfg.count = 1;
  return lnsforge::generate(cfg)[0];
}

}  // namespace testutil
