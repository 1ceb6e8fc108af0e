#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "lnsforge/dense.hpp"
#include "lnsforge/errors.hpp"
#include "lnsforge/mip.hpp"
#include "lnsforge/version.hpp"

namespace lnsforge {

inline constexpr int kDefaultHistoryWindow = 3;

// Constraint features and the edge feature (see docs/features.md).
inline constexpr int kConFeatureDim = 2;

inline constexpr int var_feature_dim(int window) { return 7 + 2 * window; }

// Sliding window of recent assignments, newest last.
struct HistoryWindow {
  int window = kDefaultHistoryWindow;
  std::vector<Assignment> past;

  void push(const Assignment& a) {
    past.push_back(a);
    if (static_cast<int>(past.size()) > window) past.erase(past.begin());
  }
};

// Bipartite variable/constraint graph with node and edge features. Node
// indices: variables first (0..n-1), then constraints (n..n+m-1). The
// adjacency matrix carries self-loops. Normalization constants used by the
// feature scaling (obj_scale, row_scale) are recorded so the encoding stays
// lossless.
struct BipartiteGraph {
  int n_var_nodes = 0;
  int n_con_nodes = 0;
  Matrix var_features;  // n x (7 + 2W)
  Matrix con_features;  // m x 2

  struct Edge {
    int var;
    int con;
    double feature;  // coefficient / row inf-norm
  };
  std::vector<Edge> edges;

  Matrix adjacency;                        // (n+m) x (n+m), binary, A_ii = 1
  std::vector<std::vector<int>> neighbors; // nonzeros of each adjacency row

  double obj_scale = 1.0;
  std::vector<double> row_scale;
  int history_window = kDefaultHistoryWindow;

  int num_nodes() const { return n_var_nodes + n_con_nodes; }
};

// Encodes the instance plus optional LP relaxation values and assignment
// history into the graph representation consumed by the GCN.
inline BipartiteGraph encode(const MipInstance& inst,
                             const std::optional<Assignment>& lp_solution,
                             const HistoryWindow* history,
                             int window = kDefaultHistoryWindow) {
  if (window < 0) throw InvalidParameterError("encode: negative window");
  if (lp_solution)
    require_matching_length(inst, *lp_solution, "encode lp_solution");
  if (history) {
    for (const Assignment& a : history->past)
      require_matching_length(inst, a, "encode history entry");
  }

  const int n = inst.num_vars();
  const int m = inst.num_constraints();
  BipartiteGraph g;
  g.n_var_nodes = n;
  g.n_con_nodes = m;
  g.history_window = window;

  double cmax = 0.0;
  for (const Variable& v : inst.variables)
    cmax = std::max(cmax, std::abs(v.obj_coef));
  g.obj_scale = cmax > 0.0 ? cmax : 1.0;

  g.row_scale.resize(m, 0.0);
  for (int i = 0; i < m; ++i)
    for (const auto& [j, coef] : inst.constraints[i].terms)
      g.row_scale[i] = std::max(g.row_scale[i], std::abs(coef));

  const int dv = var_feature_dim(window);
  g.var_features = Matrix(n, dv);
  for (int j = 0; j < n; ++j) {
    const Variable& v = inst.variables[j];
    g.var_features(j, 0) = v.obj_coef / g.obj_scale;
    g.var_features(j, 1) = v.lb;
    g.var_features(j, 2) = v.ub;
    g.var_features(j, 3) = v.is_integer ? 1.0 : 0.0;
    if (lp_solution) {
      const double lv = (*lp_solution)[j];
      g.var_features(j, 4) = lv;
      g.var_features(j, 5) = 1.0;
      g.var_features(j, 6) = std::abs(lv - std::round(lv));
    }
    // History slot k holds x_{t-k}; missing slots keep (0, 0). Only the
    // integer variables carry history (trajectory files record exactly
    // those values), so continuous nodes stay masked out.
    if (history && v.is_integer) {
      const int have = static_cast<int>(history->past.size());
      for (int k = 0; k < window && k < have; ++k) {
        const Assignment& a = history->past[have - 1 - k];
        g.var_features(j, 7 + 2 * k) = a[j];
        g.var_features(j, 7 + 2 * k + 1) = 1.0;
      }
    }
  }

  g.con_features = Matrix(m, kConFeatureDim);
  for (int i = 0; i < m; ++i) {
    const double norm = g.row_scale[i];
    g.con_features(i, 0) = inst.constraints[i].rhs / std::max(1.0, norm);
    g.con_features(i, 1) = std::log1p(norm);
  }

  const int K = n + m;
  g.adjacency = Matrix(K, K);
  g.neighbors.assign(K, {});
  for (int k = 0; k < K; ++k) {
    g.adjacency(k, k) = 1.0;
    g.neighbors[k].push_back(k);
  }
  for (int i = 0; i < m; ++i) {
    const double safe_norm = g.row_scale[i] > 0.0 ? g.row_scale[i] : 1.0;
    for (const auto& [j, coef] : inst.constraints[i].terms) {
      if (coef == 0.0) continue;
      g.edges.push_back({j, i, coef / safe_norm});
      g.adjacency(j, n + i) = 1.0;
      g.adjacency(n + i, j) = 1.0;
      g.neighbors[j].push_back(n + i);
      g.neighbors[n + i].push_back(j);
    }
  }
  return g;
}

// Zero-padded shared-width node feature matrix with a leading node-type
// indicator: [type | var feature block | con feature block]. One MLP per
// GCN layer then serves both node sets.
inline Matrix build_node_features(const BipartiteGraph& g) {
  const int dv = g.var_features.cols;
  const int dc = g.con_features.cols;
  const int width = 1 + dv + dc;
  Matrix u(g.num_nodes(), width);
  for (int v = 0; v < g.n_var_nodes; ++v) {
    u(v, 0) = 1.0;
    for (int k = 0; k < dv; ++k) u(v, 1 + k) = g.var_features(v, k);
  }
  for (int c = 0; c < g.n_con_nodes; ++c) {
    const int row = g.n_var_nodes + c;
    for (int k = 0; k < dc; ++k) u(row, 1 + dv + k) = g.con_features(c, k);
  }
  return u;
}

inline int padded_feature_width(int window) {
  return 1 + var_feature_dim(window) + kConFeatureDim;
}

}  // namespace lnsforge
