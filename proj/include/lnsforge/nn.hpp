#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lnsforge/dense.hpp"
#include "lnsforge/errors.hpp"
#include "lnsforge/graph.hpp"
#include "lnsforge/rng.hpp"
#include "lnsforge/version.hpp"

namespace lnsforge {

// Fully connected network: ReLU on hidden layers, identity on the output.
struct MlpParams {
  std::vector<Matrix> weights;              // layer l: in_l x out_l
  std::vector<std::vector<double>> biases;  // layer l: out_l

  int input_dim() const { return weights.empty() ? 0 : weights.front().rows; }
  int output_dim() const { return weights.empty() ? 0 : weights.back().cols; }
  int num_layers() const { return static_cast<int>(weights.size()); }
};

inline MlpParams make_mlp(const std::vector<int>& sizes, Rng& rng,
                          double init_scale = 1.0) {
  if (sizes.size() < 2)
    throw InvalidParameterError("make_mlp: need at least input and output");
  MlpParams p;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l], out = sizes[l + 1];
    const double s = init_scale * std::sqrt(6.0 / (in + out));
    Matrix w(in, out);
    for (double& x : w.data) x = rng.uniform_real(-s, s);
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(static_cast<std::size_t>(out), 0.0);
  }
  return p;
}

inline MlpParams zero_like(const MlpParams& p) {
  MlpParams g;
  for (const Matrix& w : p.weights) g.weights.emplace_back(w.rows, w.cols);
  for (const auto& b : p.biases) g.biases.emplace_back(b.size(), 0.0);
  return g;
}

struct MlpCache {
  std::vector<Matrix> inputs;   // activation entering each layer
  std::vector<Matrix> preacts;  // X W + b per layer
};

inline Matrix mlp_forward(const MlpParams& p, const Matrix& x,
                          MlpCache* cache = nullptr) {
  if (x.cols != p.input_dim())
    throw DimensionError("mlp_forward: input width " + std::to_string(x.cols) +
                         " != expected " + std::to_string(p.input_dim()));
  Matrix a = x;
  for (int l = 0; l < p.num_layers(); ++l) {
    if (cache) cache->inputs.push_back(a);
    Matrix z = matmul(a, p.weights[l]);
    for (int i = 0; i < z.rows; ++i)
      for (int j = 0; j < z.cols; ++j) z(i, j) += p.biases[l][j];
    if (cache) cache->preacts.push_back(z);
    if (l + 1 < p.num_layers()) {
      for (double& v : z.data) v = v > 0.0 ? v : 0.0;
    }
    a = std::move(z);
  }
  return a;
}

// d_out -> d_in; accumulates parameter gradients into grad.
inline Matrix mlp_backward(const MlpParams& p, const MlpCache& cache,
                           const Matrix& d_out, MlpParams& grad) {
  Matrix d = d_out;
  for (int l = p.num_layers() - 1; l >= 0; --l) {
    if (l + 1 < p.num_layers()) {  // undo the hidden ReLU
      const Matrix& z = cache.preacts[l];
      for (std::size_t i = 0; i < d.data.size(); ++i)
        if (z.data[i] <= 0.0) d.data[i] = 0.0;
    }
    add_inplace(grad.weights[l], matmul_at_b(cache.inputs[l], d));
    for (int i = 0; i < d.rows; ++i)
      for (int j = 0; j < d.cols; ++j) grad.biases[l][j] += d(i, j);
    d = matmul_a_bt(d, p.weights[l]);
  }
  return d;
}

// GCN policy parameters: L message-passing MLPs plus the scalar output head
// applied to variable-node embeddings.
struct PolicyParams {
  std::vector<MlpParams> gcn_layers;
  MlpParams var_head;
  int embedding_width = 64;
  int history_window = kDefaultHistoryWindow;
  int feature_version = kFeatureVersion;
  std::string kind = "nns";  // "nns" or "diving"
};

struct PolicyArch {
  int gcn_layers = 2;
  int hidden = 64;
  int embedding = 64;
};

inline PolicyParams make_policy(const PolicyArch& arch, int history_window,
                                const std::string& kind, Rng& rng,
                                double init_scale = 1.0) {
  PolicyParams p;
  p.embedding_width = arch.embedding;
  p.history_window = history_window;
  p.kind = kind;
  int in = padded_feature_width(history_window);
  for (int l = 0; l < arch.gcn_layers; ++l) {
    p.gcn_layers.push_back(
        make_mlp({in, arch.hidden, arch.embedding}, rng, init_scale));
    in = arch.embedding;
  }
  p.var_head = make_mlp({in, arch.hidden, 1}, rng, init_scale);
  return p;
}

inline PolicyParams zero_like(const PolicyParams& p) {
  PolicyParams g;
  for (const MlpParams& m : p.gcn_layers) g.gcn_layers.push_back(zero_like(m));
  g.var_head = zero_like(p.var_head);
  g.embedding_width = p.embedding_width;
  g.history_window = p.history_window;
  g.kind = p.kind;
  return g;
}

// Flat view over every parameter, in a fixed order shared between params
// and gradients (used by the optimizer and by finite-difference checks).
inline std::vector<double*> param_pointers(PolicyParams& p) {
  std::vector<double*> out;
  const auto add_mlp = [&out](MlpParams& m) {
    for (Matrix& w : m.weights)
      for (double& v : w.data) out.push_back(&v);
    for (auto& b : m.biases)
      for (double& v : b) out.push_back(&v);
  };
  for (MlpParams& m : p.gcn_layers) add_mlp(m);
  add_mlp(p.var_head);
  return out;
}

namespace detail {

// Sum of neighbor rows per the binary adjacency, accumulated in ascending
// value order so the result is invariant to node relabeling bit for bit.
inline Matrix aggregate_neighbors(const BipartiteGraph& g, const Matrix& x) {
  const int K = g.num_nodes();
  if (x.rows != K) throw DimensionError("aggregate_neighbors: row mismatch");
  Matrix out(K, x.cols);
  std::vector<double> buf;
  for (int i = 0; i < K; ++i) {
    const auto& nbrs = g.neighbors[i];
    for (int h = 0; h < x.cols; ++h) {
      buf.clear();
      for (int j : nbrs) buf.push_back(x(j, h));
      std::sort(buf.begin(), buf.end());
      double s = 0.0;
      for (double v : buf) s += v;
      out(i, h) = s;
    }
  }
  return out;
}

// Adjoint of aggregate_neighbors (the adjacency is symmetric).
inline Matrix aggregate_backward(const BipartiteGraph& g, const Matrix& d) {
  const int K = g.num_nodes();
  Matrix out(K, d.cols);
  for (int i = 0; i < K; ++i)
    for (int j : g.neighbors[i])
      for (int h = 0; h < d.cols; ++h) out(j, h) += d(i, h);
  return out;
}

}  // namespace detail

struct PolicyCache {
  Matrix input;                      // padded node features
  std::vector<MlpCache> gcn_caches;  // per layer
  std::vector<Matrix> gcn_outputs;   // aggregated Z per layer
  MlpCache head_cache;
  std::vector<int> head_rows;        // node index per head input row
};

// Layered recurrence Z^{(l+1)} = A g_l(Z^{(l)}) with Z^{(0)} = U.
inline Matrix gcn_forward(const PolicyParams& params, const BipartiteGraph& g,
                          PolicyCache* cache = nullptr) {
  Matrix z = build_node_features(g);
  if (!params.gcn_layers.empty() &&
      z.cols != params.gcn_layers.front().input_dim())
    throw DimensionError(
        "gcn_forward: node feature width " + std::to_string(z.cols) +
        " != layer-0 input " +
        std::to_string(params.gcn_layers.front().input_dim()) +
        " (history window or feature version mismatch)");
  if (cache) cache->input = z;
  for (const MlpParams& layer : params.gcn_layers) {
    MlpCache* mc = nullptr;
    if (cache) {
      cache->gcn_caches.emplace_back();
      mc = &cache->gcn_caches.back();
    }
    Matrix msg = mlp_forward(layer, z, mc);
    z = detail::aggregate_neighbors(g, msg);
    if (cache) cache->gcn_outputs.push_back(z);
  }
  return z;
}

struct PolicyOutput {
  std::vector<double> logits;  // gamma_i per requested variable
  std::vector<double> mu;      // sigmoid(gamma_i)
};

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Per-variable Bernoulli success probabilities from the var-node embeddings.
inline PolicyOutput policy_forward(const PolicyParams& params,
                                   const BipartiteGraph& g,
                                   const std::vector<int>& integer_indices,
                                   PolicyCache* cache = nullptr) {
  const Matrix z = gcn_forward(params, g, cache);
  Matrix rows(static_cast<int>(integer_indices.size()), z.cols);
  for (std::size_t r = 0; r < integer_indices.size(); ++r) {
    const int node = integer_indices[r];
    if (node < 0 || node >= g.n_var_nodes)
      throw DimensionError("policy_forward: index " + std::to_string(node) +
                           " is not a variable node");
    for (int h = 0; h < z.cols; ++h)
      rows(static_cast<int>(r), h) = z(node, h);
  }
  MlpCache* hc = nullptr;
  if (cache) {
    cache->head_rows = integer_indices;
    hc = &cache->head_cache;
  }
  const Matrix logits = mlp_forward(params.var_head, rows, hc);

  PolicyOutput out;
  out.logits.resize(integer_indices.size());
  out.mu.resize(integer_indices.size());
  for (std::size_t r = 0; r < integer_indices.size(); ++r) {
    out.logits[r] = logits(static_cast<int>(r), 0);
    out.mu[r] = sigmoid(out.logits[r]);
  }
  return out;
}

inline constexpr double kLogClamp = 1e-12;

// Bernoulli negative log likelihood, summed over variables.
inline double nll_terms(const std::vector<double>& mu,
                        const std::vector<double>& labels) {
  if (mu.size() != labels.size())
    throw DimensionError("nll: mu/label length mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    loss -= labels[i] * std::log(std::max(mu[i], kLogClamp)) +
            (1.0 - labels[i]) * std::log(std::max(1.0 - mu[i], kLogClamp));
  }
  return loss;
}

inline double nll_loss(const std::vector<PolicyOutput>& outputs,
                       const std::vector<std::vector<double>>& actions) {
  if (outputs.size() != actions.size())
    throw DimensionError("nll_loss: output/action count mismatch");
  double loss = 0.0;
  for (std::size_t s = 0; s < outputs.size(); ++s)
    loss += nll_terms(outputs[s].mu, actions[s]);
  return loss;
}

inline double action_log_prob(const PolicyOutput& out,
                              const std::vector<double>& action) {
  return -nll_terms(out.mu, action);
}

// One forward/backward pass; returns the sample loss and accumulates
// parameter gradients of the summed NLL into grad.
inline double policy_backward(const PolicyParams& params,
                              const BipartiteGraph& g,
                              const std::vector<int>& integer_indices,
                              const std::vector<double>& labels,
                              PolicyParams& grad) {
  PolicyCache cache;
  const PolicyOutput out = policy_forward(params, g, integer_indices, &cache);
  const double loss = nll_terms(out.mu, labels);

  // d loss / d logit = mu - label for the Bernoulli NLL.
  Matrix d_logits(static_cast<int>(out.mu.size()), 1);
  for (std::size_t i = 0; i < out.mu.size(); ++i)
    d_logits(static_cast<int>(i), 0) = out.mu[i] - labels[i];

  const Matrix d_rows =
      mlp_backward(params.var_head, cache.head_cache, d_logits, grad.var_head);

  const int K = g.num_nodes();
  Matrix d_z(K, d_rows.cols);
  for (std::size_t r = 0; r < cache.head_rows.size(); ++r)
    for (int h = 0; h < d_rows.cols; ++h)
      d_z(cache.head_rows[r], h) += d_rows(static_cast<int>(r), h);

  for (int l = static_cast<int>(params.gcn_layers.size()) - 1; l >= 0; --l) {
    const Matrix d_msg = detail::aggregate_backward(g, d_z);
    d_z = mlp_backward(params.gcn_layers[l], cache.gcn_caches[l], d_msg,
                       grad.gcn_layers[l]);
  }
  return loss;
}

struct TrainConfig {
  int epochs = 60;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 1;
  double init_scale = 1.0;
  PolicyArch arch;
};

struct TrainSample {
  BipartiteGraph graph;
  std::vector<int> integer_nodes;
  std::vector<double> labels;  // one 0/1 label per integer node
  std::string tag;             // instance/step id for diagnostics
};

struct TrainLogEntry {
  int epoch;
  std::string split;
  double loss;  // mean per-sample NLL
};

struct TrainResult {
  PolicyParams params;
  std::vector<TrainLogEntry> log;
};

namespace detail {

class Adam {
 public:
  Adam(std::size_t n, const TrainConfig& cfg)
      : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

  void step(const std::vector<double*>& params,
            const std::vector<double*>& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double gr = *grads[i];
      m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * gr;
      v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * gr * gr;
      const double mhat = m_[i] / bc1;
      const double vhat = v_[i] / bc2;
      *params[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.adam_eps);
    }
  }

 private:
  TrainConfig cfg_;
  int t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace detail

inline double evaluate_mean_nll(const PolicyParams& params,
                                const std::vector<TrainSample>& samples) {
  if (samples.empty()) return 0.0;
  double total = 0.0;
  for (const TrainSample& s : samples) {
    const PolicyOutput out = policy_forward(params, s.graph, s.integer_nodes);
    total += nll_terms(out.mu, s.labels);
  }
  return total / static_cast<double>(samples.size());
}

// Imitation training by NLL minimization. Full-batch mode always visits
// samples in dataset order, so the result is independent of any shuffling;
// minibatch mode shuffles per epoch with the seeded RNG.
inline TrainResult train_policy(const std::vector<TrainSample>& train,
                                const std::vector<TrainSample>& valid,
                                const TrainConfig& cfg,
                                int history_window,
                                const std::string& kind) {
  if (train.empty()) throw TrainingError("train_policy: empty dataset");

  Rng rng(cfg.seed);
  TrainResult result;
  result.params = make_policy(cfg.arch, history_window, kind, rng,
                              cfg.init_scale);
  PolicyParams grad = zero_like(result.params);
  const std::vector<double*> pptr = param_pointers(result.params);
  const std::vector<double*> gptr = param_pointers(grad);
  detail::Adam adam(pptr.size(), cfg);

  std::vector<int> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  const int batch = cfg.batch_size > 0
                        ? std::min<int>(cfg.batch_size,
                                        static_cast<int>(train.size()))
                        : static_cast<int>(train.size());
  const bool full_batch = batch == static_cast<int>(train.size());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (!full_batch) rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(batch)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(batch));
      for (double* g : gptr) *g = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        const TrainSample& s = train[full_batch ? static_cast<int>(k)
                                                : order[k]];
        const double loss = policy_backward(result.params, s.graph,
                                            s.integer_nodes, s.labels, grad);
        if (!std::isfinite(loss))
          throw TrainingError("train_policy: non-finite loss at epoch " +
                              std::to_string(epoch) + ", sample " + s.tag);
        epoch_loss += loss;
      }
      const double inv = 1.0 / static_cast<double>(end - begin);
      for (double* g : gptr) *g *= inv;
      if (cfg.lr != 0.0) adam.step(pptr, gptr);
    }
    result.log.push_back(
        {epoch, "train", epoch_loss / static_cast<double>(train.size())});
    if (!valid.empty())
      result.log.push_back(
          {epoch, "valid", evaluate_mean_nll(result.params, valid)});
  }
  return result;
}

}  // namespace lnsforge
