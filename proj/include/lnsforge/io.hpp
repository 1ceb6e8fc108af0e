#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lnsforge/errors.hpp"
#include "lnsforge/expert.hpp"
#include "lnsforge/lns.hpp"
#include "lnsforge/metrics.hpp"
#include "lnsforge/mip.hpp"
#include "lnsforge/nn.hpp"
#include "lnsforge/version.hpp"

namespace lnsforge {

using nlohmann::json;

namespace detail {

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw LoadError(path + ": " + e.what());
  }
  return j;
}

// Write-then-rename so concurrent producers never leave partial files.
inline void write_text_atomic(const std::string& path,
                              const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw LoadError("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, target);
}

inline void write_json_file(const std::string& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Instance files. Senses "ge" and "eq" are normalized at load: a >= row is
// negated, an = row becomes a <=/>= pair. The writer only ever emits "le".

inline json instance_to_json(const MipInstance& inst) {
  json vars = json::array();
  for (const Variable& v : inst.variables)
    vars.push_back({{"name", v.name},
                    {"lb", v.lb},
                    {"ub", v.ub},
                    {"is_integer", v.is_integer},
                    {"obj_coef", v.obj_coef}});
  json cons = json::array();
  for (const Constraint& c : inst.constraints) {
    json terms = json::array();
    for (const auto& [j, coef] : c.terms) terms.push_back({j, coef});
    cons.push_back({{"name", c.name},
                    {"terms", terms},
                    {"sense", "le"},
                    {"rhs", c.rhs}});
  }
  return json{{"name", inst.name},
              {"objective_sense", "min"},
              {"variables", vars},
              {"constraints", cons}};
}

inline MipInstance instance_from_json(const json& j, const std::string& ctx) {
  try {
    MipInstance inst;
    inst.name = j.at("name").get<std::string>();
    if (j.at("objective_sense").get<std::string>() != "min")
      throw LoadError(ctx + ": objective_sense must be \"min\"");
    for (const json& v : j.at("variables")) {
      Variable var;
      var.name = v.at("name").get<std::string>();
      var.lb = v.at("lb").get<double>();
      var.ub = v.at("ub").get<double>();
      var.is_integer = v.at("is_integer").get<bool>();
      var.obj_coef = v.at("obj_coef").get<double>();
      inst.variables.push_back(std::move(var));
    }
    for (const json& c : j.at("constraints")) {
      Constraint row;
      row.name = c.at("name").get<std::string>();
      for (const json& t : c.at("terms"))
        row.terms.emplace_back(t.at(0).get<int>(), t.at(1).get<double>());
      row.rhs = c.at("rhs").get<double>();
      const std::string sense = c.at("sense").get<std::string>();
      if (sense == "le") {
        inst.constraints.push_back(std::move(row));
      } else if (sense == "ge") {
        for (auto& [idx, coef] : row.terms) coef = -coef;
        row.rhs = -row.rhs;
        inst.constraints.push_back(std::move(row));
      } else if (sense == "eq") {
        Constraint ge;
        ge.name = row.name + "#ge";
        ge.rhs = -row.rhs;
        for (const auto& [idx, coef] : row.terms)
          ge.terms.emplace_back(idx, -coef);
        row.name += "#le";
        inst.constraints.push_back(std::move(row));
        inst.constraints.push_back(std::move(ge));
      } else {
        throw LoadError(ctx + ": unknown constraint sense \"" + sense + "\"");
      }
    }
    inst.finalize();
    return inst;
  } catch (const json::exception& e) {
    throw LoadError(ctx + ": " + e.what());
  }
}

inline void save_instance(const std::string& path, const MipInstance& inst) {
  detail::write_json_file(path, instance_to_json(inst));
}

inline MipInstance load_instance(const std::string& path) {
  return instance_from_json(detail::load_json_file(path), path);
}

// ---------------------------------------------------------------------------
// Dataset manifest written by `gen`.

struct DatasetManifest {
  std::string family;
  std::uint64_t seed = 0;
  json config;  // resolved generator config
  std::map<std::string, std::vector<std::string>> splits;  // split -> files
};

inline void save_manifest(const std::string& path, const DatasetManifest& m) {
  json splits;
  for (const auto& [k, v] : m.splits) splits[k] = v;
  detail::write_json_file(path, json{{"schema_version", kSchemaVersion},
                                     {"family", m.family},
                                     {"seed", m.seed},
                                     {"config", m.config},
                                     {"splits", splits}});
}

inline DatasetManifest load_manifest(const std::string& path) {
  const json j = detail::load_json_file(path);
  try {
    DatasetManifest m;
    m.family = j.at("family").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config = j.value("config", json::object());
    for (const auto& [k, v] : j.at("splits").items())
      m.splits[k] = v.get<std::vector<std::string>>();
    return m;
  } catch (const json::exception& e) {
    throw LoadError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Best-known table and solution files.

inline void save_best_known(const std::string& path,
                            const BestKnownTable& table) {
  json entries;
  for (const auto& [id, e] : table.entries)
    entries[id] = {{"objective", e.objective}, {"provenance", e.provenance}};
  detail::write_json_file(
      path, json{{"schema_version", kSchemaVersion}, {"entries", entries}});
}

inline BestKnownTable load_best_known(const std::string& path) {
  const json j = detail::load_json_file(path);
  try {
    BestKnownTable t;
    for (const auto& [id, e] : j.at("entries").items())
      t.entries[id] = {e.at("objective").get<double>(),
                       e.at("provenance").get<std::string>()};
    return t;
  } catch (const json::exception& e) {
    throw LoadError(path + ": " + e.what());
  }
}

inline void save_solution(const std::string& path, const Assignment& x) {
  detail::write_json_file(path, json{{"values", x.values}});
}

inline Assignment load_solution(const std::string& path) {
  const json j = detail::load_json_file(path);
  try {
    return Assignment(j.at("values").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw LoadError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Trajectories: JSON lines, one step per line, values over the integer
// variables only.

inline void save_trajectory(const std::string& path, const MipInstance& inst,
                            const Trajectory& traj) {
  std::ostringstream out;
  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    const ExpertStep& s = traj.steps[t];
    json x_t = json::array();
    for (int j : inst.integer_indices)
      x_t.push_back(static_cast<int>(std::llround(s.x_t[j])));
    json a_t = json::array();
    for (int j : s.action) a_t.push_back(j);
    out << json{{"step", t},
                {"x_t", x_t},
                {"a_t", a_t},
                {"objective", evaluate_objective(inst, s.x_t)},
                {"objective_next", s.objective_next},
                {"eta", s.eta},
                {"status", to_string(s.solver_status)}}
               .dump()
        << "\n";
  }
  detail::write_text_atomic(path, out.str());
}

// The file stores x_t over the integer variables only; the loader leaves
// continuous slots at zero. Training consumes integer values and actions,
// so nothing downstream depends on the continuous part.
inline Trajectory load_trajectory(const std::string& path,
                                  const MipInstance& inst,
                                  const std::string& instance_id) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path);
  Trajectory traj;
  traj.instance_id = instance_id;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw LoadError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    ExpertStep s;
    const auto x_vals = j.at("x_t").get<std::vector<int>>();
    if (x_vals.size() != static_cast<std::size_t>(inst.num_integer_vars()))
      throw LoadError(path + ":" + std::to_string(lineno) +
                      ": x_t length mismatch");
    s.x_t = Assignment(static_cast<std::size_t>(inst.num_vars()), 0.0);
    for (std::size_t k = 0; k < x_vals.size(); ++k)
      s.x_t[inst.integer_indices[k]] = x_vals[k];
    s.action = j.at("a_t").get<std::vector<int>>();
    s.eta = j.at("eta").get<int>();
    s.objective_next = j.at("objective_next").get<double>();
    traj.steps.push_back(std::move(s));
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Episode records: JSON lines with a metadata header line.

inline void save_episode(const std::string& path, const EpisodeRecord& r) {
  std::ostringstream out;
  out << json{{"schema_version", kSchemaVersion},
              {"instance_id", r.instance_id},
              {"run_seed", r.run_seed}}
             .dump()
      << "\n";
  for (const EpisodeStep& s : r.steps) {
    out << json{{"t", s.t},
                {"eta", s.eta},
                {"action", s.action},
                {"status", s.status},
                {"objective", s.objective},
                {"gap", s.gap},
                {"reward", s.reward},
                {"elapsed_ms", s.elapsed_ms}}
               .dump()
        << "\n";
  }
  detail::write_text_atomic(path, out.str());
}

inline EpisodeRecord load_episode(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw LoadError(path + ": missing header line");
  EpisodeRecord r;
  try {
    const json header = json::parse(line);
    if (header.at("schema_version").get<int>() != kSchemaVersion)
      throw LoadError(path + ": unsupported schema version");
    r.instance_id = header.at("instance_id").get<std::string>();
    r.run_seed = header.at("run_seed").get<std::uint64_t>();
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      EpisodeStep s;
      s.t = j.at("t").get<int>();
      s.eta = j.at("eta").get<int>();
      s.action = j.at("action").get<std::vector<int>>();
      s.status = j.at("status").get<std::string>();
      s.objective = j.at("objective").get<double>();
      s.gap = j.at("gap").get<double>();
      s.reward = j.at("reward").get<double>();
      s.elapsed_ms = j.at("elapsed_ms").get<long>();
      r.steps.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw LoadError(path + ": " + e.what());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Model checkpoints: layer sizes plus flat row-major weight arrays.

namespace detail {

inline json mlp_to_json(const MlpParams& m) {
  json layers = json::array();
  for (int l = 0; l < m.num_layers(); ++l) {
    layers.push_back({{"rows", m.weights[l].rows},
                      {"cols", m.weights[l].cols},
                      {"weights", m.weights[l].data},
                      {"bias", m.biases[l]}});
  }
  return layers;
}

inline MlpParams mlp_from_json(const json& j) {
  MlpParams m;
  for (const json& layer : j) {
    Matrix w(layer.at("rows").get<int>(), layer.at("cols").get<int>());
    w.data = layer.at("weights").get<std::vector<double>>();
    if (w.data.size() != static_cast<std::size_t>(w.rows) * w.cols)
      throw LoadError("checkpoint: weight array size mismatch");
    m.weights.push_back(std::move(w));
    m.biases.push_back(layer.at("bias").get<std::vector<double>>());
  }
  return m;
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, const PolicyParams& p) {
  json gcn = json::array();
  for (const MlpParams& layer : p.gcn_layers)
    gcn.push_back(detail::mlp_to_json(layer));
  detail::write_json_file(path,
                          json{{"feature_version", p.feature_version},
                               {"kind", p.kind},
                               {"history_window", p.history_window},
                               {"embedding_width", p.embedding_width},
                               {"gcn_layers", gcn},
                               {"var_head", detail::mlp_to_json(p.var_head)}});
}

inline PolicyParams load_checkpoint(const std::string& path) {
  const json j = detail::load_json_file(path);
  try {
    PolicyParams p;
    p.feature_version = j.at("feature_version").get<int>();
    if (p.feature_version != kFeatureVersion)
      throw LoadError(path + ": feature_version " +
                      std::to_string(p.feature_version) +
                      " does not match this build (" +
                      std::to_string(kFeatureVersion) + ")");
    p.kind = j.at("kind").get<std::string>();
    p.history_window = j.at("history_window").get<int>();
    p.embedding_width = j.at("embedding_width").get<int>();
    for (const json& layer : j.at("gcn_layers"))
      p.gcn_layers.push_back(detail::mlp_from_json(layer));
    p.var_head = detail::mlp_from_json(j.at("var_head"));
    return p;
  } catch (const json::exception& e) {
    throw LoadError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Training log CSV: epoch,split,loss.

inline void save_training_log(const std::string& path,
                              const std::vector<TrainLogEntry>& log) {
  std::ostringstream out;
  out << "epoch,split,loss\n";
  for (const TrainLogEntry& e : log)
    out << e.epoch << ',' << e.split << ',' << e.loss << '\n';
  detail::write_text_atomic(path, out.str());
}

inline void save_versions(const std::string& path) {
  detail::write_json_file(path, json{{"schema_version", kSchemaVersion},
                                     {"feature_version", kFeatureVersion}});
}

}  // namespace lnsforge
