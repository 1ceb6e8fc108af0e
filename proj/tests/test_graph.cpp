#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "lnsforge/graph.hpp"
#include "lnsforge/lp.hpp"
#include "lnsforge/rng.hpp"
#include "test_helpers.hpp"

using namespace lnsforge;
using testutil::binary;
using testutil::continuous;
using testutil::make_instance;
using testutil::row;

namespace {

// Relabels variables by perm (new index = position in perm) and keeps
// constraint order; used for the equivariance checks.
MipInstance permute_variables(const MipInstance& inst,
                              const std::vector<int>& perm) {
  std::vector<int> inverse(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inverse[perm[k]] = k;
  MipInstance out;
  out.name = inst.name + "#perm";
  for (std::size_t k = 0; k < perm.size(); ++k)
    out.variables.push_back(inst.variables[perm[k]]);
  for (const Constraint& c : inst.constraints) {
    Constraint pc;
    pc.name = c.name;
    pc.rhs = c.rhs;
    for (const auto& [j, coef] : c.terms)
      pc.terms.emplace_back(inverse[j], coef);
    std::sort(pc.terms.begin(), pc.terms.end());
    out.constraints.push_back(std::move(pc));
  }
  out.finalize();
  return out;
}

Assignment permute_assignment(const Assignment& x,
                              const std::vector<int>& perm) {
  Assignment out(x.size());
  for (std::size_t k = 0; k < perm.size(); ++k) out[k] = x[perm[k]];
  return out;
}

}  // namespace

TEST_CASE("graph structure mirrors the sparsity pattern", "[graph]") {
  auto inst = make_instance(
      "structure",
      {binary("x1", 1.0), binary("x2", 2.0)},
      {row("c1", {{0, 1.0}, {1, 1.0}}, 1.0),
       row("c2", {{1, 2.0}}, 2.0),
       row("c3", {{0, -1.0}}, 0.0)});
  const BipartiteGraph g = encode(inst, std::nullopt, nullptr);

  CHECK(g.n_var_nodes == 2);
  CHECK(g.n_con_nodes == 3);
  // x1 appears in constraints 1 and 3 plus its self-loop
  CHECK(g.neighbors[0].size() == 3);
  CHECK(g.adjacency(0, 0) == 1.0);
  CHECK(g.adjacency(0, 2) == 1.0);
  CHECK(g.adjacency(0, 4) == 1.0);
  CHECK(g.adjacency(0, 3) == 0.0);
  for (int i = 0; i < g.num_nodes(); ++i) {
    CHECK(g.adjacency(i, i) == 1.0);
    for (int j = 0; j < g.num_nodes(); ++j)
      CHECK(g.adjacency(i, j) == g.adjacency(j, i));
  }
  CHECK(g.edges.size() == 4);
}

TEST_CASE("round trip reconstructs A, b, c exactly", "[graph][oracle]") {
  const MipInstance inst = testutil::small_binary_instance(14, 9, 5);
  const BipartiteGraph g = encode(inst, std::nullopt, nullptr);

  // c from the first variable feature and the recorded scale
  for (int j = 0; j < inst.num_vars(); ++j)
    CHECK(g.var_features(j, 0) * g.obj_scale == inst.variables[j].obj_coef);

  // b from constraint features and the recorded row norms
  for (int i = 0; i < inst.num_constraints(); ++i) {
    const double norm = g.row_scale[i];
    CHECK(g.con_features(i, 0) * std::max(1.0, norm) ==
          inst.constraints[i].rhs);
    CHECK_THAT(std::expm1(g.con_features(i, 1)),
               Catch::Matchers::WithinRel(norm, 1e-12));
  }

  // A from edges
  std::map<std::pair<int, int>, double> reconstructed;
  for (const auto& e : g.edges)
    reconstructed[{e.con, e.var}] =
        e.feature * (g.row_scale[e.con] > 0 ? g.row_scale[e.con] : 1.0);
  std::size_t nnz = 0;
  for (int i = 0; i < inst.num_constraints(); ++i)
    for (const auto& [j, coef] : inst.constraints[i].terms) {
      if (coef == 0.0) continue;
      ++nnz;
      REQUIRE(reconstructed.count({i, j}) == 1);
      const double rebuilt = reconstructed[{i, j}];
      CHECK_THAT(rebuilt, Catch::Matchers::WithinRel(coef, 1e-12));
    }
  CHECK(reconstructed.size() == nnz);
}

TEST_CASE("LP and history features land in their slots", "[graph]") {
  auto inst = make_instance(
      "feat", {binary("x1", 3.0), continuous("y", 0.0, 2.0, -1.0)},
      {row("c", {{0, 1.0}, {1, 1.0}}, 2.0)});

  Assignment lp({0.25, 1.75});
  HistoryWindow hist;
  hist.push(Assignment({1.0, 0.5}));
  hist.push(Assignment({0.0, 1.5}));  // newest

  const BipartiteGraph g = encode(inst, lp, &hist);
  CHECK(g.var_features(0, 0) == 1.0);  // 3.0 / max|c|
  CHECK(g.var_features(0, 3) == 1.0);
  CHECK(g.var_features(0, 4) == 0.25);
  CHECK(g.var_features(0, 5) == 1.0);
  CHECK(g.var_features(0, 6) == 0.25);
  // newest assignment in slot 0, previous in slot 1, slot 2 masked out
  CHECK(g.var_features(0, 7) == 0.0);
  CHECK(g.var_features(0, 8) == 1.0);
  CHECK(g.var_features(0, 9) == 1.0);
  CHECK(g.var_features(0, 10) == 1.0);
  CHECK(g.var_features(0, 11) == 0.0);
  CHECK(g.var_features(0, 12) == 0.0);
  // continuous variables never carry history
  CHECK(g.var_features(1, 8) == 0.0);

  SECTION("empty history leaves masks at zero") {
    const BipartiteGraph g0 = encode(inst, lp, nullptr);
    for (int k = 7; k < g0.var_features.cols; ++k)
      CHECK(g0.var_features(0, k) == 0.0);
  }

  SECTION("wrong-dimension history is rejected") {
    HistoryWindow bad;
    bad.push(Assignment({1.0}));
    CHECK_THROWS_AS(encode(inst, lp, &bad), DimensionError);
  }
}

TEST_CASE("feature matrices stay finite on generated instances", "[graph]") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const MipInstance inst = testutil::small_binary_instance(20, 12, seed);
    const LpResult lp = solve_lp(inst);
    REQUIRE(lp.status == LpStatus::Optimal);
    HistoryWindow hist;
    hist.push(Assignment(static_cast<std::size_t>(inst.num_vars()), 1.0));
    const BipartiteGraph g = encode(inst, lp.x, &hist);
    for (double v : g.var_features.data) CHECK(std::isfinite(v));
    for (double v : g.con_features.data) CHECK(std::isfinite(v));
  }
}

TEST_CASE("encoding commutes with variable permutation", "[graph]") {
  Rng rng(99);
  const MipInstance inst = testutil::small_binary_instance(12, 8, 17);
  std::vector<int> perm(inst.num_vars());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  rng.shuffle(perm);

  const LpResult lp = solve_lp(inst);
  REQUIRE(lp.status == LpStatus::Optimal);
  HistoryWindow hist;
  hist.push(Assignment(static_cast<std::size_t>(inst.num_vars()), 1.0));

  const MipInstance pinst = permute_variables(inst, perm);
  const Assignment plp = permute_assignment(lp.x, perm);
  HistoryWindow phist;
  phist.push(permute_assignment(hist.past[0], perm));

  const BipartiteGraph g = encode(inst, lp.x, &hist);
  const BipartiteGraph pg = encode(pinst, plp, &phist);

  for (std::size_t k = 0; k < perm.size(); ++k)
    for (int f = 0; f < g.var_features.cols; ++f)
      CHECK(pg.var_features(static_cast<int>(k), f) ==
            g.var_features(perm[k], f));
  for (int i = 0; i < inst.num_constraints(); ++i)
    for (int f = 0; f < g.con_features.cols; ++f)
      CHECK(pg.con_features(i, f) == g.con_features(i, f));
}
