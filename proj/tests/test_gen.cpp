#include <catch2/catch_amalgamated.hpp>

#include "lnsforge/generators.hpp"
#include "lnsforge/io.hpp"

using namespace lnsforge;

namespace {

GeneratorConfig base_config(InstanceFamily family, int count = 6) {
  GeneratorConfig cfg;
  cfg.family = family;
  cfg.n_vars = 24;
  cfg.n_cons = 12;
  cfg.density = 0.25;
  cfg.seed = 7;
  cfg.count = count;
  return cfg;
}

}  // namespace

TEST_CASE("generation is deterministic down to the serialized bytes",
          "[gen]") {
  for (const auto family :
       {InstanceFamily::SetCover, InstanceFamily::CombinatorialAuction,
        InstanceFamily::GeneralizedAssignment}) {
    const auto cfg = base_config(family, 3);
    const auto a = generate(cfg);
    const auto b = generate(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(instance_to_json(a[i]).dump() == instance_to_json(b[i]).dump());
  }
}

TEST_CASE("set cover witness is the all-ones point", "[gen]") {
  const auto instances = generate(base_config(InstanceFamily::SetCover));
  for (const MipInstance& inst : instances) {
    Assignment ones(static_cast<std::size_t>(inst.num_vars()), 1.0);
    CHECK(check_feasibility(inst, ones).feasible());
    CHECK(inst.all_integers_binary());
  }
}

TEST_CASE("every emitted instance has a feasible point", "[gen]") {
  for (const auto family :
       {InstanceFamily::SetCover, InstanceFamily::CombinatorialAuction,
        InstanceFamily::GeneralizedAssignment}) {
    for (const MipInstance& inst : generate(base_config(family))) {
      const LpResult lp = solve_lp(inst);
      CHECK(lp.status == LpStatus::Optimal);  // relaxation nonempty
      CHECK(inst.all_integers_binary());
    }
  }
}

TEST_CASE("generalized assignment witnesses verified on samples", "[gen]") {
  GeneratorConfig cfg = base_config(InstanceFamily::GeneralizedAssignment, 50);
  cfg.n_vars = 30;
  const auto instances = generate(cfg);
  REQUIRE(instances.size() == 50);
  int checked = 0;
  for (std::size_t i = 0; i < instances.size(); i += 5) {
    const MipInstance& inst = instances[i];
    CHECK(inst.num_integer_vars() == 30);
    const auto solved = solve_mip(inst, SolveBudget{});
    CHECK(solved.status == MipStatus::Optimal);
    ++checked;
  }
  CHECK(checked == 10);
}

TEST_CASE("seed changes coefficients but not dimensions", "[gen]") {
  auto cfg = base_config(InstanceFamily::SetCover, 1);
  const auto a = generate(cfg)[0];
  cfg.seed = 8;
  const auto b = generate(cfg)[0];
  CHECK(a.num_vars() == b.num_vars());
  CHECK(a.num_constraints() == b.num_constraints());
  bool differs = false;
  for (int j = 0; j < a.num_vars(); ++j)
    if (a.variables[j].obj_coef != b.variables[j].obj_coef) differs = true;
  CHECK(differs);
}

TEST_CASE("split sizes partition the dataset", "[gen]") {
  const SplitFractions f;
  for (int count : {1, 7, 10, 33, 100}) {
    const SplitSizes s = split_sizes(count, f);
    CHECK(s.train + s.valid + s.test == count);
    CHECK(s.train >= 0);
    CHECK(s.valid >= 0);
    CHECK(s.test >= 0);
    if (count >= 10) {
      CHECK(std::abs(s.train - 0.7 * count) <= 1.0);
      CHECK(std::abs(s.valid - 0.15 * count) <= 1.0);
    }
  }
}

TEST_CASE("config validation", "[gen]") {
  GeneratorConfig bad = base_config(InstanceFamily::SetCover);
  bad.n_vars = 2;
  CHECK_THROWS_AS(generate(bad), InvalidParameterError);

  GeneratorConfig bad_split = base_config(InstanceFamily::SetCover);
  bad_split.split.train = 0.9;
  CHECK_THROWS_AS(generate(bad_split), InvalidParameterError);

  GeneratorConfig bad_density = base_config(InstanceFamily::SetCover);
  bad_density.density = 0.0;
  CHECK_THROWS_AS(generate(bad_density), InvalidParameterError);
}

TEST_CASE("instance names encode family, seed and index", "[gen]") {
  const auto instances = generate(base_config(InstanceFamily::SetCover, 2));
  CHECK(instances[0].name == "setcover_s7_0000");
  CHECK(instances[1].name == "setcover_s7_0001");
}
