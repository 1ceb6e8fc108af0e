#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lnsforge/bnb.hpp"
#include "lnsforge/mip.hpp"
#include "lnsforge/rng.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace lnsforge;
using testutil::binary;
using testutil::continuous;
using testutil::make_instance;
using testutil::row;

TEST_CASE("objective evaluation", "[mip]") {
  auto inst = make_instance(
      "dot", {binary("a", 1.0), binary("b", 2.0)}, {});
  CHECK(evaluate_objective(inst, Assignment({3.0, 4.0})) == 11.0);

  auto zeros = make_instance(
      "zero", {binary("a", 0.0), binary("b", 0.0)}, {});
  CHECK(evaluate_objective(zeros, Assignment({1.0, 1.0})) == 0.0);

  CHECK_THROWS_AS(evaluate_objective(inst, Assignment({1.0})),
                  DimensionError);

  // random instance vs term-by-term summation
  Rng rng(7);
  std::vector<Variable> vars;
  Assignment x(10);
  double expected = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double c = rng.uniform_real(-5.0, 5.0);
    const double v = rng.uniform_real(-2.0, 2.0);
    vars.push_back(continuous("v" + std::to_string(j), -10, 10, c));
    x[j] = v;
    expected += c * v;
  }
  auto rnd = make_instance("rand", std::move(vars), {});
  CHECK_THAT(evaluate_objective(rnd, x),
             Catch::Matchers::WithinAbs(expected, 1e-12));
}

TEST_CASE("feasibility report", "[mip]") {
  auto inst = make_instance(
      "feas", {binary("x1", 1.0), binary("x2", 1.0)},
      {row("r", {{0, 1.0}, {1, 1.0}}, 1.0)});

  CHECK(check_feasibility(inst, Assignment({1.0, 0.0})).feasible());

  const auto bad = check_feasibility(inst, Assignment({1.0, 1.0}));
  REQUIRE(bad.constraint_violations.size() == 1);
  CHECK_THAT(bad.constraint_violations[0].amount,
             Catch::Matchers::WithinAbs(1.0, 1e-12));

  const auto frac = check_feasibility(inst, Assignment({0.5, 0.0}));
  REQUIRE(frac.integrality_violations.size() == 1);
  CHECK(frac.integrality_violations[0].var == 0);

  const auto oob = check_feasibility(inst, Assignment({-0.5, 0.0}));
  CHECK(oob.bound_violations.size() == 1);
}

TEST_CASE("sub-MIP substitution", "[mip]") {
  auto inst = make_instance(
      "sub",
      {binary("x1", 1.0), binary("x2", 2.0), binary("x3", 3.0)},
      {row("r", {{0, 1.0}, {1, 1.0}, {2, 1.0}}, 2.0)});
  const Assignment x({1.0, 0.0, 1.0});

  const SubMip sub = derive_submip(inst, x, {1, 2});
  REQUIRE(sub.instance.num_vars() == 2);
  REQUIRE(sub.instance.num_constraints() == 1);
  CHECK(sub.instance.constraints[0].rhs == 1.0);  // x2 + x3 <= 1
  CHECK(sub.fixed_offset == 1.0);
  CHECK(sub.free_to_parent == std::vector<int>({1, 2}));

  SECTION("identity when everything is unassigned") {
    const SubMip all = derive_submip(inst, x, inst.integer_indices);
    CHECK(all.instance.num_vars() == inst.num_vars());
    CHECK(all.fixed_offset == 0.0);
    CHECK(all.instance.constraints.size() == inst.constraints.size());
  }

  SECTION("restriction of the incumbent lifts back to the incumbent") {
    const Assignment y = restrict_assignment(sub, x);
    CHECK(lift_assignment(sub, y, x) == x);
  }

  SECTION("invalid unassign sets are rejected") {
    CHECK_THROWS_AS(derive_submip(inst, x, {5}), InvalidActionError);
    auto mixed = make_instance(
        "mixed", {binary("b", 1.0), continuous("c", 0, 1, 1.0)}, {});
    CHECK_THROWS_AS(derive_submip(mixed, Assignment({0.0, 0.0}), {1}),
                    InvalidActionError);
    CHECK_THROWS_AS(derive_submip(inst, Assignment({1.0, 1.0, 1.0}), {1}),
                    PreconditionError);
  }

  SECTION("infeasible sub assignments cannot lift") {
    CHECK_THROWS_AS(lift_assignment(sub, Assignment({1.0, 1.0}), x),
                    PreconditionError);
  }
}

TEST_CASE("sub-MIP optimum matches neighborhood brute force", "[mip]") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    auto inst = testutil::small_binary_instance(12, 8, 100 + trial);
    Assignment ones(static_cast<std::size_t>(inst.num_vars()), 1.0);
    REQUIRE(check_feasibility(inst, ones).feasible());

    std::vector<int> unassign =
        rng.sample_without_replacement(inst.integer_indices, 5);
    const SubMip sub = derive_submip(inst, ones, unassign);

    // oracle: try all settings of the unassigned variables on the parent
    double best = oracle::kInf;
    Assignment x = ones;
    for (int mask = 0; mask < (1 << 5); ++mask) {
      for (int k = 0; k < 5; ++k) x[unassign[k]] = (mask >> k) & 1 ? 1.0 : 0.0;
      if (check_feasibility(inst, x).feasible())
        best = std::min(best, evaluate_objective(inst, x));
    }

    const auto solved = solve_mip(sub.instance, SolveBudget{});
    REQUIRE(solved.status == MipStatus::Optimal);
    CHECK_THAT(*solved.objective + sub.fixed_offset,
               Catch::Matchers::WithinAbs(best, 1e-9));
  }
}

TEST_CASE("lifted assignments stay feasible", "[mip]") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = testutil::small_binary_instance(
        10 + rng.uniform_int(0, 10), 6 + rng.uniform_int(0, 6),
        500 + trial);
    Assignment ones(static_cast<std::size_t>(inst.num_vars()), 1.0);
    const int eta = rng.uniform_int(1, inst.num_integer_vars());
    const auto unassign = rng.sample_without_replacement(
        inst.integer_indices, static_cast<std::size_t>(eta));
    const SubMip sub = derive_submip(inst, ones, unassign);
    const auto solved = solve_mip(sub.instance, SolveBudget{},
                                  restrict_assignment(sub, ones));
    REQUIRE(solved.incumbent.has_value());
    const Assignment lifted = lift_assignment(sub, *solved.incumbent, ones);
    CHECK(check_feasibility(inst, lifted).feasible());
    CHECK(evaluate_objective(inst, lifted) <=
          evaluate_objective(inst, ones) + 1e-9);
    CHECK_THAT(evaluate_objective(inst, lifted),
               Catch::Matchers::WithinAbs(
                   *solved.objective + sub.fixed_offset, 1e-9));
  }
}

TEST_CASE("local branching constraint", "[mip]") {
  auto inst = make_instance(
      "lb", {binary("x1", 1.0), binary("x2", 1.0), binary("x3", 1.0)}, {});
  const Assignment x({0.0, 1.0, 1.0});

  const MipInstance aug = add_local_branching_constraint(inst, x, 1);
  REQUIRE(aug.num_constraints() == 1);
  const Constraint& c = aug.constraints.back();
  // x1 - x2 - x3 <= 1 - 2 = -1
  REQUIRE(c.terms.size() == 3);
  CHECK(c.terms[0] == std::make_pair(0, 1.0));
  CHECK(c.terms[1] == std::make_pair(1, -1.0));
  CHECK(c.terms[2] == std::make_pair(2, -1.0));
  CHECK(c.rhs == -1.0);

  SECTION("radius |I| admits every binary point") {
    const MipInstance full = add_local_branching_constraint(inst, x, 3);
    Assignment y(3);
    for (int mask = 0; mask < 8; ++mask) {
      for (int k = 0; k < 3; ++k) y[k] = (mask >> k) & 1 ? 1.0 : 0.0;
      CHECK(check_feasibility(full, y).feasible());
    }
  }

  SECTION("feasible set equals Hamming ball intersect original") {
    auto cover = testutil::small_binary_instance(10, 6, 77);
    Assignment ones(static_cast<std::size_t>(cover.num_vars()), 1.0);
    const int eta = 3;
    const MipInstance ball = add_local_branching_constraint(cover, ones, eta);
    Assignment y(static_cast<std::size_t>(cover.num_vars()));
    for (int mask = 0; mask < (1 << 10); ++mask) {
      int dist = 0;
      for (int k = 0; k < 10; ++k) {
        y[k] = (mask >> k) & 1 ? 1.0 : 0.0;
        if (y[k] < 0.5) ++dist;  // center is all-ones
      }
      const bool in_ball = dist <= eta;
      const bool orig_ok = check_feasibility(cover, y).feasible();
      CHECK(check_feasibility(ball, y).feasible() == (in_ball && orig_ok));
    }
  }

  SECTION("error paths") {
    CHECK_THROWS_AS(add_local_branching_constraint(inst, x, 0),
                    InvalidParameterError);
    auto general = make_instance("gen", {binary("x", 1.0)}, {});
    general.variables[0].ub = 2.0;
    general.finalize();
    CHECK_THROWS_AS(
        add_local_branching_constraint(general, Assignment({1.0}), 1),
        UnsupportedError);
    CHECK_THROWS_AS(add_local_branching_constraint(inst,
                                                   Assignment({0.5, 0, 0}), 1),
                    PreconditionError);
  }
}

TEST_CASE("local branching solve equals Hamming-ball minimum", "[mip]") {
  for (std::uint64_t seed : {301, 302, 303}) {
    auto inst = testutil::small_binary_instance(12, 7, seed);
    Assignment ones(static_cast<std::size_t>(inst.num_vars()), 1.0);
    const int eta = 3;
    const auto expected = oracle::brute_force_hamming_ball(inst, ones, eta);
    REQUIRE(expected.best.has_value());

    const MipInstance aug = add_local_branching_constraint(inst, ones, eta);
    const auto solved = solve_mip(aug, SolveBudget{}, ones);
    REQUIRE(solved.status == MipStatus::Optimal);
    CHECK_THAT(*solved.objective,
               Catch::Matchers::WithinAbs(expected.objective, 1e-9));
  }
}
