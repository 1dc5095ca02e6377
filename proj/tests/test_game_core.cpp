#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "mpg/counterexample.hpp"
#include "mpg/evaluation.hpp"
#include "mpg/game.hpp"
#include "mpg/rng.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace mpg;
namespace gen = mpg::testsupport;
namespace oracle = mpg::testoracles;

namespace {

double max_abs_payoff(const TabularStochasticGame& game) {
  double m = 0.0;
  for (double r : game.payoffs) m = std::max(m, std::abs(r));
  return m;
}

int state_with_label(const TabularStochasticGame& game, double label) {
  for (int s = 0; s < game.state_count; ++s)
    if (game.state_label(s) == label) return s;
  return -1;
}

}  // namespace

TEST_CASE("validate_game: well-formed games pass, defects are located") {
  Rng rng(11);
  TabularStochasticGame game =
      gen::random_game(rng, 2, 2, {2, 2}, 0.9);
  CHECK(validate_game(game).ok());

  SUBCASE("transition row summing to 0.9 is named") {
    TabularStochasticGame broken = game;
    broken.transitions = TransitionKernel{};
    const int ja = game.joint_action_count();
    for (int row = 0; row < game.state_count * ja; ++row) {
      std::vector<TransitionEntry> entries(game.transitions.row(row).begin(),
                                           game.transitions.row(row).end());
      if (row == 0)
        for (TransitionEntry& e : entries) e.probability *= 0.9;
      broken.transitions.push_row(
          std::span<const TransitionEntry>(entries));
    }
    const ValidationReport report = validate_game(broken);
    REQUIRE(report.issues.size() == 1);
    CHECK(report.issues[0].location == "transitions[0][0]");
  }

  SUBCASE("discount of exactly 1 violates the open range") {
    TabularStochasticGame broken = game;
    broken.discount = 1.0;
    const ValidationReport report = validate_game(broken);
    REQUIRE(report.issues.size() == 1);
    CHECK(report.issues[0].location == "discount");
  }
}

TEST_CASE("joint-action flattening: agent 0 varies fastest") {
  TabularStochasticGame game;
  game.agent_count = 3;
  game.state_count = 1;
  game.action_counts = {2, 3, 2};
  game.discount = 0.5;

  const std::vector<int> profile{1, 0, 1};
  CHECK(game.flatten_action(profile) == 1 + 0 * 2 + 1 * 6);

  for (int flat = 0; flat < game.joint_action_count(); ++flat) {
    const std::vector<int> digits = game.unflatten_action(flat);
    CHECK(game.flatten_action(digits) == flat);
    for (int i = 0; i < game.agent_count; ++i)
      CHECK(digits[i] == oracle::digit_of(flat, i, game.action_counts));
  }
}

TEST_CASE("evaluate_policy: geometric series and Bellman fixed point") {
  const TabularStochasticGame unit = gen::bandit_game({1.0}, 0.5);
  const ValueFunction v = evaluate_policy(unit, uniform_policy(unit), 0);
  CHECK(v.values[0] == doctest::Approx(2.0).epsilon(1e-12));

  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const int agents = 1 + static_cast<int>(rng.uniform01() * 2);
    const int states = 2 + static_cast<int>(rng.uniform01() * 3);
    std::vector<int> actions;
    for (int i = 0; i < agents; ++i)
      actions.push_back(2 + static_cast<int>(rng.uniform01() * 2));
    const double gamma = rng.uniform(0.2, 0.95);
    const TabularStochasticGame game =
        gen::random_game(rng, agents, states, actions, gamma);
    const JointPolicy policy = gen::random_policy(rng, game);
    for (int agent = 0; agent < agents; ++agent) {
      const ValueFunction value =
          evaluate_policy(game, policy, agent, 1e-10);
      // Bellman residual measured with independently marginalized r and P.
      const std::vector<double> rbar =
          oracle::expected_reward(game, policy, game.payoff_table(agent));
      const std::vector<double> mat = oracle::marginal_matrix(game, policy);
      for (int s = 0; s < states; ++s) {
        double rhs = rbar[s];
        for (int s2 = 0; s2 < states; ++s2)
          rhs += gamma * mat[static_cast<std::size_t>(s) * states + s2] *
                 value.values[s2];
        CHECK(std::abs(value.values[s] - rhs) <= 1e-9);
      }
    }
  }
}

TEST_CASE("evaluate_policy: bundled game values match the truncated oracle") {
  DiscretizationConfig config;
  config.grid_size = 11;
  config.discount = 0.9;
  const TabularStochasticGame game = discretize(config);
  const KnownPolicies known = known_policies(config);

  const JointPolicy nash = known.nash.to_policy(game);
  const ValueFunction nash0 = evaluate_policy(game, nash, 0);
  const ValueFunction nash1 = evaluate_policy(game, nash, 1);
  CHECK(nash0.values[0] == doctest::Approx(-20.0).epsilon(1e-9));
  CHECK(std::abs(nash1.values[0]) <= 1e-8);

  const JointPolicy dual = known.dual_optimal.to_policy(game);
  const ValueFunction dual0 = evaluate_policy(game, dual, 0);
  CHECK(dual0.values[0] == doctest::Approx(-29.0).epsilon(1e-9));

  // 10^4 forward steps leave a tail under gamma^1e4 * max|r|/(1-gamma).
  const std::vector<double> oracle_nash =
      oracle::truncated_value(game, nash, game.payoff_table(0), 10000);
  CHECK(oracle_nash[0] == doctest::Approx(nash0.values[0]).epsilon(1e-9));
  const std::vector<double> oracle_dual =
      oracle::truncated_value(game, dual, game.payoff_table(0), 10000);
  CHECK(oracle_dual[0] == doctest::Approx(dual0.values[0]).epsilon(1e-9));
}

TEST_CASE("potential_value: reward-source swap and bundled chains") {
  Rng rng(33);
  const TabularStochasticGame game =
      gen::random_game(rng, 2, 3, {2, 2}, 0.8);
  const JointPolicy policy = gen::random_policy(rng, game);
  const ValueFunction via_agent = evaluate_policy(game, policy, 0, 1e-10);
  const ValueFunction via_potential =
      potential_value(game, game.payoff_table(0), policy, 1e-10);
  CHECK(via_potential.source_tag == "potential");
  for (int s = 0; s < game.state_count; ++s)
    CHECK(std::abs(via_agent.values[s] - via_potential.values[s]) <= 2e-10);

  DiscretizationConfig config;
  config.grid_size = 11;
  config.discount = 0.9;
  const DiscretizedCounterexample bundle = discretize_with_potential(config);
  const KnownPolicies known = known_policies(config);
  const ValueFunction b_dual = potential_value(
      bundle.game, bundle.potential, known.dual_optimal.to_policy(bundle.game));
  CHECK(b_dual.values[0] == doctest::Approx(9.0).epsilon(1e-9));
  const ValueFunction b_nash = potential_value(
      bundle.game, bundle.potential, known.nash.to_policy(bundle.game));
  CHECK(std::abs(b_nash.values[0]) <= 1e-8);
}

TEST_CASE("finite_horizon_value: base cases, two-step chain, tail bound") {
  Rng rng(44);
  const TabularStochasticGame game =
      gen::random_game(rng, 2, 3, {2, 3}, 0.7);
  const JointPolicy policy = gen::random_policy(rng, game);

  const ValueFunction zero = finite_horizon_value(game, policy, 0, 0);
  for (double v : zero.values) CHECK(v == 0.0);

  const ValueFunction one_step = finite_horizon_value(game, policy, 1, 1);
  const std::vector<double> rbar =
      oracle::expected_reward(game, policy, game.payoff_table(1));
  for (int s = 0; s < game.state_count; ++s)
    CHECK(one_step.values[s] == doctest::Approx(rbar[s]).epsilon(1e-13));

  DiscretizationConfig config;
  config.grid_size = 11;
  config.discount = 0.9;
  const TabularStochasticGame grid_game = discretize(config);
  const KnownPolicies known = known_policies(config);
  const ValueFunction two = finite_horizon_value(
      grid_game, known.dual_optimal.to_policy(grid_game), 0, 2);
  CHECK(two.values[0] == doctest::Approx(-4.7).epsilon(1e-12));

  for (int trial = 0; trial < 5; ++trial) {
    const TabularStochasticGame g =
        gen::random_game(rng, 2, 4, {2, 2}, rng.uniform(0.3, 0.95));
    const JointPolicy pi = gen::random_policy(rng, g);
    const ValueFunction full = evaluate_policy(g, pi, 0, 1e-12);
    const double h_max = max_abs_payoff(g);
    for (int horizon : {1, 3, 8}) {
      const ValueFunction partial = finite_horizon_value(g, pi, 0, horizon);
      const double bound =
          std::pow(g.discount, horizon) * h_max / (1.0 - g.discount);
      for (int s = 0; s < g.state_count; ++s)
        CHECK(std::abs(partial.values[s] - full.values[s]) <= bound + 1e-9);
    }
  }
}

TEST_CASE("k_step_transition: identity, bundled chain, kernel laws") {
  Rng rng(55);
  DiscretizationConfig config;
  config.grid_size = 11;
  config.discount = 0.9;
  const TabularStochasticGame grid_game = discretize(config);
  const KnownPolicies known = known_policies(config);
  const JointPolicy dual = known.dual_optimal.to_policy(grid_game);

  const int S = grid_game.state_count;
  const std::vector<double> identity = k_step_transition(grid_game, dual, 0);
  for (int s = 0; s < S; ++s)
    for (int s2 = 0; s2 < S; ++s2)
      CHECK(identity[static_cast<std::size_t>(s) * S + s2] ==
            (s == s2 ? 1.0 : 0.0));

  const std::vector<double> one = k_step_transition(grid_game, dual, 1);
  const int target = state_with_label(grid_game, 1.0);
  REQUIRE(target >= 0);
  for (int s2 = 0; s2 < S; ++s2)
    CHECK(one[s2] == (s2 == target ? 1.0 : 0.0));

  for (int trial = 0; trial < 20; ++trial) {
    const TabularStochasticGame g =
        gen::random_game(rng, 2, 4, {2, 2}, 0.9);
    const JointPolicy pi = gen::random_policy(rng, g);
    const int n = g.state_count;
    for (int k = 0; k <= 5; ++k) {
      const std::vector<double> pk = k_step_transition(g, pi, k);
      for (int s = 0; s < n; ++s) {
        double sum = 0.0;
        for (int s2 = 0; s2 < n; ++s2)
          sum += pk[static_cast<std::size_t>(s) * n + s2];
        CHECK(std::abs(sum - 1.0) <= 1e-10);
      }
    }
    // Chapman-Kolmogorov: P^(k1+k2) = P^k1 P^k2.
    const std::vector<double> p2 = k_step_transition(g, pi, 2);
    const std::vector<double> p3 = k_step_transition(g, pi, 3);
    const std::vector<double> p5 = k_step_transition(g, pi, 5);
    for (int s = 0; s < n; ++s)
      for (int s2 = 0; s2 < n; ++s2) {
        double prod = 0.0;
        for (int m = 0; m < n; ++m)
          prod += p2[static_cast<std::size_t>(s) * n + m] *
                  p3[static_cast<std::size_t>(m) * n + s2];
        CHECK(std::abs(prod - p5[static_cast<std::size_t>(s) * n + s2]) <=
              1e-10);
      }
  }
}

TEST_CASE("horizon_for_epsilon: pinned values and rounding rule") {
  CHECK(horizon_for_epsilon(0.5, 0.5, 1.0) == 3);
  CHECK(horizon_for_epsilon(0.01, 0.9, 3.0) == 76);
  CHECK(horizon_for_epsilon(0.5, 0.5, 0.0) == 0);
  CHECK(horizon_for_epsilon(10.0, 0.5, 1.0) == 1);
}

TEST_CASE("horizon_for_epsilon: truncations past the horizon are Cauchy") {
  Rng rng(66);
  for (int trial = 0; trial < 10; ++trial) {
    const TabularStochasticGame g =
        gen::random_game(rng, 2, 3, {2, 2}, rng.uniform(0.4, 0.95));
    const JointPolicy pi = gen::random_policy(rng, g);
    const double h_max = max_abs_payoff(g);
    for (double eps : {1e-2, 1e-4}) {
      const int horizon = horizon_for_epsilon(eps, g.discount, h_max);
      const ValueFunction at = finite_horizon_value(g, pi, 0, horizon);
      const ValueFunction later =
          finite_horizon_value(g, pi, 0, horizon + 25);
      const ValueFunction limit = evaluate_policy(g, pi, 0, 1e-12);
      for (int s = 0; s < g.state_count; ++s) {
        CHECK(std::abs(at.values[s] - later.values[s]) < eps);
        CHECK(std::abs(at.values[s] - limit.values[s]) < eps);
      }
    }
  }
}

TEST_CASE("sample_trajectory: deterministic chain, seeding, base cases") {
  DiscretizationConfig config;
  config.grid_size = 2;
  config.discount = 0.9;
  const TabularStochasticGame game = discretize(config);
  const KnownPolicies known = known_policies(config);
  const JointPolicy dual = known.dual_optimal.to_policy(game);

  // Deterministic policy on a deterministic kernel: the path is unique and
  // seed-independent.
  const Trajectory a = sample_trajectory(game, dual, 0, 3, 5);
  const Trajectory b = sample_trajectory(game, dual, 0, 3, 99);
  CHECK(a.states == std::vector<int>{0, 1, 1, 1});
  CHECK(a.states == b.states);
  CHECK(a.joint_actions == b.joint_actions);
  REQUIRE(a.payoffs.size() == 3);
  CHECK(a.payoffs[0][0] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(a.payoffs[1][0] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(a.payoffs[2][0] == doctest::Approx(-3.0).epsilon(1e-12));

  const Trajectory empty = sample_trajectory(game, dual, 1, 0, 7);
  CHECK(empty.states == std::vector<int>{1});
  CHECK(empty.joint_actions.empty());
  CHECK(empty.payoffs.empty());

  Rng rng(77);
  const TabularStochasticGame mixed_game =
      gen::random_game(rng, 2, 3, {2, 2}, 0.9);
  const JointPolicy policy = gen::random_policy(rng, mixed_game);
  const Trajectory t1 = sample_trajectory(mixed_game, policy, 0, 40, 123);
  const Trajectory t2 = sample_trajectory(mixed_game, policy, 0, 40, 123);
  const Trajectory t3 = sample_trajectory(mixed_game, policy, 0, 40, 124);
  CHECK(t1.states == t2.states);
  CHECK(t1.joint_actions == t2.joint_actions);
  CHECK(t1.payoffs == t2.payoffs);
  CHECK(t1.seed == 123);
  CHECK(t1.states.size() == 41);
  CHECK(t3.states != t1.states);  // 40 steps make a collision implausible
}

TEST_CASE("deterministic_cycle_average: absorbing chains of the bundled game") {
  DiscretizationConfig config;
  config.grid_size = 11;
  config.discount = 0.9;
  const TabularStochasticGame game = discretize(config);
  const KnownPolicies known = known_policies(config);

  const CycleAverage nash0 = deterministic_cycle_average(
      game, known.nash, game.payoff_table(0), 0);
  CHECK(nash0.average == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(nash0.cycle_states == std::vector<int>{0});

  const CycleAverage nash1 = deterministic_cycle_average(
      game, known.nash, game.payoff_table(1), 0);
  CHECK(nash1.average == doctest::Approx(0.0).epsilon(1e-12));

  const CycleAverage dual0 = deterministic_cycle_average(
      game, known.dual_optimal, game.payoff_table(0), 0);
  CHECK(dual0.average == doctest::Approx(-3.0).epsilon(1e-12));
}
