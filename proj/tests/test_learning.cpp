#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpg/counterexample.hpp"
#include "mpg/evaluation.hpp"
#include "mpg/game.hpp"
#include "mpg/learning.hpp"
#include "mpg/rng.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace mpg;
namespace gen = mpg::testsupport;
namespace oracle = mpg::testoracles;

namespace {

int count_lines_containing(const std::string& text, const std::string& what) {
  int count = 0;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line))
    if (line.find(what) != std::string::npos) ++count;
  return count;
}

}  // namespace

TEST_CASE("psga_gradient_estimate: hand-computed entries") {
  const TabularStochasticGame game = gen::bandit_game({2.0, 0.0}, 0.9);
  JointPolicy policy = uniform_policy(game);

  SUBCASE("one step, probability one half, payoff two") {
    Trajectory t;
    t.states = {0, 0};
    t.joint_actions = {{0}};
    t.payoffs = {{2.0}};
    const std::vector<double> grad =
        psga_gradient_estimate(game, t, policy, 0);
    REQUIRE(grad.size() == 2);
    CHECK(grad[0] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(grad[1] == 0.0);
  }

  SUBCASE("two steps on the same cell accumulate linearly") {
    Trajectory t;
    t.states = {0, 0, 0};
    t.joint_actions = {{0}, {0}};
    t.payoffs = {{1.0}, {1.0}};
    const std::vector<double> grad =
        psga_gradient_estimate(game, t, policy, 0);
    CHECK(grad[0] == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(grad[1] == 0.0);
  }

  SUBCASE("zero return wipes the table") {
    Trajectory t;
    t.states = {0, 0, 0};
    t.joint_actions = {{0}, {1}};
    t.payoffs = {{0.0}, {0.0}};
    for (double g : psga_gradient_estimate(game, t, policy, 0))
      CHECK(g == 0.0);
  }

  SUBCASE("visiting a zero-probability action is rejected") {
    policy.tables[0] = {1.0, 0.0};
    Trajectory t;
    t.states = {0, 0};
    t.joint_actions = {{1}};
    t.payoffs = {{0.0}};
    CHECK_THROWS_AS(psga_gradient_estimate(game, t, policy, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("project_to_simplex: fixed points, shifts, and the exact oracle") {
  const std::vector<double> on_simplex{0.25, 0.5, 0.25};
  CHECK(project_to_simplex(on_simplex) == on_simplex);

  const std::vector<double> shifted = project_to_simplex(
      std::vector<double>{0.2, 0.2});
  CHECK(shifted[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(shifted[1] == doctest::Approx(0.5).epsilon(1e-15));

  const std::vector<double> corner = project_to_simplex(
      std::vector<double>{0.5, 0.5, 1.5});
  CHECK(corner[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(corner[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(corner[2] == doctest::Approx(1.0).epsilon(1e-15));

  Rng rng(1601);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(3);
    for (double& x : v) x = rng.uniform(-2.0, 2.0);
    const std::vector<double> fast = project_to_simplex(v);
    const std::vector<double> exact = oracle::project_simplex_exact(v);
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(fast[k] - exact[k]) < 1e-6);
      CHECK(fast[k] >= 0.0);
      sum += fast[k];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    // Idempotence and permutation equivariance.
    const std::vector<double> again = project_to_simplex(fast);
    for (int k = 0; k < 3; ++k)
      CHECK(std::abs(again[k] - fast[k]) <= 1e-12);
    const std::vector<double> swapped{v[2], v[0], v[1]};
    const std::vector<double> projected_swapped =
        project_to_simplex(swapped);
    CHECK(std::abs(projected_swapped[0] - fast[2]) <= 1e-12);
    CHECK(std::abs(projected_swapped[1] - fast[0]) <= 1e-12);
    CHECK(std::abs(projected_swapped[2] - fast[1]) <= 1e-12);
  }
}

TEST_CASE("run_psga: null step size freezes the uniform initialization") {
  Rng rng(1701);
  const TabularStochasticGame game =
      gen::random_game(rng, 2, 3, {2, 3}, 0.9);
  LearnerConfig config;
  config.eta = 0.0;
  config.iterations = 25;
  config.seed = 3;
  config.gap_check_every = 10;
  const LearningTrace trace = run_psga(game, config);
  const JointPolicy uniform = uniform_policy(game);
  for (const LearningTrace::Snapshot& snap : trace.snapshots)
    CHECK(snap.policy.tables == uniform.tables);
  CHECK(trace.final_policy.tables == uniform.tables);
}

TEST_CASE("run_psga: identical seeds give bit-identical traces") {
  Rng rng(1801);
  const TabularStochasticGame game =
      gen::random_game(rng, 2, 2, {2, 2}, 0.8);
  LearnerConfig config;
  config.eta = 0.05;
  config.batch_horizon = 4;
  config.iterations = 60;
  config.seed = 42;
  config.gap_check_every = 20;
  const LearningTrace a = run_psga(game, config);
  const LearningTrace b = run_psga(game, config);

  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    CHECK(a.rows[k].batch_return == b.rows[k].batch_return);
    CHECK(a.rows[k].mean_action == b.rows[k].mean_action);
  }
  REQUIRE(a.gaps.size() == b.gaps.size());
  for (std::size_t k = 0; k < a.gaps.size(); ++k)
    CHECK(a.gaps[k].gap == b.gaps[k].gap);
  CHECK(a.final_policy.tables == b.final_policy.tables);

  std::ostringstream csv_a, csv_b;
  write_trace_csv(a, csv_a);
  write_trace_csv(b, csv_b);
  CHECK(csv_a.str() == csv_b.str());

  LearnerConfig other = config;
  other.seed = 43;
  const LearningTrace c = run_psga(game, other);
  CHECK(c.final_policy.tables != a.final_policy.tables);
}

TEST_CASE("run_psga: every snapshot stays on the simplex") {
  Rng rng(1901);
  const TabularStochasticGame game =
      gen::random_game(rng, 2, 3, {3, 2}, 0.85);
  LearnerConfig config;
  config.eta = 0.2;  // aggressive steps stress the projection
  config.batch_horizon = 5;
  config.iterations = 200;
  config.seed = 11;
  config.gap_check_every = 50;
  const LearningTrace trace = run_psga(game, config);
  REQUIRE(!trace.snapshots.empty());
  CHECK(trace.snapshots.front().iteration == 0);
  CHECK(trace.snapshots.back().iteration == config.iterations);
  for (const LearningTrace::Snapshot& snap : trace.snapshots) {
    const ValidationReport report = validate_policy(game, snap.policy);
    CHECK(report.ok());
  }
}

TEST_CASE("run_psga: trace CSV shape and gap stride") {
  Rng rng(2001);
  const TabularStochasticGame game =
      gen::random_game(rng, 2, 2, {2, 2}, 0.8);
  LearnerConfig config;
  config.iterations = 40;
  config.gap_check_every = 10;
  config.seed = 9;
  const LearningTrace trace = run_psga(game, config);
  CHECK(trace.gaps.size() == 4);
  for (std::size_t k = 0; k < trace.gaps.size(); ++k)
    CHECK(trace.gaps[k].iteration == static_cast<long>((k + 1) * 10));

  std::ostringstream csv;
  write_trace_csv(trace, csv);
  const std::string text = csv.str();
  std::istringstream stream(text);
  std::string header;
  std::getline(stream, header);
  CHECK(header == "iteration,agent,batch_return,mean_action,nash_gap");
  int data_lines = 0;
  std::string line;
  while (std::getline(stream, line)) {
    if (!line.empty()) ++data_lines;
  }
  CHECK(data_lines == 40 * game.agent_count);
  // Exactly iterations/stride rows carry a gap value: the gap cell is the
  // fifth column, non-empty only on logged iterations (agent 0's row).
  int gap_cells = 0;
  std::istringstream again(text);
  std::getline(again, line);  // header
  while (std::getline(again, line)) {
    const std::size_t last_comma = line.find_last_of(',');
    if (last_comma != std::string::npos && last_comma + 1 < line.size())
      ++gap_cells;
  }
  CHECK(gap_cells == 4);
}

TEST_CASE("bandit learning: mean-field oracle first, then the seeded run") {
  // Exact expected-update recursion for the two-action bandit with payoffs
  // (1, 0): if the mean field fails to drift to the better arm, the
  // stochastic assertion below would be meaningless.
  const int steps = 9;  // batch_horizon 8 -> 9 action draws
  double p = 0.5;
  const double eta = 0.05;
  int reached_at = -1;
  for (int t = 0; t < 2000; ++t) {
    const oracle::BanditGradient g = oracle::bandit_expected_gradient(
        p, steps);
    const std::vector<double> updated = oracle::project_simplex_exact(
        std::vector<double>{p + eta * g.g0, (1.0 - p) + eta * g.g1});
    p = updated[0];
    if (p > 0.99) {
      reached_at = t;
      break;
    }
  }
  REQUIRE(reached_at >= 0);

  const TabularStochasticGame game = gen::bandit_game({1.0, 0.0}, 0.9);
  LearnerConfig config;
  config.eta = 0.05;
  config.batch_horizon = 8;
  config.iterations = 2000;
  config.seed = 7;
  const LearningTrace trace = run_psga(game, config);
  CHECK(trace.final_policy.tables[0][0] > 0.99);
}

TEST_CASE("gradient estimator is unbiased against exhaustive enumeration") {
  // Two-state, two-action, single-agent game; T = 3 (four action steps).
  Rng rng(2101);
  const TabularStochasticGame game =
      gen::random_game(rng, 1, 2, {2}, 0.9);
  JointPolicy policy = uniform_policy(game);
  policy.tables[0] = {0.65, 0.35, 0.4, 0.6};

  const int steps = 4;
  const std::vector<double> exact =
      oracle::enumerated_psga_gradient(game, policy, 0, steps, 0);

  const int batches = 100000;
  std::vector<double> mean(exact.size(), 0.0);
  std::vector<double> second_moment(exact.size(), 0.0);
  for (int b = 0; b < batches; ++b) {
    const Trajectory t =
        sample_trajectory(game, policy, 0, steps, 50000 + b);
    const std::vector<double> grad =
        psga_gradient_estimate(game, t, policy, 0);
    for (std::size_t k = 0; k < grad.size(); ++k) {
      mean[k] += grad[k];
      second_moment[k] += grad[k] * grad[k];
    }
  }
  for (std::size_t k = 0; k < mean.size(); ++k) {
    mean[k] /= batches;
    const double variance =
        std::max(0.0, second_moment[k] / batches - mean[k] * mean[k]);
    const double standard_error = std::sqrt(variance / batches);
    CHECK(std::abs(mean[k] - exact[k]) <= 3.0 * standard_error + 1e-12);
  }
}

TEST_CASE("counterexample learners stay away from equilibrium") {
  // Short-horizon version of the non-convergence diagnostic (the acceptance
  // gate runs the full 20000x3); gaps logged every 500 iterations never
  // approach zero.
  DiscretizationConfig config;
  config.grid_size = 11;
  config.discount = 0.9;
  const TabularStochasticGame game = discretize(config);
  LearnerConfig learn;
  learn.eta = 0.05;
  learn.batch_horizon = 8;
  learn.iterations = 2000;
  learn.seed = 1;
  learn.gap_check_every = 500;
  learn.gap_solver_tolerance = 1e-6;
  const LearningTrace trace = run_psga(game, learn);
  REQUIRE(trace.gaps.size() == 4);
  for (const LearningTrace::GapRow& row : trace.gaps)
    CHECK(row.gap >= 0.1);
}
