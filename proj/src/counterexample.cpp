#include "mpg/counterexample.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mpg/evaluation.hpp"

namespace mpg {

StagePayoffs closed_form(double s, double a1, double a2) {
  for (double v : {s, a1, a2})
    if (!(v >= 0.0 && v <= 1.0))
      throw std::domain_error("closed_form: arguments must lie in [0, 1]");
  StagePayoffs out;
  out.potential = s - (s - a2) * (s - a2);
  out.r2 = out.potential;
  out.r1 = out.potential - 4.0 / (2.0 - a2);
  return out;
}

double DiscretizationConfig::grid_point(int index) const {
  return static_cast<double>(index) / (grid_size - 1);
}

int DiscretizationConfig::snap(double coordinate) const {
  const double scaled = coordinate * (grid_size - 1);
  int index = static_cast<int>(std::ceil(scaled - 0.5));
  if (index < 0) index = 0;
  if (index > grid_size - 1) index = grid_size - 1;
  return index;
}

DiscretizedCounterexample discretize_with_potential(
    const DiscretizationConfig& config) {
  if (config.grid_size < 2)
    throw std::invalid_argument("discretize: grid_size must be >= 2");
  if (!(config.discount > 0.0 && config.discount < 1.0))
    throw std::invalid_argument("discretize: discount outside (0,1)");

  const int n = config.grid_size;
  const int ja = n * n;  // agent 0 holds a1 (fast digit), agent 1 holds a2
  DiscretizedCounterexample out;
  TabularStochasticGame& game = out.game;
  game.agent_count = 2;
  game.state_count = n;
  game.action_counts = {n, n};
  game.discount = config.discount;
  game.state_labels.resize(n);
  for (int s = 0; s < n; ++s) game.state_labels[s] = config.grid_point(s);

  game.payoffs.resize(2 * static_cast<std::size_t>(n) * ja);
  out.potential.state_count = n;
  out.potential.joint_action_count = ja;
  out.potential.table.resize(static_cast<std::size_t>(n) * ja);
  out.potential.anchor_profile = {0, 0};
  game.transitions.reserve(n * ja, static_cast<std::size_t>(n) * ja);
  for (int s = 0; s < n; ++s) {
    const double xs = config.grid_point(s);
    for (int a2 = 0; a2 < n; ++a2)
      for (int a1 = 0; a1 < n; ++a1) {
        const int flat = a1 + a2 * n;
        const StagePayoffs stage =
            closed_form(xs, config.grid_point(a1), config.grid_point(a2));
        game.payoff_at(0, s, flat) = stage.r1;
        game.payoff_at(1, s, flat) = stage.r2;
        out.potential.table[static_cast<std::size_t>(s) * ja + flat] =
            stage.potential;
      }
    // Row order must be flat joint-action order: a1 fast.
    for (int flat = 0; flat < ja; ++flat)
      game.transitions.push_row({{flat % n, 1.0}});
  }
  out.potential.verification_residual =
      potential_verification_residual(game, out.potential.table);
  return out;
}

TabularStochasticGame discretize(const DiscretizationConfig& config) {
  return discretize_with_potential(config).game;
}

KnownPolicies known_policies(const DiscretizationConfig& config) {
  if (config.grid_size < 2)
    throw std::invalid_argument("known_policies: grid_size must be >= 2");
  const int n = config.grid_size;
  KnownPolicies out;
  out.dual_optimal.choice = {std::vector<int>(n, n - 1), std::vector<int>(n)};
  out.nash.choice = {std::vector<int>(n, 0), std::vector<int>(n)};
  for (int s = 0; s < n; ++s) {
    out.dual_optimal.choice[1][s] = s;  // a2 tracks the state
    out.nash.choice[1][s] = s;
  }
  return out;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

CounterexampleReport reproduce_report(const DiscretizationConfig& config,
                                      double checker_tolerance,
                                      double solver_tolerance) {
  const auto t0 = std::chrono::steady_clock::now();
  CounterexampleReport report;
  report.config = config;

  const DiscretizedCounterexample grid = discretize_with_potential(config);
  const TabularStochasticGame& game = grid.game;

  const PotentialSearchResult search =
      find_one_shot_potential(game, checker_tolerance);
  report.potential_found = search.found();
  if (!report.potential_found) {
    report.mismatches.push_back("one-shot potential not found");
    return report;
  }
  report.potential_residual = search.potential->verification_residual;
  const OneShotPotential potential =
      calibrate_state_offsets(game, *search.potential);

  report.c1 = check_agent_independent_transitions(game, checker_tolerance);
  report.c2 = check_dummy_terms(game, potential, 1e-4, checker_tolerance);
  report.c3 = check_state_transitivity(game, potential, checker_tolerance);
  report.cst =
      check_complete_state_transitivity(game, potential, checker_tolerance);

  const Mdp dual = build_dual_mdp(game, potential);
  const MdpSolution dual_solution = value_iteration(dual, solver_tolerance);
  report.dual_values = dual_solution.values;
  report.dual_greedy = dual_solution.greedy;
  report.dual_tie_states = dual_solution.tie_states;

  const KnownPolicies known = known_policies(config);
  report.dual_matches_known = true;
  for (int s = 0; s < game.state_count; ++s)
    if (dual_solution.greedy[s] != known.dual_optimal.joint_action(game, s))
      report.dual_matches_known = false;

  const JointPolicy dual_policy =
      extract_joint_policy(game, dual_solution.greedy).to_policy(game);
  const JointPolicy nash_policy = known.nash.to_policy(game);
  report.dual_nash = verify_nash(game, dual_policy, 0.5, solver_tolerance);
  report.known_nash = verify_nash(game, nash_policy, 1e-6, solver_tolerance);
  report.gap_oracle = game.discount / (1.0 - game.discount);

  // Agent 0 deviates from the dual optimum's a1 = 1 component to the Nash
  // a1 = 0 component.
  JointPolicy deviation = dual_policy;
  deviation.tables[0] = nash_policy.tables[0];
  report.alignment = check_value_potential_alignment(
      game, potential, dual_policy, deviation, 0, 0, solver_tolerance);

  report.nash_values_state0.resize(2);
  report.nash_scaled_values_state0.resize(2);
  report.nash_cycle_averages_state0.resize(2);
  for (int i = 0; i < 2; ++i) {
    const double v = report.known_nash.policy_values[i][0];
    report.nash_values_state0[i] = v;
    report.nash_scaled_values_state0[i] = (1.0 - game.discount) * v;
    report.nash_cycle_averages_state0[i] =
        deterministic_cycle_average(game, known.nash, game.payoff_table(i), 0)
            .average;
  }

  // Expected verdict vector; every miss is named.
  auto expect = [&report](bool ok, const std::string& what) {
    if (!ok) report.mismatches.push_back(what);
  };
  expect(report.potential_residual < 1e-12,
         "potential residual " + fmt(report.potential_residual) +
             " not < 1e-12");
  expect(!report.c1.passed, "condition 1 unexpectedly passed");
  expect(!report.c2.passed, "condition 2 unexpectedly passed");
  expect(report.c3.passed && report.c3.max_residual < 1e-12,
         "condition 3 verdict (residual " + fmt(report.c3.max_residual) +
             ")");
  expect(!report.cst.passed &&
             std::abs(report.cst.max_residual - 2.0) <= 1e-9,
         "complete state transitivity residual " +
             fmt(report.cst.max_residual) + " not 2.0 +- 1e-9");
  expect(report.dual_matches_known,
         "dual greedy policy differs from the known optimum");
  expect(!report.dual_nash.passed,
         "dual optimum unexpectedly passed the Nash check");
  expect(std::abs(report.dual_nash.per_agent_gap[0] - report.gap_oracle) <=
             0.01,
         "agent-0 Nash gap " + fmt(report.dual_nash.per_agent_gap[0]) +
             " not " + fmt(report.gap_oracle) + " +- 0.01");
  expect(report.known_nash.passed, "known Nash policy failed the check");
  expect(std::abs(report.nash_values_state0[0] +
                  2.0 / (1.0 - game.discount)) <= 1e-6,
         "agent-0 Nash value at state 0 is " +
             fmt(report.nash_values_state0[0]));
  expect(std::abs(report.nash_values_state0[1]) <= 1e-6,
         "agent-1 Nash value at state 0 is " +
             fmt(report.nash_values_state0[1]));
  report.matches_expected = report.mismatches.empty();

  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

}  // namespace mpg
