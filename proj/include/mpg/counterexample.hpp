#pragma once

#include <string>
#include <vector>

#include "mpg/equilibrium.hpp"
#include "mpg/game.hpp"
#include "mpg/potential.hpp"

namespace mpg {

/// Stage payoffs of the bundled two-agent game on the unit square:
/// r1 = s - (s - a2)^2 - 4/(2 - a2), r2 = s - (s - a2)^2, and the one-shot
/// potential s - (s - a2)^2. Agent 1 (index 0) steers the state (s' = a1
/// deterministically) but never its own payoff; agent 2 (index 1) tracks the
/// state. Arguments outside [0, 1] throw std::domain_error.
struct StagePayoffs {
  double r1;
  double r2;
  double potential;
};

StagePayoffs closed_form(double s, double a1, double a2);

struct DiscretizationConfig {
  int grid_size = 101;
  double discount = 0.9;

  double grid_point(int index) const;
  /// Nearest grid index for an off-grid coordinate; ties go to the lower
  /// index.
  int snap(double coordinate) const;
};

struct DiscretizedCounterexample {
  TabularStochasticGame game;
  OneShotPotential potential;  // closed-form potential evaluated on the grid
};

/// Tabular game on the shared uniform grid {0, 1/(N-1), ..., 1} for states
/// and both action sets; kernel rows put unit mass on the state indexed by
/// agent 1's action. Also evaluates the closed-form potential on the grid.
DiscretizedCounterexample discretize_with_potential(
    const DiscretizationConfig& config);

TabularStochasticGame discretize(const DiscretizationConfig& config);

struct KnownPolicies {
  DeterministicJointPolicy dual_optimal;  // a1 = 1, a2 = s
  DeterministicJointPolicy nash;          // a1 = 0, a2 = s
};

KnownPolicies known_policies(const DiscretizationConfig& config);

/// Everything a reader needs to audit the refutation: condition verdicts,
/// the dual solution and its failed Nash check, the certified Nash policy,
/// the value/potential misalignment of the deviation connecting the two, and
/// the average-payoff audit of the Nash values.
struct CounterexampleReport {
  DiscretizationConfig config;

  bool potential_found = false;
  double potential_residual = 0.0;
  ConditionReport c1, c2, c3, cst;

  std::vector<double> dual_values;
  std::vector<int> dual_greedy;  // flat joint decision per state
  std::vector<int> dual_tie_states;
  bool dual_matches_known = false;

  NashReport dual_nash;   // checked at epsilon = 0.5, expected to fail
  NashReport known_nash;  // checked at epsilon = 1e-6, expected to pass
  double gap_oracle = 0.0;  // gamma/(1-gamma)

  AlignmentReport alignment;  // dual optimum vs agent 0 deviating to the Nash

  // Nash values from state 0 for both agents: discounted, (1-gamma)-scaled,
  // and the exact per-step average over the absorbing cycle.
  std::vector<double> nash_values_state0;
  std::vector<double> nash_scaled_values_state0;
  std::vector<double> nash_cycle_averages_state0;

  bool matches_expected = false;      // the full expected verdict vector
  std::vector<std::string> mismatches;
  double runtime_seconds = 0.0;
};

/// Runs the full pipeline: discretize, recover and calibrate the potential,
/// all four condition checks, dual solve, both Nash checks, the alignment
/// probe, and the average-payoff audit. `matches_expected` compares against
/// the expected verdict vector (potential residual < 1e-12, C1 fail, C2
/// fail, C3 pass below 1e-12, CST fail with spread 2 +- 1e-9, dual greedy ==
/// known dual optimum, dual Nash check fails with gap gamma/(1-gamma) +-
/// 0.01, known Nash passes at 1e-6).
CounterexampleReport reproduce_report(const DiscretizationConfig& config,
                                      double checker_tolerance = 1e-9,
                                      double solver_tolerance = 1e-10);

}  // namespace mpg
