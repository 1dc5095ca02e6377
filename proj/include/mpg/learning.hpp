#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mpg/game.hpp"

namespace mpg {

/// Euclidean projection onto the probability simplex (sort-then-threshold).
std::vector<double> project_to_simplex(std::span<const double> v);

/// Score-function gradient estimate for one agent from one sampled batch:
/// with R the undiscounted sum of the agent's payoffs over all steps, entry
/// (s, a) accumulates R / pi_i(a|s) once per step that visited (s, a).
/// Returns a [state][action] table. Throws if the trajectory visits an
/// action the policy assigns zero probability.
std::vector<double> psga_gradient_estimate(const TabularStochasticGame& game,
                                           const Trajectory& trajectory,
                                           const JointPolicy& policy,
                                           int agent);

struct LearnerConfig {
  double eta = 0.05;            // step size
  int batch_horizon = 8;        // T; a batch is T+1 steps
  long iterations = 2000;
  std::uint64_t seed = 0;
  int gap_check_every = 0;      // 0 disables nash_gap logging
  double gap_solver_tolerance = 1e-8;
  std::vector<double> initial_state_probs;  // empty = uniform over states
};

struct LearningTrace {
  struct IterationRow {
    long iteration;                    // 1-based
    std::vector<double> batch_return;  // per agent, undiscounted batch sum
    std::vector<double> mean_action;   // per agent, mean action index
  };
  struct GapRow {
    long iteration;
    double gap;
  };
  struct Snapshot {
    long iteration;  // 0 = initialization
    JointPolicy policy;
  };

  std::vector<IterationRow> rows;   // one per iteration
  std::vector<GapRow> gaps;         // one per gap_check_every iterations
  std::vector<Snapshot> snapshots;  // init, each gap check, and final
  JointPolicy final_policy;
  LearnerConfig config;
};

/// Projected stochastic gradient ascent with direct tabular policies:
/// uniform initialization, one shared batch per iteration, per-agent update
/// pi_i <- Proj(pi_i + eta * estimate), rows projected per state. A single
/// seeded stream drives all sampling (initial state, then per step the
/// agents' actions in index order, then the next state).
LearningTrace run_psga(const TabularStochasticGame& game,
                       const LearnerConfig& config);

/// CSV trace with columns iteration,agent,batch_return,mean_action,nash_gap;
/// the gap column is filled on logged iterations and empty elsewhere.
void write_trace_csv(const LearningTrace& trace, std::ostream& out);

}  // namespace mpg
