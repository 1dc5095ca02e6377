#pragma once

#include <vector>

#include "mpg/game.hpp"
#include "mpg/potential.hpp"

namespace mpg {

/// Single-decision-maker MDP. Reward is [state][decision] row-major; the
/// transition row for (s, d) is row s * decision_count + d.
struct Mdp {
  int state_count = 0;
  int decision_count = 0;
  double discount = 0.0;
  std::vector<double> rewards;
  TransitionKernel transitions;
};

/// Dual MDP of an OPSG: same states and kernel, decisions are the joint
/// actions, reward is the one-shot potential.
Mdp build_dual_mdp(const TabularStochasticGame& game,
                   const OneShotPotential& potential);

struct MdpSolution {
  std::vector<double> values;
  std::vector<int> greedy;      // lowest-index argmax per state
  std::vector<int> tie_states;  // states whose argmax is not unique within
                                // the solver tolerance
  long iterations = 0;
  double final_delta = 0.0;
};

/// Synchronous value iteration from V = 0. Stops when successive iterates
/// differ by less than tolerance*(1-gamma)/(2*gamma), which bounds both
/// |V - V*| and the Bellman-optimality residual by tolerance. Throws
/// SolverError when the budget runs out.
MdpSolution value_iteration(const Mdp& mdp, double tolerance = 1e-10,
                            long max_iterations = 1000000);

/// Splits flat greedy decisions of the dual MDP back into per-agent choices
/// via the shared mixed-radix law.
DeterministicJointPolicy extract_joint_policy(const TabularStochasticGame& game,
                                              std::span<const int> greedy);

/// Agent `agent`'s MDP against the fixed opponent policies: opponents are
/// marginalized out of the payoffs and the kernel. Zero-probability opponent
/// profiles are skipped, so deterministic opponents reduce to an exact slice.
Mdp best_response_mdp(const TabularStochasticGame& game,
                      const JointPolicy& policy, int agent);

struct NashReport {
  double epsilon = 0.0;
  bool passed = false;
  std::vector<double> per_agent_gap;  // max_s (V_i^BR(s) - V_i^pi(s))
  int witness_agent = 0;
  int witness_state = 0;
  double solver_tolerance = 0.0;
  std::vector<std::vector<double>> policy_values;
  std::vector<std::vector<double>> best_response_values;
};

/// Epsilon-Nash check per the per-state definition: passes iff every agent's
/// best-response improvement is at most epsilon + solver_tolerance at every
/// state. The witness is the lowest (agent, state) attaining the largest gap.
NashReport verify_nash(const TabularStochasticGame& game,
                       const JointPolicy& policy, double epsilon,
                       double solver_tolerance = 1e-10);

/// max_i max_s (V_i^BR(s) - V_i^pi(s)).
double nash_gap(const TabularStochasticGame& game, const JointPolicy& policy,
                double solver_tolerance = 1e-10);

}  // namespace mpg
