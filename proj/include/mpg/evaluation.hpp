#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mpg/game.hpp"
#include "mpg/rng.hpp"

namespace mpg {

class Rng;

/// Per-state expected one-step reward under a product policy.
/// `reward` is a [state][joint_action] table.
std::vector<double> expected_reward_under_policy(
    const TabularStochasticGame& game, const JointPolicy& policy,
    std::span<const double> reward);

/// Dense state-to-state matrix P_pi (row-major, state_count^2) obtained by
/// marginalizing the kernel over the policy.
std::vector<double> marginal_transition_matrix(
    const TabularStochasticGame& game, const JointPolicy& policy);

/// Discounted value of `reward` under `policy`: the fixed point of
/// V = r_pi + gamma * P_pi * V. Solved directly while
/// state_count <= direct_solve_threshold, iteratively otherwise; either way
/// the result's sup-norm Bellman residual is <= tolerance.
ValueFunction discounted_policy_value(const TabularStochasticGame& game,
                                      const JointPolicy& policy,
                                      std::span<const double> reward,
                                      std::string source_tag,
                                      double tolerance = 1e-10,
                                      long max_iterations = 1000000,
                                      int direct_solve_threshold = 512);

/// V_i^pi: discounted value of agent `agent`'s payoffs.
ValueFunction evaluate_policy(const TabularStochasticGame& game,
                              const JointPolicy& policy, int agent,
                              double tolerance = 1e-10,
                              long max_iterations = 1000000,
                              int direct_solve_threshold = 512);

/// B^pi: discounted value of a one-shot potential table
/// ([state][joint_action]).
ValueFunction potential_value(const TabularStochasticGame& game,
                              std::span<const double> potential_table,
                              const JointPolicy& policy,
                              double tolerance = 1e-10,
                              long max_iterations = 1000000,
                              int direct_solve_threshold = 512);

/// Expected discounted sum of the first `horizon` steps (t = 0..horizon-1).
/// horizon = 0 yields the zero function.
ValueFunction finite_horizon_value(const TabularStochasticGame& game,
                                   const JointPolicy& policy,
                                   std::span<const double> reward,
                                   std::string source_tag, int horizon);

ValueFunction finite_horizon_value(const TabularStochasticGame& game,
                                   const JointPolicy& policy, int agent,
                                   int horizon);

/// k-step transition matrix P^{k,pi} (dense row-major). k = 0 is the
/// identity; P^{k} = P_pi * P^{k-1}.
std::vector<double> k_step_transition(const TabularStochasticGame& game,
                                      const JointPolicy& policy, int k);

/// Smallest horizon T such that any two discounted partial sums truncated at
/// horizons >= T differ by less than epsilon when per-step magnitudes are
/// bounded by h_max: floor(|ln(eps*(1-gamma)/h_max) / ln gamma|) + 1, with an
/// integral ratio still rounding up. Returns 1 when eps*(1-gamma)/h_max >= 1
/// and 0 when h_max == 0.
int horizon_for_epsilon(double epsilon, double discount, double h_max);

/// Seeded rollout of `length` steps from `initial_state`. Draw order is
/// fixed: at each step agents 0..n-1 draw actions, then the next state is
/// drawn; this makes trajectories byte-reproducible for a given seed.
Trajectory sample_trajectory(const TabularStochasticGame& game,
                             const JointPolicy& policy, int initial_state,
                             int length, std::uint64_t seed);

Trajectory sample_trajectory(const TabularStochasticGame& game,
                             const JointPolicy& policy, int initial_state,
                             int length, Rng& rng, std::uint64_t seed_record);

struct CycleAverage {
  std::vector<int> cycle_states;
  double average = 0.0;
};

/// Exact per-step average of `reward` over the cycle that a deterministic
/// policy on a deterministic kernel eventually enters from `start_state`.
/// Used to audit discounted values against average-payoff figures.
CycleAverage deterministic_cycle_average(const TabularStochasticGame& game,
                                         const DeterministicJointPolicy& policy,
                                         std::span<const double> reward,
                                         int start_state);

}  // namespace mpg
