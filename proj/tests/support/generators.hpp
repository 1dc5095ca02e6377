#pragma once

// Seeded fixture builders shared by the test binaries. Everything here is
// deterministic given the Rng handed in, so test failures reproduce exactly.

#include <cstdint>
#include <span>
#include <vector>

#include "mpg/game.hpp"
#include "mpg/rng.hpp"

namespace mpg::testsupport {

inline void push_dense_row(TransitionKernel& kernel,
                           std::span<const double> probs) {
  std::vector<TransitionEntry> entries;
  for (int s = 0; s < static_cast<int>(probs.size()); ++s)
    if (probs[s] != 0.0) entries.push_back({s, probs[s]});
  kernel.push_row(std::span<const TransitionEntry>(entries));
}

/// Random row-stochastic row with every entry at least min_weight / total.
inline std::vector<double> random_stochastic_row(Rng& rng, int n,
                                                 double min_weight = 0.05) {
  std::vector<double> row(n);
  double total = 0.0;
  for (double& p : row) {
    p = min_weight + rng.uniform01();
    total += p;
  }
  for (double& p : row) p /= total;
  return row;
}

/// Dense random game: payoffs uniform in [-1, 1], random stochastic kernel.
inline TabularStochasticGame random_game(Rng& rng, int agents, int states,
                                         const std::vector<int>& actions,
                                         double discount) {
  TabularStochasticGame game;
  game.agent_count = agents;
  game.state_count = states;
  game.action_counts = actions;
  game.discount = discount;
  const int ja = game.joint_action_count();
  game.payoffs.resize(static_cast<std::size_t>(agents) * states * ja);
  for (double& r : game.payoffs) r = rng.uniform(-1.0, 1.0);
  game.transitions.reserve(states * ja);
  for (int row = 0; row < states * ja; ++row) {
    std::vector<double> probs = random_stochastic_row(rng, states);
    push_dense_row(game.transitions, probs);
  }
  return game;
}

/// Random interior product policy (every probability >= ~0.04).
inline JointPolicy random_policy(Rng& rng, const TabularStochasticGame& game) {
  JointPolicy policy;
  policy.state_count = game.state_count;
  policy.action_counts = game.action_counts;
  policy.tables.resize(game.agent_count);
  for (int i = 0; i < game.agent_count; ++i) {
    policy.tables[i].reserve(static_cast<std::size_t>(game.state_count) *
                             game.action_counts[i]);
    for (int s = 0; s < game.state_count; ++s) {
      std::vector<double> row =
          random_stochastic_row(rng, game.action_counts[i], 0.15);
      policy.tables[i].insert(policy.tables[i].end(), row.begin(), row.end());
    }
  }
  return policy;
}

/// Classic zero-sum 2x2 stage game at a single self-looping state; has no
/// one-shot potential and its unique deviation 4-cycle sums to +-8.
inline TabularStochasticGame matching_pennies_game(double discount = 0.9) {
  TabularStochasticGame game;
  game.agent_count = 2;
  game.state_count = 1;
  game.action_counts = {2, 2};
  game.discount = discount;
  // Flat order (a0, a1): (0,0), (1,0), (0,1), (1,1). Matcher wins on equal.
  game.payoffs = {
      1.0, -1.0, -1.0, 1.0,   // agent 0 (matcher)
      -1.0, 1.0, 1.0, -1.0,   // agent 1 (mismatcher)
  };
  for (int a = 0; a < 4; ++a) game.transitions.push_row({{0, 1.0}});
  return game;
}

/// Every agent receives the same random payoff table; the common table is
/// its own one-shot potential up to per-state constants.
inline TabularStochasticGame identical_interest_game(
    Rng& rng, int agents, int states, const std::vector<int>& actions,
    double discount) {
  TabularStochasticGame game = random_game(rng, agents, states, actions,
                                           discount);
  const std::size_t block =
      static_cast<std::size_t>(states) * game.joint_action_count();
  for (int i = 1; i < agents; ++i)
    for (std::size_t k = 0; k < block; ++k)
      game.payoffs[i * block + k] = game.payoffs[k];
  return game;
}

/// Single-agent single-state game with one payoff per action (self-loop).
inline TabularStochasticGame bandit_game(const std::vector<double>& payoffs,
                                         double discount = 0.9) {
  TabularStochasticGame game;
  game.agent_count = 1;
  game.state_count = 1;
  game.action_counts = {static_cast<int>(payoffs.size())};
  game.discount = discount;
  game.payoffs = payoffs;
  for (std::size_t a = 0; a < payoffs.size(); ++a)
    game.transitions.push_row({{0, 1.0}});
  return game;
}

/// Game satisfying both known-sufficient conditions by construction:
/// a per-state kernel replicated over joint actions (agent-independent
/// transitions) and payoffs r_i = Phi + v_i(s, a_{-i}) with v_i a dummy term
/// (independent of agent i's own action). Returns the game and the Phi table
/// ([state][joint_action]).
struct OpsGame {
  TabularStochasticGame game;
  std::vector<double> phi;
};

inline OpsGame c1_dummy_game(Rng& rng, int agents, int states,
                             const std::vector<int>& actions,
                             double discount) {
  OpsGame out;
  TabularStochasticGame& game = out.game;
  game.agent_count = agents;
  game.state_count = states;
  game.action_counts = actions;
  game.discount = discount;
  const int ja = game.joint_action_count();

  out.phi.resize(static_cast<std::size_t>(states) * ja);
  for (double& v : out.phi) v = rng.uniform(-1.0, 1.0);

  // v_i depends on (state, opponents' profile) only: index the opponents'
  // profile by the flat joint action with agent i's digit zeroed.
  std::vector<int> strides(agents, 1);
  for (int i = 1; i < agents; ++i)
    strides[i] = strides[i - 1] * actions[i - 1];
  std::vector<std::vector<double>> dummy(agents);
  for (int i = 0; i < agents; ++i) {
    dummy[i].resize(static_cast<std::size_t>(states) * ja);
    for (double& v : dummy[i]) v = rng.uniform(-1.0, 1.0);
  }
  game.payoffs.resize(static_cast<std::size_t>(agents) * states * ja);
  for (int i = 0; i < agents; ++i)
    for (int s = 0; s < states; ++s)
      for (int a = 0; a < ja; ++a) {
        const int own_digit = (a / strides[i]) % actions[i];
        const int zeroed = a - own_digit * strides[i];
        game.payoff_at(i, s, a) =
            out.phi[static_cast<std::size_t>(s) * ja + a] +
            dummy[i][static_cast<std::size_t>(s) * ja + zeroed];
      }

  game.transitions.reserve(states * ja);
  for (int s = 0; s < states; ++s) {
    std::vector<double> probs = random_stochastic_row(rng, states);
    for (int a = 0; a < ja; ++a) push_dense_row(game.transitions, probs);
  }
  return out;
}

}  // namespace mpg::testsupport
