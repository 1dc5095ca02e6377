#include "mpg/evaluation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpg {

namespace {

void check_policy_shape(const TabularStochasticGame& game,
                        const JointPolicy& policy) {
  if (policy.state_count != game.state_count ||
      policy.action_counts != game.action_counts ||
      static_cast<int>(policy.tables.size()) != game.agent_count)
    throw std::invalid_argument("policy shape does not match the game");
}

/// Calls fn(joint_action, weight) for every joint action with positive
/// policy weight at `state`, decoding digits incrementally.
template <typename Fn>
void for_each_weighted_profile(const TabularStochasticGame& game,
                               const JointPolicy& policy, int state, Fn&& fn) {
  const int ja = game.joint_action_count();
  const int n = game.agent_count;
  std::vector<int> digits(n, 0);
  for (int a = 0; a < ja; ++a) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      w *= policy.prob(i, state, digits[i]);
      if (w == 0.0) break;
    }
    if (w > 0.0) fn(a, w);
    for (int i = 0; i < n; ++i) {  // increment mixed-radix counter
      if (++digits[i] < game.action_counts[i]) break;
      digits[i] = 0;
    }
  }
}

double bellman_residual(const TabularStochasticGame& game,
                        std::span<const double> reward_pi,
                        std::span<const double> p_pi,
                        std::span<const double> values) {
  const int S = game.state_count;
  double residual = 0.0;
  for (int s = 0; s < S; ++s) {
    double v = reward_pi[s];
    for (int t = 0; t < S; ++t)
      v += game.discount * p_pi[static_cast<std::size_t>(s) * S + t] *
           values[t];
    residual = std::max(residual, std::abs(v - values[s]));
  }
  return residual;
}

}  // namespace

std::vector<double> expected_reward_under_policy(
    const TabularStochasticGame& game, const JointPolicy& policy,
    std::span<const double> reward) {
  check_policy_shape(game, policy);
  const int ja = game.joint_action_count();
  if (reward.size() != static_cast<std::size_t>(game.state_count) * ja)
    throw std::invalid_argument("reward table shape mismatch");
  std::vector<double> out(game.state_count, 0.0);
  for (int s = 0; s < game.state_count; ++s) {
    double acc = 0.0;
    for_each_weighted_profile(game, policy, s, [&](int a, double w) {
      acc += w * reward[static_cast<std::size_t>(s) * ja + a];
    });
    out[s] = acc;
  }
  return out;
}

std::vector<double> marginal_transition_matrix(
    const TabularStochasticGame& game, const JointPolicy& policy) {
  check_policy_shape(game, policy);
  const int S = game.state_count;
  std::vector<double> p(static_cast<std::size_t>(S) * S, 0.0);
  for (int s = 0; s < S; ++s) {
    double* row = p.data() + static_cast<std::size_t>(s) * S;
    for_each_weighted_profile(game, policy, s, [&](int a, double w) {
      for (const TransitionEntry& e : game.transition_row(s, a))
        row[e.next_state] += w * e.probability;
    });
  }
  return p;
}

ValueFunction discounted_policy_value(const TabularStochasticGame& game,
                                      const JointPolicy& policy,
                                      std::span<const double> reward,
                                      std::string source_tag, double tolerance,
                                      long max_iterations,
                                      int direct_solve_threshold) {
  const int S = game.state_count;
  std::vector<double> r_pi = expected_reward_under_policy(game, policy, reward);
  std::vector<double> p_pi = marginal_transition_matrix(game, policy);

  ValueFunction vf;
  vf.source_tag = std::move(source_tag);

  if (S <= direct_solve_threshold) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(S, S);
    for (int s = 0; s < S; ++s)
      for (int t = 0; t < S; ++t)
        a(s, t) -= game.discount * p_pi[static_cast<std::size_t>(s) * S + t];
    Eigen::Map<const Eigen::VectorXd> b(r_pi.data(), S);
    Eigen::VectorXd v = a.partialPivLu().solve(b);
    vf.values.assign(v.data(), v.data() + S);
    return vf;
  }

  std::vector<double> v(S, 0.0), next(S, 0.0);
  for (long it = 0; it < max_iterations; ++it) {
    for (int s = 0; s < S; ++s) {
      double acc = r_pi[s];
      const double* row = p_pi.data() + static_cast<std::size_t>(s) * S;
      for (int t = 0; t < S; ++t) acc += game.discount * row[t] * v[t];
      next[s] = acc;
    }
    v.swap(next);
    if (bellman_residual(game, r_pi, p_pi, v) <= 0.5 * tolerance) {
      vf.values = std::move(v);
      return vf;
    }
  }
  throw SolverError("policy evaluation did not converge within budget");
}

ValueFunction evaluate_policy(const TabularStochasticGame& game,
                              const JointPolicy& policy, int agent,
                              double tolerance, long max_iterations,
                              int direct_solve_threshold) {
  if (agent < 0 || agent >= game.agent_count)
    throw std::invalid_argument("evaluate_policy: agent index out of range");
  return discounted_policy_value(game, policy, game.payoff_table(agent),
                                 "agent:" + std::to_string(agent), tolerance,
                                 max_iterations, direct_solve_threshold);
}

ValueFunction potential_value(const TabularStochasticGame& game,
                              std::span<const double> potential_table,
                              const JointPolicy& policy, double tolerance,
                              long max_iterations, int direct_solve_threshold) {
  return discounted_policy_value(game, policy, potential_table, "potential",
                                 tolerance, max_iterations,
                                 direct_solve_threshold);
}

ValueFunction finite_horizon_value(const TabularStochasticGame& game,
                                   const JointPolicy& policy,
                                   std::span<const double> reward,
                                   std::string source_tag, int horizon) {
  if (horizon < 0)
    throw std::invalid_argument("finite_horizon_value: negative horizon");
  const int S = game.state_count;
  std::vector<double> r_pi = expected_reward_under_policy(game, policy, reward);
  std::vector<double> p_pi = marginal_transition_matrix(game, policy);

  std::vector<double> v(S, 0.0), next(S, 0.0);
  for (int k = 0; k < horizon; ++k) {
    for (int s = 0; s < S; ++s) {
      double acc = r_pi[s];
      const double* row = p_pi.data() + static_cast<std::size_t>(s) * S;
      for (int t = 0; t < S; ++t) acc += game.discount * row[t] * v[t];
      next[s] = acc;
    }
    v.swap(next);
  }
  ValueFunction vf;
  vf.values = std::move(v);
  vf.source_tag = std::move(source_tag);
  return vf;
}

ValueFunction finite_horizon_value(const TabularStochasticGame& game,
                                   const JointPolicy& policy, int agent,
                                   int horizon) {
  if (agent < 0 || agent >= game.agent_count)
    throw std::invalid_argument("finite_horizon_value: agent out of range");
  return finite_horizon_value(game, policy, game.payoff_table(agent),
                              "agent:" + std::to_string(agent), horizon);
}

std::vector<double> k_step_transition(const TabularStochasticGame& game,
                                      const JointPolicy& policy, int k) {
  if (k < 0) throw std::invalid_argument("k_step_transition: negative k");
  const int S = game.state_count;
  std::vector<double> result(static_cast<std::size_t>(S) * S, 0.0);
  for (int s = 0; s < S; ++s) result[static_cast<std::size_t>(s) * S + s] = 1.0;
  if (k == 0) return result;

  std::vector<double> p_pi = marginal_transition_matrix(game, policy);
  std::vector<double> next(static_cast<std::size_t>(S) * S, 0.0);
  for (int step = 0; step < k; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < S; ++s)
      for (int m = 0; m < S; ++m) {
        double w = p_pi[static_cast<std::size_t>(s) * S + m];
        if (w == 0.0) continue;
        const double* src = result.data() + static_cast<std::size_t>(m) * S;
        double* dst = next.data() + static_cast<std::size_t>(s) * S;
        for (int t = 0; t < S; ++t) dst[t] += w * src[t];
      }
    result.swap(next);
  }
  return result;
}

int horizon_for_epsilon(double epsilon, double discount, double h_max) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("horizon_for_epsilon: epsilon must be > 0");
  if (!(discount > 0.0 && discount < 1.0))
    throw std::invalid_argument("horizon_for_epsilon: discount outside (0,1)");
  if (h_max < 0.0)
    throw std::invalid_argument("horizon_for_epsilon: negative h_max");
  if (h_max == 0.0) return 0;
  double ratio = epsilon * (1.0 - discount) / h_max;
  if (ratio >= 1.0) return 1;
  double q = std::abs(std::log(ratio) / std::log(discount));
  return static_cast<int>(std::floor(q)) + 1;
}

Trajectory sample_trajectory(const TabularStochasticGame& game,
                             const JointPolicy& policy, int initial_state,
                             int length, Rng& rng, std::uint64_t seed_record) {
  check_policy_shape(game, policy);
  if (initial_state < 0 || initial_state >= game.state_count)
    throw std::invalid_argument("sample_trajectory: initial state out of range");
  if (length < 0)
    throw std::invalid_argument("sample_trajectory: negative length");

  Trajectory traj;
  traj.seed = seed_record;
  traj.states.reserve(length + 1);
  traj.joint_actions.reserve(length);
  traj.payoffs.reserve(length);
  int s = initial_state;
  traj.states.push_back(s);
  std::vector<int> profile(game.agent_count);
  for (int t = 0; t < length; ++t) {
    for (int i = 0; i < game.agent_count; ++i)
      profile[i] = rng.categorical(policy.row(i, s));
    int flat = game.flatten_action(profile);
    std::vector<double> pay(game.agent_count);
    for (int i = 0; i < game.agent_count; ++i) pay[i] = game.payoff(i, s, flat);
    traj.joint_actions.push_back(profile);
    traj.payoffs.push_back(std::move(pay));

    auto row = game.transition_row(s, flat);
    double u = rng.uniform01();
    double acc = 0.0;
    int next = row.empty() ? s : row.back().next_state;
    for (const TransitionEntry& e : row) {
      acc += e.probability;
      if (u < acc) {
        next = e.next_state;
        break;
      }
    }
    s = next;
    traj.states.push_back(s);
  }
  return traj;
}

Trajectory sample_trajectory(const TabularStochasticGame& game,
                             const JointPolicy& policy, int initial_state,
                             int length, std::uint64_t seed) {
  Rng rng(seed);
  return sample_trajectory(game, policy, initial_state, length, rng, seed);
}

CycleAverage deterministic_cycle_average(const TabularStochasticGame& game,
                                         const DeterministicJointPolicy& policy,
                                         std::span<const double> reward,
                                         int start_state) {
  const int ja = game.joint_action_count();
  if (reward.size() != static_cast<std::size_t>(game.state_count) * ja)
    throw std::invalid_argument("cycle average: reward table shape mismatch");

  auto next_of = [&](int s) {
    int a = policy.joint_action(game, s);
    auto row = game.transition_row(s, a);
    const TransitionEntry* best = nullptr;
    for (const TransitionEntry& e : row)
      if (!best || e.probability > best->probability) best = &e;
    if (!best || best->probability < 1.0 - 1e-9)
      throw std::invalid_argument(
          "cycle average requires a deterministic kernel under the policy");
    return best->next_state;
  };

  std::vector<int> order;
  std::vector<int> position(game.state_count, -1);
  int s = start_state;
  while (position[s] < 0) {
    position[s] = static_cast<int>(order.size());
    order.push_back(s);
    s = next_of(s);
  }

  CycleAverage result;
  double sum = 0.0;
  for (std::size_t k = position[s]; k < order.size(); ++k) {
    int state = order[k];
    result.cycle_states.push_back(state);
    sum += reward[static_cast<std::size_t>(state) * ja +
                  policy.joint_action(game, state)];
  }
  result.average = sum / static_cast<double>(result.cycle_states.size());
  return result;
}

}  // namespace mpg
