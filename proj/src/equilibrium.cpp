#include "mpg/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mpg/evaluation.hpp"

namespace mpg {

Mdp build_dual_mdp(const TabularStochasticGame& game,
                   const OneShotPotential& potential) {
  if (potential.state_count != game.state_count ||
      potential.joint_action_count != game.joint_action_count() ||
      potential.table.size() !=
          static_cast<std::size_t>(game.state_count) *
              game.joint_action_count())
    throw std::invalid_argument("dual MDP: potential shape mismatch");

  Mdp mdp;
  mdp.state_count = game.state_count;
  mdp.decision_count = game.joint_action_count();
  mdp.discount = game.discount;
  mdp.rewards = potential.table;
  mdp.transitions.reserve(game.transitions.row_count(),
                          game.transitions.entry_count());
  for (int r = 0; r < game.transitions.row_count(); ++r)
    mdp.transitions.push_row(game.transitions.row(r));
  return mdp;
}

MdpSolution value_iteration(const Mdp& mdp, double tolerance,
                            long max_iterations) {
  if (mdp.state_count <= 0 || mdp.decision_count <= 0)
    throw std::invalid_argument("value_iteration: empty MDP");
  if (!(mdp.discount > 0.0 && mdp.discount < 1.0))
    throw std::invalid_argument("value_iteration: discount outside (0,1)");
  if (!(tolerance > 0.0))
    throw std::invalid_argument("value_iteration: tolerance must be positive");

  const int S = mdp.state_count;
  const int A = mdp.decision_count;
  // Stop once successive iterates are within tol*(1-gamma)/(2*gamma); the
  // fixed point then lies within tol/2 of the final sweep.
  const double stop =
      tolerance * (1.0 - mdp.discount) / (2.0 * mdp.discount);

  MdpSolution sol;
  sol.values.assign(S, 0.0);
  std::vector<double> next(S);
  double delta = 0.0;
  long iter = 0;
  bool converged = false;
  for (; iter < max_iterations; ++iter) {
    delta = 0.0;
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a) {
        double q = mdp.rewards[static_cast<std::size_t>(s) * A + a];
        for (const TransitionEntry& e : mdp.transitions.row(s * A + a))
          q += mdp.discount * e.probability * sol.values[e.next_state];
        best = std::max(best, q);
      }
      next[s] = best;
      delta = std::max(delta, std::abs(best - sol.values[s]));
    }
    sol.values.swap(next);
    if (delta < stop) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw SolverError("value iteration failed to converge within budget");
  sol.iterations = iter + 1;
  sol.final_delta = delta;

  // Greedy extraction with lowest-index tie breaking; states whose best
  // action is tied within tolerance are surfaced.
  sol.greedy.assign(S, 0);
  for (int s = 0; s < S; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    std::vector<double> q(A);
    for (int a = 0; a < A; ++a) {
      double val = mdp.rewards[static_cast<std::size_t>(s) * A + a];
      for (const TransitionEntry& e : mdp.transitions.row(s * A + a))
        val += mdp.discount * e.probability * sol.values[e.next_state];
      q[a] = val;
      if (val > best) {
        best = val;
        arg = a;
      }
    }
    sol.greedy[s] = arg;
    for (int a = 0; a < A; ++a)
      if (a != arg && best - q[a] <= tolerance) {
        sol.tie_states.push_back(s);
        break;
      }
  }
  return sol;
}

DeterministicJointPolicy extract_joint_policy(
    const TabularStochasticGame& game, std::span<const int> greedy) {
  if (static_cast<int>(greedy.size()) != game.state_count)
    throw std::invalid_argument("extract_joint_policy: wrong state count");
  DeterministicJointPolicy policy;
  policy.choice.assign(game.agent_count,
                       std::vector<int>(game.state_count, 0));
  std::vector<int> profile(game.agent_count);
  for (int s = 0; s < game.state_count; ++s) {
    if (greedy[s] < 0 || greedy[s] >= game.joint_action_count())
      throw std::invalid_argument("extract_joint_policy: index out of range");
    game.unflatten_action(greedy[s], profile);
    for (int i = 0; i < game.agent_count; ++i) policy.choice[i][s] = profile[i];
  }
  return policy;
}

Mdp best_response_mdp(const TabularStochasticGame& game,
                      const JointPolicy& policy, int agent) {
  if (agent < 0 || agent >= game.agent_count)
    throw std::invalid_argument("best_response_mdp: agent out of range");
  {
    ValidationReport shape = validate_policy(game, policy);
    if (!shape.ok())
      throw std::invalid_argument("best_response_mdp: " +
                                  shape.issues.front().message);
  }

  const int S = game.state_count;
  const int ja = game.joint_action_count();
  const int n = game.agent_count;
  const int count = game.action_counts[agent];

  Mdp mdp;
  mdp.state_count = S;
  mdp.decision_count = count;
  mdp.discount = game.discount;
  mdp.rewards.assign(static_cast<std::size_t>(S) * count, 0.0);

  std::vector<int> digits(n);
  std::vector<std::vector<TransitionEntry>> rows(count);
  for (int s = 0; s < S; ++s) {
    for (auto& r : rows) r.clear();
    std::vector<std::vector<double>> dense_rows(
        count, std::vector<double>(S, 0.0));
    std::fill(digits.begin(), digits.end(), 0);
    for (int a = 0; a < ja; ++a) {
      double w = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != agent) {
          w *= policy.prob(j, s, digits[j]);
          if (w == 0.0) break;
        }
      if (w > 0.0) {
        const int own = digits[agent];
        mdp.rewards[static_cast<std::size_t>(s) * count + own] +=
            w * game.payoff(agent, s, a);
        for (const TransitionEntry& e : game.transition_row(s, a))
          dense_rows[own][e.next_state] += w * e.probability;
      }
      for (int j = 0; j < n; ++j) {
        if (++digits[j] < game.action_counts[j]) break;
        digits[j] = 0;
      }
    }
    for (int own = 0; own < count; ++own) {
      std::vector<TransitionEntry> sparse;
      for (int t = 0; t < S; ++t)
        if (dense_rows[own][t] > 0.0)
          sparse.push_back({t, dense_rows[own][t]});
      mdp.transitions.push_row(sparse);
    }
  }
  return mdp;
}

NashReport verify_nash(const TabularStochasticGame& game,
                       const JointPolicy& policy, double epsilon,
                       double solver_tolerance) {
  if (!(epsilon >= 0.0))
    throw std::invalid_argument("verify_nash: epsilon must be nonnegative");
  NashReport report;
  report.epsilon = epsilon;
  report.solver_tolerance = solver_tolerance;
  report.per_agent_gap.assign(game.agent_count, 0.0);
  report.policy_values.resize(game.agent_count);
  report.best_response_values.resize(game.agent_count);

  double worst = -1.0;
  for (int i = 0; i < game.agent_count; ++i) {
    const ValueFunction v = evaluate_policy(game, policy, i, solver_tolerance);
    const Mdp br = best_response_mdp(game, policy, i);
    const MdpSolution opt = value_iteration(br, solver_tolerance);
    double gap = 0.0;
    int gap_state = 0;
    for (int s = 0; s < game.state_count; ++s) {
      double g = opt.values[s] - v.values[s];
      if (g > gap) {
        gap = g;
        gap_state = s;
      }
    }
    gap = std::max(gap, 0.0);
    report.per_agent_gap[i] = gap;
    report.policy_values[i] = v.values;
    report.best_response_values[i] = opt.values;
    if (gap > worst) {
      worst = gap;
      report.witness_agent = i;
      report.witness_state = gap_state;
    }
  }
  report.passed =
      *std::max_element(report.per_agent_gap.begin(),
                        report.per_agent_gap.end()) <=
      epsilon + solver_tolerance;
  return report;
}

double nash_gap(const TabularStochasticGame& game, const JointPolicy& policy,
                double solver_tolerance) {
  const NashReport report = verify_nash(game, policy, 0.0, solver_tolerance);
  return *std::max_element(report.per_agent_gap.begin(),
                           report.per_agent_gap.end());
}

}  // namespace mpg
