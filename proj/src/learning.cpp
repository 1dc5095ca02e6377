#include "mpg/learning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mpg/equilibrium.hpp"
#include "mpg/evaluation.hpp"

namespace mpg {

std::vector<double> project_to_simplex(std::span<const double> point) {
  if (point.empty())
    throw std::invalid_argument("project_to_simplex: empty input");
  const int n = static_cast<int>(point.size());
  std::vector<double> sorted(point.begin(), point.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double running = 0.0;
  double theta = 0.0;
  int support = 0;
  for (int k = 0; k < n; ++k) {
    running += sorted[k];
    const double candidate = (running - 1.0) / (k + 1);
    if (sorted[k] - candidate > 0.0) {
      theta = candidate;
      support = k + 1;
    }
  }
  (void)support;
  std::vector<double> out(point.size());
  for (std::size_t i = 0; i < point.size(); ++i)
    out[i] = std::max(point[i] - theta, 0.0);
  return out;
}

std::vector<double> psga_gradient_estimate(const TabularStochasticGame& game,
                                           const Trajectory& trajectory,
                                           const JointPolicy& policy,
                                           int agent) {
  if (agent < 0 || agent >= game.agent_count)
    throw std::invalid_argument("psga_gradient_estimate: agent out of range");
  if (trajectory.states.size() != trajectory.joint_actions.size() + 1 ||
      trajectory.payoffs.size() != trajectory.joint_actions.size())
    throw std::invalid_argument("psga_gradient_estimate: malformed trajectory");

  double total_return = 0.0;
  for (const std::vector<double>& step : trajectory.payoffs)
    total_return += step[agent];

  const int count = game.action_counts[agent];
  std::vector<double> grad(
      static_cast<std::size_t>(game.state_count) * count, 0.0);
  for (std::size_t t = 0; t < trajectory.joint_actions.size(); ++t) {
    const int s = trajectory.states[t];
    const int a = trajectory.joint_actions[t][agent];
    const double p = policy.prob(agent, s, a);
    if (p <= 0.0)
      throw std::invalid_argument(
          "psga_gradient_estimate: trajectory visits a zero-probability "
          "action");
    grad[static_cast<std::size_t>(s) * count + a] += total_return / p;
  }
  return grad;
}

LearningTrace run_psga(const TabularStochasticGame& game,
                       const LearnerConfig& config) {
  if (config.iterations < 0)
    throw std::invalid_argument("run_psga: negative iteration count");
  if (config.batch_horizon < 1)
    throw std::invalid_argument("run_psga: batch horizon must be >= 1");
  if (!(config.eta >= 0.0))
    throw std::invalid_argument("run_psga: eta must be nonnegative");
  if (!config.initial_state_probs.empty() &&
      static_cast<int>(config.initial_state_probs.size()) != game.state_count)
    throw std::invalid_argument("run_psga: initial state distribution size");

  LearningTrace trace;
  trace.config = config;
  JointPolicy policy = uniform_policy(game);
  trace.snapshots.push_back({0, policy});

  Rng rng(config.seed);
  std::vector<double> initial = config.initial_state_probs;
  if (initial.empty())
    initial.assign(game.state_count, 1.0 / game.state_count);

  for (long t = 1; t <= config.iterations; ++t) {
    // Batch length T means steps k = 0..T: T+1 actions per episode.
    const int start = rng.categorical(initial);
    const Trajectory traj = sample_trajectory(
        game, policy, start, config.batch_horizon + 1, rng, config.seed);

    LearningTrace::IterationRow row;
    row.iteration = t;
    row.batch_return.assign(game.agent_count, 0.0);
    for (const std::vector<double>& step : traj.payoffs)
      for (int i = 0; i < game.agent_count; ++i)
        row.batch_return[i] += step[i];

    // All agents update from the one shared trajectory. A zero step is a
    // null update; skipping it keeps the policy bit-identical instead of
    // round-tripping rows through the projection.
    JointPolicy next = policy;
    for (int i = 0; config.eta > 0.0 && i < game.agent_count; ++i) {
      const int count = game.action_counts[i];
      const std::vector<double> grad =
          psga_gradient_estimate(game, traj, policy, i);
      for (int s = 0; s < game.state_count; ++s) {
        auto row_mut = next.row_mut(i, s);
        std::vector<double> shifted(row_mut.begin(), row_mut.end());
        for (int a = 0; a < count; ++a)
          shifted[a] += config.eta * grad[static_cast<std::size_t>(s) * count + a];
        const std::vector<double> projected = project_to_simplex(shifted);
        std::copy(projected.begin(), projected.end(), row_mut.begin());
      }
    }
    policy = std::move(next);

    row.mean_action.assign(game.agent_count, 0.0);
    for (int i = 0; i < game.agent_count; ++i) {
      double acc = 0.0;
      for (int s = 0; s < game.state_count; ++s)
        for (int a = 0; a < game.action_counts[i]; ++a)
          acc += policy.prob(i, s, a) * a;
      row.mean_action[i] = acc / game.state_count;
    }
    trace.rows.push_back(std::move(row));

    if (config.gap_check_every > 0 && t % config.gap_check_every == 0) {
      trace.gaps.push_back(
          {t, nash_gap(game, policy, config.gap_solver_tolerance)});
      trace.snapshots.push_back({t, policy});
    }
  }
  if (trace.snapshots.back().iteration != config.iterations)
    trace.snapshots.push_back({config.iterations, policy});
  trace.final_policy = std::move(policy);
  return trace;
}

void write_trace_csv(const LearningTrace& trace, std::ostream& out) {
  out << "iteration,agent,batch_return,mean_action,nash_gap\n";
  std::size_t gap_idx = 0;
  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const LearningTrace::IterationRow& row : trace.rows) {
    std::string gap_cell;
    if (gap_idx < trace.gaps.size() &&
        trace.gaps[gap_idx].iteration == row.iteration) {
      gap_cell = fmt(trace.gaps[gap_idx].gap);
      ++gap_idx;
    }
    for (std::size_t i = 0; i < row.batch_return.size(); ++i) {
      out << row.iteration << ',' << i << ',' << fmt(row.batch_return[i])
          << ',' << fmt(row.mean_action[i]) << ','
          << (i == 0 ? gap_cell : "") << '\n';
    }
  }
}

}  // namespace mpg
