#include "mpg/game.hpp"

#include <cmath>
#include <sstream>

namespace mpg {

namespace {

std::string idx2(const char* name, int i, int j) {
  std::ostringstream os;
  os << name << "[" << i << "][" << j << "]";
  return os.str();
}

std::string idx3(const char* name, int i, int j, int k) {
  std::ostringstream os;
  os << name << "[" << i << "][" << j << "][" << k << "]";
  return os.str();
}

}  // namespace

int TabularStochasticGame::flatten_action(std::span<const int> actions) const {
  if (static_cast<int>(actions.size()) != agent_count)
    throw std::invalid_argument("flatten_action: profile size mismatch");
  int flat = 0;
  int stride = 1;
  for (int i = 0; i < agent_count; ++i) {
    if (actions[i] < 0 || actions[i] >= action_counts[i])
      throw std::invalid_argument("flatten_action: action index out of range");
    flat += actions[i] * stride;
    stride *= action_counts[i];
  }
  return flat;
}

void TabularStochasticGame::unflatten_action(int flat,
                                             std::span<int> out) const {
  if (flat < 0 || flat >= joint_action_count())
    throw std::invalid_argument("unflatten_action: index out of range");
  for (int i = 0; i < agent_count; ++i) {
    out[i] = flat % action_counts[i];
    flat /= action_counts[i];
  }
}

std::vector<int> TabularStochasticGame::unflatten_action(int flat) const {
  std::vector<int> out(agent_count);
  unflatten_action(flat, out);
  return out;
}

ValidationReport validate_game(const TabularStochasticGame& game,
                               double structural_tolerance) {
  ValidationReport report;
  auto add = [&report](std::string location, std::string message) {
    report.issues.push_back({std::move(location), std::move(message)});
  };

  if (game.agent_count < 1) add("agent_count", "must be at least 1");
  if (game.state_count < 1) add("state_count", "must be at least 1");
  if (static_cast<int>(game.action_counts.size()) != game.agent_count) {
    add("action_counts", "length must equal agent_count");
    return report;  // later shape checks would be meaningless
  }
  for (int i = 0; i < game.agent_count; ++i) {
    if (game.action_counts[i] < 1)
      add("action_counts[" + std::to_string(i) + "]", "must be at least 1");
  }
  if (!(game.discount > 0.0 && game.discount < 1.0))
    add("discount", "must lie in the open interval (0, 1)");
  if (!report.ok()) return report;

  const int ja = game.joint_action_count();
  const std::size_t want_payoffs =
      static_cast<std::size_t>(game.agent_count) * game.state_count * ja;
  if (game.payoffs.size() != want_payoffs) {
    add("payoffs", "expected " + std::to_string(want_payoffs) +
                       " entries, got " + std::to_string(game.payoffs.size()));
  } else {
    for (int i = 0; i < game.agent_count; ++i)
      for (int s = 0; s < game.state_count; ++s)
        for (int a = 0; a < ja; ++a)
          if (!std::isfinite(game.payoff(i, s, a)))
            add(idx3("payoffs", i, s, a), "payoff is not finite");
  }

  if (game.transitions.row_count() != game.state_count * ja) {
    add("transitions",
        "expected " + std::to_string(game.state_count * ja) + " rows, got " +
            std::to_string(game.transitions.row_count()));
  } else {
    for (int s = 0; s < game.state_count; ++s) {
      for (int a = 0; a < ja; ++a) {
        double sum = 0.0;
        for (const TransitionEntry& e : game.transition_row(s, a)) {
          if (e.next_state < 0 || e.next_state >= game.state_count) {
            add(idx2("transitions", s, a),
                "next state " + std::to_string(e.next_state) +
                    " out of range");
            continue;
          }
          if (!std::isfinite(e.probability) || e.probability < 0.0 ||
              e.probability > 1.0 + structural_tolerance)
            add(idx3("transitions", s, a, e.next_state),
                "probability outside [0, 1]");
          sum += e.probability;
        }
        if (std::abs(sum - 1.0) > structural_tolerance)
          add(idx2("transitions", s, a),
              "row sums to " + std::to_string(sum) + ", expected 1");
      }
    }
  }

  if (!game.state_labels.empty()) {
    if (static_cast<int>(game.state_labels.size()) != game.state_count)
      add("state_labels", "length must equal state_count");
    else
      for (int s = 0; s < game.state_count; ++s)
        if (!std::isfinite(game.state_labels[s]))
          add("state_labels[" + std::to_string(s) + "]", "label is not finite");
  }

  return report;
}

JointPolicy uniform_policy(const TabularStochasticGame& game) {
  JointPolicy policy;
  policy.state_count = game.state_count;
  policy.action_counts = game.action_counts;
  policy.tables.resize(game.agent_count);
  for (int i = 0; i < game.agent_count; ++i)
    policy.tables[i].assign(
        static_cast<std::size_t>(game.state_count) * game.action_counts[i],
        1.0 / game.action_counts[i]);
  return policy;
}

ValidationReport validate_policy(const TabularStochasticGame& game,
                                 const JointPolicy& policy,
                                 double structural_tolerance) {
  ValidationReport report;
  auto add = [&report](std::string location, std::string message) {
    report.issues.push_back({std::move(location), std::move(message)});
  };

  if (policy.state_count != game.state_count)
    add("policy.state_count", "does not match the game");
  if (policy.action_counts != game.action_counts)
    add("policy.action_counts", "do not match the game");
  if (static_cast<int>(policy.tables.size()) != game.agent_count)
    add("policy.tables", "length must equal agent_count");
  if (!report.ok()) return report;

  for (int i = 0; i < game.agent_count; ++i) {
    const std::size_t want =
        static_cast<std::size_t>(game.state_count) * game.action_counts[i];
    if (policy.tables[i].size() != want) {
      add("policy.tables[" + std::to_string(i) + "]", "wrong shape");
      continue;
    }
    for (int s = 0; s < game.state_count; ++s) {
      double sum = 0.0;
      for (double p : policy.row(i, s)) {
        if (!std::isfinite(p) || p < 0.0)
          add(idx2("policy.tables", i, s), "entry outside [0, 1]");
        sum += p;
      }
      if (std::abs(sum - 1.0) > structural_tolerance)
        add(idx2("policy.tables", i, s),
            "row sums to " + std::to_string(sum) + ", expected 1");
    }
  }
  return report;
}

JointPolicy DeterministicJointPolicy::to_policy(
    const TabularStochasticGame& game) const {
  if (static_cast<int>(choice.size()) != game.agent_count)
    throw std::invalid_argument("deterministic policy: agent count mismatch");
  JointPolicy policy;
  policy.state_count = game.state_count;
  policy.action_counts = game.action_counts;
  policy.tables.resize(game.agent_count);
  for (int i = 0; i < game.agent_count; ++i) {
    if (static_cast<int>(choice[i].size()) != game.state_count)
      throw std::invalid_argument("deterministic policy: state count mismatch");
    policy.tables[i].assign(
        static_cast<std::size_t>(game.state_count) * game.action_counts[i],
        0.0);
    for (int s = 0; s < game.state_count; ++s) {
      int a = choice[i][s];
      if (a < 0 || a >= game.action_counts[i])
        throw std::invalid_argument(
            "deterministic policy: action index out of range");
      policy.row_mut(i, s)[a] = 1.0;
    }
  }
  return policy;
}

int DeterministicJointPolicy::joint_action(const TabularStochasticGame& game,
                                           int state) const {
  std::vector<int> profile(game.agent_count);
  for (int i = 0; i < game.agent_count; ++i) profile[i] = choice[i][state];
  return game.flatten_action(profile);
}

}  // namespace mpg
