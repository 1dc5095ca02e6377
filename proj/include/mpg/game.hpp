#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpg {

inline constexpr const char* kToolkitVersion = "1.0.0";
inline constexpr int kFormatVersion = 1;

/// Thrown when an iterative solver fails to reach its tolerance within the
/// iteration budget.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TransitionEntry {
  int next_state;
  double probability;
};

/// Row-sparse transition table (CSR). Rows are appended in order; a row holds
/// only the nonzero next-state entries.
class TransitionKernel {
 public:
  void reserve(int rows, std::size_t entries_hint = 0) {
    offsets_.reserve(static_cast<std::size_t>(rows) + 1);
    if (entries_hint > 0) entries_.reserve(entries_hint);
  }

  void push_row(std::span<const TransitionEntry> entries) {
    entries_.insert(entries_.end(), entries.begin(), entries.end());
    offsets_.push_back(static_cast<int>(entries_.size()));
  }

  void push_row(std::initializer_list<TransitionEntry> entries) {
    push_row(std::span<const TransitionEntry>(entries.begin(), entries.size()));
  }

  std::span<const TransitionEntry> row(int r) const {
    return {entries_.data() + offsets_[r],
            static_cast<std::size_t>(offsets_[r + 1] - offsets_[r])};
  }

  int row_count() const { return static_cast<int>(offsets_.size()) - 1; }
  std::size_t entry_count() const { return entries_.size(); }

 private:
  std::vector<int> offsets_{0};
  std::vector<TransitionEntry> entries_;
};

/// Finite discounted stochastic game in tabular form.
///
/// Joint actions are flattened with the mixed-radix law shared by every file
/// format and report in the toolkit: agent 0 varies fastest, i.e.
/// flat = sum_i a_i * prod_{j<i} |A_j|.
///
/// `payoffs` is laid out [agent][state][joint_action] (agent-major), and the
/// transition row for (state s, joint action a) is row s * JA + a of
/// `transitions`. `state_labels` optionally attaches a real-valued coordinate
/// to each state (the bundled counterexample uses grid coordinates); when
/// absent the label of state s is s itself.
struct TabularStochasticGame {
  int agent_count = 0;
  int state_count = 0;
  std::vector<int> action_counts;
  double discount = 0.0;
  std::vector<double> payoffs;
  TransitionKernel transitions;
  std::vector<double> state_labels;

  int joint_action_count() const {
    int n = 1;
    for (int c : action_counts) n *= c;
    return n;
  }

  int flatten_action(std::span<const int> actions) const;
  void unflatten_action(int flat, std::span<int> out) const;
  std::vector<int> unflatten_action(int flat) const;

  double payoff(int agent, int state, int joint_action) const {
    return payoffs[payoff_index(agent, state, joint_action)];
  }
  double& payoff_at(int agent, int state, int joint_action) {
    return payoffs[payoff_index(agent, state, joint_action)];
  }
  /// [state][joint_action] table of one agent's payoffs.
  std::span<const double> payoff_table(int agent) const {
    std::size_t block =
        static_cast<std::size_t>(state_count) * joint_action_count();
    return {payoffs.data() + block * agent, block};
  }

  std::span<const TransitionEntry> transition_row(int state,
                                                  int joint_action) const {
    return transitions.row(state * joint_action_count() + joint_action);
  }

  double state_label(int state) const {
    return state_labels.empty() ? static_cast<double>(state)
                                : state_labels[state];
  }

 private:
  std::size_t payoff_index(int agent, int state, int joint_action) const {
    return (static_cast<std::size_t>(agent) * state_count + state) *
               joint_action_count() +
           joint_action;
  }
};

struct ValidationIssue {
  std::string location;  // tensor path, e.g. "transitions[0][3]"
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

/// Checks every structural invariant of the game (shapes, finite entries,
/// probability rows summing to 1 within `structural_tolerance`, discount in
/// (0,1)) and reports each violation with its tensor indices.
ValidationReport validate_game(const TabularStochasticGame& game,
                               double structural_tolerance = 1e-12);

/// Product policy: one row-stochastic table per agent, laid out
/// [state][action] row-major.
struct JointPolicy {
  int state_count = 0;
  std::vector<int> action_counts;
  std::vector<std::vector<double>> tables;

  double prob(int agent, int state, int action) const {
    return tables[agent][static_cast<std::size_t>(state) *
                             action_counts[agent] +
                         action];
  }
  std::span<const double> row(int agent, int state) const {
    return {tables[agent].data() +
                static_cast<std::size_t>(state) * action_counts[agent],
            static_cast<std::size_t>(action_counts[agent])};
  }
  std::span<double> row_mut(int agent, int state) {
    return {tables[agent].data() +
                static_cast<std::size_t>(state) * action_counts[agent],
            static_cast<std::size_t>(action_counts[agent])};
  }
};

JointPolicy uniform_policy(const TabularStochasticGame& game);

ValidationReport validate_policy(const TabularStochasticGame& game,
                                 const JointPolicy& policy,
                                 double structural_tolerance = 1e-12);

/// One action index per (agent, state).
struct DeterministicJointPolicy {
  std::vector<std::vector<int>> choice;

  JointPolicy to_policy(const TabularStochasticGame& game) const;
  int joint_action(const TabularStochasticGame& game, int state) const;
};

struct ValueFunction {
  std::vector<double> values;  // one per state
  std::string source_tag;      // e.g. "agent:0" or "potential"
};

/// Sampled rollout. |states| = length + 1, |joint_actions| = |payoffs| =
/// length; payoffs[t][i] is agent i's payoff at step t.
struct Trajectory {
  std::vector<int> states;
  std::vector<std::vector<int>> joint_actions;
  std::vector<std::vector<double>> payoffs;
  std::uint64_t seed = 0;
};

}  // namespace mpg
