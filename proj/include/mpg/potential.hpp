#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpg/evaluation.hpp"
#include "mpg/game.hpp"

namespace mpg {

/// Per-state exact potential of the stage games: for every agent i and every
/// unilateral deviation a_i -> a_i', the change in r_i equals the change in
/// the potential. Stored as a [state][joint_action] table.
struct OneShotPotential {
  int state_count = 0;
  int joint_action_count = 0;
  std::vector<double> table;
  std::vector<int> anchor_profile;       // one action index per agent
  double verification_residual = 0.0;    // max deviation-identity violation

  double value(int state, int joint_action) const {
    return table[static_cast<std::size_t>(state) * joint_action_count +
                 joint_action];
  }
};

/// Four-step unilateral-deviation cycle witnessing that no one-shot potential
/// exists. Starting from `base_profile` at `state`, agent_a moves to
/// alt_action_a, agent_b to alt_action_b, agent_a back, agent_b back; the
/// signed sum of the movers' payoff changes is `payoff_sum` (zero for every
/// such cycle iff a potential exists).
struct DeviationCycle {
  int state = 0;
  int agent_a = 0;
  int agent_b = 0;
  std::vector<int> base_profile;
  int alt_action_a = 0;
  int alt_action_b = 0;
  double payoff_sum = 0.0;
};

struct PotentialSearchResult {
  std::optional<OneShotPotential> potential;
  std::optional<DeviationCycle> cycle;
  bool found() const { return potential.has_value(); }
};

/// Builds the candidate potential by unilateral-deviation path sums from the
/// all-zero anchor profile (agents switched in index order), then verifies
/// the deviation identity exhaustively. On failure returns the
/// largest-magnitude four-step deviation cycle instead.
PotentialSearchResult find_one_shot_potential(const TabularStochasticGame& game,
                                              double tolerance = 1e-9);

/// Max deviation-identity violation of an arbitrary candidate table.
double potential_verification_residual(const TabularStochasticGame& game,
                                       std::span<const double> table);

/// Re-anchors the per-state additive constants: adds kappa(s) chosen so that
/// agent 0's residual at the anchor profile is identical across states, with
/// kappa(state 0) = 0. Leaves all deviation differences untouched.
OneShotPotential calibrate_state_offsets(const TabularStochasticGame& game,
                                         const OneShotPotential& potential);

/// Residual tensor d[agent][state][joint_action] = r_i - Phi, flattened
/// agent-major.
std::vector<double> residual_table(const TabularStochasticGame& game,
                                   const OneShotPotential& potential);

enum class ConditionId {
  AgentIndependentTransitions,   // C1
  DummyTerms,                    // C2
  StateTransitivity,             // C3
  CompleteStateTransitivity,     // CST
};

const char* condition_name(ConditionId id);

struct ConditionReport {
  ConditionId condition{};
  bool passed = false;
  bool vacuous = false;          // single-state CST
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::vector<int> witness;      // indices attaining max_residual
  std::string witness_note;      // names the witness indices
  // CST spot checks of the expectation form on random stochastic policies.
  double stochastic_residual = 0.0;
  bool spot_checks_consistent = true;
};

/// C1: the kernel row is the same for every joint action at each state.
/// Witness (s, a, b, s') attains max |p(s'|s,a) - p(s'|s,b)|.
ConditionReport check_agent_independent_transitions(
    const TabularStochasticGame& game, double tolerance = 1e-9);

/// C2 (dummy terms), two sub-checks that must both pass:
/// (a) structural: d_i = r_i - Phi is independent of agent i's own action;
/// (b) gradient: all simplex-tangent directional derivatives of
///     U_i(s) = E[sum_t gamma^t d_i(s_t, a_t) | s_0 = s] w.r.t. pi_i(.|s)
///     vanish, estimated by central finite differences with step fd_step.
/// The derivative is probed at the uniform joint policy and additionally at
/// `random_probe_count` seeded interior policies; a single probe point can be
/// blind to violations that only show up when opponents mix differently
/// across states (the bundled counterexample is exactly such a game).
/// The condition's displayed form quantifies over a second state s' that
/// never appears; only the per-state form is checked.
ConditionReport check_dummy_terms(const TabularStochasticGame& game,
                                  const OneShotPotential& potential,
                                  double fd_step = 1e-4,
                                  double tolerance = 1e-9,
                                  int random_probe_count = 3,
                                  std::uint64_t probe_seed = 9001);

/// C3 (state transitivity): r_i(s,a) - r_i(s',a) = Phi(s,a) - Phi(s',a),
/// i.e. each residual d_i(., a) is constant across states per joint action.
/// Witness (i, s_hi, s_lo, a).
ConditionReport check_state_transitivity(const TabularStochasticGame& game,
                                         const OneShotPotential& potential,
                                         double tolerance = 1e-9);

/// Complete state transitivity: for product policies the expectation form
/// reduces to max over (i, s != s', a, b) of |d_i(s,a) - d_i(s',b)| being
/// within tolerance (each agent's residual is one global constant when the
/// game has at least two states). Witness (i, s_hi, a_hi, s_lo, b_lo).
/// Additionally spot-checks `spot_check_count` seeded stochastic policies
/// against the expectation form; `spot_checks_consistent` records that no
/// spot check contradicted the deterministic verdict. Single-state games
/// pass vacuously.
ConditionReport check_complete_state_transitivity(
    const TabularStochasticGame& game, const OneShotPotential& potential,
    double tolerance = 1e-9, int spot_check_count = 100,
    std::uint64_t spot_seed = 4242);

struct AlignmentReport {
  int agent = 0;
  int start_state = 0;
  double delta_value = 0.0;      // V_i^pi - V_i^pi'
  double delta_potential = 0.0;  // B^pi - B^pi'
  double misalignment = 0.0;     // |delta_value - delta_potential|
};

/// Compares a unilateral deviation's effect on the deviator's value against
/// its effect on the potential value. `deviation` must differ from `policy`
/// only in `agent`'s table (enforced).
AlignmentReport check_value_potential_alignment(
    const TabularStochasticGame& game, const OneShotPotential& potential,
    const JointPolicy& policy, const JointPolicy& deviation, int agent,
    int start_state, double solver_tolerance = 1e-10);

struct CstGame {
  TabularStochasticGame game;
  OneShotPotential potential;
  std::vector<double> residual_constants;  // the c_i actually used
};

/// Random game satisfying complete state transitivity by construction:
/// r_i = Phi + c_i with Phi entries and c_i drawn uniformly from [-1, 1] and
/// a random row-stochastic kernel.
CstGame generate_cst_game(std::uint64_t seed, int agent_count, int state_count,
                          const std::vector<int>& action_counts,
                          double discount);

inline ValueFunction potential_value(const TabularStochasticGame& game,
                                     const OneShotPotential& potential,
                                     const JointPolicy& policy,
                                     double tolerance = 1e-10) {
  return potential_value(game, std::span<const double>(potential.table),
                         policy, tolerance);
}

}  // namespace mpg
