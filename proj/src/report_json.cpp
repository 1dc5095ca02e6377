#include "mpg/report_json.hpp"

namespace mpg {

nlohmann::json condition_to_json(const ConditionReport& report) {
  nlohmann::json doc;
  doc["condition"] = condition_name(report.condition);
  doc["passed"] = report.passed;
  doc["vacuous"] = report.vacuous;
  doc["max_residual"] = report.max_residual;
  doc["tolerance"] = report.tolerance;
  doc["witness"] = report.witness;
  doc["witness_note"] = report.witness_note;
  if (report.condition == ConditionId::CompleteStateTransitivity) {
    doc["stochastic_residual"] = report.stochastic_residual;
    doc["spot_checks_consistent"] = report.spot_checks_consistent;
  }
  return doc;
}

nlohmann::json nash_to_json(const NashReport& report) {
  nlohmann::json doc;
  doc["passed"] = report.passed;
  doc["epsilon"] = report.epsilon;
  doc["solver_tolerance"] = report.solver_tolerance;
  doc["per_agent_gap"] = report.per_agent_gap;
  doc["witness_agent"] = report.witness_agent;
  doc["witness_state"] = report.witness_state;
  doc["policy_values"] = report.policy_values;
  doc["best_response_values"] = report.best_response_values;
  return doc;
}

nlohmann::json alignment_to_json(const AlignmentReport& report) {
  nlohmann::json doc;
  doc["agent"] = report.agent;
  doc["start_state"] = report.start_state;
  doc["delta_value"] = report.delta_value;
  doc["delta_potential"] = report.delta_potential;
  doc["misalignment"] = report.misalignment;
  return doc;
}

nlohmann::json cycle_to_json(const DeviationCycle& cycle) {
  nlohmann::json doc;
  doc["state"] = cycle.state;
  doc["agent_a"] = cycle.agent_a;
  doc["agent_b"] = cycle.agent_b;
  doc["base_profile"] = cycle.base_profile;
  doc["alt_action_a"] = cycle.alt_action_a;
  doc["alt_action_b"] = cycle.alt_action_b;
  doc["payoff_sum"] = cycle.payoff_sum;
  return doc;
}

nlohmann::json counterexample_to_json(const CounterexampleReport& report) {
  nlohmann::json doc;
  doc["grid_size"] = report.config.grid_size;
  doc["discount"] = report.config.discount;
  doc["potential_found"] = report.potential_found;
  doc["potential_residual"] = report.potential_residual;
  nlohmann::json conditions;
  conditions[condition_name(report.c1.condition)] =
      condition_to_json(report.c1);
  conditions[condition_name(report.c2.condition)] =
      condition_to_json(report.c2);
  conditions[condition_name(report.c3.condition)] =
      condition_to_json(report.c3);
  conditions[condition_name(report.cst.condition)] =
      condition_to_json(report.cst);
  doc["conditions"] = std::move(conditions);
  doc["dual_values"] = report.dual_values;
  doc["dual_greedy"] = report.dual_greedy;
  doc["dual_tie_states"] = report.dual_tie_states;
  doc["dual_matches_known"] = report.dual_matches_known;
  doc["dual_nash"] = nash_to_json(report.dual_nash);
  doc["known_nash"] = nash_to_json(report.known_nash);
  doc["gap_oracle"] = report.gap_oracle;
  doc["alignment"] = alignment_to_json(report.alignment);
  doc["nash_values_state0"] = report.nash_values_state0;
  doc["nash_scaled_values_state0"] = report.nash_scaled_values_state0;
  doc["nash_cycle_averages_state0"] = report.nash_cycle_averages_state0;
  doc["matches_expected"] = report.matches_expected;
  doc["mismatches"] = report.mismatches;
  return doc;
}

}  // namespace mpg
