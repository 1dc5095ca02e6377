#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mpg/cli.hpp"
#include "mpg/counterexample.hpp"
#include "mpg/equilibrium.hpp"
#include "mpg/evaluation.hpp"
#include "mpg/game.hpp"
#include "mpg/io.hpp"
#include "mpg/learning.hpp"
#include "mpg/potential.hpp"
#include "mpg/report_json.hpp"

namespace py = pybind11;
using namespace mpg;

namespace {

py::object json_to_py(const nlohmann::json& v) {
  switch (v.type()) {
    case nlohmann::json::value_t::null:
      return py::none();
    case nlohmann::json::value_t::boolean:
      return py::bool_(v.get<bool>());
    case nlohmann::json::value_t::number_integer:
      return py::int_(v.get<long long>());
    case nlohmann::json::value_t::number_unsigned:
      return py::int_(v.get<unsigned long long>());
    case nlohmann::json::value_t::number_float:
      return py::float_(v.get<double>());
    case nlohmann::json::value_t::string:
      return py::str(v.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list out;
      for (const nlohmann::json& item : v) out.append(json_to_py(item));
      return out;
    }
    case nlohmann::json::value_t::object: {
      py::dict out;
      for (auto it = v.begin(); it != v.end(); ++it)
        out[py::str(it.key())] = json_to_py(it.value());
      return out;
    }
    default:
      return py::none();
  }
}

using PolicyTables = std::vector<std::vector<std::vector<double>>>;

JointPolicy tables_to_policy(const TabularStochasticGame& game,
                             const PolicyTables& tables) {
  if (static_cast<int>(tables.size()) != game.agent_count)
    throw std::invalid_argument("policy needs one table per agent");
  JointPolicy policy;
  policy.state_count = game.state_count;
  policy.action_counts = game.action_counts;
  policy.tables.resize(game.agent_count);
  for (int i = 0; i < game.agent_count; ++i) {
    if (static_cast<int>(tables[i].size()) != game.state_count)
      throw std::invalid_argument("policy table has wrong state count");
    for (const std::vector<double>& row : tables[i]) {
      if (static_cast<int>(row.size()) != game.action_counts[i])
        throw std::invalid_argument("policy row has wrong action count");
      policy.tables[i].insert(policy.tables[i].end(), row.begin(), row.end());
    }
  }
  const ValidationReport report = validate_policy(game, policy);
  if (!report.ok())
    throw std::invalid_argument("invalid policy: " +
                                report.issues.front().location + ": " +
                                report.issues.front().message);
  return policy;
}

PolicyTables policy_to_tables(const TabularStochasticGame& game,
                              const JointPolicy& policy) {
  PolicyTables out(game.agent_count);
  for (int i = 0; i < game.agent_count; ++i) {
    out[i].resize(game.state_count);
    for (int s = 0; s < game.state_count; ++s) {
      auto row = policy.row(i, s);
      out[i][s].assign(row.begin(), row.end());
    }
  }
  return out;
}

OneShotPotential table_to_potential(const TabularStochasticGame& game,
                                    const std::vector<std::vector<double>>&
                                        rows) {
  OneShotPotential pot;
  pot.state_count = game.state_count;
  pot.joint_action_count = game.joint_action_count();
  pot.anchor_profile.assign(game.agent_count, 0);
  if (static_cast<int>(rows.size()) != game.state_count)
    throw std::invalid_argument("potential needs one row per state");
  for (const std::vector<double>& row : rows) {
    if (static_cast<int>(row.size()) != game.joint_action_count())
      throw std::invalid_argument("potential row has wrong length");
    pot.table.insert(pot.table.end(), row.begin(), row.end());
  }
  pot.verification_residual =
      potential_verification_residual(game, pot.table);
  return pot;
}

std::vector<std::vector<double>> potential_rows(const OneShotPotential& pot) {
  std::vector<std::vector<double>> rows(pot.state_count);
  for (int s = 0; s < pot.state_count; ++s)
    rows[s].assign(
        pot.table.begin() + static_cast<std::size_t>(s) *
                                pot.joint_action_count,
        pot.table.begin() + static_cast<std::size_t>(s + 1) *
                                pot.joint_action_count);
  return rows;
}

}  // namespace

PYBIND11_MODULE(_mpg, m) {
  m.doc() = "Markov potential game toolkit (C++ core)";
  m.attr("__version__") = kToolkitVersion;

  py::register_exception<SolverError>(m, "SolverError");
  py::register_exception<SchemaError>(m, "SchemaError");
  py::register_exception<ValidationError>(m, "GameValidationError");
  py::register_exception<IoError>(m, "IoError");

  py::class_<TabularStochasticGame>(m, "Game")
      .def_readonly("agent_count", &TabularStochasticGame::agent_count)
      .def_readonly("state_count", &TabularStochasticGame::state_count)
      .def_readonly("action_counts", &TabularStochasticGame::action_counts)
      .def_readonly("discount", &TabularStochasticGame::discount)
      .def("joint_action_count", &TabularStochasticGame::joint_action_count)
      .def("payoff", &TabularStochasticGame::payoff, py::arg("agent"),
           py::arg("state"), py::arg("joint_action"))
      .def("state_label", &TabularStochasticGame::state_label)
      .def("flatten_action",
           [](const TabularStochasticGame& g, const std::vector<int>& a) {
             return g.flatten_action(a);
           })
      .def("unflatten_action",
           [](const TabularStochasticGame& g, int flat) {
             return g.unflatten_action(flat);
           })
      .def("transition_row",
           [](const TabularStochasticGame& g, int state, int joint_action) {
             std::vector<std::pair<int, double>> out;
             for (const TransitionEntry& e :
                  g.transition_row(state, joint_action))
               out.emplace_back(e.next_state, e.probability);
             return out;
           })
      .def_static("from_file", &load_game_file)
      .def_static("from_json",
                  [](const std::string& text) {
                    nlohmann::json doc =
                        nlohmann::json::parse(text, nullptr, false);
                    if (doc.is_discarded())
                      throw SchemaError("input is not valid JSON");
                    return game_from_json(doc);
                  })
      .def("to_json", [](const TabularStochasticGame& g) {
        return dump_json(game_to_json(g));
      });

  m.def("validate_game", [](const TabularStochasticGame& g) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const ValidationIssue& issue : validate_game(g).issues)
      out.emplace_back(issue.location, issue.message);
    return out;
  });

  m.def("uniform_policy", [](const TabularStochasticGame& g) {
    return policy_to_tables(g, uniform_policy(g));
  });

  m.def(
      "evaluate_policy",
      [](const TabularStochasticGame& g, const PolicyTables& tables,
         int agent, double tolerance) {
        return evaluate_policy(g, tables_to_policy(g, tables), agent,
                               tolerance)
            .values;
      },
      py::arg("game"), py::arg("policy"), py::arg("agent"),
      py::arg("tolerance") = 1e-10);

  m.def(
      "derive_potential",
      [](const TabularStochasticGame& g, double tolerance) {
        nlohmann::json doc;
        PotentialSearchResult search = find_one_shot_potential(g, tolerance);
        doc["found"] = search.found();
        if (search.found()) {
          OneShotPotential calibrated =
              calibrate_state_offsets(g, *search.potential);
          doc["verification_residual"] = calibrated.verification_residual;
          py::dict out = json_to_py(doc);
          out["table"] = py::cast(potential_rows(calibrated));
          return py::object(out);
        }
        doc["deviation_cycle"] = cycle_to_json(*search.cycle);
        return json_to_py(doc);
      },
      py::arg("game"), py::arg("tolerance") = 1e-9);

  m.def(
      "check_conditions",
      [](const TabularStochasticGame& g,
         const std::vector<std::vector<double>>& potential,
         double tolerance) {
        const OneShotPotential pot = table_to_potential(g, potential);
        nlohmann::json doc;
        doc[condition_name(ConditionId::AgentIndependentTransitions)] =
            condition_to_json(
                check_agent_independent_transitions(g, tolerance));
        doc[condition_name(ConditionId::DummyTerms)] = condition_to_json(
            check_dummy_terms(g, pot, 1e-4, tolerance));
        doc[condition_name(ConditionId::StateTransitivity)] =
            condition_to_json(check_state_transitivity(g, pot, tolerance));
        doc[condition_name(ConditionId::CompleteStateTransitivity)] =
            condition_to_json(
                check_complete_state_transitivity(g, pot, tolerance));
        return json_to_py(doc);
      },
      py::arg("game"), py::arg("potential"), py::arg("tolerance") = 1e-9);

  m.def(
      "solve_dual",
      [](const TabularStochasticGame& g,
         const std::vector<std::vector<double>>& potential,
         double solver_tolerance) {
        const Mdp dual = build_dual_mdp(g, table_to_potential(g, potential));
        const MdpSolution sol = value_iteration(dual, solver_tolerance);
        nlohmann::json doc;
        doc["values"] = sol.values;
        doc["greedy_flat"] = sol.greedy;
        doc["greedy_choices"] = extract_joint_policy(g, sol.greedy).choice;
        doc["tie_states"] = sol.tie_states;
        doc["iterations"] = sol.iterations;
        doc["final_delta"] = sol.final_delta;
        return json_to_py(doc);
      },
      py::arg("game"), py::arg("potential"),
      py::arg("solver_tolerance") = 1e-10);

  m.def(
      "verify_nash",
      [](const TabularStochasticGame& g, const PolicyTables& tables,
         double epsilon, double solver_tolerance) {
        return json_to_py(nash_to_json(verify_nash(
            g, tables_to_policy(g, tables), epsilon, solver_tolerance)));
      },
      py::arg("game"), py::arg("policy"), py::arg("epsilon"),
      py::arg("solver_tolerance") = 1e-10);

  m.def(
      "nash_gap",
      [](const TabularStochasticGame& g, const PolicyTables& tables,
         double solver_tolerance) {
        return nash_gap(g, tables_to_policy(g, tables), solver_tolerance);
      },
      py::arg("game"), py::arg("policy"),
      py::arg("solver_tolerance") = 1e-10);

  m.def("project_to_simplex", [](const std::vector<double>& v) {
    return project_to_simplex(v);
  });

  m.def("horizon_for_epsilon", &horizon_for_epsilon, py::arg("epsilon"),
        py::arg("discount"), py::arg("h_max"));

  m.def(
      "sample_trajectory",
      [](const TabularStochasticGame& g, const PolicyTables& tables,
         int initial_state, int length, std::uint64_t seed) {
        const Trajectory traj = sample_trajectory(
            g, tables_to_policy(g, tables), initial_state, length, seed);
        py::dict out;
        out["states"] = py::cast(traj.states);
        out["joint_actions"] = py::cast(traj.joint_actions);
        out["payoffs"] = py::cast(traj.payoffs);
        out["seed"] = py::cast(traj.seed);
        return out;
      },
      py::arg("game"), py::arg("policy"), py::arg("initial_state"),
      py::arg("length"), py::arg("seed"));

  m.def(
      "run_psga",
      [](const TabularStochasticGame& g, double eta, int batch, long iters,
         std::uint64_t seed, int gap_every, double gap_solver_tolerance) {
        LearnerConfig config;
        config.eta = eta;
        config.batch_horizon = batch;
        config.iterations = iters;
        config.seed = seed;
        config.gap_check_every = gap_every;
        config.gap_solver_tolerance = gap_solver_tolerance;
        const LearningTrace trace = run_psga(g, config);
        std::ostringstream csv;
        write_trace_csv(trace, csv);
        py::dict out;
        out["csv"] = py::str(csv.str());
        py::list gaps;
        for (const LearningTrace::GapRow& row : trace.gaps)
          gaps.append(py::make_tuple(row.iteration, row.gap));
        out["gaps"] = gaps;
        out["final_policy"] = py::cast(policy_to_tables(g, trace.final_policy));
        return out;
      },
      py::arg("game"), py::arg("eta") = 0.05, py::arg("batch") = 8,
      py::arg("iters") = 2000, py::arg("seed") = 0,
      py::arg("gap_every") = 0, py::arg("gap_solver_tolerance") = 1e-8);

  m.def(
      "discretize_counterexample",
      [](int grid, double gamma) {
        DiscretizationConfig config;
        config.grid_size = grid;
        config.discount = gamma;
        return discretize(config);
      },
      py::arg("grid") = 101, py::arg("gamma") = 0.9);

  m.def(
      "known_policies",
      [](int grid, double gamma) {
        DiscretizationConfig config;
        config.grid_size = grid;
        config.discount = gamma;
        const KnownPolicies known = known_policies(config);
        py::dict out;
        out["dual_optimal"] = py::cast(known.dual_optimal.choice);
        out["nash"] = py::cast(known.nash.choice);
        return out;
      },
      py::arg("grid") = 101, py::arg("gamma") = 0.9);

  m.def(
      "counterexample_report",
      [](int grid, double gamma, double tolerance, double solver_tolerance) {
        DiscretizationConfig config;
        config.grid_size = grid;
        config.discount = gamma;
        return json_to_py(counterexample_to_json(
            reproduce_report(config, tolerance, solver_tolerance)));
      },
      py::arg("grid") = 101, py::arg("gamma") = 0.9,
      py::arg("tolerance") = 1e-9, py::arg("solver_tolerance") = 1e-10);

  m.def("run_command", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
