#include "mpg/cli.hpp"

#include <ctime>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpg/counterexample.hpp"
#include "mpg/equilibrium.hpp"
#include "mpg/evaluation.hpp"
#include "mpg/game.hpp"
#include "mpg/io.hpp"
#include "mpg/learning.hpp"
#include "mpg/potential.hpp"
#include "mpg/report_json.hpp"

namespace mpg {

namespace {

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json report_skeleton(const std::string& command,
                               const std::string& inputs_digest) {
  nlohmann::json doc;
  doc["format_version"] = kFormatVersion;
  doc["toolkit_version"] = kToolkitVersion;
  doc["command"] = command;
  doc["generated_at"] = timestamp_utc();
  doc["inputs_digest"] = inputs_digest;
  return doc;
}

struct LoadedGame {
  TabularStochasticGame game;
  std::vector<double> embedded_potential;
  std::string digest;
  std::string text;
};

LoadedGame load_game_with_digest(const std::string& path) {
  LoadedGame out;
  out.text = read_text_file(path);
  out.digest = fnv1a_hex(out.text);
  nlohmann::json doc = nlohmann::json::parse(out.text, nullptr, false);
  if (doc.is_discarded())
    throw SchemaError("file " + path + " is not valid JSON");
  out.game = game_from_json(doc);
  out.embedded_potential = potential_from_json(doc, out.game);
  return out;
}

void emit(const nlohmann::json& doc, const std::string& out_path,
          std::ostream& out) {
  const std::string text = dump_json(doc);
  if (out_path.empty())
    out << text;
  else
    write_text_file(out_path, text);
}

/// Resolves the potential an analysis should use: the document's own table
/// when present, otherwise the derived-and-calibrated one. `found` is false
/// only when derivation failed; `cycle` then explains why.
struct ResolvedPotential {
  bool found = false;
  bool from_document = false;
  OneShotPotential potential;
  std::optional<DeviationCycle> cycle;
};

ResolvedPotential resolve_potential(const LoadedGame& input,
                                    double tolerance) {
  ResolvedPotential out;
  if (!input.embedded_potential.empty()) {
    out.found = true;
    out.from_document = true;
    out.potential.state_count = input.game.state_count;
    out.potential.joint_action_count = input.game.joint_action_count();
    out.potential.table = input.embedded_potential;
    out.potential.anchor_profile.assign(input.game.agent_count, 0);
    out.potential.verification_residual =
        potential_verification_residual(input.game, out.potential.table);
    return out;
  }
  PotentialSearchResult search =
      find_one_shot_potential(input.game, tolerance);
  if (search.found()) {
    out.found = true;
    out.potential = calibrate_state_offsets(input.game, *search.potential);
  } else {
    out.cycle = search.cycle;
  }
  return out;
}

int cmd_analyze(const std::string& game_path, double tolerance,
                const std::string& out_path, bool assert_mode,
                std::ostream& out, std::ostream& err) {
  const LoadedGame input = load_game_with_digest(game_path);
  nlohmann::json doc = report_skeleton("analyze", input.digest);
  doc["tolerance"] = tolerance;

  const ResolvedPotential resolved = resolve_potential(input, tolerance);
  nlohmann::json pot;
  pot["found"] = resolved.found;
  pot["source"] = resolved.from_document ? "document" : "derived";
  if (resolved.found) {
    pot["verification_residual"] = resolved.potential.verification_residual;
    pot["anchor_profile"] = resolved.potential.anchor_profile;
    pot["table"] = nullptr;
    {
      // Emit the potential as [state][joint_action] rows.
      nlohmann::json rows = nlohmann::json::array();
      const int ja = resolved.potential.joint_action_count;
      for (int s = 0; s < resolved.potential.state_count; ++s) {
        nlohmann::json row = nlohmann::json::array();
        for (int a = 0; a < ja; ++a)
          row.push_back(resolved.potential.value(s, a));
        rows.push_back(std::move(row));
      }
      pot["table"] = std::move(rows);
    }
  } else if (resolved.cycle) {
    pot["deviation_cycle"] = cycle_to_json(*resolved.cycle);
  }
  doc["potential"] = std::move(pot);

  nlohmann::json conditions;
  const ConditionReport c1 =
      check_agent_independent_transitions(input.game, tolerance);
  conditions[condition_name(ConditionId::AgentIndependentTransitions)] =
      condition_to_json(c1);
  bool all_passed = c1.passed;
  if (resolved.found) {
    const ConditionReport c2 =
        check_dummy_terms(input.game, resolved.potential, 1e-4, tolerance);
    const ConditionReport c3 =
        check_state_transitivity(input.game, resolved.potential, tolerance);
    const ConditionReport cst = check_complete_state_transitivity(
        input.game, resolved.potential, tolerance);
    conditions[condition_name(ConditionId::DummyTerms)] =
        condition_to_json(c2);
    conditions[condition_name(ConditionId::StateTransitivity)] =
        condition_to_json(c3);
    conditions[condition_name(ConditionId::CompleteStateTransitivity)] =
        condition_to_json(cst);
    all_passed = all_passed && c2.passed && c3.passed && cst.passed;
  } else {
    conditions[condition_name(ConditionId::DummyTerms)] = nullptr;
    conditions[condition_name(ConditionId::StateTransitivity)] = nullptr;
    conditions[condition_name(ConditionId::CompleteStateTransitivity)] =
        nullptr;
    all_passed = false;
  }
  doc["conditions"] = std::move(conditions);
  emit(doc, out_path, out);

  if (assert_mode && !(resolved.found && all_passed)) {
    err << "assert: potential/conditions did not all pass\n";
    return kExitAssertFailed;
  }
  return kExitOk;
}

int cmd_solve_dual(const std::string& game_path, double tolerance,
                   double solver_tolerance, const std::string& out_path,
                   std::ostream& out, std::ostream& err) {
  const LoadedGame input = load_game_with_digest(game_path);
  const ResolvedPotential resolved = resolve_potential(input, tolerance);
  if (!resolved.found) {
    err << "solve-dual: the game has no one-shot potential";
    if (resolved.cycle)
      err << " (deviation cycle with payoff sum "
          << resolved.cycle->payoff_sum << " at state "
          << resolved.cycle->state << ")";
    err << "\n";
    return kExitInput;
  }
  const Mdp dual = build_dual_mdp(input.game, resolved.potential);
  const MdpSolution solution = value_iteration(dual, solver_tolerance);
  const DeterministicJointPolicy greedy =
      extract_joint_policy(input.game, solution.greedy);

  nlohmann::json doc = report_skeleton("solve-dual", input.digest);
  doc["solver_tolerance"] = solver_tolerance;
  doc["potential_source"] = resolved.from_document ? "document" : "derived";
  doc["values"] = solution.values;
  doc["greedy_flat"] = solution.greedy;
  doc["greedy_choices"] = greedy.choice;
  doc["tie_states"] = solution.tie_states;
  doc["iterations"] = solution.iterations;
  doc["final_delta"] = solution.final_delta;
  emit(doc, out_path, out);
  return kExitOk;
}

int cmd_verify_nash(const std::string& game_path,
                    const std::string& policy_path, double epsilon,
                    double solver_tolerance, const std::string& out_path,
                    bool assert_mode, std::ostream& out, std::ostream& err) {
  const LoadedGame input = load_game_with_digest(game_path);
  const std::string policy_text = read_text_file(policy_path);
  nlohmann::json policy_doc = nlohmann::json::parse(policy_text, nullptr,
                                                    false);
  if (policy_doc.is_discarded())
    throw SchemaError("file " + policy_path + " is not valid JSON");
  const ParsedPolicy parsed = policy_from_json(policy_doc, input.game);

  const NashReport report = verify_nash(input.game, parsed.as_policy(input.game),
                                        epsilon, solver_tolerance);
  nlohmann::json doc = report_skeleton(
      "verify-nash", fnv1a_hex(input.text + "\n" + policy_text));
  doc["nash"] = nash_to_json(report);
  emit(doc, out_path, out);

  if (assert_mode && !report.passed) {
    err << "assert: policy is not an epsilon-Nash equilibrium (largest gap "
        << report.per_agent_gap[report.witness_agent] << ")\n";
    return kExitAssertFailed;
  }
  return kExitOk;
}

int cmd_learn(const std::string& game_path, const LearnerConfig& config,
              const std::string& out_path, std::ostream& out,
              std::ostream& /*err*/) {
  const LoadedGame input = load_game_with_digest(game_path);
  const LearningTrace trace = run_psga(input.game, config);
  std::ostringstream csv;
  write_trace_csv(trace, csv);
  if (out_path.empty())
    out << csv.str();
  else
    write_text_file(out_path, csv.str());
  return kExitOk;
}

std::string trace_path_for(const std::string& out_path) {
  const std::size_t slash = out_path.find_last_of('/');
  const std::size_t dot = out_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return out_path + ".trace.csv";
  return out_path.substr(0, dot) + ".trace.csv";
}

int cmd_counterexample(int grid, double gamma, double tolerance,
                       double solver_tolerance, const LearnerConfig& learn,
                       const std::string& out_path,
                       std::string trace_out_path, bool assert_mode,
                       std::ostream& out, std::ostream& err) {
  DiscretizationConfig config;
  config.grid_size = grid;
  config.discount = gamma;
  CounterexampleReport report =
      reproduce_report(config, tolerance, solver_tolerance);

  std::ostringstream digest_src;
  digest_src << "counterexample grid=" << grid << " gamma=" << gamma
             << " seed=" << learn.seed << " iters=" << learn.iterations;
  nlohmann::json doc =
      report_skeleton("counterexample", fnv1a_hex(digest_src.str()));
  doc["tolerance"] = tolerance;
  doc["solver_tolerance"] = solver_tolerance;
  doc["report"] = counterexample_to_json(report);

  // Plot-ready trace: run the independent learners on the same grid game
  // and emit their payoff/action CSV.
  if (trace_out_path.empty() && !out_path.empty())
    trace_out_path = trace_path_for(out_path);
  const TabularStochasticGame game = discretize(config);
  const LearningTrace trace = run_psga(game, learn);
  nlohmann::json learning;
  learning["eta"] = learn.eta;
  learning["batch_horizon"] = learn.batch_horizon;
  learning["iterations"] = learn.iterations;
  learning["seed"] = learn.seed;
  learning["gap_check_every"] = learn.gap_check_every;
  nlohmann::json gap_rows = nlohmann::json::array();
  for (const LearningTrace::GapRow& row : trace.gaps) {
    nlohmann::json g;
    g["iteration"] = row.iteration;
    g["nash_gap"] = row.gap;
    gap_rows.push_back(std::move(g));
  }
  learning["gaps"] = std::move(gap_rows);
  learning["trace_csv"] =
      trace_out_path.empty() ? nlohmann::json() : nlohmann::json(trace_out_path);
  doc["learning"] = std::move(learning);

  if (!trace_out_path.empty()) {
    std::ostringstream csv;
    write_trace_csv(trace, csv);
    write_text_file(trace_out_path, csv.str());
  }
  emit(doc, out_path, out);

  if (assert_mode && !report.matches_expected) {
    err << "assert: counterexample verdicts differ from the expected"
           " vector:\n";
    for (const std::string& m : report.mismatches) err << "  " << m << "\n";
    return kExitAssertFailed;
  }
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"Markov potential game toolkit"};
  app.require_subcommand(1);

  std::string game_path, policy_path, out_path, trace_out_path;
  double tolerance = 1e-9;
  double solver_tolerance = 1e-10;
  double epsilon = 1e-6;
  bool assert_mode = false;
  int grid = 101;
  double gamma = 0.9;
  LearnerConfig learn_config;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Recover/verify a potential and run all condition checks");
  analyze->add_option("game", game_path, "GameDocument JSON path")
      ->required();
  analyze->add_option("--tolerance", tolerance, "checker tolerance");
  analyze->add_option("--out", out_path, "write the report here");
  analyze->add_flag("--assert", assert_mode,
                    "exit 3 unless the potential exists and all checks pass");

  CLI::App* solve = app.add_subcommand(
      "solve-dual", "Build the dual MDP and run value iteration");
  solve->add_option("game", game_path, "GameDocument JSON path")->required();
  solve->add_option("--tolerance", tolerance, "potential checker tolerance");
  solve->add_option("--solver-tolerance", solver_tolerance,
                    "value-iteration tolerance");
  solve->add_option("--out", out_path, "write the report here");

  CLI::App* verify = app.add_subcommand(
      "verify-nash", "Check a policy for epsilon-Nash at every state");
  verify->add_option("game", game_path, "GameDocument JSON path")->required();
  verify->add_option("policy", policy_path, "PolicyDocument JSON path")
      ->required();
  verify->add_option("--epsilon", epsilon, "equilibrium slack")->required();
  verify->add_option("--solver-tolerance", solver_tolerance,
                     "policy/best-response solver tolerance");
  verify->add_option("--out", out_path, "write the report here");
  verify->add_flag("--assert", assert_mode, "exit 3 unless the check passes");

  CLI::App* learn = app.add_subcommand(
      "learn", "Run projected stochastic gradient ascent, emit a CSV trace");
  learn->add_option("game", game_path, "GameDocument JSON path")->required();
  learn->add_option("--eta", learn_config.eta, "step size");
  learn->add_option("--batch", learn_config.batch_horizon,
                    "batch length T (T+1 steps per episode)");
  learn->add_option("--iters", learn_config.iterations, "iteration count");
  learn->add_option("--seed", learn_config.seed, "RNG seed");
  learn->add_option("--gap-every", learn_config.gap_check_every,
                    "nash_gap stride (0 disables)");
  learn->add_option("--gap-tolerance", learn_config.gap_solver_tolerance,
                    "solver tolerance for logged gaps");
  learn->add_option("--out", out_path, "write the CSV here");

  CLI::App* repro = app.add_subcommand(
      "counterexample", "Reproduce the bundled counterexample report");
  repro->add_option("--grid", grid, "grid size N (states and both actions)");
  repro->add_option("--gamma", gamma, "discount factor");
  repro->add_option("--tolerance", tolerance, "checker tolerance");
  repro->add_option("--solver-tolerance", solver_tolerance,
                    "value-iteration/evaluation tolerance");
  repro->add_option("--seed", learn_config.seed, "trace RNG seed");
  repro->add_option("--learn-iters", learn_config.iterations,
                    "embedded PSGA iterations");
  repro->add_option("--learn-eta", learn_config.eta, "embedded PSGA step");
  repro->add_option("--learn-batch", learn_config.batch_horizon,
                    "embedded PSGA batch length");
  repro->add_option("--gap-every", learn_config.gap_check_every,
                    "embedded trace nash_gap stride");
  repro->add_option("--out", out_path, "write the report here");
  repro->add_option("--trace-out", trace_out_path,
                    "write the learning CSV here");
  repro->add_flag("--assert", assert_mode,
                  "exit 3 unless the expected verdict vector matches");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (analyze->parsed())
      return cmd_analyze(game_path, tolerance, out_path, assert_mode, out,
                         err);
    if (solve->parsed())
      return cmd_solve_dual(game_path, tolerance, solver_tolerance, out_path,
                            out, err);
    if (verify->parsed())
      return cmd_verify_nash(game_path, policy_path, epsilon,
                             solver_tolerance, out_path, assert_mode, out,
                             err);
    if (learn->parsed())
      return cmd_learn(game_path, learn_config, out_path, out, err);
    if (repro->parsed()) {
      if (!repro->count("--gap-every")) learn_config.gap_check_every = 500;
      learn_config.gap_solver_tolerance = 1e-6;
      return cmd_counterexample(grid, gamma, tolerance, solver_tolerance,
                                learn_config, out_path, trace_out_path,
                                assert_mode, out, err);
    }
    err << "no subcommand selected\n";
    return kExitUsage;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitInput;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace mpg
