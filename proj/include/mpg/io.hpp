#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mpg/game.hpp"

namespace mpg {

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Document is structurally wrong: bad type, missing key, shape mismatch,
/// unsupported format_version. Messages carry a JSON path.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Document parsed but violates a semantic invariant (row sums, ranges).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// GameDocument (format_version 1): agent_count, state_count, action_counts,
/// discount, payoffs[agent][state][joint_action],
/// transitions[state][joint_action][next_state], optional state_labels and
/// potential[state][joint_action]. Joint actions use the shared mixed-radix
/// law (agent 0 fastest).
TabularStochasticGame game_from_json(const nlohmann::json& doc);
nlohmann::json game_to_json(const TabularStochasticGame& game);
TabularStochasticGame load_game_file(const std::string& path);

/// Optional potential attached to a GameDocument; empty when absent.
std::vector<double> potential_from_json(const nlohmann::json& doc,
                                        const TabularStochasticGame& game);

/// PolicyDocument: {"type": "deterministic", "choices": [[...]]} or
/// {"type": "stochastic", "tables": [[[...]]]}, both with format_version.
struct ParsedPolicy {
  bool deterministic = false;
  DeterministicJointPolicy det;
  JointPolicy stochastic;

  JointPolicy as_policy(const TabularStochasticGame& game) const {
    return deterministic ? det.to_policy(game) : stochastic;
  }
};

ParsedPolicy policy_from_json(const nlohmann::json& doc,
                              const TabularStochasticGame& game);
ParsedPolicy load_policy_file(const std::string& path,
                              const TabularStochasticGame& game);

/// Serializes with sorted keys and doubles printed via %.17g so every number
/// round-trips exactly; output is byte-deterministic.
std::string dump_json(const nlohmann::json& value, int indent = 2);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

/// FNV-1a 64-bit digest, hex-encoded, used as the inputs digest in reports.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace mpg
