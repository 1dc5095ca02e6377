#include "mpg/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mpg {

namespace {

std::string at(const std::string& path, int i) {
  return path + "[" + std::to_string(i) + "]";
}

const nlohmann::json& require_key(const nlohmann::json& doc,
                                  const std::string& key) {
  if (!doc.is_object())
    throw SchemaError("document root must be a JSON object");
  auto it = doc.find(key);
  if (it == doc.end()) throw SchemaError("missing key \"" + key + "\"");
  return *it;
}

int require_int(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number_integer())
    throw SchemaError(path + " must be an integer");
  return v.get<int>();
}

double require_number(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path + " must be a number");
  return v.get<double>();
}

const nlohmann::json& require_array(const nlohmann::json& v,
                                    const std::string& path,
                                    std::size_t arity) {
  if (!v.is_array()) throw SchemaError(path + " must be an array");
  if (v.size() != arity)
    throw SchemaError(path + " must have " + std::to_string(arity) +
                      " entries, found " + std::to_string(v.size()));
  return v;
}

void check_format_version(const nlohmann::json& doc) {
  const int version =
      require_int(require_key(doc, "format_version"), "format_version");
  if (version != kFormatVersion)
    throw SchemaError("unsupported format_version " +
                      std::to_string(version));
}

std::vector<double> parse_state_action_table(const nlohmann::json& v,
                                             const std::string& path,
                                             int state_count, int ja) {
  std::vector<double> out(static_cast<std::size_t>(state_count) * ja);
  require_array(v, path, state_count);
  for (int s = 0; s < state_count; ++s) {
    const nlohmann::json& row = require_array(v[s], at(path, s), ja);
    for (int a = 0; a < ja; ++a)
      out[static_cast<std::size_t>(s) * ja + a] =
          require_number(row[a], at(at(path, s), a));
  }
  return out;
}

}  // namespace

TabularStochasticGame game_from_json(const nlohmann::json& doc) {
  check_format_version(doc);
  TabularStochasticGame game;
  game.agent_count =
      require_int(require_key(doc, "agent_count"), "agent_count");
  game.state_count =
      require_int(require_key(doc, "state_count"), "state_count");
  if (game.agent_count < 1) throw SchemaError("agent_count must be >= 1");
  if (game.state_count < 1) throw SchemaError("state_count must be >= 1");

  const nlohmann::json& counts = require_array(
      require_key(doc, "action_counts"), "action_counts", game.agent_count);
  game.action_counts.resize(game.agent_count);
  for (int i = 0; i < game.agent_count; ++i) {
    game.action_counts[i] = require_int(counts[i], at("action_counts", i));
    if (game.action_counts[i] < 1)
      throw SchemaError(at("action_counts", i) + " must be >= 1");
  }

  game.discount = require_number(require_key(doc, "discount"), "discount");

  const int ja = game.joint_action_count();
  const nlohmann::json& payoffs =
      require_array(require_key(doc, "payoffs"), "payoffs", game.agent_count);
  game.payoffs.reserve(static_cast<std::size_t>(game.agent_count) *
                       game.state_count * ja);
  for (int i = 0; i < game.agent_count; ++i) {
    std::vector<double> table = parse_state_action_table(
        payoffs[i], at("payoffs", i), game.state_count, ja);
    game.payoffs.insert(game.payoffs.end(), table.begin(), table.end());
  }

  const nlohmann::json& transitions = require_array(
      require_key(doc, "transitions"), "transitions", game.state_count);
  game.transitions.reserve(game.state_count * ja);
  std::vector<TransitionEntry> row;
  for (int s = 0; s < game.state_count; ++s) {
    const nlohmann::json& per_action =
        require_array(transitions[s], at("transitions", s), ja);
    for (int a = 0; a < ja; ++a) {
      const std::string path = at(at("transitions", s), a);
      const nlohmann::json& dense =
          require_array(per_action[a], path, game.state_count);
      row.clear();
      for (int t = 0; t < game.state_count; ++t) {
        const double p = require_number(dense[t], at(path, t));
        if (p != 0.0) row.push_back({t, p});
      }
      game.transitions.push_row(row);
    }
  }

  if (doc.contains("state_labels")) {
    const nlohmann::json& labels =
        require_array(doc["state_labels"], "state_labels", game.state_count);
    game.state_labels.resize(game.state_count);
    for (int s = 0; s < game.state_count; ++s)
      game.state_labels[s] = require_number(labels[s], at("state_labels", s));
  }

  const ValidationReport validation = validate_game(game);
  if (!validation.ok()) {
    std::ostringstream os;
    os << "invalid game:";
    for (const ValidationIssue& issue : validation.issues)
      os << "\n  " << issue.location << ": " << issue.message;
    throw ValidationError(os.str());
  }
  return game;
}

std::vector<double> potential_from_json(const nlohmann::json& doc,
                                        const TabularStochasticGame& game) {
  if (!doc.is_object() || !doc.contains("potential")) return {};
  return parse_state_action_table(doc["potential"], "potential",
                                  game.state_count,
                                  game.joint_action_count());
}

nlohmann::json game_to_json(const TabularStochasticGame& game) {
  nlohmann::json doc;
  doc["format_version"] = kFormatVersion;
  doc["agent_count"] = game.agent_count;
  doc["state_count"] = game.state_count;
  doc["action_counts"] = game.action_counts;
  doc["discount"] = game.discount;

  const int ja = game.joint_action_count();
  nlohmann::json payoffs = nlohmann::json::array();
  for (int i = 0; i < game.agent_count; ++i) {
    nlohmann::json per_state = nlohmann::json::array();
    for (int s = 0; s < game.state_count; ++s) {
      nlohmann::json row = nlohmann::json::array();
      for (int a = 0; a < ja; ++a) row.push_back(game.payoff(i, s, a));
      per_state.push_back(std::move(row));
    }
    payoffs.push_back(std::move(per_state));
  }
  doc["payoffs"] = std::move(payoffs);

  nlohmann::json transitions = nlohmann::json::array();
  for (int s = 0; s < game.state_count; ++s) {
    nlohmann::json per_action = nlohmann::json::array();
    for (int a = 0; a < ja; ++a) {
      std::vector<double> dense(game.state_count, 0.0);
      for (const TransitionEntry& e : game.transition_row(s, a))
        dense[e.next_state] += e.probability;
      per_action.push_back(dense);
    }
    transitions.push_back(std::move(per_action));
  }
  doc["transitions"] = std::move(transitions);

  if (!game.state_labels.empty()) doc["state_labels"] = game.state_labels;
  return doc;
}

TabularStochasticGame load_game_file(const std::string& path) {
  const std::string text = read_text_file(path);
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded())
    throw SchemaError("file " + path + " is not valid JSON");
  return game_from_json(doc);
}

ParsedPolicy policy_from_json(const nlohmann::json& doc,
                              const TabularStochasticGame& game) {
  check_format_version(doc);
  const nlohmann::json& type = require_key(doc, "type");
  if (!type.is_string()) throw SchemaError("type must be a string");

  ParsedPolicy out;
  if (type == "deterministic") {
    out.deterministic = true;
    const nlohmann::json& choices = require_array(
        require_key(doc, "choices"), "choices", game.agent_count);
    out.det.choice.resize(game.agent_count);
    for (int i = 0; i < game.agent_count; ++i) {
      const nlohmann::json& per_state =
          require_array(choices[i], at("choices", i), game.state_count);
      out.det.choice[i].resize(game.state_count);
      for (int s = 0; s < game.state_count; ++s) {
        const std::string path = at(at("choices", i), s);
        const int a = require_int(per_state[s], path);
        if (a < 0 || a >= game.action_counts[i])
          throw ValidationError(path + ": action index " + std::to_string(a) +
                                " out of range");
        out.det.choice[i][s] = a;
      }
    }
    return out;
  }
  if (type == "stochastic") {
    const nlohmann::json& tables = require_array(require_key(doc, "tables"),
                                                 "tables", game.agent_count);
    out.stochastic.state_count = game.state_count;
    out.stochastic.action_counts = game.action_counts;
    out.stochastic.tables.resize(game.agent_count);
    for (int i = 0; i < game.agent_count; ++i) {
      std::vector<double> table = parse_state_action_table(
          tables[i], at("tables", i), game.state_count, game.action_counts[i]);
      out.stochastic.tables[i] = std::move(table);
    }
    const ValidationReport validation =
        validate_policy(game, out.stochastic);
    if (!validation.ok()) {
      std::ostringstream os;
      os << "invalid policy:";
      for (const ValidationIssue& issue : validation.issues)
        os << "\n  " << issue.location << ": " << issue.message;
      throw ValidationError(os.str());
    }
    return out;
  }
  throw SchemaError("type must be \"deterministic\" or \"stochastic\"");
}

ParsedPolicy load_policy_file(const std::string& path,
                              const TabularStochasticGame& game) {
  const std::string text = read_text_file(path);
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded())
    throw SchemaError("file " + path + " is not valid JSON");
  return policy_from_json(doc, game);
}

namespace {

void dump_value(const nlohmann::json& value, int indent, int depth,
                std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1),
                           ' ');
  switch (value.type()) {
    case nlohmann::json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        out += nlohmann::json(it.key()).dump();
        out += ": ";
        dump_value(it.value(), indent, depth + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const nlohmann::json& item : value) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump_value(item, indent, depth + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", value.get<double>());
      out += buf;
      return;
    }
    default:
      out += value.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& value, int indent) {
  std::string out;
  dump_value(value, indent, 0, out);
  out += "\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path + " for writing");
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) throw IoError("failed writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << file.rdbuf();
  if (file.bad()) throw IoError("failed reading " + path);
  return os.str();
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(buf);
}

}  // namespace mpg
