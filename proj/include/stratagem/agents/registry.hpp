#pragma once

// Agent specs: `name[:key=val,...]`, e.g. `mcts:budget=10000,c=1.414`.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "stratagem/agents/baselines.hpp"
#include "stratagem/agents/search.hpp"
#include "stratagem/errors.hpp"

namespace stratagem {

struct AgentSpec {
  std::string name;
  std::map<std::string, std::string> options;
  std::string text;  // as written
};

/// A configured agent plus the budget it plays with.
struct AgentEntry {
  std::unique_ptr<Agent> agent;
  Budget budget;
  std::string label;
};

inline const std::vector<std::string>& known_agents() {
  static const std::vector<std::string> names{"donothing", "random", "combat", "osla", "mc", "mcts", "rhea"};
  return names;
}

inline std::string agent_spec_help() {
  return "Agent spec: name[:key=val,...]\n"
         "  names: donothing random combat osla mc mcts rhea\n"
         "  all:   budget=<forward calls> ms=<wall-clock cap>\n"
         "  osla/mc/mcts/rhea: w_own_health w_enemy_health w_own_units w_enemy_units w_distance bias\n"
         "  mc:    depth redeterminize=0|1\n"
         "  mcts:  c depth redeterminize=0|1\n"
         "  rhea:  pop horizon generations mutation opponent=random|greedy exhaustive=0|1 shift=0|1\n";
}

inline AgentSpec parse_agent_spec(const std::string& text) {
  AgentSpec spec;
  spec.text = text;
  const auto colon = text.find(':');
  spec.name = text.substr(0, colon);
  if (spec.name.empty()) throw UsageError("empty agent spec");
  if (colon == std::string::npos) return spec;
  for (const auto& kv : detail::split(std::string_view(text).substr(colon + 1), ',')) {
    if (kv.empty()) continue;
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("malformed option '" + kv + "' in agent spec '" + text + "'");
    spec.options[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return spec;
}

/// Splits a comma list of specs. A token with '=' but no ':' continues the
/// previous spec, so `mcts:budget=10,c=2,random` is two agents.
inline std::vector<AgentSpec> parse_agent_list(const std::string& text) {
  std::vector<std::string> pieces;
  for (auto& tok : detail::split(text, ',')) {
    if (!pieces.empty() && tok.find('=') != std::string::npos && tok.find(':') == std::string::npos)
      pieces.back() += "," + tok;
    else
      pieces.push_back(tok);
  }
  std::vector<AgentSpec> out;
  for (const auto& p : pieces) out.push_back(parse_agent_spec(p));
  return out;
}

namespace detail {

class OptionReader {
 public:
  OptionReader(const AgentSpec& spec) : spec_(spec), pending_(spec.options) {}

  double real(const std::string& key, double fallback) {
    auto v = take(key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      double d = std::stod(*v, &used);
      if (used == v->size() && std::isfinite(d)) return d;
    } catch (const std::exception&) {
    }
    throw UsageError("option '" + key + "' of agent '" + spec_.name + "' expects a number, got '" + *v + "'");
  }
  int integer(const std::string& key, int fallback) {
    auto v = take(key);
    if (!v) return fallback;
    try {
      return parse_int(*v, key.c_str());
    } catch (const std::exception&) {
      throw UsageError("option '" + key + "' of agent '" + spec_.name + "' expects an integer, got '" + *v + "'");
    }
  }
  bool flag(const std::string& key, bool fallback) {
    auto v = take(key);
    if (!v) return fallback;
    if (*v == "1" || *v == "true") return true;
    if (*v == "0" || *v == "false") return false;
    throw UsageError("option '" + key + "' of agent '" + spec_.name + "' expects 0 or 1, got '" + *v + "'");
  }
  std::optional<std::string> text(const std::string& key) { return take(key); }

  ScoreParams score() {
    ScoreParams p;
    p.w_own_health = real("w_own_health", p.w_own_health);
    p.w_enemy_health = real("w_enemy_health", p.w_enemy_health);
    p.w_own_units = real("w_own_units", p.w_own_units);
    p.w_enemy_units = real("w_enemy_units", p.w_enemy_units);
    p.w_distance = real("w_distance", p.w_distance);
    return p;
  }

  void finish() const {
    if (!pending_.empty())
      throw UsageError("unknown option '" + pending_.begin()->first + "' for agent '" + spec_.name + "'");
  }

 private:
  std::optional<std::string> take(const std::string& key) {
    auto it = pending_.find(key);
    if (it == pending_.end()) return std::nullopt;
    std::string v = it->second;
    pending_.erase(it);
    return v;
  }

  const AgentSpec& spec_;
  std::map<std::string, std::string> pending_;
};

}  // namespace detail

/// Builds an agent from its spec. `default_budget` applies unless the spec
/// sets `budget=`. Unknown names and options throw UsageError.
inline AgentEntry make_agent(const AgentSpec& spec, int default_budget = 1000) {
  detail::OptionReader opt(spec);
  AgentEntry e;
  e.label = spec.text;
  e.budget.max_forward_calls = opt.integer("budget", default_budget);
  e.budget.max_millis = opt.integer("ms", 0);
  if (e.budget.max_forward_calls <= 0 && e.budget.max_millis <= 0)
    throw UsageError("agent '" + spec.name + "' needs a positive budget or ms bound");

  const auto& n = spec.name;
  if (n == "donothing") {
    e.agent = std::make_unique<DoNothingAgent>();
  } else if (n == "random") {
    e.agent = std::make_unique<RandomAgent>();
  } else if (n == "combat") {
    e.agent = std::make_unique<RuleBasedCombatAgent>();
  } else if (n == "osla") {
    auto score = opt.score();
    e.agent = std::make_unique<OslaAgent>(score, opt.real("bias", 0.05));
  } else if (n == "mc") {
    MonteCarloParams p;
    p.score = opt.score();
    p.completion_bias = opt.real("bias", p.completion_bias);
    p.rollout_depth = opt.integer("depth", p.rollout_depth);
    p.redeterminize = opt.flag("redeterminize", p.redeterminize);
    e.agent = std::make_unique<MonteCarloAgent>(p);
  } else if (n == "mcts") {
    MctsParams p;
    p.score = opt.score();
    p.completion_bias = opt.real("bias", p.completion_bias);
    p.exploration = opt.real("c", p.exploration);
    p.rollout_depth = opt.integer("depth", p.rollout_depth);
    p.redeterminize = opt.flag("redeterminize", p.redeterminize);
    e.agent = std::make_unique<MctsAgent>(p);
  } else if (n == "rhea") {
    RheaParams p;
    p.score = opt.score();
    p.completion_bias = opt.real("bias", p.completion_bias);
    p.population = opt.integer("pop", p.population);
    p.horizon = opt.integer("horizon", p.horizon);
    p.generations = opt.integer("generations", p.generations);
    p.mutation_rate = opt.real("mutation", p.mutation_rate);
    p.exhaustive_seeding = opt.flag("exhaustive", p.exhaustive_seeding);
    p.shift_buffer = opt.flag("shift", p.shift_buffer);
    if (auto om = opt.text("opponent")) {
      if (*om == "random") p.opponent = OpponentModel::Random;
      else if (*om == "greedy") p.opponent = OpponentModel::Greedy;
      else throw UsageError("option 'opponent' of agent 'rhea' expects random or greedy, got '" + *om + "'");
    }
    e.agent = std::make_unique<RheaAgent>(p);
  } else {
    throw UsageError("unknown agent '" + n + "'");
  }
  opt.finish();
  return e;
}

inline AgentEntry make_agent(const std::string& text, int default_budget = 1000) {
  return make_agent(parse_agent_spec(text), default_budget);
}

}  // namespace stratagem
