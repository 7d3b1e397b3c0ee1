#pragma once

// Game definitions: YAML parsing, validation, canonical serialization and
// instantiation of the initial GameState.

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stratagem/errors.hpp"
#include "stratagem/model.hpp"
#include "stratagem/rng.hpp"

namespace stratagem {

enum class WinCondition { LastManStanding };
enum class EffectType { Damage, Death, Heal };
enum class Trigger { EndOfTurn, EnterTile };
enum class EffectCondition { None, StandingOnTile };

inline std::string_view to_string(EffectType t) {
  switch (t) {
    case EffectType::Damage: return "Damage";
    case EffectType::Death: return "Death";
    case EffectType::Heal: return "Heal";
  }
  return "?";
}
inline std::string_view to_string(Trigger t) { return t == Trigger::EndOfTurn ? "EndOfTurn" : "EnterTile"; }
inline std::string_view to_string(EffectCondition c) { return c == EffectCondition::None ? "None" : "StandingOnTile"; }

struct EffectDef {
  std::string name;
  EffectType type = EffectType::Damage;
  Trigger trigger = Trigger::EndOfTurn;
  EffectCondition condition = EffectCondition::None;
  std::optional<std::string> target_tile;
  std::optional<int> amount;

  friend bool operator==(const EffectDef&, const EffectDef&) = default;
};

struct Deployment {
  PlayerId player = 0;
  std::string unit_type;
  Coord position;

  friend bool operator==(const Deployment&, const Deployment&) = default;
};

struct GameConfig {
  std::vector<TileType> tile_types;
  Board board;
  std::vector<UnitType> unit_types;
  WinCondition win_condition = WinCondition::LastManStanding;
  std::vector<EffectDef> effects;
  std::vector<Deployment> deployments;
  bool partial_observability = false;

  friend bool operator==(const GameConfig&, const GameConfig&) = default;

  const TileType* find_tile(std::string_view name) const {
    for (const auto& t : tile_types)
      if (t.name == name) return &t;
    return nullptr;
  }
  const UnitType* find_unit_type(std::string_view name) const {
    for (const auto& u : unit_types)
      if (u.name == name) return &u;
    return nullptr;
  }
  TileTypeId default_tile() const {
    for (const auto& t : tile_types)
      if (t.is_default) return t.id;
    return 0;
  }
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string path;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

inline std::string format_diagnostic(const Diagnostic& d) {
  return std::string(d.severity == Severity::Error ? "error" : "warning") + ": " + d.path + ": " + d.message;
}

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

/// Outcome of parse_config: the config is present iff there are no errors.
struct ParseResult {
  std::optional<GameConfig> config;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return config.has_value(); }
};

// ---------------------------------------------------------------------------
// Board layout

/// Reads a tile map. Rows are separated by any whitespace, which also makes
/// YAML folded scalars (`Layout: >`) work: folding turns newlines into spaces.
inline Board parse_board_layout(std::string_view layout, const std::vector<TileType>& tiles) {
  std::map<char, TileTypeId> by_symbol;
  for (const auto& t : tiles) by_symbol.emplace(t.symbol, t.id);

  std::vector<std::string> rows;
  std::string current;
  for (char ch : layout) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!current.empty()) rows.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) rows.push_back(std::move(current));
  if (rows.empty()) throw ConfigError("empty board layout");

  Board board;
  board.height = static_cast<int>(rows.size());
  board.width = static_cast<int>(rows.front().size());
  board.tiles.reserve(rows.size() * rows.front().size());
  for (std::size_t y = 0; y < rows.size(); ++y) {
    if (rows[y].size() != rows.front().size())
      throw ConfigError("ragged layout: row " + std::to_string(y) + " has " + std::to_string(rows[y].size()) +
                        " columns, expected " + std::to_string(rows.front().size()));
    for (std::size_t x = 0; x < rows[y].size(); ++x) {
      auto it = by_symbol.find(rows[y][x]);
      if (it == by_symbol.end())
        throw ConfigError(std::string("unknown tile symbol '") + rows[y][x] + "' at row " + std::to_string(y) +
                          " col " + std::to_string(x));
      board.tiles.push_back(it->second);
    }
  }
  return board;
}

// ---------------------------------------------------------------------------
// Validation

/// Checks every cross-reference and attribute invariant. Diagnostics are
/// sorted by key path (stable for equal paths).
inline std::vector<Diagnostic> validate_config(const GameConfig& cfg) {
  std::vector<Diagnostic> out;
  auto error = [&out](std::string path, std::string msg) {
    out.push_back({Severity::Error, std::move(path), std::move(msg)});
  };

  if (cfg.tile_types.empty()) error("Tiles", "at least one tile type required");
  std::set<char> symbols;
  std::set<std::string> tile_names;
  int defaults = 0;
  for (const auto& t : cfg.tile_types) {
    const std::string path = "Tiles." + t.name;
    if (!symbols.insert(t.symbol).second) error(path + ".Symbol", std::string("duplicate tile symbol '") + t.symbol + "'");
    if (!tile_names.insert(t.name).second) error(path, "duplicate tile name");
    if (std::isspace(static_cast<unsigned char>(t.symbol))) error(path + ".Symbol", "symbol must not be whitespace");
    if (t.is_default) ++defaults;
  }
  if (!cfg.tile_types.empty() && defaults != 1)
    error("Tiles", "exactly one default tile required, found " + std::to_string(defaults));

  const auto& b = cfg.board;
  if (b.width <= 0 || b.height <= 0 || b.tiles.size() != static_cast<std::size_t>(b.width) * static_cast<std::size_t>(b.height)) {
    error("Board.Layout", "board dimensions do not match tile count");
  } else {
    for (auto id : b.tiles)
      if (id < 0 || static_cast<std::size_t>(id) >= cfg.tile_types.size()) {
        error("Board.Layout", "tile id " + std::to_string(id) + " is not declared");
        break;
      }
  }

  if (cfg.unit_types.empty()) error("Units", "at least one unit type required");
  std::set<std::string> unit_names;
  for (const auto& u : cfg.unit_types) {
    const std::string path = "Units." + u.name;
    if (!unit_names.insert(u.name).second) error(path, "duplicate unit type name");
    if (u.health <= 0) error(path + ".Health", "must be > 0");
    if (u.attack_damage < 0) error(path + ".AttackDamage", "must be >= 0");
    if (u.movement_range < 0) error(path + ".MovementRange", "must be >= 0");
    if (u.line_of_sight_range < 0) error(path + ".LineOfSightRange", "must be >= 0");
    if (u.heal_amount < 0) error(path + ".HealAmount", "must be >= 0");
    if (u.attack_range < 0) error(path + ".AttackRange", "must be >= 0");
    if (u.heal_range < 0) error(path + ".HealRange", "must be >= 0");
    if (u.actions.empty()) error(path + ".Actions", "at least one action required");
    if (u.can(ActionCategory::EndTurn)) error(path + ".Actions", "EndTurn is a player action, not a unit action");
    const bool heals = u.can(ActionCategory::Heal);
    if (heals && u.heal_amount <= 0) error(path, "Heal listed in Actions but HealAmount missing or not positive");
    if (!heals && u.heal_amount > 0) error(path, "HealAmount given but Heal not listed in Actions");
    std::set<ActionCategory> seen;
    for (auto a : u.actions)
      if (!seen.insert(a).second) error(path + ".Actions", "duplicate action " + std::string(to_string(a)));
  }

  std::set<std::string> effect_names;
  for (const auto& e : cfg.effects) {
    const std::string path = "ForwardModel.Effects." + e.name;
    if (!effect_names.insert(e.name).second) error(path, "duplicate effect name");
    const bool needs_target = e.condition == EffectCondition::StandingOnTile;
    if (needs_target && !e.target_tile) error(path + ".TargetTile", "required when Condition is StandingOnTile");
    if (!needs_target && e.target_tile) error(path + ".TargetTile", "only allowed when Condition is StandingOnTile");
    if (e.target_tile && !cfg.find_tile(*e.target_tile))
      error(path + ".TargetTile", "unknown tile type '" + *e.target_tile + "'");
    const bool needs_amount = e.type != EffectType::Death;
    if (needs_amount && !e.amount) error(path + ".Amount", "required for " + std::string(to_string(e.type)) + " effects");
    if (!needs_amount && e.amount) error(path + ".Amount", "not allowed for Death effects");
    if (e.amount && *e.amount <= 0) error(path + ".Amount", "must be > 0");
  }

  std::set<std::pair<int, int>> occupied;
  for (std::size_t i = 0; i < cfg.deployments.size(); ++i) {
    const auto& d = cfg.deployments[i];
    const std::string path = "Deployments." + std::to_string(i);
    if (d.player < 0) error(path + ".Player", "player id must be >= 0");
    if (!cfg.find_unit_type(d.unit_type)) error(path + ".Type", "unknown unit type '" + d.unit_type + "'");
    if (!in_bounds(cfg.board, d.position)) {
      error(path + ".Position", "deployment out of bounds");
      continue;
    }
    if (b.tiles.size() == static_cast<std::size_t>(b.width) * static_cast<std::size_t>(b.height)) {
      auto tid = b.at(d.position);
      if (tid >= 0 && static_cast<std::size_t>(tid) < cfg.tile_types.size() && !cfg.tile_types[static_cast<std::size_t>(tid)].walkable)
        error(path + ".Position", "deployment on non-walkable tile");
    }
    if (!occupied.insert({d.position.x, d.position.y}).second)
      error(path + ".Position", "two deployments share a tile");
  }
  std::set<PlayerId> players;
  for (const auto& d : cfg.deployments) players.insert(d.player);
  if (!players.empty() && *players.begin() >= 0 && *players.rbegin() != static_cast<PlayerId>(players.size()) - 1)
    error("Deployments", "players must be numbered 0.." + std::to_string(players.size() - 1) + " without gaps");

  std::stable_sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& c) { return a.path < c.path; });
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class ConfigReader {
 public:
  ParseResult read(const std::string& text) {
    YAML::Node root;
    try {
      root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
      error("<document>", "line " + std::to_string(e.mark.line + 1) + " col " + std::to_string(e.mark.column + 1) +
                              ": " + e.msg);
      return finish();
    }
    if (!root.IsMap()) {
      error("<document>", "top level must be a mapping");
      return finish();
    }

    for (auto kv : root) {
      const auto key = kv.first.as<std::string>();
      if (key == "Tiles") read_tiles(kv.second);
      else if (key == "Board") board_node_ = kv.second, has_board_ = true;
      else if (key == "Units") read_units(kv.second);
      else if (key == "ForwardModel") read_forward_model(kv.second);
      else if (key == "Deployments") read_deployments(kv.second);
      else if (key == "PartialObservability") cfg_.partial_observability = read_bool(kv.second, key).value_or(false);
      else warn(key, "unknown key ignored");
    }
    if (!root["Tiles"]) error("Tiles", "missing required key");
    if (!root["Units"]) error("Units", "missing required key");
    if (!root["ForwardModel"]) error("ForwardModel", "missing required key");
    assign_default_tile();
    if (!has_board_) error("Board", "missing required key");
    else read_board(board_node_);

    if (!has_errors(diags_)) {
      auto v = validate_config(cfg_);
      diags_.insert(diags_.end(), v.begin(), v.end());
    }
    return finish();
  }

 private:
  ParseResult finish() {
    std::stable_sort(diags_.begin(), diags_.end(), [](const Diagnostic& a, const Diagnostic& b) { return a.path < b.path; });
    ParseResult r;
    r.diagnostics = std::move(diags_);
    if (!has_errors(r.diagnostics)) r.config = std::move(cfg_);
    return r;
  }

  void error(std::string path, std::string msg) { diags_.push_back({Severity::Error, std::move(path), std::move(msg)}); }
  void warn(std::string path, std::string msg) { diags_.push_back({Severity::Warning, std::move(path), std::move(msg)}); }

  bool expect_map(const YAML::Node& n, const std::string& path) {
    if (n.IsMap()) return true;
    error(path, "expected a mapping");
    return false;
  }

  std::optional<std::string> read_scalar(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) {
      error(path, "expected a scalar");
      return std::nullopt;
    }
    return n.Scalar();
  }

  std::optional<int> read_int(const YAML::Node& n, const std::string& path) {
    auto s = read_scalar(n, path);
    if (!s) return std::nullopt;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(*s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s->size()) {
      error(path, "expected an integer, got '" + *s + "'");
      return std::nullopt;
    }
    return v;
  }

  std::optional<bool> read_bool(const YAML::Node& n, const std::string& path) {
    auto s = read_scalar(n, path);
    if (!s) return std::nullopt;
    if (*s == "true" || *s == "True" || *s == "yes") return true;
    if (*s == "false" || *s == "False" || *s == "no") return false;
    error(path, "expected true or false, got '" + *s + "'");
    return std::nullopt;
  }

  void read_tiles(const YAML::Node& n) {
    if (!expect_map(n, "Tiles")) return;
    for (auto kv : n) {
      TileType t;
      t.id = static_cast<TileTypeId>(cfg_.tile_types.size());
      t.name = kv.first.as<std::string>();
      const std::string path = "Tiles." + t.name;
      explicit_default_.push_back(false);
      if (!expect_map(kv.second, path)) {
        cfg_.tile_types.push_back(t);
        continue;
      }
      for (auto field : kv.second) {
        const auto key = field.first.as<std::string>();
        if (key == "Symbol") {
          auto s = read_scalar(field.second, path + ".Symbol");
          if (s && s->size() == 1) {
            t.symbol = (*s)[0];
            for (const auto& other : cfg_.tile_types)
              if (other.symbol == t.symbol)
                error(path + ".Symbol", std::string("duplicate tile symbol '") + t.symbol + "'");
          } else if (s) {
            error(path + ".Symbol", "symbol must be a single character, got '" + *s + "'");
          }
        } else if (key == "IsWalkable") {
          t.walkable = read_bool(field.second, path + ".IsWalkable").value_or(true);
        } else if (key == "Default") {
          explicit_default_.back() = read_bool(field.second, path + ".Default").value_or(false);
        } else {
          warn(path + "." + key, "unknown key ignored");
        }
      }
      if (!kv.second["Symbol"]) error(path + ".Symbol", "missing required key");
      if (!kv.second["IsWalkable"]) error(path + ".IsWalkable", "missing required key");
      cfg_.tile_types.push_back(t);
    }
  }

  // An explicit `Default: true` wins; otherwise the first walkable tile.
  void assign_default_tile() {
    bool any_explicit = false;
    for (std::size_t i = 0; i < cfg_.tile_types.size(); ++i) {
      cfg_.tile_types[i].is_default = explicit_default_[i];
      any_explicit = any_explicit || explicit_default_[i];
    }
    if (any_explicit) return;
    for (auto& t : cfg_.tile_types)
      if (t.walkable) {
        t.is_default = true;
        return;
      }
  }

  void read_board(const YAML::Node& n) {
    if (!expect_map(n, "Board")) return;
    std::optional<std::string> layout;
    for (auto kv : n) {
      const auto key = kv.first.as<std::string>();
      if (key == "GenerationType") {
        auto s = read_scalar(kv.second, "Board.GenerationType");
        if (s && *s != "Manual") error("Board.GenerationType", "unsupported generation type '" + *s + "'");
      } else if (key == "Layout") {
        layout = read_scalar(kv.second, "Board.Layout");
      } else {
        warn("Board." + key, "unknown key ignored");
      }
    }
    if (!n["GenerationType"]) error("Board.GenerationType", "missing required key");
    if (!n["Layout"]) {
      error("Board.Layout", "missing required key");
      return;
    }
    if (!layout) return;
    try {
      cfg_.board = parse_board_layout(*layout, cfg_.tile_types);
    } catch (const ConfigError& e) {
      error("Board.Layout", e.what());
    }
  }

  void read_units(const YAML::Node& n) {
    if (!expect_map(n, "Units")) return;
    for (auto kv : n) {
      UnitType u;
      u.id = static_cast<UnitTypeId>(cfg_.unit_types.size());
      u.name = kv.first.as<std::string>();
      const std::string path = "Units." + u.name;
      if (!expect_map(kv.second, path)) continue;
      for (auto field : kv.second) {
        const auto key = field.first.as<std::string>();
        const std::string fpath = path + "." + key;
        if (key == "Health") u.health = read_int(field.second, fpath).value_or(1);
        else if (key == "AttackDamage") u.attack_damage = read_int(field.second, fpath).value_or(0);
        else if (key == "MovementRange") u.movement_range = read_int(field.second, fpath).value_or(0);
        else if (key == "LineOfSightRange") u.line_of_sight_range = read_int(field.second, fpath).value_or(0);
        else if (key == "HealAmount") u.heal_amount = read_int(field.second, fpath).value_or(0);
        else if (key == "AttackRange") u.attack_range = read_int(field.second, fpath).value_or(1);
        else if (key == "HealRange") u.heal_range = read_int(field.second, fpath).value_or(1);
        else if (key == "Actions") read_actions(field.second, fpath, u);
        else warn(fpath, "unknown key ignored");
      }
      for (const char* required : {"Health", "MovementRange", "LineOfSightRange", "Actions"})
        if (!kv.second[required]) error(path + "." + required, "missing required key");
      if (u.can(ActionCategory::Attack) && !kv.second["AttackDamage"])
        error(path + ".AttackDamage", "required when Attack is listed in Actions");
      cfg_.unit_types.push_back(std::move(u));
    }
  }

  void read_actions(const YAML::Node& n, const std::string& path, UnitType& u) {
    if (!n.IsSequence()) {
      error(path, "expected a list");
      return;
    }
    for (auto item : n) {
      auto s = read_scalar(item, path);
      if (!s) continue;
      auto cat = parse_action_category(*s);
      if (!cat) error(path, "unknown action '" + *s + "'");
      else u.actions.push_back(*cat);
    }
  }

  void read_forward_model(const YAML::Node& n) {
    if (!expect_map(n, "ForwardModel")) return;
    for (auto kv : n) {
      const auto key = kv.first.as<std::string>();
      if (key == "WinCondition") {
        auto s = read_scalar(kv.second, "ForwardModel.WinCondition");
        if (s && *s != "LastManStanding") error("ForwardModel.WinCondition", "unknown win condition '" + *s + "'");
      } else if (key == "Effects") {
        read_effects(kv.second);
      } else {
        warn("ForwardModel." + key, "unknown key ignored");
      }
    }
    if (!n["WinCondition"]) error("ForwardModel.WinCondition", "missing required key");
  }

  void read_effects(const YAML::Node& n) {
    if (n.IsNull()) return;
    if (!expect_map(n, "ForwardModel.Effects")) return;
    for (auto kv : n) {
      EffectDef e;
      e.name = kv.first.as<std::string>();
      const std::string path = "ForwardModel.Effects." + e.name;
      if (!expect_map(kv.second, path)) continue;
      for (auto field : kv.second) {
        const auto key = field.first.as<std::string>();
        const std::string fpath = path + "." + key;
        if (key == "Type") {
          auto s = read_scalar(field.second, fpath);
          if (!s) continue;
          if (*s == "Damage") e.type = EffectType::Damage;
          else if (*s == "Death") e.type = EffectType::Death;
          else if (*s == "Heal") e.type = EffectType::Heal;
          else error(fpath, "unknown effect type '" + *s + "'");
        } else if (key == "Trigger") {
          auto s = read_scalar(field.second, fpath);
          if (!s) continue;
          if (*s == "EndOfTurn") e.trigger = Trigger::EndOfTurn;
          else if (*s == "EnterTile") e.trigger = Trigger::EnterTile;
          else error(fpath, "unknown trigger '" + *s + "'");
        } else if (key == "Condition") {
          auto s = read_scalar(field.second, fpath);
          if (!s) continue;
          if (*s == "None") e.condition = EffectCondition::None;
          else if (*s == "StandingOnTile") e.condition = EffectCondition::StandingOnTile;
          else error(fpath, "unknown condition '" + *s + "'");
        } else if (key == "TargetTile") {
          e.target_tile = read_scalar(field.second, fpath);
        } else if (key == "Amount") {
          e.amount = read_int(field.second, fpath);
        } else {
          warn(fpath, "unknown key ignored");
        }
      }
      for (const char* required : {"Type", "Trigger", "Condition"})
        if (!kv.second[required]) error(path + "." + required, "missing required key");
      cfg_.effects.push_back(std::move(e));
    }
  }

  void read_deployments(const YAML::Node& n) {
    if (n.IsNull()) return;
    if (!n.IsSequence()) {
      error("Deployments", "expected a list");
      return;
    }
    std::size_t i = 0;
    for (auto item : n) {
      const std::string path = "Deployments." + std::to_string(i++);
      if (!expect_map(item, path)) continue;
      Deployment d;
      bool complete = true;
      for (auto field : item) {
        const auto key = field.first.as<std::string>();
        if (key == "Player") {
          auto v = read_int(field.second, path + ".Player");
          complete = complete && v.has_value();
          d.player = v.value_or(0);
        } else if (key == "Type") {
          auto s = read_scalar(field.second, path + ".Type");
          complete = complete && s.has_value();
          d.unit_type = s.value_or("");
        } else if (key == "Position") {
          if (!field.second.IsSequence() || field.second.size() != 2) {
            error(path + ".Position", "expected [x, y]");
            complete = false;
            continue;
          }
          auto x = read_int(field.second[0], path + ".Position");
          auto y = read_int(field.second[1], path + ".Position");
          complete = complete && x && y;
          d.position = {x.value_or(0), y.value_or(0)};
        } else {
          warn(path + "." + key, "unknown key ignored");
        }
      }
      for (const char* required : {"Player", "Type", "Position"})
        if (!item[required]) {
          error(path + "." + required, "missing required key");
          complete = false;
        }
      if (complete) cfg_.deployments.push_back(std::move(d));
    }
  }

  GameConfig cfg_;
  YAML::Node board_node_;
  bool has_board_ = false;
  std::vector<bool> explicit_default_;
  std::vector<Diagnostic> diags_;
};

}  // namespace detail

/// Parses a game definition. Unknown keys produce warnings; missing keys,
/// bad values, dangling references and invariant violations produce errors.
inline ParseResult parse_config(const std::string& text) { return detail::ConfigReader{}.read(text); }

/// parse_config that throws ConfigError listing every error diagnostic.
inline GameConfig load_config(const std::string& text) {
  auto r = parse_config(text);
  if (!r.ok()) {
    std::string msg = "invalid game config:";
    for (const auto& d : r.diagnostics)
      if (d.severity == Severity::Error) msg += "\n  " + format_diagnostic(d);
    throw ConfigError(msg);
  }
  return std::move(*r.config);
}

// ---------------------------------------------------------------------------
// Serialization

/// Canonical YAML rendering: fixed key order, literal-block layout, flow lists.
/// Two serializations of equal configs are byte-identical.
inline std::string serialize_config(const GameConfig& cfg) {
  std::ostringstream os;
  os << "Tiles:\n";
  for (const auto& t : cfg.tile_types) {
    os << "  " << t.name << ":\n";
    os << "    Symbol: '" << (t.symbol == '\'' ? std::string("''") : std::string(1, t.symbol)) << "'\n";
    os << "    IsWalkable: " << (t.walkable ? "true" : "false") << "\n";
    if (t.is_default) os << "    Default: true\n";
  }
  os << "\nBoard:\n  GenerationType: Manual\n  Layout: |\n";
  for (int y = 0; y < cfg.board.height; ++y) {
    os << "    ";
    for (int x = 0; x < cfg.board.width; ++x)
      os << cfg.tile_types[static_cast<std::size_t>(cfg.board.at({x, y}))].symbol;
    os << "\n";
  }
  os << "\nUnits:\n";
  for (const auto& u : cfg.unit_types) {
    os << "  " << u.name << ":\n";
    os << "    Health: " << u.health << "\n";
    if (u.can(ActionCategory::Attack) || u.attack_damage != 0) os << "    AttackDamage: " << u.attack_damage << "\n";
    os << "    MovementRange: " << u.movement_range << "\n";
    os << "    LineOfSightRange: " << u.line_of_sight_range << "\n";
    if (u.heal_amount != 0) os << "    HealAmount: " << u.heal_amount << "\n";
    if (u.attack_range != 1) os << "    AttackRange: " << u.attack_range << "\n";
    if (u.heal_range != 1) os << "    HealRange: " << u.heal_range << "\n";
    os << "    Actions: [";
    for (std::size_t i = 0; i < u.actions.size(); ++i) os << (i ? ", " : "") << to_string(u.actions[i]);
    os << "]\n";
  }
  os << "\nForwardModel:\n  WinCondition: LastManStanding\n";
  if (!cfg.effects.empty()) {
    os << "  Effects:\n";
    for (const auto& e : cfg.effects) {
      os << "    " << e.name << ":\n";
      os << "      Type: " << to_string(e.type) << "\n";
      os << "      Trigger: " << to_string(e.trigger) << "\n";
      os << "      Condition: " << to_string(e.condition) << "\n";
      if (e.target_tile) os << "      TargetTile: " << *e.target_tile << "\n";
      if (e.amount) os << "      Amount: " << *e.amount << "\n";
    }
  }
  if (!cfg.deployments.empty()) {
    os << "\nDeployments:\n";
    for (const auto& d : cfg.deployments)
      os << "  - {Player: " << d.player << ", Type: " << d.unit_type << ", Position: [" << d.position.x << ", "
         << d.position.y << "]}\n";
  }
  if (cfg.partial_observability) os << "\nPartialObservability: true\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Instantiation

/// Builds the initial state: units at full health in deployment order,
/// lowest player id to move, turn 0, RNG stream derived from `seed`.
inline GameState instantiate_state(const GameConfig& cfg, std::uint64_t seed) {
  auto diags = validate_config(cfg);
  if (has_errors(diags)) {
    std::string msg = "refusing to instantiate invalid config:";
    for (const auto& d : diags)
      if (d.severity == Severity::Error) msg += "\n  " + format_diagnostic(d);
    throw ConfigError(msg);
  }
  std::set<PlayerId> player_ids;
  for (const auto& d : cfg.deployments) player_ids.insert(d.player);
  if (player_ids.size() < 2) throw ConfigError("at least two players required");

  GameState s;
  s.board = cfg.board;
  for (auto id : player_ids) s.players.push_back({id, true, 0});
  UnitId next = 0;
  for (const auto& d : cfg.deployments) {
    const UnitType* type = cfg.find_unit_type(d.unit_type);
    s.units.push_back({next++, d.player, type->id, d.position, type->health, {}});
    ++s.find_player(d.player)->initial_units;
  }
  s.current_player = *player_ids.begin();
  s.turn_number = 0;
  s.rng_state = SplitMix64::mix(seed);
  return s;
}

}  // namespace stratagem
