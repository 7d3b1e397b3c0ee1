#pragma once

// Pure-data domain types of the engine. Nothing in this header applies game
// rules; all rule logic lives in forward_model.hpp.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "stratagem/errors.hpp"

namespace stratagem {

using PlayerId = int;
using UnitId = int;
using TileTypeId = int;
using UnitTypeId = int;

inline constexpr UnitId kNoUnit = -1;
inline constexpr PlayerId kNoPlayer = -1;

/// Board coordinate: x is the column (left to right), y the row (top to bottom).
struct Coord {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(Coord, Coord) = default;
};

/// Row-major order, the order in which a layout string is read.
constexpr bool row_major_less(Coord a, Coord b) {
  return a.y != b.y ? a.y < b.y : a.x < b.x;
}

constexpr int manhattan(Coord a, Coord b) {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

struct TileType {
  TileTypeId id = 0;
  std::string name;
  char symbol = '?';
  bool walkable = true;
  bool is_default = false;

  friend bool operator==(const TileType&, const TileType&) = default;
};

/// Row-major grid of tile type ids.
struct Board {
  int width = 0;
  int height = 0;
  std::vector<TileTypeId> tiles;

  std::size_t index(Coord c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c.x);
  }
  TileTypeId at(Coord c) const { return tiles[index(c)]; }
  void set(Coord c, TileTypeId id) { tiles[index(c)] = id; }
  std::size_t size() const { return tiles.size(); }
  Coord coord_of(std::size_t i) const {
    return {static_cast<int>(i % static_cast<std::size_t>(width)), static_cast<int>(i / static_cast<std::size_t>(width))};
  }

  friend bool operator==(const Board&, const Board&) = default;
};

enum class ActionCategory : std::uint8_t { Move = 0, Attack = 1, Heal = 2, EndTurn = 3 };

inline std::string_view to_string(ActionCategory c) {
  switch (c) {
    case ActionCategory::Move: return "Move";
    case ActionCategory::Attack: return "Attack";
    case ActionCategory::Heal: return "Heal";
    case ActionCategory::EndTurn: return "EndTurn";
  }
  return "?";
}

inline std::optional<ActionCategory> parse_action_category(std::string_view s) {
  if (s == "Move") return ActionCategory::Move;
  if (s == "Attack") return ActionCategory::Attack;
  if (s == "Heal") return ActionCategory::Heal;
  if (s == "EndTurn") return ActionCategory::EndTurn;
  return std::nullopt;
}

/// Small set of action categories, stored as a bit mask.
class ActionSet {
 public:
  constexpr ActionSet() = default;
  constexpr ActionSet(std::initializer_list<ActionCategory> cats) {
    for (auto c : cats) insert(c);
  }

  constexpr bool contains(ActionCategory c) const { return (bits_ >> static_cast<unsigned>(c)) & 1U; }
  constexpr void insert(ActionCategory c) { bits_ = static_cast<std::uint8_t>(bits_ | (1U << static_cast<unsigned>(c))); }
  constexpr void clear() { bits_ = 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }

  friend constexpr bool operator==(ActionSet, ActionSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

struct UnitType {
  UnitTypeId id = 0;
  std::string name;
  int health = 1;
  int attack_damage = 0;
  int movement_range = 0;
  int line_of_sight_range = 0;
  int heal_amount = 0;
  int attack_range = 1;
  int heal_range = 1;
  std::vector<ActionCategory> actions;

  bool can(ActionCategory c) const { return std::find(actions.begin(), actions.end(), c) != actions.end(); }

  friend bool operator==(const UnitType&, const UnitType&) = default;
};

struct Unit {
  UnitId unit_id = kNoUnit;
  PlayerId owner = kNoPlayer;
  UnitTypeId type = 0;
  Coord position;
  int health = 1;
  ActionSet spent;

  friend bool operator==(const Unit&, const Unit&) = default;
};

struct Player {
  PlayerId player_id = kNoPlayer;
  bool alive = true;
  // Units the player was deployed with; public knowledge that bounds how many
  // hidden units a determinization may invent.
  int initial_units = 0;

  friend bool operator==(const Player&, const Player&) = default;
};

/// (category, acting unit, target tile). EndTurn carries neither unit nor target.
struct Action {
  ActionCategory category = ActionCategory::EndTurn;
  UnitId unit_id = kNoUnit;
  Coord target;

  static constexpr Action end_turn() { return {}; }
  static constexpr Action move(UnitId u, Coord t) { return {ActionCategory::Move, u, t}; }
  static constexpr Action attack(UnitId u, Coord t) { return {ActionCategory::Attack, u, t}; }
  static constexpr Action heal(UnitId u, Coord t) { return {ActionCategory::Heal, u, t}; }

  bool is_end_turn() const { return category == ActionCategory::EndTurn; }

  friend constexpr bool operator==(const Action&, const Action&) = default;
};

inline std::string to_string(const Action& a) {
  if (a.is_end_turn()) return "EndTurn";
  std::ostringstream os;
  os << to_string(a.category) << "(unit " << a.unit_id << " -> " << a.target.x << ',' << a.target.y << ')';
  return os.str();
}

/// Full snapshot of a game. A data container: it holds no rules.
struct GameState {
  Board board;
  std::vector<Player> players;
  std::vector<Unit> units;  // kept sorted by unit_id
  PlayerId current_player = 0;
  int turn_number = 0;
  std::uint64_t rng_state = 0;
  bool is_fogged = false;
  PlayerId observer = kNoPlayer;  // set on fogged observations

  friend bool operator==(const GameState&, const GameState&) = default;

  const Unit* find_unit(UnitId id) const {
    auto it = std::lower_bound(units.begin(), units.end(), id,
                               [](const Unit& u, UnitId v) { return u.unit_id < v; });
    return it != units.end() && it->unit_id == id ? &*it : nullptr;
  }
  Unit* find_unit(UnitId id) {
    return const_cast<Unit*>(static_cast<const GameState&>(*this).find_unit(id));
  }
  const Player* find_player(PlayerId id) const {
    for (const auto& p : players)
      if (p.player_id == id) return &p;
    return nullptr;
  }
  Player* find_player(PlayerId id) {
    return const_cast<Player*>(static_cast<const GameState&>(*this).find_player(id));
  }
  void remove_unit(UnitId id) {
    std::erase_if(units, [id](const Unit& u) { return u.unit_id == id; });
  }
  int unit_count(PlayerId owner) const {
    return static_cast<int>(std::count_if(units.begin(), units.end(), [owner](const Unit& u) { return u.owner == owner; }));
  }
  UnitId next_unit_id() const { return units.empty() ? 0 : units.back().unit_id + 1; }
};

inline bool in_bounds(const Board& board, Coord c) {
  return c.x >= 0 && c.y >= 0 && c.x < board.width && c.y < board.height;
}

/// The unique unit standing on `c`, if any. Throws QueryError when `c` is off the board.
inline const Unit* unit_at(const GameState& state, Coord c) {
  if (!in_bounds(state.board, c))
    throw QueryError("coordinate (" + std::to_string(c.x) + "," + std::to_string(c.y) + ") is out of bounds");
  for (const auto& u : state.units)
    if (u.position == c) return &u;
  return nullptr;
}

/// In bounds, on a walkable tile, and unoccupied. Walkability comes from the
/// tile table, which the state does not own.
inline bool is_traversable(const GameState& state, const std::vector<TileType>& tiles, Coord c) {
  if (!in_bounds(state.board, c)) return false;
  if (!tiles[static_cast<std::size_t>(state.board.at(c))].walkable) return false;
  return unit_at(state, c) == nullptr;
}

inline GameState clone_state(const GameState& state) { return state; }

namespace detail {

class Hasher {
 public:
  void add(std::uint64_t v) {
    h_ ^= v + 0x9E3779B97F4A7C15ULL + (h_ << 6) + (h_ >> 2);
    h_ = mix(h_);
  }

  std::uint64_t value() const { return mix(h_ ^ n_); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  std::uint64_t h_ = 0xCBF29CE484222325ULL;
  std::uint64_t n_ = 0;
};

}  // namespace detail

/// Stable 64-bit digest of every field of the state.
inline std::uint64_t fingerprint(const GameState& s) {
  detail::Hasher h;
  h.add(static_cast<std::uint64_t>(s.board.width));
  h.add(static_cast<std::uint64_t>(s.board.height));
  for (auto t : s.board.tiles) h.add(static_cast<std::uint64_t>(t));
  h.add(s.players.size());
  for (const auto& p : s.players) {
    h.add(static_cast<std::uint64_t>(p.player_id));
    h.add(p.alive ? 1 : 0);
    h.add(static_cast<std::uint64_t>(p.initial_units));
  }
  std::vector<const Unit*> sorted;
  sorted.reserve(s.units.size());
  for (const auto& u : s.units) sorted.push_back(&u);
  std::sort(sorted.begin(), sorted.end(), [](const Unit* a, const Unit* b) { return a->unit_id < b->unit_id; });
  h.add(sorted.size());
  for (const Unit* u : sorted) {
    h.add(static_cast<std::uint64_t>(u->unit_id));
    h.add(static_cast<std::uint64_t>(u->owner));
    h.add(static_cast<std::uint64_t>(u->type));
    h.add(static_cast<std::uint64_t>(u->position.x));
    h.add(static_cast<std::uint64_t>(u->position.y));
    h.add(static_cast<std::uint64_t>(u->health));
    h.add(u->spent.bits());
  }
  h.add(static_cast<std::uint64_t>(s.current_player));
  h.add(static_cast<std::uint64_t>(s.turn_number));
  h.add(s.rng_state);
  h.add(s.is_fogged ? 1 : 0);
  h.add(static_cast<std::uint64_t>(s.observer));
  return h.value();
}

inline std::string to_hex(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
    v >>= 4;
  }
  return out;
}

/// One applied action as recorded in a replay log:
/// `turn;player;category;unit_id;target_x;target_y;post_fingerprint_hex`.
/// EndTurn leaves the unit and target fields empty.
struct LogEntry {
  int turn = 0;
  PlayerId player = 0;
  Action action;
  std::uint64_t post_fingerprint = 0;

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

inline std::string format_log_line(const LogEntry& e) {
  std::ostringstream os;
  os << e.turn << ';' << e.player << ';' << to_string(e.action.category) << ';';
  if (!e.action.is_end_turn()) os << e.action.unit_id << ';' << e.action.target.x << ';' << e.action.target.y;
  else os << ";;";
  os << ';' << to_hex(e.post_fingerprint);
  return os.str();
}

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline int parse_int(const std::string& s, const char* what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw QueryError(std::string("bad ") + what + " '" + s + "'");
  return v;
}

}  // namespace detail

/// Inverse of format_log_line. Throws QueryError on malformed input.
inline LogEntry parse_log_line(std::string_view line) {
  auto f = detail::split(line, ';');
  if (f.size() != 7) throw QueryError("log line needs 7 fields: '" + std::string(line) + "'");
  LogEntry e;
  e.turn = detail::parse_int(f[0], "turn");
  e.player = detail::parse_int(f[1], "player");
  auto cat = parse_action_category(f[2]);
  if (!cat) throw QueryError("unknown action category '" + f[2] + "'");
  if (*cat == ActionCategory::EndTurn) {
    e.action = Action::end_turn();
  } else {
    e.action = Action{*cat, detail::parse_int(f[3], "unit id"),
                      Coord{detail::parse_int(f[4], "target x"), detail::parse_int(f[5], "target y")}};
  }
  if (f[6].size() != 16) throw QueryError("bad fingerprint '" + f[6] + "'");
  try {
    e.post_fingerprint = std::stoull(f[6], nullptr, 16);
  } catch (const std::exception&) {
    throw QueryError("bad fingerprint '" + f[6] + "'");
  }
  return e;
}

}  // namespace stratagem
