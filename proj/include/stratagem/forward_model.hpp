#pragma once

// Rules engine: action-space generation, applicability checks, state
// transitions with trigger/effect rules, the win condition, and fog-of-war
// observation plus determinization.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "stratagem/config.hpp"
#include "stratagem/errors.hpp"
#include "stratagem/model.hpp"
#include "stratagem/rng.hpp"

namespace stratagem {

struct ActionSpace {
  PlayerId player = kNoPlayer;
  std::vector<Action> actions;

  std::size_t size() const { return actions.size(); }
  const Action& operator[](std::size_t i) const { return actions[i]; }
  bool contains(const Action& a) const { return std::find(actions.begin(), actions.end(), a) != actions.end(); }
};

enum class EventKind { UnitMoved, UnitDamaged, UnitHealed, UnitDied, EffectFired, TurnEnded, GameOver };

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::UnitMoved: return "UnitMoved";
    case EventKind::UnitDamaged: return "UnitDamaged";
    case EventKind::UnitHealed: return "UnitHealed";
    case EventKind::UnitDied: return "UnitDied";
    case EventKind::EffectFired: return "EffectFired";
    case EventKind::TurnEnded: return "TurnEnded";
    case EventKind::GameOver: return "GameOver";
  }
  return "?";
}

/// Result of the win condition.
struct Outcome {
  enum class Kind { Ongoing, Winner, Draw };
  Kind kind = Kind::Ongoing;
  PlayerId winner = kNoPlayer;

  static Outcome ongoing() { return {}; }
  static Outcome won_by(PlayerId p) { return {Kind::Winner, p}; }
  static Outcome draw() { return {Kind::Draw, kNoPlayer}; }

  bool is_over() const { return kind != Kind::Ongoing; }
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

inline std::string to_string(const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::Ongoing: return "ongoing";
    case Outcome::Kind::Draw: return "draw";
    case Outcome::Kind::Winner: return std::to_string(o.winner);
  }
  return "?";
}

/// Something that happened while advancing a state. Fields not relevant to
/// the kind keep their defaults.
struct GameEvent {
  EventKind kind = EventKind::TurnEnded;
  UnitId unit_id = kNoUnit;
  PlayerId player = kNoPlayer;
  Coord from;
  Coord to;
  int amount = 0;
  int health_after = 0;
  std::string effect;  // EffectFired only
  Outcome outcome;     // GameOver only

  friend bool operator==(const GameEvent&, const GameEvent&) = default;
};

struct CompletionBias {
  double unit_presence_probability = 0.05;
};

class ForwardModel {
 public:
  explicit ForwardModel(GameConfig cfg) : cfg_(std::move(cfg)) {
    auto diags = validate_config(cfg_);
    if (has_errors(diags)) throw ConfigError("forward model needs a valid config");
  }

  const GameConfig& config() const { return cfg_; }
  const UnitType& unit_type(UnitTypeId id) const { return cfg_.unit_types[static_cast<std::size_t>(id)]; }
  const UnitType& unit_type_of(const Unit& u) const { return unit_type(u.type); }
  const TileType& tile_at(const GameState& s, Coord c) const {
    return cfg_.tile_types[static_cast<std::size_t>(s.board.at(c))];
  }

  GameState initial_state(std::uint64_t seed) const { return instantiate_state(cfg_, seed); }

  bool is_traversable(const GameState& s, Coord c) const { return stratagem::is_traversable(s, cfg_.tile_types, c); }

  // -------------------------------------------------------------------------
  // Win condition

  /// LastManStanding: the only player with units wins; nobody left is a draw.
  /// In a fogged observation a player with no visible units still counts
  /// while its public alive flag is set.
  Outcome check_win(const GameState& s) const {
    PlayerId survivor = kNoPlayer;
    int with_units = 0;
    for (const auto& p : s.players)
      if (in_game(s, p)) {
        ++with_units;
        survivor = p.player_id;
      }
    if (with_units == 0) return Outcome::draw();
    if (with_units == 1) return Outcome::won_by(survivor);
    return Outcome::ongoing();
  }

  // -------------------------------------------------------------------------
  // Movement

  /// Tiles a unit can Move to: 4-connected paths of at most movement_range
  /// steps through traversable cells, start excluded. Row-major order.
  std::vector<Coord> reachable_tiles(const GameState& s, UnitId id) const {
    const Unit* u = s.find_unit(id);
    if (!u) throw QueryError("unknown unit id " + std::to_string(id));
    const int range = unit_type_of(*u).movement_range;
    std::vector<Coord> out;
    if (range <= 0) return out;

    const auto& b = s.board;
    std::vector<int> dist(b.size(), -1);
    std::vector<char> blocked(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i)
      blocked[i] = !cfg_.tile_types[static_cast<std::size_t>(b.tiles[i])].walkable;
    for (const auto& other : s.units) blocked[b.index(other.position)] = 1;

    std::deque<Coord> frontier{u->position};
    dist[b.index(u->position)] = 0;
    while (!frontier.empty()) {
      Coord c = frontier.front();
      frontier.pop_front();
      const int d = dist[b.index(c)];
      if (d == range) continue;
      for (Coord n : {Coord{c.x + 1, c.y}, Coord{c.x - 1, c.y}, Coord{c.x, c.y + 1}, Coord{c.x, c.y - 1}}) {
        if (!in_bounds(b, n)) continue;
        const auto ni = b.index(n);
        if (blocked[ni] || dist[ni] >= 0) continue;
        dist[ni] = d + 1;
        frontier.push_back(n);
      }
    }
    for (std::size_t i = 0; i < b.size(); ++i)
      if (dist[i] > 0) out.push_back(b.coord_of(i));
    return out;
  }

  // -------------------------------------------------------------------------
  // Action space

  /// Every legal action of the player to move, ordered by unit id, then
  /// category (Move, Attack, Heal), then target row-major; EndTurn last.
  ActionSpace generate_actions(const GameState& s) const {
    if (check_win(s).is_over()) throw QueryError("no actions in a terminal state");
    ActionSpace space;
    space.player = s.current_player;
    for (const auto& u : s.units) {
      if (u.owner != s.current_player) continue;
      const auto& type = unit_type_of(u);
      if (type.can(ActionCategory::Move) && !u.spent.contains(ActionCategory::Move))
        for (Coord c : reachable_tiles(s, u.unit_id)) space.actions.push_back(Action::move(u.unit_id, c));
      if (type.can(ActionCategory::Attack) && !u.spent.contains(ActionCategory::Attack))
        for (Coord c : attack_targets(s, u)) space.actions.push_back(Action::attack(u.unit_id, c));
      if (type.can(ActionCategory::Heal) && !u.spent.contains(ActionCategory::Heal))
        for (Coord c : heal_targets(s, u)) space.actions.push_back(Action::heal(u.unit_id, c));
    }
    space.actions.push_back(Action::end_turn());
    return space;
  }

  /// True iff `a` would appear in generate_actions(s). Checked directly,
  /// without building the whole action space.
  bool is_applicable(const GameState& s, const Action& a) const {
    if (check_win(s).is_over()) return false;
    if (a.is_end_turn()) return a == Action::end_turn();
    const Unit* u = s.find_unit(a.unit_id);
    if (!u || u->owner != s.current_player) return false;
    const auto& type = unit_type_of(*u);
    if (!type.can(a.category) || u->spent.contains(a.category)) return false;
    if (!in_bounds(s.board, a.target)) return false;
    switch (a.category) {
      case ActionCategory::Move: {
        auto tiles = reachable_tiles(s, u->unit_id);
        return std::find(tiles.begin(), tiles.end(), a.target) != tiles.end();
      }
      case ActionCategory::Attack: {
        if (manhattan(u->position, a.target) > type.attack_range) return false;
        const Unit* t = unit_at(s, a.target);
        return t && t->owner != u->owner;
      }
      case ActionCategory::Heal: {
        if (manhattan(u->position, a.target) > type.heal_range) return false;
        const Unit* t = unit_at(s, a.target);
        return t && t->owner == u->owner && t->health < unit_type_of(*t).health;
      }
      case ActionCategory::EndTurn: break;
    }
    return false;
  }

  // -------------------------------------------------------------------------
  // Transitions

  /// Applies `a` to `s` in place and returns the events in execution order.
  /// With `checked`, an inapplicable action throws RuleError and leaves `s`
  /// untouched; unchecked callers guarantee applicability.
  std::vector<GameEvent> advance(GameState& s, const Action& a, bool checked = true) const {
    if (checked && !is_applicable(s, a)) throw RuleError("action not applicable: " + to_string(a));
    std::vector<GameEvent> events;
    switch (a.category) {
      case ActionCategory::Move: {
        Unit* u = s.find_unit(a.unit_id);
        events.push_back(unit_event(EventKind::UnitMoved, *u, a.target));
        events.back().from = u->position;
        u->position = a.target;
        u->spent.insert(ActionCategory::Move);
        fire(s, Trigger::EnterTile, u->unit_id, events);
        break;
      }
      case ActionCategory::Attack: {
        Unit* u = s.find_unit(a.unit_id);
        u->spent.insert(ActionCategory::Attack);
        const int damage = unit_type_of(*u).attack_damage;
        Unit* target = const_cast<Unit*>(unit_at(s, a.target));
        damage_unit(s, target->unit_id, damage, events);
        break;
      }
      case ActionCategory::Heal: {
        Unit* u = s.find_unit(a.unit_id);
        u->spent.insert(ActionCategory::Heal);
        const int amount = unit_type_of(*u).heal_amount;
        Unit* target = const_cast<Unit*>(unit_at(s, a.target));
        heal_unit(*target, amount, events);
        break;
      }
      case ActionCategory::EndTurn:
        end_turn(s, events);
        break;
    }
    refresh_alive(s);
    auto outcome = check_win(s);
    if (outcome.is_over()) {
      GameEvent over;
      over.kind = EventKind::GameOver;
      over.outcome = outcome;
      over.player = outcome.winner;
      events.push_back(over);
    }
    return events;
  }

  /// Fires every effect with the given trigger on `subject`, in declaration
  /// order. A unit killed by one effect is not touched by later ones.
  std::vector<GameEvent> apply_effects(GameState& s, Trigger trigger, UnitId subject) const {
    if (!s.find_unit(subject)) throw QueryError("unknown unit id " + std::to_string(subject));
    std::vector<GameEvent> events;
    fire(s, trigger, subject, events);
    refresh_alive(s);
    return events;
  }

  // -------------------------------------------------------------------------
  // Partial observability

  /// Cells within line-of-sight Manhattan distance of any of the player's
  /// units, as a row-major mask over the board.
  std::vector<char> visibility_mask(const GameState& s, PlayerId player) const {
    const auto& b = s.board;
    std::vector<char> mask(b.size(), 0);
    for (const auto& u : s.units) {
      if (u.owner != player) continue;
      const int r = unit_type_of(u).line_of_sight_range;
      for (int dy = -r; dy <= r; ++dy) {
        const int span = r - (dy < 0 ? -dy : dy);
        for (int dx = -span; dx <= span; ++dx) {
          Coord c{u.position.x + dx, u.position.y + dy};
          if (in_bounds(b, c)) mask[b.index(c)] = 1;
        }
      }
    }
    return mask;
  }

  std::vector<Coord> visible_tiles(const GameState& s, PlayerId player) const {
    auto mask = visibility_mask(s, player);
    std::vector<Coord> out;
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (mask[i]) out.push_back(s.board.coord_of(i));
    return out;
  }

  /// The player's view: hidden tiles read as the default tile, hidden enemy
  /// units are dropped, and the RNG stream is withheld.
  GameState observe(const GameState& s, PlayerId player) const {
    if (s.is_fogged) throw QueryError("state is already a fogged observation");
    auto mask = visibility_mask(s, player);
    GameState obs = s;
    const TileTypeId fog = cfg_.default_tile();
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (!mask[i]) obs.board.tiles[i] = fog;
    std::erase_if(obs.units,
                  [&](const Unit& u) { return u.owner != player && !mask[obs.board.index(u.position)]; });
    obs.rng_state = 0;
    obs.is_fogged = true;
    obs.observer = player;
    return obs;
  }

  /// Samples a full state consistent with a fogged observation. Hidden tiles
  /// get uniformly drawn types; each hidden walkable cell holds a sampled
  /// enemy unit with the bias probability, while the per-opponent budget
  /// (deployed units minus visible units) lasts.
  GameState complete_observation(const GameState& obs, CompletionBias bias, std::uint64_t seed) const {
    if (!obs.is_fogged) throw QueryError("complete_observation needs a fogged observation");
    const double p = std::clamp(bias.unit_presence_probability, 0.0, 1.0);
    auto mask = visibility_mask(obs, obs.observer);
    SplitMix64 rng(seed);
    GameState full = obs;

    std::vector<std::pair<PlayerId, int>> budget;
    for (const auto& pl : obs.players)
      if (pl.player_id != obs.observer)
        budget.emplace_back(pl.player_id, std::max(0, pl.initial_units - obs.unit_count(pl.player_id)));

    UnitId next_id = obs.next_unit_id();
    std::vector<Unit> sampled;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i]) continue;
      const auto tile = static_cast<TileTypeId>(rng.below(cfg_.tile_types.size()));
      full.board.tiles[i] = tile;
      if (!cfg_.tile_types[static_cast<std::size_t>(tile)].walkable) continue;
      std::vector<std::size_t> open;
      for (std::size_t k = 0; k < budget.size(); ++k)
        if (budget[k].second > 0) open.push_back(k);
      if (open.empty()) continue;
      if (!rng.chance(p)) continue;
      auto& slot = budget[open[rng.below(open.size())]];
      --slot.second;
      const auto& type = cfg_.unit_types[rng.below(cfg_.unit_types.size())];
      sampled.push_back({next_id++, slot.first, type.id, full.board.coord_of(i), type.health, {}});
    }
    full.units.insert(full.units.end(), sampled.begin(), sampled.end());
    full.is_fogged = false;
    full.observer = kNoPlayer;
    full.rng_state = SplitMix64::mix(seed);
    refresh_alive(full);
    return full;
  }

 private:
  std::vector<Coord> attack_targets(const GameState& s, const Unit& u) const {
    const int r = unit_type_of(u).attack_range;
    std::vector<Coord> out;
    for (const auto& t : s.units)
      if (t.owner != u.owner && manhattan(t.position, u.position) <= r) out.push_back(t.position);
    std::sort(out.begin(), out.end(), row_major_less);
    return out;
  }

  std::vector<Coord> heal_targets(const GameState& s, const Unit& u) const {
    const int r = unit_type_of(u).heal_range;
    std::vector<Coord> out;
    for (const auto& t : s.units)
      if (t.owner == u.owner && manhattan(t.position, u.position) <= r && t.health < unit_type_of(t).health)
        out.push_back(t.position);
    std::sort(out.begin(), out.end(), row_major_less);
    return out;
  }

  static GameEvent unit_event(EventKind kind, const Unit& u, Coord at, int amount = 0) {
    GameEvent e;
    e.kind = kind;
    e.unit_id = u.unit_id;
    e.player = u.owner;
    e.from = u.position;
    e.to = at;
    e.amount = amount;
    e.health_after = u.health;
    return e;
  }

  void damage_unit(GameState& s, UnitId id, int amount, std::vector<GameEvent>& events) const {
    Unit* t = s.find_unit(id);
    t->health -= amount;
    events.push_back(unit_event(EventKind::UnitDamaged, *t, t->position, amount));
    if (t->health <= 0) kill_unit(s, id, events);
  }

  void heal_unit(Unit& t, int amount, std::vector<GameEvent>& events) const {
    const int before = t.health;
    t.health = std::min(unit_type_of(t).health, t.health + amount);
    events.push_back(unit_event(EventKind::UnitHealed, t, t.position, t.health - before));
  }

  void kill_unit(GameState& s, UnitId id, std::vector<GameEvent>& events) const {
    const Unit* t = s.find_unit(id);
    events.push_back(unit_event(EventKind::UnitDied, *t, t->position));
    s.remove_unit(id);
  }

  bool condition_holds(const GameState& s, const EffectDef& e, const Unit& subject) const {
    if (e.condition == EffectCondition::None) return true;
    return tile_at(s, subject.position).name == *e.target_tile;
  }

  void fire(GameState& s, Trigger trigger, UnitId subject, std::vector<GameEvent>& events) const {
    for (const auto& e : cfg_.effects) {
      if (e.trigger != trigger) continue;
      const Unit* u = s.find_unit(subject);
      if (!u) return;
      if (!condition_holds(s, e, *u)) continue;
      GameEvent fired = unit_event(EventKind::EffectFired, *u, u->position, e.amount.value_or(0));
      fired.effect = e.name;
      events.push_back(fired);
      switch (e.type) {
        case EffectType::Damage: damage_unit(s, subject, *e.amount, events); break;
        case EffectType::Heal: heal_unit(*s.find_unit(subject), *e.amount, events); break;
        case EffectType::Death: kill_unit(s, subject, events); break;
      }
    }
  }

  void end_turn(GameState& s, std::vector<GameEvent>& events) const {
    const PlayerId ending = s.current_player;
    std::vector<UnitId> own;
    for (const auto& u : s.units)
      if (u.owner == ending) own.push_back(u.unit_id);
    // Effects in declaration order; within an effect, units by ascending id.
    for (const auto& e : cfg_.effects) {
      if (e.trigger != Trigger::EndOfTurn) continue;
      for (UnitId id : own) {
        const Unit* u = s.find_unit(id);
        if (!u || !condition_holds(s, e, *u)) continue;
        GameEvent fired = unit_event(EventKind::EffectFired, *u, u->position, e.amount.value_or(0));
        fired.effect = e.name;
        events.push_back(fired);
        switch (e.type) {
          case EffectType::Damage: damage_unit(s, id, *e.amount, events); break;
          case EffectType::Heal: heal_unit(*s.find_unit(id), *e.amount, events); break;
          case EffectType::Death: kill_unit(s, id, events); break;
        }
      }
    }
    for (auto& u : s.units)
      if (u.owner == ending) u.spent.clear();
    GameEvent ended;
    ended.kind = EventKind::TurnEnded;
    ended.player = ending;
    events.push_back(ended);

    // Next player holding units; wrapping past the highest id starts a new round.
    std::vector<PlayerId> alive;
    for (const auto& p : s.players)
      if (in_game(s, p)) alive.push_back(p.player_id);
    if (alive.empty()) return;
    std::sort(alive.begin(), alive.end());
    auto next = std::upper_bound(alive.begin(), alive.end(), ending);
    if (next == alive.end()) {
      s.current_player = alive.front();
      ++s.turn_number;
    } else {
      s.current_player = *next;
    }
  }

  static bool in_game(const GameState& s, const Player& p) {
    return s.unit_count(p.player_id) > 0 || (s.is_fogged && p.alive);
  }

  static void refresh_alive(GameState& s) {
    for (auto& p : s.players) {
      if (s.is_fogged && p.player_id != s.observer) continue;
      p.alive = s.unit_count(p.player_id) > 0;
    }
  }

  GameConfig cfg_;
};

}  // namespace stratagem
