#pragma once

// Test fixtures and independent oracles. Nothing here calls into the forward
// model's own move generation; the oracles re-derive everything from the
// rules as written.

#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stratagem/stratagem.hpp"

namespace testing_support {

using namespace stratagem;

inline std::string source_path(const std::string& rel) { return std::string(STRATAGEM_SOURCE_DIR) + "/" + rel; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline GameConfig duel_config() { return load_config(slurp(source_path("examples/paper.yaml"))); }

inline std::shared_ptr<const ForwardModel> duel_model() { return std::make_shared<const ForwardModel>(duel_config()); }

/// The example duel config with its deployments replaced.
inline GameConfig duel_with(std::vector<Deployment> deployments) {
  auto cfg = duel_config();
  cfg.deployments = std::move(deployments);
  return cfg;
}

// ---------------------------------------------------------------------------
// Reachability oracle: enumerate every walk of up to `range` steps.

inline bool oracle_free(const GameConfig& cfg, const GameState& s, Coord c) {
  if (c.x < 0 || c.y < 0 || c.x >= s.board.width || c.y >= s.board.height) return false;
  if (!cfg.tile_types[static_cast<std::size_t>(s.board.tiles[static_cast<std::size_t>(c.y * s.board.width + c.x)])].walkable)
    return false;
  for (const auto& u : s.units)
    if (u.position == c) return false;
  return true;
}

inline std::set<std::pair<int, int>> oracle_reachable(const GameConfig& cfg, const GameState& s, const Unit& u) {
  const int range = cfg.unit_types[static_cast<std::size_t>(u.type)].movement_range;
  std::set<std::pair<int, int>> out;
  std::function<void(Coord, int)> walk = [&](Coord c, int left) {
    if (left == 0) return;
    const Coord steps[] = {{c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}};
    for (Coord n : steps) {
      if (!oracle_free(cfg, s, n)) continue;
      out.insert({n.y, n.x});  // row-major key
      walk(n, left - 1);
    }
  };
  walk(u.position, range);
  return out;
}

inline std::vector<Coord> oracle_reachable_list(const GameConfig& cfg, const GameState& s, const Unit& u) {
  std::vector<Coord> out;
  for (auto [y, x] : oracle_reachable(cfg, s, u)) out.push_back({x, y});
  return out;
}

/// Action enumerator written straight from the rules: every unit of the
/// player to move, every unspent listed category, every cell in row-major
/// order that satisfies that category's target rule; EndTurn last.
inline std::vector<Action> oracle_actions(const GameConfig& cfg, const GameState& s) {
  std::vector<Action> out;
  auto occupant = [&](int x, int y) -> const Unit* {
    for (const auto& u : s.units)
      if (u.position.x == x && u.position.y == y) return &u;
    return nullptr;
  };
  std::vector<const Unit*> mine;
  for (const auto& u : s.units)
    if (u.owner == s.current_player) mine.push_back(&u);
  std::sort(mine.begin(), mine.end(), [](const Unit* a, const Unit* b) { return a->unit_id < b->unit_id; });
  for (const Unit* u : mine) {
    const auto& t = cfg.unit_types[static_cast<std::size_t>(u->type)];
    auto listed = [&](ActionCategory c) { return std::find(t.actions.begin(), t.actions.end(), c) != t.actions.end(); };
    if (listed(ActionCategory::Move) && !u->spent.contains(ActionCategory::Move))
      for (Coord c : oracle_reachable_list(cfg, s, *u)) out.push_back(Action::move(u->unit_id, c));
    if (listed(ActionCategory::Attack) && !u->spent.contains(ActionCategory::Attack))
      for (int y = 0; y < s.board.height; ++y)
        for (int x = 0; x < s.board.width; ++x) {
          const Unit* o = occupant(x, y);
          const int d = std::abs(x - u->position.x) + std::abs(y - u->position.y);
          if (o && o->owner != u->owner && d <= t.attack_range) out.push_back(Action::attack(u->unit_id, {x, y}));
        }
    if (listed(ActionCategory::Heal) && !u->spent.contains(ActionCategory::Heal))
      for (int y = 0; y < s.board.height; ++y)
        for (int x = 0; x < s.board.width; ++x) {
          const Unit* o = occupant(x, y);
          const int d = std::abs(x - u->position.x) + std::abs(y - u->position.y);
          if (o && o->owner == u->owner && d <= t.heal_range &&
              o->health < cfg.unit_types[static_cast<std::size_t>(o->type)].health)
            out.push_back(Action::heal(u->unit_id, {x, y}));
        }
  }
  out.push_back(Action::end_turn());
  return out;
}

// ---------------------------------------------------------------------------
// Random small scenarios

struct Scenario {
  GameConfig config;
  GameState state;
};

/// A board of at most 5x5 with 2 or 3 units on two sides, random terrain,
/// random unit stats, and random health and spent flags.
inline Scenario random_scenario(SplitMix64& rng) {
  Scenario sc;
  auto& cfg = sc.config;
  cfg.tile_types = {{0, "Floor", '.', true, true}, {1, "Rock", '#', false, false}, {2, "Mud", '~', true, false}};
  cfg.board.width = 1 + static_cast<int>(rng.below(5));
  cfg.board.height = 1 + static_cast<int>(rng.below(5));
  while (cfg.board.width * cfg.board.height < 3) cfg.board.width = 1 + static_cast<int>(rng.below(5));
  cfg.board.tiles.resize(static_cast<std::size_t>(cfg.board.width * cfg.board.height));
  for (auto& t : cfg.board.tiles) t = static_cast<TileTypeId>(rng.chance(0.25) ? 1 : (rng.chance(0.3) ? 2 : 0));

  for (int k = 0; k < 2; ++k) {
    UnitType u;
    u.id = k;
    u.name = k == 0 ? "Alpha" : "Beta";
    u.health = 5 + static_cast<int>(rng.below(20));
    u.movement_range = static_cast<int>(rng.below(5));
    u.line_of_sight_range = static_cast<int>(rng.below(4));
    u.attack_range = 1 + static_cast<int>(rng.below(2));
    u.heal_range = 1 + static_cast<int>(rng.below(2));
    if (rng.chance(0.8)) u.actions.push_back(ActionCategory::Move);
    if (rng.chance(0.7)) {
      u.actions.push_back(ActionCategory::Attack);
      u.attack_damage = 1 + static_cast<int>(rng.below(10));
    }
    if (rng.chance(0.5) || u.actions.empty()) {
      u.actions.push_back(ActionCategory::Heal);
      u.heal_amount = 1 + static_cast<int>(rng.below(5));
    }
    cfg.unit_types.push_back(u);
  }

  // Place units on distinct cells, walkable ones (forcing walkability if needed).
  const int n_units = 2 + static_cast<int>(rng.below(2));
  std::vector<int> cells(cfg.board.tiles.size());
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = static_cast<int>(i);
  for (std::size_t i = cells.size() - 1; i > 0; --i) std::swap(cells[i], cells[rng.below(i + 1)]);
  for (int k = 0; k < n_units; ++k) {
    const auto idx = static_cast<std::size_t>(cells[static_cast<std::size_t>(k)]);
    if (cfg.board.tiles[idx] == 1) cfg.board.tiles[idx] = 0;
    Coord c{static_cast<int>(idx) % cfg.board.width, static_cast<int>(idx) / cfg.board.width};
    const PlayerId owner = k < 2 ? k : static_cast<PlayerId>(rng.below(2));
    cfg.deployments.push_back({owner, cfg.unit_types[rng.below(2)].name, c});
  }
  sc.state = instantiate_state(cfg, rng());
  sc.state.current_player = static_cast<PlayerId>(rng.below(2));
  for (auto& u : sc.state.units) {
    u.health = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.unit_types[static_cast<std::size_t>(u.type)].health)));
    for (auto c : {ActionCategory::Move, ActionCategory::Attack, ActionCategory::Heal})
      if (rng.chance(0.25)) u.spent.insert(c);
  }
  return sc;
}

// ---------------------------------------------------------------------------
// The 2-ply trap
//
//   #######
//   #FEL..#      F: enemy striker, E: enemy blocker, our knight stands on the L
//   #######
//
// Attacking E kills it (+70 on the score) and opens the corridor; F then
// walks up and kills the knight wherever it went. Stepping off the lava
// is safe because E keeps F boxed in. Staying put costs 10 burn.

inline GameConfig trap_config() {
  const char* text = R"(Tiles:
  Floor:
    Symbol: .
    IsWalkable: true
  Wall:
    Symbol: '#'
    IsWalkable: false
  Lava:
    Symbol: L
    IsWalkable: true

Board:
  GenerationType: Manual
  Layout: |
    #######
    #..L..#
    #######

Units:
  Knight:
    Health: 30
    AttackDamage: 20
    MovementRange: 2
    LineOfSightRange: 6
    Actions: [Attack, Move]
  Striker:
    Health: 100
    AttackDamage: 100
    MovementRange: 3
    LineOfSightRange: 6
    Actions: [Attack, Move]
  Blocker:
    Health: 20
    MovementRange: 0
    LineOfSightRange: 6
    Actions: [Move]

ForwardModel:
  WinCondition: LastManStanding
  Effects:
    Burn:
      Type: Damage
      Trigger: EndOfTurn
      Condition: StandingOnTile
      TargetTile: Lava
      Amount: 10

Deployments:
  - {Player: 0, Type: Knight, Position: [3, 1]}
  - {Player: 1, Type: Striker, Position: [1, 1]}
  - {Player: 1, Type: Blocker, Position: [2, 1]}
)";
  return load_config(text);
}

/// All action sequences the player to move can play this turn, each ending
/// in EndTurn or in a terminal state, with the resulting states.
inline void enumerate_turns(const ForwardModel& model, const GameState& s,
                            const std::function<void(const GameState&)>& visit) {
  if (model.check_win(s).is_over()) return visit(s);
  for (const auto& a : oracle_actions(model.config(), s)) {
    GameState t = s;
    model.advance(t, a, true);
    if (a.is_end_turn() || model.check_win(t).is_over()) visit(t);
    else enumerate_turns(model, t, visit);
  }
}

/// Exhaustive turn-level 2-ply minimax value of playing `first` now: best
/// continuation of our turn, against the opponent's best full reply,
/// scored with evaluate_state for `me`.
inline double two_ply_value(const ForwardModel& model, const GameState& root, const Action& first,
                            const ScoreParams& w = {}) {
  const PlayerId me = root.current_player;
  GameState s = root;
  model.advance(s, first, true);
  double best = -std::numeric_limits<double>::infinity();
  auto after_mine = [&](const GameState& mine) {
    double worst = std::numeric_limits<double>::infinity();
    enumerate_turns(model, mine, [&](const GameState& reply) {
      worst = std::min(worst, evaluate_state(model, reply, me, w));
    });
    best = std::max(best, worst);
  };
  if (first.is_end_turn() || model.check_win(s).is_over()) after_mine(s);
  else enumerate_turns(model, s, after_mine);
  return best;
}

}  // namespace testing_support
