#pragma once

#include <algorithm>
#include <limits>
#include <optional>

#include "stratagem/agents/agent.hpp"

namespace stratagem {

class DoNothingAgent final : public Agent {
 public:
  Action act(AgentContext&) override { return Action::end_turn(); }
};

/// Uniform draw from the action space.
class RandomAgent final : public Agent {
 public:
  Action act(AgentContext& ctx) override {
    auto space = ctx.model->generate_actions(ctx.observation);
    return space[static_cast<std::size_t>(ctx.rng.below(space.size()))];
  }
};

/// Fixed-priority combat script:
///   1. heal the weakest ally below half health,
///   2. take the lethal attack with the largest overkill,
///   3. take the attack with the highest damage,
///   4. move the unit closest to an enemy to the tile closest to an enemy,
///   5. end the turn.
/// Ties go to the earlier action in action-space order. Moves onto tiles
/// with a harmful EnterTile effect are never considered.
class RuleBasedCombatAgent final : public Agent {
 public:
  Action act(AgentContext& ctx) override {
    const auto& model = *ctx.model;
    const auto& s = ctx.observation;
    auto space = model.generate_actions(s);

    std::optional<std::size_t> pick;
    int best = std::numeric_limits<int>::max();
    for (std::size_t i = 0; i < space.size(); ++i) {
      const auto& a = space[i];
      if (a.category != ActionCategory::Heal) continue;
      const Unit* t = unit_at(s, a.target);
      if (2 * t->health >= model.unit_type_of(*t).health) continue;
      if (t->health < best) {
        best = t->health;
        pick = i;
      }
    }
    if (pick) return space[*pick];

    int best_overkill = -1;
    int best_damage = -1;
    std::optional<std::size_t> lethal, strongest;
    for (std::size_t i = 0; i < space.size(); ++i) {
      const auto& a = space[i];
      if (a.category != ActionCategory::Attack) continue;
      const int dmg = model.unit_type_of(*s.find_unit(a.unit_id)).attack_damage;
      const int hp = unit_at(s, a.target)->health;
      if (dmg >= hp && dmg - hp > best_overkill) {
        best_overkill = dmg - hp;
        lethal = i;
      }
      if (dmg > best_damage) {
        best_damage = dmg;
        strongest = i;
      }
    }
    if (lethal) return space[*lethal];
    if (strongest) return space[*strongest];

    if (auto move = approach_move(model, s, space)) return *move;
    return Action::end_turn();
  }

 private:
  static int nearest_enemy(const GameState& s, PlayerId owner, Coord from) {
    int d = std::numeric_limits<int>::max();
    for (const auto& e : s.units)
      if (e.owner != owner) d = std::min(d, manhattan(from, e.position));
    return d;
  }

  static bool hazardous(const ForwardModel& model, const GameState& s, Coord c) {
    const auto& tile = model.tile_at(s, c);
    for (const auto& e : model.config().effects)
      if (e.trigger == Trigger::EnterTile && e.type != EffectType::Heal &&
          (e.condition == EffectCondition::None || e.target_tile == tile.name))
        return true;
    return false;
  }

  static std::optional<Action> approach_move(const ForwardModel& model, const GameState& s, const ActionSpace& space) {
    std::optional<UnitId> mover;
    int mover_dist = std::numeric_limits<int>::max();
    for (const auto& a : space.actions) {
      if (a.category != ActionCategory::Move) continue;
      const Unit* u = s.find_unit(a.unit_id);
      const int d = nearest_enemy(s, u->owner, u->position);
      if (d == std::numeric_limits<int>::max()) continue;
      if (d < mover_dist) {
        mover_dist = d;
        mover = u->unit_id;
      }
    }
    if (!mover) return std::nullopt;
    std::optional<Action> best;
    int best_dist = std::numeric_limits<int>::max();
    for (const auto& a : space.actions) {
      if (a.category != ActionCategory::Move || a.unit_id != *mover || hazardous(model, s, a.target)) continue;
      const int d = nearest_enemy(s, space.player, a.target);
      if (d < best_dist) {
        best_dist = d;
        best = a;
      }
    }
    return best;
  }
};

}  // namespace stratagem
