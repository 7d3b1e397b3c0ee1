#pragma once

#include <chrono>
#include <cmath>
#include <concepts>
#include <limits>
#include <string>

#include "stratagem/forward_model.hpp"
#include "stratagem/model.hpp"
#include "stratagem/rng.hpp"

namespace stratagem {

/// What a search algorithm needs from a rules engine. ForwardModel is the
/// only implementation shipped, but the planners accept any type modelling it.
template <class M>
concept SearchableModel = requires(const M& m, GameState& s, const GameState& cs, const Action& a) {
  { m.generate_actions(cs) } -> std::same_as<ActionSpace>;
  m.advance(s, a, false);
  { m.check_win(cs) } -> std::same_as<Outcome>;
  { m.complete_observation(cs, CompletionBias{}, std::uint64_t{}) } -> std::same_as<GameState>;
};

/// Decision budget. Forward-model calls are the primary bound; wall clock is
/// a safety net. A bound <= 0 is unset.
struct Budget {
  int max_forward_calls = 1000;
  int max_millis = 0;
};

class BudgetMeter {
 public:
  using Clock = std::chrono::steady_clock;

  explicit BudgetMeter(Budget b = {}) : budget_(b), start_(Clock::now()) {}

  bool exhausted() const {
    if (budget_.max_forward_calls > 0 && calls_ >= budget_.max_forward_calls) return true;
    if (budget_.max_millis > 0) {
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start_).count();
      if (ms >= budget_.max_millis) return true;
    }
    return false;
  }
  void charge() { ++calls_; }
  int calls() const { return calls_; }
  const Budget& budget() const { return budget_; }

 private:
  Budget budget_;
  Clock::time_point start_;
  int calls_ = 0;
};

/// Advances `s` by an action known to be applicable and charges one call.
template <SearchableModel M>
void simulate(const M& model, GameState& s, const Action& a, BudgetMeter& meter) {
  model.advance(s, a, false);
  meter.charge();
}

/// Everything an agent sees when asked for a decision.
struct AgentContext {
  PlayerId player = kNoPlayer;
  GameState observation;  // private copy, fogged when partial observability is on
  const ForwardModel* model = nullptr;
  SplitMix64 rng;
  BudgetMeter meter;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual Action act(AgentContext& ctx) = 0;
  /// Called before a new game; agents that carry state between decisions reset it here.
  virtual void reset() {}
};

// ---------------------------------------------------------------------------
// Scoring

struct ScoreParams {
  double w_own_health = 1.0;
  double w_enemy_health = 1.0;
  double w_own_units = 50.0;
  double w_enemy_units = 50.0;
  double w_distance = 1.0;
};

inline constexpr double kWinScore = 1e9;

/// Heuristic value of `s` for `player`. Terminal states score +/-1e9 (draw 0);
/// otherwise a weighted sum of unit counts and health, minus the mean
/// distance from each own unit to its nearest enemy.
template <SearchableModel M>
double evaluate_state(const M& model, const GameState& s, PlayerId player, const ScoreParams& w) {
  const Outcome o = model.check_win(s);
  if (o.kind == Outcome::Kind::Winner) return o.winner == player ? kWinScore : -kWinScore;
  if (o.kind == Outcome::Kind::Draw) return 0.0;

  double own_units = 0, enemy_units = 0, own_health = 0, enemy_health = 0, dist_sum = 0;
  for (const auto& u : s.units) {
    if (u.owner == player) {
      own_units += 1;
      own_health += u.health;
      int nearest = std::numeric_limits<int>::max();
      for (const auto& e : s.units)
        if (e.owner != player) nearest = std::min(nearest, manhattan(u.position, e.position));
      if (nearest != std::numeric_limits<int>::max()) dist_sum += nearest;
    } else {
      enemy_units += 1;
      enemy_health += u.health;
    }
  }
  const double mean_dist = own_units > 0 && enemy_units > 0 ? dist_sum / own_units : 0.0;
  return w.w_own_units * own_units - w.w_enemy_units * enemy_units + w.w_own_health * own_health -
         w.w_enemy_health * enemy_health - w.w_distance * mean_dist;
}

/// Logistic squashing of a score difference into [0, 1].
inline double squash(double delta, double scale = 0.01) { return 1.0 / (1.0 + std::exp(-scale * delta)); }

/// The state a planner searches from: the observation itself, or one sampled
/// completion of it when fogged. If the sampled completion is already
/// terminal (no hidden enemies were drawn), the fogged observation is
/// searched instead.
template <SearchableModel M>
GameState planning_state(const M& model, const GameState& obs, double bias, SplitMix64& rng) {
  if (!obs.is_fogged) return obs;
  GameState full = model.complete_observation(obs, CompletionBias{bias}, rng());
  if (model.check_win(full).is_over() && !model.check_win(obs).is_over()) return obs;
  return full;
}

}  // namespace stratagem
