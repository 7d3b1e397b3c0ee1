#pragma once

// Statistical forward planning: one-step look-ahead, flat Monte Carlo,
// open-loop MCTS and a rolling horizon evolutionary algorithm. Each planner
// is a function template over the rules engine plus a thin Agent wrapper.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "stratagem/agents/agent.hpp"

namespace stratagem {

/// Plays uniformly random actions for whoever is to move, for at most
/// `depth` actions or until the game ends or the budget runs out.
template <SearchableModel M>
void random_rollout(const M& model, GameState& s, int depth, SplitMix64& rng, BudgetMeter& meter) {
  for (int d = 0; d < depth; ++d) {
    if (meter.exhausted() || model.check_win(s).is_over()) return;
    auto space = model.generate_actions(s);
    simulate(model, s, space[static_cast<std::size_t>(rng.below(space.size()))], meter);
  }
}

/// Scans the root actions once, returning the first that wins outright.
template <SearchableModel M>
std::optional<Action> find_decisive(const M& model, const GameState& root, const ActionSpace& space, PlayerId me,
                                    BudgetMeter& meter) {
  for (const auto& a : space.actions) {
    if (meter.exhausted()) break;
    GameState s = root;
    simulate(model, s, a, meter);
    const auto o = model.check_win(s);
    if (o.kind == Outcome::Kind::Winner && o.winner == me) return a;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// One-step look-ahead

/// Argmax of evaluate_state over single-action successors; first wins ties.
/// Returns the best action seen so far if the budget runs out mid-scan.
template <SearchableModel M>
Action osla_search(const M& model, const GameState& root, PlayerId me, const ScoreParams& params, BudgetMeter& meter) {
  auto space = model.generate_actions(root);
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (meter.exhausted()) break;
    GameState s = root;
    simulate(model, s, space[i], meter);
    const double v = evaluate_state(model, s, me, params);
    if (v > best_score) {
      best_score = v;
      best = i;
    }
  }
  return space[best];
}

// ---------------------------------------------------------------------------
// Flat Monte Carlo

struct MonteCarloParams {
  ScoreParams score;
  int rollout_depth = 10;
  double completion_bias = 0.05;
  bool redeterminize = false;
};

/// Cycles through the root actions; each visit applies the action, plays a
/// random rollout and scores the end state. Highest mean wins, first on ties.
template <SearchableModel M>
Action mc_search(const M& model, const GameState& obs, PlayerId me, const MonteCarloParams& p, SplitMix64& rng,
                 BudgetMeter& meter) {
  GameState root = planning_state(model, obs, p.completion_bias, rng);
  auto space = model.generate_actions(root);
  if (auto win = find_decisive(model, root, space, me, meter)) return *win;

  std::vector<double> sum(space.size(), 0.0);
  std::vector<int> visits(space.size(), 0);
  for (std::size_t i = 0; !meter.exhausted(); i = (i + 1) % space.size()) {
    GameState s = p.redeterminize ? planning_state(model, obs, p.completion_bias, rng) : root;
    if (p.redeterminize && !model.is_applicable(s, space[i])) continue;
    simulate(model, s, space[i], meter);
    random_rollout(model, s, p.rollout_depth, rng, meter);
    sum[i] += evaluate_state(model, s, me, p.score);
    ++visits[i];
  }
  std::size_t best = 0;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (visits[i] == 0) continue;
    const double mean = sum[i] / visits[i];
    if (mean > best_mean) {
      best_mean = mean;
      best = i;
    }
  }
  return space[best];
}

// ---------------------------------------------------------------------------
// Monte Carlo tree search

struct MctsParams {
  ScoreParams score;
  double exploration = 1.414;
  int rollout_depth = 10;
  double completion_bias = 0.05;
  bool redeterminize = false;
};

/// Open-loop UCT. Nodes are keyed by the action sequence from the root, not
/// by state. Values are squashed score deltas in [0, 1] from `me`'s point
/// of view; at nodes where an opponent moves, selection maximises 1 - value.
/// Recommends the most visited root child, the earliest expanded on ties.
template <SearchableModel M>
Action mcts_search(const M& model, const GameState& obs, PlayerId me, const MctsParams& p, SplitMix64& rng,
                   BudgetMeter& meter) {
  struct Node {
    Action action;
    std::vector<int> children;
    int visits = 0;
    double value = 0.0;
  };

  GameState root = planning_state(model, obs, p.completion_bias, rng);
  const auto root_space = model.generate_actions(root);
  if (auto win = find_decisive(model, root, root_space, me, meter)) return *win;

  std::vector<Node> tree(1);
  std::vector<int> path;
  const double base = evaluate_state(model, root, me, p.score);

  while (!meter.exhausted()) {
    GameState s = p.redeterminize ? planning_state(model, obs, p.completion_bias, rng) : root;
    const double start = p.redeterminize ? evaluate_state(model, s, me, p.score) : base;
    path.assign(1, 0);
    int node = 0;

    while (!meter.exhausted() && !model.check_win(s).is_over()) {
      const auto space = model.generate_actions(s);
      std::vector<std::size_t> untried;
      for (std::size_t i = 0; i < space.size(); ++i) {
        const auto& kids = tree[static_cast<std::size_t>(node)].children;
        if (std::none_of(kids.begin(), kids.end(),
                         [&](int c) { return tree[static_cast<std::size_t>(c)].action == space[i]; }))
          untried.push_back(i);
      }
      if (!untried.empty()) {
        const Action a = space[untried[static_cast<std::size_t>(rng.below(untried.size()))]];
        simulate(model, s, a, meter);
        tree.push_back(Node{a, {}, 0, 0.0});
        const int child = static_cast<int>(tree.size()) - 1;
        tree[static_cast<std::size_t>(node)].children.push_back(child);
        path.push_back(child);
        break;
      }

      const bool maximizing = s.current_player == me;
      const double log_n = std::log(static_cast<double>(std::max(1, tree[static_cast<std::size_t>(node)].visits)));
      int chosen = -1;
      double best_ucb = -std::numeric_limits<double>::infinity();
      for (int c : tree[static_cast<std::size_t>(node)].children) {
        const Node& ch = tree[static_cast<std::size_t>(c)];
        if (!space.contains(ch.action)) continue;
        const double mean = ch.visits ? ch.value / ch.visits : 0.5;
        const double exploit = maximizing ? mean : 1.0 - mean;
        const double ucb = exploit + p.exploration * std::sqrt(log_n / std::max(1, ch.visits));
        if (ucb > best_ucb) {
          best_ucb = ucb;
          chosen = c;
        }
      }
      simulate(model, s, tree[static_cast<std::size_t>(chosen)].action, meter);
      node = chosen;
      path.push_back(node);
    }

    random_rollout(model, s, p.rollout_depth, rng, meter);
    const double value = squash(evaluate_state(model, s, me, p.score) - start);
    for (int n : path) {
      tree[static_cast<std::size_t>(n)].visits += 1;
      tree[static_cast<std::size_t>(n)].value += value;
    }
  }

  int best = -1;
  for (int c : tree[0].children) {
    if (!root_space.contains(tree[static_cast<std::size_t>(c)].action)) continue;
    if (best < 0 || tree[static_cast<std::size_t>(c)].visits > tree[static_cast<std::size_t>(best)].visits) best = c;
  }
  return best < 0 ? root_space[0] : tree[static_cast<std::size_t>(best)].action;
}

// ---------------------------------------------------------------------------
// Rolling horizon evolution

enum class OpponentModel { Random, Greedy };

struct RheaParams {
  ScoreParams score;
  int population = 20;
  int horizon = 10;
  int generations = 0;  // 0: evolve until the budget is spent
  double mutation_rate = 0.1;
  double completion_bias = 0.05;
  OpponentModel opponent = OpponentModel::Random;
  bool exhaustive_seeding = false;  // individual i starts with root action i
  bool shift_buffer = true;
};

/// Genome: one action index per own decision. -1 means "draw at decode".
using Genome = std::vector<int>;

/// Plays one opponent action. Greedy picks the opponent's own one-step argmax.
template <SearchableModel M>
void opponent_step(const M& model, GameState& s, OpponentModel om, const ScoreParams& w, SplitMix64& rng,
                   BudgetMeter& meter) {
  auto space = model.generate_actions(s);
  if (om == OpponentModel::Random) {
    simulate(model, s, space[static_cast<std::size_t>(rng.below(space.size()))], meter);
    return;
  }
  const PlayerId them = s.current_player;
  std::size_t best = space.size() - 1;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < space.size() && !meter.exhausted(); ++i) {
    GameState t = s;
    simulate(model, t, space[i], meter);
    const double v = evaluate_state(model, t, them, w);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  simulate(model, s, space[best], meter);
}

/// Decodes a genome from `root`, repairing out-of-range or unset genes with a
/// uniform draw. Opponent turns are played by the opponent model and consume
/// no genes. Returns the score of the final state.
template <SearchableModel M>
double rhea_decode(const M& model, const GameState& root, PlayerId me, Genome& genes, const RheaParams& p,
                   SplitMix64& rng, BudgetMeter& meter) {
  GameState s = root;
  for (auto& g : genes) {
    while (!model.check_win(s).is_over() && s.current_player != me && !meter.exhausted())
      opponent_step(model, s, p.opponent, p.score, rng, meter);
    if (model.check_win(s).is_over() || meter.exhausted()) break;
    auto space = model.generate_actions(s);
    if (g < 0 || static_cast<std::size_t>(g) >= space.size()) g = static_cast<int>(rng.below(space.size()));
    simulate(model, s, space[static_cast<std::size_t>(g)], meter);
  }
  return evaluate_state(model, s, me, p.score);
}

/// Evolves action sequences and returns the first action of the best one.
/// `buffer` carries the previous decision's best genome for the shift buffer
/// and receives this decision's best.
template <SearchableModel M>
Action rhea_search(const M& model, const GameState& obs, PlayerId me, const RheaParams& p, SplitMix64& rng,
                   BudgetMeter& meter, Genome* buffer = nullptr) {
  struct Individual {
    Genome genes;
    double fitness = -std::numeric_limits<double>::infinity();
    int samples = 1;
  };
  // Higher fitness first; on equal fitness the earlier root action.
  auto better = [](const Individual& a, const Individual& b) {
    return a.fitness != b.fitness ? a.fitness > b.fitness : a.genes.front() < b.genes.front();
  };

  GameState root = planning_state(model, obs, p.completion_bias, rng);
  const auto root_space = model.generate_actions(root);
  const int horizon = std::max(1, p.horizon);
  const int pop_size = std::max(1, p.population);

  std::vector<Individual> pop;
  auto evaluate_into = [&](Genome g) -> bool {
    if (meter.exhausted()) return false;
    Individual ind{std::move(g)};
    ind.fitness = rhea_decode(model, root, me, ind.genes, p, rng, meter);
    pop.push_back(std::move(ind));
    return true;
  };

  for (int i = 0; i < pop_size; ++i) {
    Genome g(static_cast<std::size_t>(horizon), -1);
    if (p.exhaustive_seeding && static_cast<std::size_t>(i) < root_space.size()) {
      g[0] = i;
    } else if (i == 0 && p.shift_buffer && buffer && buffer->size() > 1) {
      for (std::size_t k = 1; k < buffer->size() && k - 1 < g.size(); ++k) g[k - 1] = (*buffer)[k];
    }
    if (!evaluate_into(std::move(g))) break;
  }
  if (pop.empty()) return root_space[0];

  auto tournament = [&](const std::vector<Individual>& from) -> const Individual& {
    const auto& a = from[static_cast<std::size_t>(rng.below(from.size()))];
    const auto& b = from[static_cast<std::size_t>(rng.below(from.size()))];
    return better(a, b) ? a : b;
  };

  for (int gen = 0; (p.generations <= 0 || gen < p.generations) && !meter.exhausted(); ++gen) {
    std::sort(pop.begin(), pop.end(), better);
    std::vector<Individual> parents = std::move(pop);
    pop.clear();
    // The elite is decoded again each generation and keeps its mean fitness,
    // so one lucky playout cannot hold the top slot.
    Individual elite = parents.front();
    Genome again = elite.genes;
    const double f = rhea_decode(model, root, me, again, p, rng, meter);
    if (!meter.exhausted()) {
      ++elite.samples;
      elite.fitness += (f - elite.fitness) / elite.samples;
    }
    pop.push_back(std::move(elite));
    while (static_cast<int>(pop.size()) < pop_size) {
      const auto& x = tournament(parents);
      const auto& y = tournament(parents);
      Genome child(static_cast<std::size_t>(horizon));
      for (std::size_t k = 0; k < child.size(); ++k) {
        child[k] = rng.below(2) ? x.genes[k] : y.genes[k];
        if (rng.chance(p.mutation_rate)) child[k] = -1;
      }
      if (!evaluate_into(std::move(child))) break;
    }
  }

  const auto& best = *std::min_element(pop.begin(), pop.end(), better);
  if (buffer) *buffer = best.genes;
  return root_space[static_cast<std::size_t>(best.genes.front())];
}

// ---------------------------------------------------------------------------
// Agent wrappers

class OslaAgent final : public Agent {
 public:
  explicit OslaAgent(ScoreParams params = {}, double completion_bias = 0.05)
      : params_(params), bias_(completion_bias) {}
  Action act(AgentContext& ctx) override {
    GameState root = planning_state(*ctx.model, ctx.observation, bias_, ctx.rng);
    return osla_search(*ctx.model, root, ctx.player, params_, ctx.meter);
  }

 private:
  ScoreParams params_;
  double bias_;
};

class MonteCarloAgent final : public Agent {
 public:
  explicit MonteCarloAgent(MonteCarloParams params = {}) : params_(params) {}
  Action act(AgentContext& ctx) override {
    return mc_search(*ctx.model, ctx.observation, ctx.player, params_, ctx.rng, ctx.meter);
  }

 private:
  MonteCarloParams params_;
};

class MctsAgent final : public Agent {
 public:
  explicit MctsAgent(MctsParams params = {}) : params_(params) {}
  Action act(AgentContext& ctx) override {
    return mcts_search(*ctx.model, ctx.observation, ctx.player, params_, ctx.rng, ctx.meter);
  }

 private:
  MctsParams params_;
};

class RheaAgent final : public Agent {
 public:
  explicit RheaAgent(RheaParams params = {}) : params_(params) {}
  Action act(AgentContext& ctx) override {
    return rhea_search(*ctx.model, ctx.observation, ctx.player, params_, ctx.rng, ctx.meter, &buffer_);
  }
  void reset() override { buffer_.clear(); }

 private:
  RheaParams params_;
  Genome buffer_;
};

}  // namespace stratagem
