#pragma once

// Round-robin tournaments with seat-swapped pairings.

#include <cmath>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stratagem/runner/session.hpp"

namespace stratagem {

struct ArenaOptions {
  int games_per_pairing = 10;
  std::uint64_t base_seed = 0;
  int default_budget = 1000;
  bool fog = false;
  int max_turns = 100;
};

struct ArenaGame {
  int pairing = 0;
  std::string seat0, seat1;
  std::uint64_t seed = 0;
  std::string outcome;  // "0", "1" or "draw"
  int turns = 0;
};

struct StandingRow {
  std::string agent;
  int wins = 0, draws = 0, losses = 0;

  int games() const { return wins + draws + losses; }
  double win_rate() const { return games() ? static_cast<double>(wins) / games() : 0.0; }
};

struct Interval {
  double low = 0.0, high = 0.0;
};

/// Wilson score interval for k successes in n trials (z = 1.96 for 95%).
inline Interval wilson_interval(int k, int n, double z = 1.96) {
  if (n <= 0) return {0.0, 1.0};
  const double p = static_cast<double>(k) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct Standings {
  std::vector<StandingRow> rows;  // roster order
  std::vector<ArenaGame> games;
};

/// Plays every unordered pair of the roster `games_per_pairing` times, the
/// second half with seats swapped. Game g (counted across the whole arena)
/// uses seed base_seed + g. Only two-player configs are supported.
inline Standings run_arena(std::shared_ptr<const ForwardModel> model, const std::vector<std::string>& roster,
                           const ArenaOptions& opts) {
  if (roster.size() < 2) throw UsageError("arena needs at least two agents");
  for (const auto& r : roster) make_agent(r, opts.default_budget);  // fail fast on bad specs

  Standings st;
  for (const auto& r : roster) st.rows.push_back({r});
  int pairing = 0;
  std::uint64_t game_index = 0;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    for (std::size_t j = i + 1; j < roster.size(); ++j, ++pairing) {
      for (int g = 0; g < opts.games_per_pairing; ++g, ++game_index) {
        const bool swapped = g >= (opts.games_per_pairing + 1) / 2;
        const std::size_t a = swapped ? j : i;
        const std::size_t b = swapped ? i : j;
        std::vector<Seat> seats;
        seats.push_back(Seat::from(make_agent(roster[a], opts.default_budget)));
        seats.push_back(Seat::from(make_agent(roster[b], opts.default_budget)));
        SessionOptions so;
        so.seed = opts.base_seed + game_index;
        so.fog = opts.fog;
        so.max_turns = opts.max_turns;
        so.session_id = std::to_string(game_index);
        auto [result, replay] = run_game(model, std::move(seats), so);

        st.games.push_back({pairing, roster[a], roster[b], so.seed, to_string(result.outcome), result.turns});
        if (result.outcome.kind == Outcome::Kind::Draw) {
          st.rows[a].draws++;
          st.rows[b].draws++;
        } else {
          const std::size_t winner = result.outcome.winner == 0 ? a : b;
          const std::size_t loser = winner == a ? b : a;
          st.rows[winner].wins++;
          st.rows[loser].losses++;
        }
      }
    }
  }
  return st;
}

inline void write_arena_csv(std::ostream& os, const Standings& st) {
  os << "pairing;seat0;seat1;seed;outcome;turns\n";
  for (const auto& g : st.games)
    os << g.pairing << ';' << g.seat0 << ';' << g.seat1 << ';' << g.seed << ';' << g.outcome << ';' << g.turns << '\n';
}

inline std::string format_standings(const Standings& st) {
  std::size_t width = 5;
  for (const auto& r : st.rows) width = std::max(width, r.agent.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width)) << "agent" << std::right << std::setw(6) << "W"
     << std::setw(6) << "D" << std::setw(6) << "L" << std::setw(9) << "rate" << "  95% CI\n";
  os << std::fixed << std::setprecision(3);
  for (const auto& r : st.rows) {
    const auto ci = wilson_interval(r.wins, r.games());
    os << std::left << std::setw(static_cast<int>(width)) << r.agent << std::right << std::setw(6) << r.wins
       << std::setw(6) << r.draws << std::setw(6) << r.losses << std::setw(9) << r.win_rate() << "  [" << ci.low
       << ", " << ci.high << "]\n";
  }
  return os.str();
}

}  // namespace stratagem
