#include <gtest/gtest.h>

#include <sstream>
#include <thread>

#include "support.hpp"

using namespace stratagem;
using namespace testing_support;
using namespace std::chrono_literals;

namespace {

std::vector<Seat> seats(std::initializer_list<const char*> specs, int budget = 1000) {
  std::vector<Seat> out;
  for (const char* s : specs) out.push_back(std::string(s) == "external" ? Seat::human() : Seat::from(make_agent(s, budget)));
  return out;
}

SessionOptions with_seed(std::uint64_t seed) {
  SessionOptions o;
  o.seed = seed;
  return o;
}

bool wait_until(const std::function<bool()>& pred, std::chrono::milliseconds limit = 5s) {
  const auto end = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < end) {
    if (pred()) return true;
    std::this_thread::sleep_for(1ms);
  }
  return pred();
}

// Always proposes a move for a unit that does not exist.
class BrokenAgent final : public Agent {
 public:
  Action act(AgentContext&) override { return Action::move(99, {0, 0}); }
};

// Records what it was shown, then ends its turn.
class Recorder final : public Agent {
 public:
  explicit Recorder(std::vector<GameState>& seen) : seen_(seen) {}
  Action act(AgentContext& ctx) override {
    seen_.push_back(ctx.observation);
    return Action::end_turn();
  }

 private:
  std::vector<GameState>& seen_;
};

}  // namespace

// --- headless games --------------------------------------------------------------

TEST(RunGame, SameSeedSameReplayBytes) {
  const auto m = duel_model();
  for (std::uint64_t seed : {1u, 7u, 99u}) {
    auto [r1, log1] = run_game(m, seats({"random", "random"}), with_seed(seed));
    auto [r2, log2] = run_game(m, seats({"random", "random"}), with_seed(seed));
    EXPECT_EQ(format_replay(log1), format_replay(log2));
    EXPECT_EQ(r1.final_fingerprint, r2.final_fingerprint);
  }
  auto [a, la] = run_game(m, seats({"random", "random"}), with_seed(1));
  auto [b, lb] = run_game(m, seats({"random", "random"}), with_seed(2));
  EXPECT_NE(format_replay(la), format_replay(lb));
}

TEST(RunGame, StatefulPlannersAreDeterministicToo) {
  const auto m = duel_model();
  auto [r1, l1] = run_game(m, seats({"rhea", "mcts"}, 300), with_seed(4));
  auto [r2, l2] = run_game(m, seats({"rhea", "mcts"}, 300), with_seed(4));
  EXPECT_EQ(format_replay(l1), format_replay(l2));
}

TEST(RunGame, OslaBeatsDoNothingFromAdjacentWarriors) {
  const auto m = std::make_shared<const ForwardModel>(duel_with({{0, "Warrior", {2, 2}}, {1, "Warrior", {2, 3}}}));
  auto [r, log] = run_game(m, seats({"osla", "donothing"}), with_seed(1));
  EXPECT_EQ(r.outcome, Outcome::won_by(0));
  EXPECT_LE(r.turns, 10);
  // Scripted check: the defender loses 20 per round to attacks and 10 to its
  // own tick, so it cannot outlast four rounds.
  EXPECT_LE(r.turns, 3);
}

TEST(RunGame, OslaBeatsDoNothingOnDuelDeployments) {
  const auto m = duel_model();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const bool swap = seed % 2;
    auto [r, log] = run_game(m, swap ? seats({"donothing", "osla"}) : seats({"osla", "donothing"}), with_seed(seed));
    EXPECT_EQ(r.outcome, Outcome::won_by(swap ? 1 : 0)) << "seed " << seed;
  }
}

TEST(RunGame, DoNothingMirrorEndsOnTheTenthTick) {
  // 100 HP, 10 per own end of turn: player 0's Warrior dies at the end of
  // its 10th turn (round 9), before player 1's 10th tick.
  auto [r, log] = run_game(duel_model(), seats({"donothing", "donothing"}), with_seed(1));
  EXPECT_EQ(r.outcome, Outcome::won_by(1));
  EXPECT_EQ(r.turns, 9);
  EXPECT_EQ(log.entries.size(), 19u);
}

TEST(RunGame, TurnLimitForcesDraw) {
  auto cfg = duel_config();
  cfg.effects.clear();
  const auto m = std::make_shared<const ForwardModel>(cfg);
  auto opts = with_seed(1);
  opts.max_turns = 5;
  auto [r, log] = run_game(m, seats({"donothing", "donothing"}), opts);
  EXPECT_EQ(r.outcome, Outcome::draw());
  EXPECT_EQ(r.turns, 5);
  EXPECT_FALSE(r.interrupted);
  EXPECT_EQ(log.footer->outcome, "draw");
}

TEST(RunGame, InapplicableAgentActionBecomesEndTurn) {
  std::vector<Seat> s;
  s.push_back(Seat{std::make_unique<BrokenAgent>(), {10, 0}, "broken"});
  s.push_back(Seat::from(make_agent("donothing")));
  auto [r, log] = run_game(duel_model(), std::move(s), with_seed(1));
  EXPECT_TRUE(r.outcome.is_over());
  EXPECT_GT(r.seats[0].substituted, 0);
  for (const auto& e : log.entries)
    if (e.player == 0) {
      EXPECT_TRUE(e.action.is_end_turn());
    }
}

TEST(RunGame, FoggedSeatsSeeOnlyTheirObservation) {
  auto cfg = duel_config();
  cfg.partial_observability = true;
  const auto m = std::make_shared<const ForwardModel>(cfg);
  std::vector<GameState> seen;
  std::vector<Seat> s;
  s.push_back(Seat{std::make_unique<Recorder>(seen), {10, 0}, "recorder"});
  s.push_back(Seat::from(make_agent("random")));
  auto opts = with_seed(3);
  opts.fog = true;
  run_game(m, std::move(s), opts);
  ASSERT_FALSE(seen.empty());
  for (const auto& obs : seen) {
    EXPECT_TRUE(obs.is_fogged);
    EXPECT_EQ(obs.rng_state, 0u);
    const auto mask = m->visibility_mask(obs, 0);
    for (const auto& u : obs.units) EXPECT_TRUE(u.owner == 0 || mask[obs.board.index(u.position)]);
  }
}

TEST(RunGame, RejectsExternalSeatsAndSeatCountMismatch) {
  EXPECT_THROW(run_game(duel_model(), seats({"random", "external"}), {}), UsageError);
  EXPECT_THROW(run_game(duel_model(), seats({"random"}), {}), UsageError);
}

TEST(RunGame, ResultCarriesPerSeatStats) {
  auto [r, log] = run_game(duel_model(), seats({"osla", "random"}, 200), with_seed(2));
  ASSERT_EQ(r.seats.size(), 2u);
  EXPECT_GT(r.seats[0].forward_calls, 0);
  EXPECT_EQ(r.seats[1].forward_calls, 0);
  EXPECT_EQ(r.seats[0].decisions + r.seats[1].decisions, static_cast<int>(log.entries.size()));
  EXPECT_LE(r.seats[0].max_ms, r.seats[0].total_ms);
}

// --- replay --------------------------------------------------------------------

TEST(Replay, RoundTripsAndVerifies) {
  const auto m = duel_model();
  auto [r, log] = run_game(m, seats({"combat", "random"}), with_seed(5));
  std::istringstream in(format_replay(log));
  const auto back = read_replay(in);
  EXPECT_EQ(format_replay(back), format_replay(log));
  EXPECT_EQ(back.seats, (std::vector<std::string>{"combat", "random"}));
  const auto check = replay_game(back, *m);
  EXPECT_EQ(check.final_fingerprint, r.final_fingerprint);
  EXPECT_EQ(check.outcome, r.outcome);
  EXPECT_EQ(check.step_fingerprints.size(), log.entries.size());
  EXPECT_EQ(log.config_sha, sha256_hex(serialize_config(m->config())));
}

TEST(Replay, DeletedLineDivergesAtThatIndex) {
  const auto m = duel_model();
  auto [r, log] = run_game(m, seats({"random", "random"}), with_seed(8));
  ASSERT_GE(log.entries.size(), 8u);
  for (std::size_t k : {std::size_t{0}, std::size_t{5}, log.entries.size() - 2}) {
    auto bad = log;
    bad.entries.erase(bad.entries.begin() + static_cast<std::ptrdiff_t>(k));
    try {
      replay_game(bad, *m);
      ADD_FAILURE() << "no divergence after deleting line " << k;
    } catch (const ReplayError& e) {
      EXPECT_EQ(e.step(), k);
    }
  }
}

TEST(Replay, EditedAttackDamageDivergesAtFirstAttack) {
  const auto m = duel_model();
  auto [r, log] = run_game(m, seats({"combat", "combat"}), with_seed(1));
  std::size_t first_attack = log.entries.size();
  for (std::size_t i = 0; i < log.entries.size(); ++i)
    if (log.entries[i].action.category == ActionCategory::Attack) {
      first_attack = i;
      break;
    }
  ASSERT_LT(first_attack, log.entries.size());
  auto cfg = duel_config();
  cfg.find_unit_type("Warrior");
  for (auto& u : cfg.unit_types)
    if (u.name == "Warrior") u.attack_damage = 25;
  const ForwardModel edited(cfg);
  try {
    replay_game(log, edited);
    FAIL() << "edited config replayed cleanly";
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.step(), first_attack);
  }
}

TEST(Replay, TruncatedAndMalformedFiles) {
  const auto m = duel_model();
  auto [r, log] = run_game(m, seats({"random", "random"}), with_seed(3));
  auto text = format_replay(log);
  auto cut = text.substr(0, text.rfind("end;"));
  std::istringstream in(cut);
  try {
    read_replay(in);
    FAIL();
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.step(), log.entries.size());
    EXPECT_NE(std::string(e.what()).find("truncated"), std::string::npos);
  }
  std::istringstream empty("");
  EXPECT_THROW(read_replay(empty), ReplayError);
  std::istringstream bad_header("abc;1;x\n");
  EXPECT_THROW(read_replay(bad_header), ReplayError);
  auto garbled = text;
  garbled.replace(garbled.find('\n') + 1, 1, "x");
  std::istringstream g(garbled);
  try {
    read_replay(g);
    FAIL();
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.step(), 0u);
  }
}

TEST(Replay, TamperedFooterIsCaught) {
  const auto m = duel_model();
  auto [r, log] = run_game(m, seats({"random", "random"}), with_seed(3));
  auto bad = log;
  bad.footer->final_fingerprint ^= 1;
  EXPECT_THROW(replay_game(bad, *m), ReplayError);
  auto late = log;
  ASSERT_TRUE(late.footer.has_value());
  late.footer->turns += 1;
  EXPECT_THROW(replay_game(late, *m), ReplayError);
}

// --- interactive sessions ----------------------------------------------------------

TEST(Session, ExternalSeatSubmissions) {
  Session session(duel_model(), seats({"external", "donothing"}), with_seed(1));
  std::mutex mu;
  std::vector<SessionSignal> signals;
  session.subscribe([&](const SessionSignal& s) {
    std::lock_guard lk(mu);
    signals.push_back(s);
  });
  session.start();
  ASSERT_TRUE(wait_until([&] { return session.status().phase == SessionPhase::AwaitingExternal; }));

  {
    std::lock_guard lk(mu);
    ASSERT_FALSE(signals.empty());
    const auto& sig = signals.back();
    EXPECT_EQ(sig.kind, SessionSignal::Kind::AwaitingExternal);
    EXPECT_EQ(sig.player, 0);
    EXPECT_EQ(sig.legal_actions, session.model().generate_actions(sig.observation).actions);
  }

  const auto fp = fingerprint(session.poll_observation(0).observation);
  EXPECT_EQ(session.submit_action(1, Action::end_turn()).kind, SubmitResult::Kind::Ignored);
  EXPECT_EQ(session.submit_action(5, Action::end_turn()).kind, SubmitResult::Kind::Rejected);
  const auto stale = session.submit_action(0, Action::move(0, {0, 0}));
  EXPECT_EQ(stale.kind, SubmitResult::Kind::Rejected);
  EXPECT_EQ(stale.reason, "not applicable");
  EXPECT_EQ(fingerprint(session.poll_observation(0).observation), fp);

  // Two polls with no action in between agree.
  EXPECT_EQ(fingerprint(session.poll_observation(1).observation), fingerprint(session.poll_observation(1).observation));

  const auto moved = session.submit_action(0, Action::move(0, {2, 1}));
  EXPECT_TRUE(moved.accepted());
  const auto snap = session.poll_observation(0);
  EXPECT_EQ(snap.observation.find_unit(0)->position, (Coord{2, 1}));
  EXPECT_TRUE(snap.your_turn);
  EXPECT_FALSE(snap.legal_actions.empty());

  EXPECT_TRUE(session.submit_action(0, Action::end_turn()).accepted());
  // The donothing seat answers at once, so it is our turn again.
  ASSERT_TRUE(wait_until([&] { return session.status().phase == SessionPhase::AwaitingExternal; }));
  EXPECT_EQ(session.poll_observation(0).observation.turn_number, 1);
  EXPECT_EQ(session.submit_action(1, Action::end_turn()).reason, "seat is played by an agent");

  session.stop();
  session.wait();
  const auto st = session.status();
  EXPECT_EQ(st.phase, SessionPhase::Finished);
  EXPECT_TRUE(st.interrupted);
  EXPECT_EQ(session.submit_action(0, Action::end_turn()).kind, SubmitResult::Kind::Ignored);
  EXPECT_EQ(session.replay().footer->outcome, "interrupted");
  session.join();
}

TEST(Session, WaitsIndefinitelyForAnExternalSeat) {
  Session session(duel_model(), seats({"random", "external"}), with_seed(2));
  session.start();
  ASSERT_TRUE(wait_until([&] { return session.status().phase == SessionPhase::AwaitingExternal; }));
  EXPECT_FALSE(session.wait_for(300ms));
  EXPECT_EQ(session.status().awaiting, 1);
  // Polling during the wait is fine for both seats and spectators.
  EXPECT_FALSE(session.poll_observation(0).your_turn);
  EXPECT_TRUE(session.poll_observation(1).your_turn);
  EXPECT_FALSE(session.poll_observation(kNoPlayer).your_turn);
  session.stop();
  session.join();
}

TEST(Session, HumanPlaysAGameToTheEnd) {
  Session session(duel_model(), seats({"random", "external"}), with_seed(11));
  session.start();
  SplitMix64 rng(4);
  while (session.status().phase != SessionPhase::Finished) {
    if (!wait_until([&] {
          auto st = session.status();
          return st.phase == SessionPhase::Finished || st.phase == SessionPhase::AwaitingExternal;
        }))
      FAIL() << "session stalled";
    const auto snap = session.poll_observation(1);
    if (!snap.your_turn) continue;
    const auto& legal = snap.legal_actions;
    ASSERT_FALSE(legal.empty());
    EXPECT_TRUE(session.submit_action(1, legal[static_cast<std::size_t>(rng.below(legal.size()))]).accepted());
  }
  session.join();
  const auto res = session.result();
  EXPECT_TRUE(res.outcome.is_over());
  EXPECT_FALSE(res.interrupted);
  const auto check = replay_game(session.replay(), session.model());
  EXPECT_EQ(check.final_fingerprint, res.final_fingerprint);
  const auto after = session.poll_observation(0);
  EXPECT_EQ(after.status.phase, SessionPhase::Finished);
  EXPECT_EQ(after.status.outcome, res.outcome);
}

TEST(Session, AgentOnlyGamesSignalEveryAction) {
  Session session(duel_model(), seats({"random", "random"}), with_seed(6));
  int events = 0, awaiting = 0, over = 0;
  session.subscribe([&](const SessionSignal& s) {
    events += s.kind == SessionSignal::Kind::Events;
    awaiting += s.kind == SessionSignal::Kind::AwaitingExternal;
    over += s.kind == SessionSignal::Kind::GameOver;
  });
  session.run();
  EXPECT_EQ(events, static_cast<int>(session.replay().entries.size()));
  EXPECT_EQ(awaiting, 0);
  EXPECT_EQ(over, 1);
  EXPECT_THROW(session.run(), Error);
}

// --- arena ---------------------------------------------------------------------

TEST(Arena, PairingsSeatsAndSeeds) {
  ArenaOptions o;
  o.games_per_pairing = 4;
  o.base_seed = 100;
  const std::vector<std::string> roster{"random", "donothing", "osla"};
  const auto st = run_arena(duel_model(), roster, o);
  ASSERT_EQ(st.games.size(), 12u);  // 3 pairings
  for (std::size_t g = 0; g < st.games.size(); ++g) {
    EXPECT_EQ(st.games[g].seed, 100 + g);
    EXPECT_EQ(st.games[g].pairing, static_cast<int>(g / 4));
  }
  // Every pair sits on each side equally often.
  std::map<std::pair<std::string, std::string>, int> sides;
  for (const auto& g : st.games) sides[{g.seat0, g.seat1}]++;
  for (const auto& [k, n] : sides) {
    EXPECT_EQ(n, 2);
    EXPECT_EQ((sides[{k.second, k.first}]), 2);
  }
  for (const auto& row : st.rows) EXPECT_EQ(row.games(), 8);
  int wins = 0, losses = 0;
  for (const auto& row : st.rows) {
    wins += row.wins;
    losses += row.losses;
  }
  EXPECT_EQ(wins, losses);
}

TEST(Arena, IdenticalSeedsGiveIdenticalStandings) {
  ArenaOptions o;
  o.games_per_pairing = 4;
  o.base_seed = 9;
  const std::vector<std::string> roster{"random", "combat"};
  std::ostringstream a, b;
  write_arena_csv(a, run_arena(duel_model(), roster, o));
  write_arena_csv(b, run_arena(duel_model(), roster, o));
  EXPECT_EQ(a.str(), b.str());
  const auto csv = a.str();
  EXPECT_EQ(csv.rfind("pairing;seat0;seat1;seed;outcome;turns\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST(Arena, RandomVersusDoNothing) {
  // Without holes nothing can kill Random in seat 1 before DoNothing's own
  // tenth tick does, so that half is a clean sweep.
  auto cfg = duel_config();
  std::erase_if(cfg.effects, [](const EffectDef& e) { return e.type == EffectType::Death; });
  ArenaOptions o;
  o.games_per_pairing = 10;
  const auto st = run_arena(std::make_shared<const ForwardModel>(cfg), {"random", "donothing"}, o);
  for (const auto& g : st.games)
    if (g.seat1 == "random") {
      EXPECT_EQ(g.outcome, "1") << "seed " << g.seed;
    }
  EXPECT_GE(st.rows[0].wins + st.rows[0].draws, 5);

}

TEST(Arena, BadRosterFailsFast) {
  EXPECT_THROW(run_arena(duel_model(), {"random"}, {}), UsageError);
  EXPECT_THROW(run_arena(duel_model(), {"random", "mctss"}, {}), UsageError);
}

TEST(Arena, StandingsTable) {
  Standings st;
  st.rows = {{"mcts", 8, 0, 2}, {"random", 2, 0, 8}};
  const auto text = format_standings(st);
  EXPECT_NE(text.find("rate"), std::string::npos);
  EXPECT_NE(text.find("0.800  [0.490, 0.943]"), std::string::npos) << text;
}

TEST(Wilson, KnownValues) {
  // Reference values from the closed form, computed independently.
  auto ref = [](int k, int n) {
    const double z = 1.959963984540054, p = static_cast<double>(k) / n;
    const double c = (p + z * z / (2 * n)) / (1 + z * z / n);
    const double h = z / (1 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4.0 * n * n));
    return std::pair{c - h, c + h};
  };
  for (auto [k, n] : {std::pair{8, 10}, {0, 10}, {10, 10}, {45, 50}, {1, 3}}) {
    const auto w = wilson_interval(k, n);
    const auto [lo, hi] = ref(k, n);
    EXPECT_NEAR(w.low, std::max(0.0, lo), 1e-4);
    EXPECT_NEAR(w.high, std::min(1.0, hi), 1e-4);
  }
  EXPECT_NEAR(wilson_interval(8, 10).low, 0.4902, 1e-4);
  EXPECT_NEAR(wilson_interval(8, 10).high, 0.9433, 1e-4);
  const auto none = wilson_interval(0, 0);
  EXPECT_EQ(none.low, 0.0);
  EXPECT_EQ(none.high, 1.0);
}
