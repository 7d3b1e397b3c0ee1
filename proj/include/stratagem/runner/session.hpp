#pragma once

// Turn-based game runner. One runner thread owns the true state; agents
// decide on their own worker threads; external (human) seats are served
// through submit_action and the awaiting-external signal.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "stratagem/agents/registry.hpp"
#include "stratagem/forward_model.hpp"
#include "stratagem/log.hpp"
#include "stratagem/runner/replay.hpp"

namespace stratagem {

/// Runs one agent on a dedicated thread and hands it decisions one at a time.
class AgentWorker {
 public:
  explicit AgentWorker(Agent& agent) : agent_(agent), thread_([this] { loop(); }) {}
  AgentWorker(const AgentWorker&) = delete;
  AgentWorker& operator=(const AgentWorker&) = delete;
  ~AgentWorker() {
    {
      std::lock_guard lk(m_);
      quit_ = true;
    }
    cv_.notify_all();
    thread_.join();
  }

  /// Blocks until the agent has answered. Exceptions thrown by the agent are
  /// rethrown here.
  Action decide(AgentContext& ctx) {
    std::unique_lock lk(m_);
    job_ = &ctx;
    done_ = false;
    cv_.notify_all();
    cv_.wait(lk, [this] { return done_; });
    if (error_) std::rethrow_exception(std::exchange(error_, nullptr));
    return answer_;
  }

 private:
  void loop() {
    std::unique_lock lk(m_);
    for (;;) {
      cv_.wait(lk, [this] { return quit_ || job_ != nullptr; });
      if (quit_) return;
      AgentContext* ctx = std::exchange(job_, nullptr);
      lk.unlock();
      Action a;
      std::exception_ptr err;
      try {
        a = agent_.act(*ctx);
      } catch (...) {
        err = std::current_exception();
      }
      lk.lock();
      answer_ = a;
      error_ = err;
      done_ = true;
      cv_.notify_all();
    }
  }

  Agent& agent_;
  std::mutex m_;
  std::condition_variable cv_;
  AgentContext* job_ = nullptr;
  Action answer_;
  std::exception_ptr error_;
  bool done_ = false;
  bool quit_ = false;
  std::thread thread_;
};

/// A player slot: an agent, or external when `agent` is null.
struct Seat {
  std::unique_ptr<Agent> agent;
  Budget budget;
  std::string label;

  bool external() const { return agent == nullptr; }

  static Seat from(AgentEntry e) { return Seat{std::move(e.agent), e.budget, e.label}; }
  static Seat human() { return Seat{nullptr, {}, "external"}; }
};

struct SessionOptions {
  std::uint64_t seed = 0;
  bool fog = false;
  int max_turns = 100;  // full rounds before a forced draw
  std::string session_id = "0";
};

enum class SessionPhase { Lobby, Running, AwaitingExternal, Finished };

inline std::string_view to_string(SessionPhase p) {
  switch (p) {
    case SessionPhase::Lobby: return "lobby";
    case SessionPhase::Running: return "running";
    case SessionPhase::AwaitingExternal: return "awaiting_external";
    case SessionPhase::Finished: return "finished";
  }
  return "?";
}

struct SessionStatus {
  SessionPhase phase = SessionPhase::Lobby;
  PlayerId awaiting = kNoPlayer;  // set while AwaitingExternal
  Outcome outcome;                // set when Finished
  bool interrupted = false;       // Finished by stop() rather than by the rules
};

struct SubmitResult {
  enum class Kind { Accepted, Ignored, Rejected };
  Kind kind = Kind::Rejected;
  std::string reason;

  bool accepted() const { return kind == Kind::Accepted; }
};

inline std::string_view to_string(SubmitResult::Kind k) {
  switch (k) {
    case SubmitResult::Kind::Accepted: return "accepted";
    case SubmitResult::Kind::Ignored: return "ignored";
    case SubmitResult::Kind::Rejected: return "rejected";
  }
  return "?";
}

/// A consistent view of the session for one player (or a spectator when
/// player is kNoPlayer). `legal_actions` is filled only on that player's turn.
struct Snapshot {
  PlayerId player = kNoPlayer;
  GameState observation;
  SessionStatus status;
  bool your_turn = false;
  std::vector<Action> legal_actions;
  std::size_t actions_applied = 0;
};

struct SessionSignal {
  enum class Kind { Events, AwaitingExternal, GameOver };
  Kind kind = Kind::Events;
  std::vector<GameEvent> events;  // Events
  PlayerId player = kNoPlayer;    // AwaitingExternal: the seat to move
  GameState observation;          // AwaitingExternal
  std::vector<Action> legal_actions;
  SessionStatus status;
};

struct SeatStats {
  long forward_calls = 0;
  int decisions = 0;
  double total_ms = 0.0;
  double max_ms = 0.0;
  int substituted = 0;  // inapplicable actions replaced by EndTurn
};

struct GameResult {
  Outcome outcome;
  int turns = 0;
  bool interrupted = false;
  std::vector<SeatStats> seats;
  std::uint64_t final_fingerprint = 0;
};

class Session {
 public:
  using Subscriber = std::function<void(const SessionSignal&)>;

  Session(std::shared_ptr<const ForwardModel> model, std::vector<Seat> seats, SessionOptions opts = {})
      : model_(std::move(model)), seats_(std::move(seats)), opts_(std::move(opts)) {
    state_ = model_->initial_state(opts_.seed);
    if (seats_.size() != state_.players.size())
      throw UsageError("config has " + std::to_string(state_.players.size()) + " players but " +
                       std::to_string(seats_.size()) + " seats were given");
    for (std::size_t i = 0; i < state_.players.size(); ++i)
      if (state_.players[i].player_id != static_cast<PlayerId>(i))
        throw UsageError("players must be numbered 0.." + std::to_string(state_.players.size() - 1));
    stats_.resize(seats_.size());
    replay_.config_sha = config_sha256(model_->config());
    replay_.seed = opts_.seed;
    for (const auto& s : seats_) replay_.seats.push_back(s.label);
  }

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;
  ~Session() {
    stop();
    if (thread_.joinable()) thread_.join();
  }

  const std::string& id() const { return opts_.session_id; }
  const ForwardModel& model() const { return *model_; }
  const SessionOptions& options() const { return opts_; }
  std::size_t seat_count() const { return seats_.size(); }
  bool is_external(PlayerId p) const { return valid_seat(p) && seats_[static_cast<std::size_t>(p)].external(); }

  /// Runs the game on the calling thread until it ends or stop() is called.
  GameResult run() {
    {
      std::lock_guard lk(m_);
      if (status_.phase != SessionPhase::Lobby) throw Error("session already started");
      status_.phase = SessionPhase::Running;
      for (std::size_t i = 0; i < seats_.size(); ++i)
        if (!seats_[i].external()) {
          seats_[i].agent->reset();
          workers_.push_back(std::make_unique<AgentWorker>(*seats_[i].agent));
        } else {
          workers_.push_back(nullptr);
        }
    }
    loop();
    workers_.clear();
    return result();
  }

  /// Starts run() on a background runner thread.
  void start() {
    thread_ = std::thread([this] {
      try {
        run();
      } catch (const std::exception& ex) {
        logger()->error("session {} aborted: {}", opts_.session_id, ex.what());
        finish(Outcome::draw(), true);
      }
    });
  }

  /// Blocks until the game has finished.
  void wait() {
    std::unique_lock lk(m_);
    cv_.wait(lk, [this] { return status_.phase == SessionPhase::Finished; });
  }

  bool wait_for(std::chrono::milliseconds d) {
    std::unique_lock lk(m_);
    return cv_.wait_for(lk, d, [this] { return status_.phase == SessionPhase::Finished; });
  }

  void join() {
    if (thread_.joinable()) thread_.join();
  }

  /// Asks the runner to stop after the current decision.
  void stop() {
    {
      std::lock_guard lk(m_);
      stop_requested_ = true;
    }
    cv_.notify_all();
  }

  /// Submission from an external seat. Out-of-turn submissions are ignored,
  /// inapplicable ones rejected; an accepted action has been applied to the
  /// true state by the time this returns.
  SubmitResult submit_action(PlayerId player, const Action& action) {
    std::unique_lock lk(m_);
    if (!valid_seat(player)) return {SubmitResult::Kind::Rejected, "unknown player"};
    const bool external = seats_[static_cast<std::size_t>(player)].external();
    // Wait out a previous submission, and the short gap between applying an
    // action and the runner asking this same seat for its next one.
    cv_.wait(lk, [&] {
      if (status_.phase == SessionPhase::Finished) return true;
      if (pending_) return false;
      return !(external && status_.phase == SessionPhase::Running && state_.current_player == player);
    });
    if (status_.phase == SessionPhase::Finished) return {SubmitResult::Kind::Ignored, "game is over"};
    if (!external)
      return {SubmitResult::Kind::Ignored, "seat is played by an agent"};
    if (status_.phase != SessionPhase::AwaitingExternal || status_.awaiting != player)
      return {SubmitResult::Kind::Ignored, "not your turn"};
    if (!model_->is_applicable(state_, action)) return {SubmitResult::Kind::Rejected, "not applicable"};
    pending_ = action;
    const auto ticket = replay_.entries.size() + 1;
    cv_.notify_all();
    cv_.wait(lk, [&] { return replay_.entries.size() >= ticket || status_.phase == SessionPhase::Finished; });
    return {SubmitResult::Kind::Accepted, ""};
  }

  Snapshot poll_observation(PlayerId player) const {
    std::lock_guard lk(m_);
    Snapshot snap;
    snap.player = player;
    snap.status = status_;
    snap.actions_applied = replay_.entries.size();
    if (valid_seat(player) && opts_.fog) snap.observation = model_->observe(state_, player);
    else snap.observation = state_;
    snap.your_turn = valid_seat(player) && status_.phase != SessionPhase::Finished &&
                     status_.phase != SessionPhase::Lobby && state_.current_player == player;
    if (snap.your_turn && !model_->check_win(snap.observation).is_over())
      snap.legal_actions = model_->generate_actions(snap.observation).actions;
    return snap;
  }

  SessionStatus status() const {
    std::lock_guard lk(m_);
    return status_;
  }

  /// Registers a signal callback. Callbacks run on the runner thread and must
  /// not call back into submit_action.
  int subscribe(Subscriber fn) {
    std::lock_guard lk(m_);
    subscribers_.emplace_back(++next_sub_, std::move(fn));
    return next_sub_;
  }

  void unsubscribe(int id) {
    std::lock_guard lk(m_);
    std::erase_if(subscribers_, [id](const auto& s) { return s.first == id; });
  }

  Replay replay() const {
    std::lock_guard lk(m_);
    return replay_;
  }

  GameResult result() const {
    std::lock_guard lk(m_);
    GameResult r;
    r.outcome = status_.outcome;
    r.turns = state_.turn_number;
    r.interrupted = status_.interrupted;
    r.seats = stats_;
    r.final_fingerprint = fingerprint(state_);
    return r;
  }

 private:
  bool valid_seat(PlayerId p) const { return p >= 0 && static_cast<std::size_t>(p) < seats_.size(); }

  void loop() {
    for (;;) {
      if (stop_requested_) return finish(Outcome::draw(), true);
      const Outcome o = model_->check_win(state_);
      if (o.is_over()) return finish(o, false);
      if (state_.turn_number >= opts_.max_turns) {
        logger()->info("turn limit {} reached, game drawn", opts_.max_turns);
        return finish(Outcome::draw(), false);
      }

      const PlayerId p = state_.current_player;
      GameState obs = opts_.fog ? model_->observe(state_, p) : state_;
      std::optional<Action> action;
      if (seats_[static_cast<std::size_t>(p)].external()) {
        action = await_external(p, obs);
        if (!action) return finish(Outcome::draw(), true);
      } else {
        action = ask_agent(p, std::move(obs));
      }
      apply(p, *action);
    }
  }

  std::optional<Action> await_external(PlayerId p, const GameState& obs) {
    SessionSignal sig;
    sig.kind = SessionSignal::Kind::AwaitingExternal;
    sig.player = p;
    sig.observation = obs;
    sig.legal_actions = model_->generate_actions(obs).actions;
    {
      std::lock_guard lk(m_);
      status_.phase = SessionPhase::AwaitingExternal;
      status_.awaiting = p;
      sig.status = status_;
    }
    cv_.notify_all();
    broadcast(sig);
    std::unique_lock lk(m_);
    cv_.wait(lk, [this] { return pending_.has_value() || stop_requested_.load(); });
    if (!pending_) return std::nullopt;
    return pending_;
  }

  Action ask_agent(PlayerId p, GameState obs) {
    auto& seat = seats_[static_cast<std::size_t>(p)];
    auto& st = stats_[static_cast<std::size_t>(p)];
    AgentContext ctx{p, std::move(obs), model_.get(),
                     SplitMix64(derive_seed(opts_.seed, (static_cast<std::uint64_t>(p) << 32) |
                                                            static_cast<std::uint64_t>(st.decisions))),
                     BudgetMeter(seat.budget)};
    const auto t0 = std::chrono::steady_clock::now();
    Action a;
    bool ok = true;
    try {
      a = workers_[static_cast<std::size_t>(p)]->decide(ctx);
    } catch (const std::exception& ex) {
      logger()->warn("agent {} (player {}) failed: {}; ending its turn", seat.label, p, ex.what());
      ok = false;
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    std::lock_guard lk(m_);
    st.decisions += 1;
    st.forward_calls += ctx.meter.calls();
    st.total_ms += ms;
    st.max_ms = std::max(st.max_ms, ms);
    if (ok && model_->is_applicable(state_, a)) return a;
    if (ok) logger()->warn("agent {} (player {}) chose inapplicable {}; ending its turn", seat.label, p, to_string(a));
    st.substituted += 1;
    return Action::end_turn();
  }

  void apply(PlayerId p, const Action& a) {
    SessionSignal sig;
    sig.kind = SessionSignal::Kind::Events;
    {
      std::lock_guard lk(m_);
      const int turn = state_.turn_number;
      sig.events = model_->advance(state_, a, true);
      replay_.entries.push_back(LogEntry{turn, p, a, fingerprint(state_)});
      pending_.reset();
      status_.phase = SessionPhase::Running;
      status_.awaiting = kNoPlayer;
      sig.status = status_;
    }
    logger()->debug("turn {} player {}: {}", replay_.entries.back().turn, p, to_string(a));
    cv_.notify_all();
    broadcast(sig);
  }

  void finish(Outcome o, bool interrupted) {
    SessionSignal sig;
    sig.kind = SessionSignal::Kind::GameOver;
    {
      std::lock_guard lk(m_);
      if (status_.phase == SessionPhase::Finished) return;
      status_.phase = SessionPhase::Finished;
      status_.awaiting = kNoPlayer;
      status_.outcome = o;
      status_.interrupted = interrupted;
      replay_.footer = ReplayFooter{interrupted ? "interrupted" : to_string(o), state_.turn_number, fingerprint(state_)};
      sig.status = status_;
    }
    logger()->info("session {} finished: {}", opts_.session_id, interrupted ? "interrupted" : to_string(o));
    cv_.notify_all();
    broadcast(sig);
  }

  void broadcast(const SessionSignal& sig) {
    std::vector<Subscriber> subs;
    {
      std::lock_guard lk(m_);
      for (const auto& s : subscribers_) subs.push_back(s.second);
    }
    for (const auto& fn : subs) fn(sig);
  }

  std::shared_ptr<const ForwardModel> model_;
  std::vector<Seat> seats_;
  SessionOptions opts_;

  mutable std::mutex m_;
  std::condition_variable cv_;
  GameState state_;
  SessionStatus status_;
  std::optional<Action> pending_;
  Replay replay_;
  std::vector<SeatStats> stats_;
  std::vector<std::pair<int, Subscriber>> subscribers_;
  int next_sub_ = 0;
  std::atomic<bool> stop_requested_{false};
  std::vector<std::unique_ptr<AgentWorker>> workers_;
  std::thread thread_;
};

/// Plays one headless game. Every seat must be bound to an agent.
inline std::pair<GameResult, Replay> run_game(std::shared_ptr<const ForwardModel> model, std::vector<Seat> seats,
                                              SessionOptions opts) {
  for (const auto& s : seats)
    if (s.external()) throw UsageError("headless games need an agent on every seat");
  Session session(std::move(model), std::move(seats), std::move(opts));
  auto result = session.run();
  return {result, session.replay()};
}

}  // namespace stratagem
