// stratagem: validate configs, play and replay games, run arenas, serve sessions.
//
// Exit codes: 0 success, 1 domain failure (invalid config, divergent replay,
// interrupted game), 2 usage or I/O error.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "stratagem/net/ws_server.hpp"
#include "stratagem/stratagem.hpp"

namespace {

using namespace stratagem;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

volatile std::sig_atomic_t g_interrupted = 0;

extern "C" void on_sigint(int) { g_interrupted = 1; }

struct IoError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << data)) throw IoError("cannot write '" + path + "'");
}

/// Loads a config, printing its diagnostics. Returns nullopt on errors.
std::optional<GameConfig> load(const std::string& path) {
  auto r = parse_config(read_file(path));
  for (const auto& d : r.diagnostics) std::cerr << format_diagnostic(d) << '\n';
  return r.config;
}

/// Stops the session when Ctrl-C arrives.
class InterruptWatch {
 public:
  explicit InterruptWatch(Session& s) : thread_([this, &s] {
      while (!done_) {
        if (g_interrupted) {
          logger()->warn("interrupted, stopping");
          s.stop();
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
      }
    }) {}
  ~InterruptWatch() {
    done_ = true;
    thread_.join();
  }

 private:
  std::atomic<bool> done_{false};
  std::thread thread_;
};

std::string winner_label(const GameResult& r) {
  if (r.interrupted) return "interrupted";
  return to_string(r.outcome);
}

int cmd_validate(const std::string& path) {
  auto cfg = load(path);
  return cfg ? kOk : kFailure;
}

struct PlayArgs {
  std::string config;
  std::string agents;
  std::uint64_t seed = 0;
  int budget = 1000;
  std::string replay_out;
  bool fog = false;
  int max_turns = 100;
};

int cmd_play(const PlayArgs& a) {
  auto specs = parse_agent_list(a.agents);
  std::vector<Seat> seats;
  for (const auto& s : specs) seats.push_back(Seat::from(make_agent(s, a.budget)));
  auto cfg = load(a.config);
  if (!cfg) return kFailure;
  const bool fog = a.fog || cfg->partial_observability;
  auto model = std::make_shared<const ForwardModel>(std::move(*cfg));

  SessionOptions opts;
  opts.seed = a.seed;
  opts.fog = fog;
  opts.max_turns = a.max_turns;
  Session session(model, std::move(seats), opts);
  GameResult result;
  {
    InterruptWatch watch(session);
    result = session.run();
  }
  if (!a.replay_out.empty()) write_file(a.replay_out, format_replay(session.replay()));
  std::cout << "winner=" << winner_label(result) << " turns=" << result.turns << " budget=" << a.budget << '\n';
  return result.interrupted ? kFailure : kOk;
}

struct ArenaArgs {
  std::string config;
  std::string roster;
  int games = 10;
  std::uint64_t seed = 0;
  int budget = 1000;
  std::string csv;
  bool fog = false;
  int max_turns = 100;
};

int cmd_arena(const ArenaArgs& a) {
  std::vector<std::string> roster;
  for (const auto& s : parse_agent_list(a.roster)) {
    make_agent(s, a.budget);
    roster.push_back(s.text);
  }
  if (roster.size() < 2) throw UsageError("--roster needs at least two agents");
  if (a.games < 1) throw UsageError("--games must be positive");
  auto cfg = load(a.config);
  if (!cfg) return kFailure;
  ArenaOptions opts;
  opts.games_per_pairing = a.games;
  opts.base_seed = a.seed;
  opts.default_budget = a.budget;
  opts.fog = a.fog || cfg->partial_observability;
  opts.max_turns = a.max_turns;
  auto model = std::make_shared<const ForwardModel>(std::move(*cfg));
  auto standings = run_arena(model, roster, opts);
  if (!a.csv.empty()) {
    std::ostringstream os;
    write_arena_csv(os, standings);
    write_file(a.csv, os.str());
  }
  std::cout << format_standings(standings);
  return kOk;
}

struct ServeArgs {
  std::string config;
  std::vector<int> human_seats;
  std::string agents;
  int port = 8080;
  bool keep_alive = false;
  std::string ui_dir;
  std::uint64_t seed = 0;
  int budget = 1000;
  bool fog = false;
  int max_turns = 100;
  std::string replay_out;
};

int cmd_serve(const ServeArgs& a) {
  auto cfg = load(a.config);
  if (!cfg) return kFailure;
  const bool fog = a.fog || cfg->partial_observability;
  auto model = std::make_shared<const ForwardModel>(std::move(*cfg));
  const auto players = model->initial_state(a.seed).players.size();

  std::vector<AgentSpec> specs = a.agents.empty() ? std::vector<AgentSpec>{} : parse_agent_list(a.agents);
  std::vector<Seat> seats;
  std::size_t next_spec = 0;
  for (std::size_t p = 0; p < players; ++p) {
    if (std::find(a.human_seats.begin(), a.human_seats.end(), static_cast<int>(p)) != a.human_seats.end()) {
      seats.push_back(Seat::human());
    } else {
      if (next_spec >= specs.size()) throw UsageError("no agent given for seat " + std::to_string(p));
      seats.push_back(Seat::from(make_agent(specs[next_spec++], a.budget)));
    }
  }
  if (next_spec != specs.size()) throw UsageError("more agents than free seats");
  for (int h : a.human_seats)
    if (h < 0 || static_cast<std::size_t>(h) >= players) throw UsageError("no seat " + std::to_string(h));
  if (a.port < 0 || a.port > 65535) throw UsageError("bad port");

  SessionOptions opts;
  opts.seed = a.seed;
  opts.fog = fog;
  opts.max_turns = a.max_turns;
  Session session(model, std::move(seats), opts);
  std::unique_ptr<net::WsServer> server;
  try {
    server = std::make_unique<net::WsServer>(session, static_cast<unsigned short>(a.port), a.ui_dir);
  } catch (const Error& ex) {
    throw IoError(ex.what());
  }
  server->start();
  std::cout << "listening on port " << server->port() << std::endl;

  {
    InterruptWatch watch(session);
    session.start();
    session.wait();
  }
  auto result = session.result();
  if (!a.replay_out.empty()) write_file(a.replay_out, format_replay(session.replay()));
  std::cout << "winner=" << winner_label(result) << " turns=" << result.turns << " budget=" << a.budget << std::endl;
  if (a.keep_alive && !result.interrupted)
    while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  else
    std::this_thread::sleep_for(std::chrono::milliseconds(200));  // let final messages flush
  server->stop();
  session.join();
  return kOk;
}

int cmd_replay(const std::string& replay_path, const std::string& config_path, bool verify) {
  std::istringstream in(read_file(replay_path));
  auto cfg = load(config_path);
  if (!cfg) return kFailure;
  ForwardModel model(std::move(*cfg));
  try {
    auto replay = read_replay(in);
    auto check = replay_game(replay, model);
    if (!verify) {
      for (std::size_t i = 0; i < replay.entries.size(); ++i) {
        const auto& e = replay.entries[i];
        std::cout << i << ' ' << "turn=" << e.turn << " player=" << e.player << ' ' << to_string(e.action) << ' '
                  << to_hex(check.step_fingerprints[i]) << '\n';
      }
    }
    std::cout << "ok steps=" << replay.entries.size() << " fingerprint=" << to_hex(check.final_fingerprint) << '\n';
    return kOk;
  } catch (const ReplayError& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Turn-based strategy game engine"};
  app.require_subcommand(1);
  app.footer(agent_spec_help() + "\nSet STRATAGEM_LOG=error|info|debug for log verbosity.");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a game config");
  validate->add_option("config", validate_path, "Config file")->required();

  PlayArgs play_args;
  auto* play = app.add_subcommand("play", "Play one headless game");
  play->add_option("config", play_args.config, "Config file")->required();
  play->add_option("--agents", play_args.agents, "One agent spec per seat, comma separated")->required();
  play->add_option("--seed", play_args.seed, "Game seed");
  play->add_option("--budget", play_args.budget, "Forward-model calls per decision")->check(CLI::PositiveNumber);
  play->add_option("--replay-out", play_args.replay_out, "Write the replay here");
  play->add_flag("--fog", play_args.fog, "Enable partial observability");
  play->add_option("--max-turns", play_args.max_turns, "Rounds before a forced draw")->check(CLI::PositiveNumber);

  ArenaArgs arena_args;
  auto* arena = app.add_subcommand("arena", "Round-robin tournament");
  arena->add_option("config", arena_args.config, "Config file")->required();
  arena->add_option("--roster", arena_args.roster, "Agent specs, comma separated")->required();
  arena->add_option("--games", arena_args.games, "Games per pairing");
  arena->add_option("--seed", arena_args.seed, "Base seed");
  arena->add_option("--budget", arena_args.budget, "Forward-model calls per decision")->check(CLI::PositiveNumber);
  arena->add_option("--csv", arena_args.csv, "Write per-game rows here");
  arena->add_flag("--fog", arena_args.fog, "Enable partial observability");
  arena->add_option("--max-turns", arena_args.max_turns, "Rounds before a forced draw")->check(CLI::PositiveNumber);

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Host a session over websocket");
  serve->add_option("config", serve_args.config, "Config file")->required();
  serve->add_option("--human-seats", serve_args.human_seats, "Seats played by external clients")->delimiter(',');
  serve->add_option("--agents", serve_args.agents, "Agent specs for the remaining seats");
  serve->add_option("--port", serve_args.port, "TCP port (0 picks a free one)");
  serve->add_flag("--keep-alive", serve_args.keep_alive, "Keep serving after the game ends");
  serve->add_option("--ui-dir", serve_args.ui_dir, "Serve static browser client files from here");
  serve->add_option("--seed", serve_args.seed, "Game seed");
  serve->add_option("--budget", serve_args.budget, "Forward-model calls per decision")->check(CLI::PositiveNumber);
  serve->add_flag("--fog", serve_args.fog, "Enable partial observability");
  serve->add_option("--max-turns", serve_args.max_turns, "Rounds before a forced draw")->check(CLI::PositiveNumber);
  serve->add_option("--replay-out", serve_args.replay_out, "Write the replay here");

  std::string replay_path, replay_config;
  bool verify = false;
  auto* replay = app.add_subcommand("replay", "Re-execute a replay file");
  replay->add_option("replay", replay_path, "Replay file")->required();
  replay->add_option("config", replay_config, "Config file")->required();
  replay->add_flag("--verify", verify, "Only check fingerprints");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  std::signal(SIGINT, on_sigint);
  std::signal(SIGTERM, on_sigint);
  try {
    if (*validate) return cmd_validate(validate_path);
    if (*play) return cmd_play(play_args);
    if (*arena) return cmd_arena(arena_args);
    if (*serve) return cmd_serve(serve_args);
    if (*replay) return cmd_replay(replay_path, replay_config, verify);
  } catch (const UsageError& ex) {
    std::cerr << "error: " << ex.what() << "\n\n" << agent_spec_help();
    return kUsage;
  } catch (const IoError& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kUsage;
  } catch (const ConfigError& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kFailure;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
