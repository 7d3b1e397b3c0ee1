#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "stratagem/net/ws_server.hpp"
#include "support.hpp"

using namespace stratagem;
using namespace testing_support;
using protocol::json;
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

std::vector<Seat> seats(std::initializer_list<const char*> specs) {
  std::vector<Seat> out;
  for (const char* s : specs) out.push_back(std::string(s) == "external" ? Seat::human() : Seat::from(make_agent(s)));
  return out;
}

SessionOptions opts(std::uint64_t seed, std::string id = "s1") {
  SessionOptions o;
  o.seed = seed;
  o.session_id = std::move(id);
  return o;
}

class Client {
 public:
  explicit Client(unsigned short port) : ws_(ioc_) {
    tcp::resolver resolver(ioc_);
    asio::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/");
  }
  ~Client() {
    beast::error_code ec;
    ws_.close(websocket::close_code::normal, ec);
  }

  void send(const json& j) { send_raw(j.dump()); }
  void send_raw(const std::string& text) { ws_.write(asio::buffer(text)); }
  void hello(std::optional<PlayerId> p) { send(protocol::hello_message(p, "s1", ++seq_)); }
  std::uint64_t act(const Action& a) {
    send(protocol::action_message(a, "s1", ++seq_));
    return seq_;
  }

  json recv() {
    beast::flat_buffer buf;
    ws_.read(buf);
    auto j = json::parse(beast::buffers_to_string(buf.data()));
    log.push_back(j);
    return j;
  }
  json recv_type(const std::string& type) {
    for (;;) {
      auto j = recv();
      if (j["type"] == type) return j;
    }
  }

  std::vector<json> log;

 private:
  asio::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
  std::uint64_t seq_ = 0;
};

Action parse_action(const json& j) {
  auto msg = protocol::envelope("action", "s1", 0);
  msg.update(j);
  return std::get<protocol::ActionRequest>(protocol::parse_client_message(msg.dump())).action;
}

}  // namespace

TEST(Server, WaitingPlayerSeesNotYourTurnAndOutOfTurnIsIgnored) {
  Session session(duel_model(), seats({"external", "external"}), opts(1));
  net::WsServer server(session, 0);
  server.start();
  session.start();

  Client second(server.port());
  second.hello(1);
  auto st = second.recv_type("state");
  EXPECT_EQ(st["type"], "state");
  EXPECT_EQ(st["session_id"], "s1");
  EXPECT_EQ(st["player_id"], 1);
  EXPECT_EQ(st["your_turn"], false);
  EXPECT_TRUE(st["legal_actions"].empty());

  const auto before = session.poll_observation(kNoPlayer).actions_applied;
  const auto fp = fingerprint(session.poll_observation(kNoPlayer).observation);
  const auto sent = second.act(Action::end_turn());
  const auto ack = second.recv_type("ack");
  EXPECT_EQ(ack["result"], "ignored");
  EXPECT_EQ(ack["reason"], "not your turn");
  EXPECT_EQ(ack["reply_to"], sent);
  EXPECT_EQ(session.poll_observation(kNoPlayer).actions_applied, before);
  EXPECT_EQ(fingerprint(session.poll_observation(kNoPlayer).observation), fp);

  Client first(server.port());
  first.hello(0);
  st = first.recv_type("state");
  EXPECT_EQ(st["your_turn"], true);
  EXPECT_FALSE(st["legal_actions"].empty());
  EXPECT_EQ(st["observation"]["width"], 5);
  EXPECT_EQ(st["observation"]["height"], 6);

  first.act(Action::move(0, {9, 9}));
  EXPECT_EQ(first.recv_type("ack")["result"], "rejected");
  first.act(Action::end_turn());
  EXPECT_EQ(first.recv_type("ack")["result"], "accepted");
  // Player 1 now gets its turn pushed.
  for (;;) {
    st = second.recv_type("state");
    if (st["your_turn"] == true) break;
  }
  EXPECT_EQ(st["observation"]["current_player"], 1);
  session.stop();
  session.join();
  server.stop();
}

TEST(Server, HumanCompletesAGameAgainstRandomUsingServerActions) {
  Session session(duel_model(), seats({"external", "random"}), opts(5));
  net::WsServer server(session, 0);
  server.start();
  Client human(server.port());
  human.hello(0);
  human.recv_type("state");
  session.start();
  SplitMix64 rng(3);
  json over;
  for (int guard = 0; guard < 5000; ++guard) {
    auto j = human.recv();
    if (j["type"] == "game_over") {
      over = j;
      break;
    }
    if (j["type"] != "state" || j["your_turn"] != true) continue;
    const auto& legal = j["legal_actions"];
    ASSERT_FALSE(legal.empty());
    human.act(parse_action(legal[rng.below(legal.size())]));
  }
  ASSERT_FALSE(over.is_null()) << "no game_over";
  session.join();
  EXPECT_EQ(over["result"], to_string(session.result().outcome));
  EXPECT_FALSE(session.result().interrupted);
  for (const auto& j : human.log)
    if (j["type"] == "ack") {
      EXPECT_EQ(j["result"], "accepted") << j.dump();
    }
  EXPECT_NO_THROW(replay_game(session.replay(), session.model()));
  server.stop();
}

TEST(Server, SpectatorOfAgentGameReceivesEventsAndResult) {
  Session session(duel_model(), seats({"random", "random"}), opts(2));
  net::WsServer server(session, 0);
  server.start();
  Client watcher(server.port());
  watcher.hello(std::nullopt);
  const auto first = watcher.recv_type("state");
  EXPECT_TRUE(first["player_id"].is_null());
  EXPECT_EQ(first["status"], "lobby");
  session.start();
  const auto over = watcher.recv_type("game_over");
  session.join();
  int events = 0;
  for (const auto& j : watcher.log) events += j["type"] == "event";
  EXPECT_GT(events, 0);
  EXPECT_EQ(over["result"], to_string(session.result().outcome));
  EXPECT_EQ(over["turns"], session.result().turns);
  // Sequence numbers are per connection and strictly increasing.
  for (std::size_t i = 1; i < watcher.log.size(); ++i)
    EXPECT_EQ(watcher.log[i]["seq"].get<std::uint64_t>(), watcher.log[i - 1]["seq"].get<std::uint64_t>() + 1);
  server.stop();
}

TEST(Server, LateJoinerAfterGameOverGetsResult) {
  Session session(duel_model(), seats({"donothing", "donothing"}), opts(2));
  net::WsServer server(session, 0);
  server.start();
  session.run();
  Client late(server.port());
  late.hello(0);
  EXPECT_EQ(late.recv_type("state")["status"], "finished");
  EXPECT_EQ(late.recv_type("game_over")["result"], "1");
  server.stop();
}

TEST(Server, FoggedPlayerNeverSeesHiddenUnits) {
  auto cfg = duel_config();
  for (auto& u : cfg.unit_types) u.line_of_sight_range = 1;
  cfg.partial_observability = true;
  auto o = opts(4);
  o.fog = true;
  Session session(std::make_shared<const ForwardModel>(cfg), seats({"external", "random"}), o);
  net::WsServer server(session, 0);
  server.start();
  Client human(server.port());
  human.hello(0);
  session.start();
  for (int i = 0; i < 6; ++i) {
    auto st = human.recv_type("state");
    if (st["your_turn"] == true) human.act(Action::end_turn());
  }
  session.stop();
  session.join();
  server.stop();
  for (const auto& j : human.log) {
    if (j["type"] == "state") {
      const auto& obs = j["observation"];
      EXPECT_EQ(obs["fogged"], true);
      for (const auto& u : obs["units"]) {
        const int x = u["position"][0], y = u["position"][1];
        EXPECT_TRUE(u["owner"] == 0 || obs["visible_rows"][y].get<std::string>()[x] == '1');
      }
    }
  }
}

TEST(Server, BadFrames) {
  Session session(duel_model(), seats({"external", "external"}), opts(1));
  net::WsServer server(session, 0);
  server.start();
  session.start();
  Client c(server.port());
  c.send_raw("{oops");
  EXPECT_EQ(c.recv()["type"], "error");
  c.act(Action::end_turn());
  const auto ack = c.recv();
  EXPECT_EQ(ack["result"], "rejected");
  EXPECT_EQ(ack["reason"], "send hello with a player_id first");
  c.hello(7);
  const auto err = c.recv();
  EXPECT_EQ(err["type"], "error");
  EXPECT_EQ(err["reason"], "unknown player 7");
  c.hello(std::nullopt);
  c.recv_type("state");
  c.act(Action::end_turn());
  EXPECT_EQ(c.recv_type("ack")["result"], "rejected");
  session.stop();
  session.join();
  server.stop();
}

TEST(Server, BusyPortThrows) {
  Session session(duel_model(), seats({"random", "random"}), opts(1));
  net::WsServer a(session, 0);
  EXPECT_THROW(net::WsServer(session, a.port()), Error);
}

TEST(Server, ServesStaticFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "stratagem_ui_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "index.html") << "<html>board</html>";
  Session session(duel_model(), seats({"random", "random"}), opts(1));
  net::WsServer server(session, 0, dir.string());
  server.start();

  auto get = [&](const std::string& target) {
    asio::io_context ioc;
    beast::tcp_stream stream(ioc);
    tcp::resolver resolver(ioc);
    stream.connect(resolver.resolve("127.0.0.1", std::to_string(server.port())));
    beast::http::request<beast::http::empty_body> req{beast::http::verb::get, target, 11};
    req.set(beast::http::field::host, "127.0.0.1");
    beast::http::write(stream, req);
    beast::flat_buffer buf;
    beast::http::response<beast::http::string_body> res;
    beast::http::read(stream, buf, res);
    return res;
  };
  auto res = get("/");
  EXPECT_EQ(res.result(), beast::http::status::ok);
  EXPECT_EQ(res.body(), "<html>board</html>");
  EXPECT_EQ(res[beast::http::field::content_type], "text/html");
  EXPECT_EQ(get("/missing.js").result(), beast::http::status::not_found);
  EXPECT_EQ(get("/../etc/passwd").result(), beast::http::status::not_found);
  server.stop();
  std::filesystem::remove_all(dir);
}
