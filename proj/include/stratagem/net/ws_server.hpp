#pragma once

// Websocket front end for one Session, with optional static file serving for
// a browser client. Runs on its own io thread.

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <deque>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "stratagem/log.hpp"
#include "stratagem/net/protocol.hpp"
#include "stratagem/runner/session.hpp"

namespace stratagem::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

class WsServer;

namespace detail {

inline std::string mime_type(const std::string& path) {
  auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

/// One websocket client. Writes are queued and issued one at a time.
class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, WsServer& server) : ws_(std::move(socket)), server_(server) {}

  void accept(http::request<http::string_body> req);
  void send(std::string text) {
    asio::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
      self->queue_.push_back(std::move(text));
      if (self->queue_.size() == 1) self->write_next();
    });
  }
  template <class F>
  void post(F fn) {
    asio::post(ws_.get_executor(), [self = shared_from_this(), fn = std::move(fn)]() mutable { fn(*self); });
  }
  void close() {
    asio::post(ws_.get_executor(), [self = shared_from_this()] {
      if (self->ws_.is_open()) self->ws_.async_close(websocket::close_code::going_away, [self](beast::error_code) {});
    });
  }
  // Drops the TCP connection without a handshake. Call on the io thread.
  void abort() { beast::get_lowest_layer(ws_).close(); }

  std::optional<PlayerId> player;
  bool greeted = false;
  std::uint64_t seq = 0;
  std::string last_state;

 private:
  void read_next() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->closed();
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->handle(text);
      self->read_next();
    });
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->queue_.clear();
        return;
      }
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write_next();
    });
  }

  void handle(const std::string& text);
  void closed();

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  WsServer& server_;
};

/// First request on a fresh TCP connection: a websocket upgrade or a file.
class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, WsServer& server) : stream_(std::move(socket)), server_(server) {}
  void run() {
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (!ec) self->dispatch();
    });
  }

 private:
  void dispatch();

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  WsServer& server_;
};

}  // namespace detail

class WsServer {
 public:
  /// Binds immediately; a busy port throws Error. Port 0 picks a free port.
  WsServer(Session& session, unsigned short port, std::string ui_dir = {})
      : session_(session), acceptor_(ioc_), ui_dir_(std::move(ui_dir)) {
    beast::error_code ec;
    tcp::endpoint ep(asio::ip::make_address("0.0.0.0"), port);
    acceptor_.open(ep.protocol(), ec);
    if (!ec) acceptor_.set_option(asio::socket_base::reuse_address(true), ec);
    if (!ec) acceptor_.bind(ep, ec);
    if (!ec) acceptor_.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) throw Error("cannot listen on port " + std::to_string(port) + ": " + ec.message());
    subscription_ = session_.subscribe([this](const SessionSignal& sig) { on_signal(sig); });
  }

  WsServer(const WsServer&) = delete;
  WsServer& operator=(const WsServer&) = delete;
  ~WsServer() {
    session_.unsubscribe(subscription_);
    stop();
  }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }
  Session& session() { return session_; }
  const std::string& ui_dir() const { return ui_dir_; }

  void start() {
    do_accept();
    work_.emplace(ioc_.get_executor());
    thread_ = std::thread([this] { ioc_.run(); });
  }

  /// Closes every client and joins the io thread.
  void stop() {
    if (!thread_.joinable()) return;
    asio::post(ioc_, [this] {
      beast::error_code ec;
      acceptor_.close(ec);
      std::lock_guard lk(m_);
      for (auto& c : connections_) c->close();
    });
    // Let close frames go out, then drop whatever is left so peers see EOF.
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    std::promise<void> dropped;
    asio::post(ioc_, [this, &dropped] {
      std::lock_guard lk(m_);
      for (auto& c : connections_) c->abort();
      connections_.clear();
      dropped.set_value();
    });
    dropped.get_future().wait();
    work_.reset();
    ioc_.stop();
    thread_.join();
  }

  /// Sends the current state to one client, unless it already has exactly
  /// this state.
  void send_state(detail::Connection& c) { push_state(c, session_.poll_observation(c.player.value_or(kNoPlayer))); }

  void add(const std::shared_ptr<detail::Connection>& c) {
    std::lock_guard lk(m_);
    connections_.insert(c);
    logger()->info("client connected ({} open)", connections_.size());
  }
  void remove(const std::shared_ptr<detail::Connection>& c) {
    std::lock_guard lk(m_);
    connections_.erase(c);
    logger()->info("client disconnected ({} open)", connections_.size());
  }

 private:
  void do_accept() {
    acceptor_.async_accept(asio::make_strand(ioc_), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<detail::HttpSession>(std::move(socket), *this)->run();
      do_accept();
    });
  }

  // Called on the runner thread. Per-connection state belongs to the io
  // thread, so the work is posted there.
  void on_signal(const SessionSignal& sig) {
    std::vector<std::shared_ptr<detail::Connection>> conns;
    {
      std::lock_guard lk(m_);
      conns.assign(connections_.begin(), connections_.end());
    }
    for (auto& c : conns)
      c->post([this, sig](detail::Connection& conn) { notify(conn, sig); });
  }

  void push_state(detail::Connection& c, const Snapshot& snap) {
    auto msg = protocol::state_message(session_.model(), snap, session_.id(), 0);
    msg.erase("seq");
    auto key = msg.dump();
    if (key == c.last_state) return;
    c.last_state = std::move(key);
    msg["seq"] = ++c.seq;
    c.send(msg.dump());
  }

  void notify(detail::Connection& c, const SessionSignal& sig) {
    if (!c.greeted) return;
    const auto& model = session_.model();
    const PlayerId viewer = c.player.value_or(kNoPlayer);
    auto snap = session_.poll_observation(viewer);
    if (sig.kind == SessionSignal::Kind::Events) {
      std::vector<char> mask;
      const bool filter = snap.observation.is_fogged;
      if (filter) mask = model.visibility_mask(snap.observation, viewer);
      for (const auto& e : sig.events) {
        const bool hidden = filter && e.player != viewer && e.kind != EventKind::TurnEnded &&
                            e.kind != EventKind::GameOver &&
                            !(in_bounds(snap.observation.board, e.to) && mask[snap.observation.board.index(e.to)]);
        if (!hidden) c.send(protocol::event_message(e, session_.id(), ++c.seq).dump());
      }
    }
    push_state(c, snap);
    if (sig.kind == SessionSignal::Kind::GameOver)
      c.send(protocol::game_over_message(sig.status, snap.observation.turn_number, session_.id(), ++c.seq).dump());
  }

  Session& session_;
  asio::io_context ioc_;
  tcp::acceptor acceptor_;
  std::string ui_dir_;
  std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work_;
  std::thread thread_;
  std::mutex m_;
  std::set<std::shared_ptr<detail::Connection>> connections_;
  int subscription_ = 0;
};

namespace detail {

inline void Connection::accept(http::request<http::string_body> req) {
  ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
  ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
    if (ec) return;
    self->server_.add(self);
    self->read_next();
  });
}

inline void Connection::closed() { server_.remove(shared_from_this()); }

inline void Connection::handle(const std::string& text) {
  auto& session = server_.session();
  protocol::ClientMessage msg;
  try {
    msg = protocol::parse_client_message(text);
  } catch (const protocol::ProtocolError& ex) {
    send(protocol::error_message(ex.what(), session.id(), ++seq).dump());
    return;
  }
  if (auto* hello = std::get_if<protocol::Hello>(&msg)) {
    if (hello->player_id && (*hello->player_id < 0 || static_cast<std::size_t>(*hello->player_id) >= session.seat_count())) {
      send(protocol::error_message("unknown player " + std::to_string(*hello->player_id), session.id(), ++seq).dump());
      return;
    }
    player = hello->player_id;
    greeted = true;
    last_state.clear();
    logger()->info("hello from {}", player ? "player " + std::to_string(*player) : std::string("spectator"));
    server_.send_state(*this);
    if (session.status().phase == SessionPhase::Finished) {
      auto st = session.status();
      send(protocol::game_over_message(st, session.poll_observation(kNoPlayer).observation.turn_number, session.id(),
                                       ++seq)
               .dump());
    }
    return;
  }
  const auto& req = std::get<protocol::ActionRequest>(msg);
  SubmitResult r;
  if (!greeted || !player) r = {SubmitResult::Kind::Rejected, "send hello with a player_id first"};
  else r = session.submit_action(*player, req.action);
  logger()->debug("player {} submitted {}: {}", player.value_or(kNoPlayer), to_string(req.action), to_string(r.kind));
  send(protocol::ack_message(r, session.id(), ++seq, req.seq).dump());
}

inline void HttpSession::dispatch() {
  if (websocket::is_upgrade(req_)) {
    std::make_shared<Connection>(stream_.release_socket(), server_)->accept(std::move(req_));
    return;
  }
  auto respond = [self = shared_from_this()](http::status status, std::string body, std::string type) {
    auto res = std::make_shared<http::response<http::string_body>>(status, self->req_.version());
    res->set(http::field::content_type, type);
    res->keep_alive(false);
    res->body() = std::move(body);
    res->prepare_payload();
    http::async_write(self->stream_, *res, [self, res](beast::error_code, std::size_t) {
      beast::error_code ec;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    });
  };
  const auto& root = server_.ui_dir();
  std::string target(req_.target());
  if (auto q = target.find('?'); q != std::string::npos) target.resize(q);
  if (root.empty() || req_.method() != http::verb::get || target.find("..") != std::string::npos) {
    respond(http::status::not_found, "not found\n", "text/plain");
    return;
  }
  if (target.empty() || target.back() == '/') target += "index.html";
  const auto path = std::filesystem::path(root) / target.substr(1);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    respond(http::status::not_found, "not found\n", "text/plain");
    return;
  }
  std::ostringstream body;
  body << in.rdbuf();
  respond(http::status::ok, body.str(), mime_type(path.string()));
}

}  // namespace detail

}  // namespace stratagem::net
