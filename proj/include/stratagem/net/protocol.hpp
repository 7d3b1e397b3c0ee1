#pragma once

// JSON messages of the session protocol. The schema is described in README.md.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "stratagem/forward_model.hpp"
#include "stratagem/runner/session.hpp"

namespace stratagem::protocol {

using json = nlohmann::json;

class ProtocolError : public Error {
 public:
  using Error::Error;
};

inline json coord_json(Coord c) { return json::array({c.x, c.y}); }

inline json action_json(const Action& a) {
  json j{{"category", std::string(to_string(a.category))}};
  if (!a.is_end_turn()) {
    j["unit_id"] = a.unit_id;
    j["target"] = coord_json(a.target);
  }
  return j;
}

/// Board as rows of tile symbols, a visibility mask when fogged, and units.
inline json observation_json(const ForwardModel& model, const GameState& s) {
  const auto& cfg = model.config();
  json rows = json::array();
  for (int y = 0; y < s.board.height; ++y) {
    std::string row;
    for (int x = 0; x < s.board.width; ++x) row += model.tile_at(s, {x, y}).symbol;
    rows.push_back(row);
  }
  json tiles = json::array();
  for (const auto& t : cfg.tile_types)
    tiles.push_back({{"symbol", std::string(1, t.symbol)}, {"name", t.name}, {"walkable", t.walkable},
                     {"default", t.is_default}});
  json players = json::array();
  for (const auto& p : s.players) players.push_back({{"id", p.player_id}, {"alive", p.alive}});
  json units = json::array();
  for (const auto& u : s.units) {
    const auto& type = model.unit_type_of(u);
    json spent = json::array();
    for (auto c : {ActionCategory::Move, ActionCategory::Attack, ActionCategory::Heal})
      if (u.spent.contains(c)) spent.push_back(std::string(to_string(c)));
    units.push_back({{"id", u.unit_id},
                     {"owner", u.owner},
                     {"type", type.name},
                     {"position", coord_json(u.position)},
                     {"health", u.health},
                     {"max_health", type.health},
                     {"spent", spent}});
  }
  json obs{{"width", s.board.width},  {"height", s.board.height},       {"rows", rows},
           {"tiles", tiles},          {"players", players},             {"units", units},
           {"turn", s.turn_number},   {"current_player", s.current_player}, {"fogged", s.is_fogged}};
  if (s.is_fogged) {
    const auto mask = model.visibility_mask(s, s.observer);
    json vis = json::array();
    for (int y = 0; y < s.board.height; ++y) {
      std::string row;
      for (int x = 0; x < s.board.width; ++x) row += mask[s.board.index({x, y})] ? '1' : '0';
      vis.push_back(row);
    }
    obs["visible_rows"] = vis;
  }
  return obs;
}

inline json event_payload_json(const GameEvent& e) {
  json p = json::object();
  switch (e.kind) {
    case EventKind::UnitMoved:
      p = {{"unit_id", e.unit_id}, {"player", e.player}, {"from", coord_json(e.from)}, {"to", coord_json(e.to)}};
      break;
    case EventKind::UnitDamaged:
    case EventKind::UnitHealed:
      p = {{"unit_id", e.unit_id}, {"player", e.player}, {"position", coord_json(e.to)}, {"amount", e.amount},
           {"health_after", e.health_after}};
      break;
    case EventKind::UnitDied:
      p = {{"unit_id", e.unit_id}, {"player", e.player}, {"position", coord_json(e.to)}};
      break;
    case EventKind::EffectFired:
      p = {{"unit_id", e.unit_id}, {"player", e.player}, {"position", coord_json(e.to)}, {"effect", e.effect}};
      break;
    case EventKind::TurnEnded:
      p = {{"player", e.player}};
      break;
    case EventKind::GameOver:
      p = {{"result", to_string(e.outcome)}};
      break;
  }
  return p;
}

/// Stamps the envelope fields every message carries.
inline json envelope(std::string_view type, const std::string& session_id, std::uint64_t seq) {
  return json{{"type", std::string(type)}, {"session_id", session_id}, {"seq", seq}};
}

inline json state_message(const ForwardModel& model, const Snapshot& snap, const std::string& session_id,
                          std::uint64_t seq) {
  json j = envelope("state", session_id, seq);
  j["observation"] = observation_json(model, snap.observation);
  j["status"] = std::string(to_string(snap.status.phase));
  j["your_turn"] = snap.your_turn;
  json legal = json::array();
  for (const auto& a : snap.legal_actions) legal.push_back(action_json(a));
  j["legal_actions"] = legal;
  j["player_id"] = snap.player == kNoPlayer ? json(nullptr) : json(snap.player);
  return j;
}

inline json ack_message(const SubmitResult& r, const std::string& session_id, std::uint64_t seq,
                        std::optional<std::uint64_t> reply_to) {
  json j = envelope("ack", session_id, seq);
  j["result"] = std::string(to_string(r.kind));
  j["reason"] = r.reason;
  j["reply_to"] = reply_to ? json(*reply_to) : json(nullptr);
  return j;
}

inline json event_message(const GameEvent& e, const std::string& session_id, std::uint64_t seq) {
  json j = envelope("event", session_id, seq);
  j["kind"] = std::string(to_string(e.kind));
  j["payload"] = event_payload_json(e);
  return j;
}

inline json game_over_message(const SessionStatus& st, int turns, const std::string& session_id, std::uint64_t seq) {
  json j = envelope("game_over", session_id, seq);
  j["result"] = st.interrupted ? std::string("interrupted") : to_string(st.outcome);
  j["turns"] = turns;
  return j;
}

inline json error_message(const std::string& reason, const std::string& session_id, std::uint64_t seq) {
  json j = envelope("error", session_id, seq);
  j["reason"] = reason;
  return j;
}

// ---------------------------------------------------------------------------
// Client → server

struct Hello {
  std::string session_id;
  std::uint64_t seq = 0;
  std::optional<PlayerId> player_id;  // absent or null: spectator
};

struct ActionRequest {
  std::string session_id;
  std::uint64_t seq = 0;
  Action action;
};

using ClientMessage = std::variant<Hello, ActionRequest>;

inline json hello_message(std::optional<PlayerId> player, const std::string& session_id, std::uint64_t seq) {
  json j = envelope("hello", session_id, seq);
  j["player_id"] = player ? json(*player) : json(nullptr);
  return j;
}

inline json action_message(const Action& a, const std::string& session_id, std::uint64_t seq) {
  json j = envelope("action", session_id, seq);
  j.update(action_json(a));
  return j;
}

/// Parses one client frame. Throws ProtocolError on anything malformed.
inline ClientMessage parse_client_message(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ProtocolError(std::string("malformed JSON: ") + ex.what());
  }
  if (!j.is_object()) throw ProtocolError("message must be a JSON object");
  try {
    const auto type = j.at("type").get<std::string>();
    const auto session = j.at("session_id").get<std::string>();
    if (!j.at("seq").is_number_unsigned()) throw ProtocolError("seq must be a non-negative integer");
    const auto seq = j["seq"].get<std::uint64_t>();
    if (type == "hello") {
      Hello h{session, seq, std::nullopt};
      if (j.contains("player_id") && !j["player_id"].is_null()) h.player_id = j["player_id"].get<PlayerId>();
      return h;
    }
    if (type == "action") {
      const auto cat = parse_action_category(j.at("category").get<std::string>());
      if (!cat) throw ProtocolError("unknown action category '" + j["category"].get<std::string>() + "'");
      ActionRequest r{session, seq, Action::end_turn()};
      if (*cat != ActionCategory::EndTurn) {
        const auto& t = j.at("target");
        if (!t.is_array() || t.size() != 2) throw ProtocolError("target must be [x, y]");
        r.action = Action{*cat, j.at("unit_id").get<UnitId>(), Coord{t[0].get<int>(), t[1].get<int>()}};
      }
      return r;
    }
    throw ProtocolError("unknown message type '" + type + "'");
  } catch (const json::exception& ex) {
    throw ProtocolError(std::string("bad message: ") + ex.what());
  }
}

}  // namespace stratagem::protocol
