#pragma once

// Replay files. Layout:
//   config_sha256;seed;seat0|seat1|...
//   turn;player;category;unit_id;target_x;target_y;post_fingerprint_hex   (one per action)
//   end;outcome;turns;final_fingerprint_hex

#include <openssl/evp.h>

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stratagem/config.hpp"
#include "stratagem/errors.hpp"
#include "stratagem/forward_model.hpp"
#include "stratagem/log.hpp"

namespace stratagem {

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 digest failed");
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kDigits[digest[i] >> 4];
    out += kDigits[digest[i] & 0xF];
  }
  return out;
}

/// Digest of the canonical serialization, so formatting changes to a config
/// file do not change its identity.
inline std::string config_sha256(const GameConfig& cfg) { return sha256_hex(serialize_config(cfg)); }

struct ReplayFooter {
  std::string outcome;  // player id, "draw" or "interrupted"
  int turns = 0;
  std::uint64_t final_fingerprint = 0;

  friend bool operator==(const ReplayFooter&, const ReplayFooter&) = default;
};

struct Replay {
  std::string config_sha;
  std::uint64_t seed = 0;
  std::vector<std::string> seats;
  std::vector<LogEntry> entries;
  std::optional<ReplayFooter> footer;
};

inline void write_replay(std::ostream& os, const Replay& r) {
  os << r.config_sha << ';' << r.seed << ';';
  for (std::size_t i = 0; i < r.seats.size(); ++i) os << (i ? "|" : "") << r.seats[i];
  os << '\n';
  for (const auto& e : r.entries) os << format_log_line(e) << '\n';
  if (r.footer)
    os << "end;" << r.footer->outcome << ';' << r.footer->turns << ';' << to_hex(r.footer->final_fingerprint) << '\n';
}

inline std::string format_replay(const Replay& r) {
  std::ostringstream os;
  write_replay(os, r);
  return os.str();
}

/// Parses a replay file. Malformed lines throw ReplayError with the index of
/// the action line being read. A missing end line is reported as truncation.
inline Replay read_replay(std::istream& is) {
  Replay r;
  std::string line;
  if (!std::getline(is, line)) throw ReplayError(0, "empty replay");
  auto head = detail::split(line, ';');
  if (head.size() != 3 || head[0].size() != 64) throw ReplayError(0, "malformed header '" + line + "'");
  r.config_sha = head[0];
  try {
    std::size_t used = 0;
    r.seed = std::stoull(head[1], &used);
    if (used != head[1].size()) throw std::invalid_argument("seed");
  } catch (const std::exception&) {
    throw ReplayError(0, "bad seed '" + head[1] + "'");
  }
  r.seats = detail::split(head[2], '|');

  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto step = r.entries.size();
    if (r.footer) throw ReplayError(step, "data after the end line");
    if (line.rfind("end;", 0) == 0) {
      auto f = detail::split(line, ';');
      if (f.size() != 4 || f[3].size() != 16) throw ReplayError(step, "malformed end line '" + line + "'");
      ReplayFooter foot;
      foot.outcome = f[1];
      try {
        foot.turns = detail::parse_int(f[2], "turn count");
        foot.final_fingerprint = std::stoull(f[3], nullptr, 16);
      } catch (const std::exception& ex) {
        throw ReplayError(step, ex.what());
      }
      r.footer = foot;
      continue;
    }
    try {
      r.entries.push_back(parse_log_line(line));
    } catch (const QueryError& ex) {
      throw ReplayError(step, ex.what());
    }
  }
  if (!r.footer) throw ReplayError(r.entries.size(), "replay is truncated (no end line)");
  return r;
}

struct ReplayCheck {
  std::uint64_t final_fingerprint = 0;
  std::vector<std::uint64_t> step_fingerprints;
  GameState final_state;
  Outcome outcome;
};

/// Re-executes every logged action with checks on. The first step whose
/// player, applicability or post-state fingerprint disagrees with the log
/// throws ReplayError carrying its zero-based index.
inline ReplayCheck replay_game(const Replay& r, const ForwardModel& model) {
  if (r.config_sha != config_sha256(model.config()))
    logger()->warn("replay was recorded against a different config (sha256 {})", r.config_sha);
  ReplayCheck out;
  GameState s = model.initial_state(r.seed);
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    const auto& e = r.entries[i];
    const auto step = i;
    if (e.player != s.current_player || e.turn != s.turn_number)
      throw ReplayError(step, "expected turn " + std::to_string(s.turn_number) + " player " +
                                  std::to_string(s.current_player) + ", log has turn " + std::to_string(e.turn) +
                                  " player " + std::to_string(e.player));
    if (!model.is_applicable(s, e.action)) throw ReplayError(step, to_string(e.action) + " is not applicable");
    model.advance(s, e.action, true);
    const auto fp = fingerprint(s);
    if (fp != e.post_fingerprint)
      throw ReplayError(step, "fingerprint " + to_hex(fp) + " differs from logged " + to_hex(e.post_fingerprint));
    out.step_fingerprints.push_back(fp);
  }
  out.final_fingerprint = fingerprint(s);
  out.outcome = model.check_win(s);
  if (r.footer) {
    const auto step = r.entries.size();
    if (out.outcome.is_over() && r.footer->outcome != to_string(out.outcome))
      throw ReplayError(step, "outcome " + to_string(out.outcome) + " differs from logged " + r.footer->outcome);
    if (r.footer->final_fingerprint != out.final_fingerprint)
      throw ReplayError(step, "final fingerprint " + to_hex(out.final_fingerprint) + " differs from logged " +
                                  to_hex(r.footer->final_fingerprint));
    if (r.footer->turns != s.turn_number)
      throw ReplayError(step, "final turn " + std::to_string(s.turn_number) + " differs from logged " +
                                  std::to_string(r.footer->turns));
  }
  out.final_state = std::move(s);
  return out;
}

}  // namespace stratagem
