#pragma once

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <memory>
#include <string>

namespace stratagem {

/// Shared stderr logger. Verbosity comes from STRATAGEM_LOG (error, info or
/// debug); warnings are shown by default.
inline std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> log = [] {
    auto l = spdlog::get("stratagem");
    if (!l) l = spdlog::stderr_color_mt("stratagem");
    l->set_pattern("[%l] %v");
    l->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("STRATAGEM_LOG")) {
      const std::string v = env;
      if (v == "error") l->set_level(spdlog::level::err);
      else if (v == "info") l->set_level(spdlog::level::info);
      else if (v == "debug") l->set_level(spdlog::level::debug);
    }
    return l;
  }();
  return log;
}

}  // namespace stratagem
