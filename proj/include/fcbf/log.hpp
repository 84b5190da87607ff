#pragma once

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <memory>
#include <string_view>

namespace fcbf {

/// Shared diagnostic logger writing to stderr. Level comes from FCBF_LOG
/// (debug, info, warn); anything else falls back to warn.
inline spdlog::logger& logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto l = spdlog::get("fcbf");
    if (!l) l = spdlog::stderr_color_mt("fcbf");
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("FCBF_LOG")) {
      std::string_view v{env};
      if (v == "debug") level = spdlog::level::debug;
      else if (v == "info") level = spdlog::level::info;
    }
    l->set_level(level);
    l->set_pattern("[%l] %v");
    return l;
  }();
  return *instance;
}

}  // namespace fcbf
