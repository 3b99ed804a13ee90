#include "airhands/log.hpp"

#include <cstdlib>

#include <spdlog/sinks/stdout_color_sinks.h>

namespace airhands {

spdlog::logger& logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto l = spdlog::stderr_color_mt("airhands");
    l->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
    if (const char* level = std::getenv("AIRHANDS_LOG_LEVEL")) {
      l->set_level(spdlog::level::from_str(level));
    } else {
      l->set_level(spdlog::level::info);
    }
    return l;
  }();
  return *instance;
}

}  // namespace airhands
