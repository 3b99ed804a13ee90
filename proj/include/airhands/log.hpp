#pragma once

#include <spdlog/spdlog.h>

namespace airhands {

/// Shared stderr logger. The level comes from AIRHANDS_LOG_LEVEL
/// (trace, debug, info, warn, error, off); default info.
spdlog::logger& logger();

}  // namespace airhands
