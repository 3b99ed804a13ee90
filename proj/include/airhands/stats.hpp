#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>

#include "airhands/wire.hpp"

namespace airhands {

enum class LinkState { Connecting, Up, Down };

std::string_view to_string(LinkState state);

struct NodeStats {
  double fps_in = 0.0;   ///< inbound FRAMEs over the last second
  double fps_out = 0.0;  ///< outbound FRAMEs written over the last second
  /// Median of (display time - capture_ts) over the last 30 displayed frames.
  std::int64_t latency_ms = 0;
  bool latency_valid = false;
  std::uint64_t frames_dropped = 0;
  LinkState link = LinkState::Down;

  bool inbound_up = false;
  bool outbound_up = false;
  std::uint64_t frames_in = 0;
  std::uint64_t frames_out = 0;
  std::uint64_t frames_displayed = 0;
  std::array<std::uint64_t, 3> frames_in_by_stream{};
  std::uint64_t errors = 0;
  std::uint64_t handshake_rejections = 0;
  wire::RejectReason last_reject = wire::RejectReason::None;
};

/// Event count over a trailing one-second window.
class RateWindow {
 public:
  using time_point = std::chrono::steady_clock::time_point;

  void record(time_point t);
  double rate(time_point now);

 private:
  void prune(time_point now);
  std::deque<time_point> events_;
};

class LatencyWindow {
 public:
  static constexpr std::size_t kCapacity = 30;

  void add(std::int64_t ms);
  std::optional<std::int64_t> median() const;

 private:
  std::deque<std::int64_t> samples_;
};

/// `stats role=helper link=up fps_in=14.8 fps_out=14.9 latency_ms=41 dropped=3`
std::string format_stats_line(wire::Role role, const NodeStats& stats);

/// Console form: `stats fps_in=.. fps_out=.. latency_ms=.. dropped=.. link=..`
std::string format_ui_stats(const NodeStats& stats);

}  // namespace airhands
