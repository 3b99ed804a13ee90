#include "airhands/stats.hpp"

#include <algorithm>
#include <vector>

#include <fmt/format.h>

namespace airhands {

std::string_view to_string(LinkState state) {
  switch (state) {
    case LinkState::Connecting:
      return "connecting";
    case LinkState::Up:
      return "up";
    case LinkState::Down:
      return "down";
  }
  return "down";
}

void RateWindow::record(time_point t) {
  events_.push_back(t);
  prune(t);
}

double RateWindow::rate(time_point now) {
  prune(now);
  return static_cast<double>(events_.size());
}

void RateWindow::prune(time_point now) {
  const auto horizon = now - std::chrono::seconds(1);
  while (!events_.empty() && events_.front() <= horizon) {
    events_.pop_front();
  }
}

void LatencyWindow::add(std::int64_t ms) {
  samples_.push_back(ms);
  if (samples_.size() > kCapacity) {
    samples_.pop_front();
  }
}

std::optional<std::int64_t> LatencyWindow::median() const {
  if (samples_.empty()) {
    return std::nullopt;
  }
  std::vector<std::int64_t> sorted(samples_.begin(), samples_.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  if (sorted.size() % 2 == 1) {
    return sorted[mid];
  }
  return (sorted[mid - 1] + sorted[mid]) / 2;
}

std::string format_stats_line(wire::Role role, const NodeStats& s) {
  return fmt::format("stats role={} link={} fps_in={:.1f} fps_out={:.1f} latency_ms={} dropped={}",
                     wire::to_string(role), to_string(s.link), s.fps_in, s.fps_out,
                     s.latency_ms, s.frames_dropped);
}

std::string format_ui_stats(const NodeStats& s) {
  return fmt::format("stats fps_in={:.1f} fps_out={:.1f} latency_ms={} dropped={} link={}",
                     s.fps_in, s.fps_out, s.latency_ms, s.frames_dropped, to_string(s.link));
}

}  // namespace airhands
