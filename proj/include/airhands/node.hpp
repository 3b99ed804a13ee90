#pragma once

#include <chrono>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>

#include "airhands/frame.hpp"
#include "airhands/node_config.hpp"
#include "airhands/sources.hpp"
#include "airhands/stats.hpp"

namespace airhands {

struct HelperTickRecord {
  RawFrame hand;
  std::optional<RawFrame> scene;  ///< empty while previewing over gray
  RawFrame composite;
  bool sent = false;
};

struct RuntimeOptions {
  /// Tick schedule anchor; two nodes given the same epoch tick in phase.
  std::optional<std::chrono::steady_clock::time_point> tick_epoch;
  /// Called on the tick thread after every helper step.
  std::function<void(const HelperTickRecord&)> on_helper_tick;
  /// Called for every displayed frame (composite on the worker, local
  /// preview or composite on the helper).
  std::function<void(const RawFrame&)> on_display;
  /// Receives one stats line per second when set.
  std::ostream* stats_out = nullptr;
  /// Capture timestamps and latency measurement; wall clock by default.
  Clock clock;
  /// Overrides the configured source (tests).
  std::unique_ptr<FrameSource> source;
};

/// One helper or worker process: listener, dialer, tick loop and optional
/// console gateway. Methods are safe to call from any thread.
class Node {
 public:
  explicit Node(NodeConfig cfg, RuntimeOptions options = {});
  ~Node();
  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  /// Validates the config, opens the source and binds the listen and console
  /// ports. Throws ConfigError, SourceError or Error (port in use).
  void start();

  /// Clean shutdown: BYE to the peer, then close. Idempotent.
  void stop();

  /// Abrupt shutdown without BYE, as if the process died.
  void kill();

  NodeStats stats() const;
  const NodeConfig& config() const;

  /// Applies a console `set` line and returns the reply.
  std::string control(std::string_view line);

  std::uint16_t ui_port() const;
  std::uint16_t listen_port() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

/// Runs a node until SIGINT/SIGTERM or cfg.duration_s elapses. Returns the
/// process exit code.
int run_node(const NodeConfig& cfg);

}  // namespace airhands
