#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "airhands/frame.hpp"
#include "airhands/pipeline.hpp"
#include "airhands/stats.hpp"
#include "airhands/wire.hpp"

namespace boost::asio {
class io_context;
}

namespace airhands::ui {

// Binary WebSocket message: [u8 tag][u8 stream_id][u32 seq][u64 capture_ts][JPEG]
inline constexpr std::uint8_t kTagVideo = 0x01;  ///< node -> console
inline constexpr std::uint8_t kTagHand = 0x02;   ///< console -> node
inline constexpr std::size_t kWsHeaderSize = 14;

struct WsVideoFrame {
  std::uint8_t tag = kTagVideo;
  StreamId stream_id = StreamId::Composite;
  std::uint32_t seq = 0;
  std::uint64_t capture_ts = 0;
  std::vector<std::uint8_t> payload;
};

std::vector<std::uint8_t> ws_encode_video(const RawFrame& frame, int quality,
                                          std::uint8_t tag = kTagVideo);

/// Parses the fixed header; throws ProtocolError on short messages, unknown
/// tags or undefined stream ids. The payload is not decoded.
WsVideoFrame ws_decode_video(std::span<const std::uint8_t> message);

/// Handles one `set <key> <value>` line against params. Returns the reply
/// line (`ack <key> <value>` or `err <key> <message>`); params change only
/// when the reply is an ack.
std::string apply_set_command(std::string_view line, LiveParams& params);

struct GatewayOptions {
  std::uint16_t port = 8080;
  std::string bind_address = "0.0.0.0";
  /// Console assets; a built-in placeholder page is served when empty.
  std::filesystem::path asset_dir;
  wire::Role role = wire::Role::Helper;
  int width = 640;
  int height = 480;
  bool accepts_hand_frames = false;
};

struct GatewayHooks {
  std::function<NodeStats()> stats;
  /// Applies a control line atomically and returns the reply.
  std::function<std::string(std::string_view)> control;
  /// Current jpeg quality for pushed video.
  std::function<int()> quality;
  /// Receives decoded hand frames when accepts_hand_frames is set.
  std::function<void(RawFrame)> hand_frame;
};

/// In-node HTTP server with a WebSocket endpoint at /ws. Runs on the
/// caller's io_context; publish() may be called from any thread.
class Gateway {
 public:
  Gateway(boost::asio::io_context& io, GatewayOptions options, GatewayHooks hooks);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// Binds and starts accepting. Throws Error if the port is taken.
  void start();
  void stop();

  /// Offers the newest display frame to every client; a client that is still
  /// busy sending skips straight to the newest frame.
  void publish(const RawFrame& frame);

  std::uint16_t port() const;
  std::size_t client_count() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace airhands::ui
