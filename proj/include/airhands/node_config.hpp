#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "airhands/codec.hpp"
#include "airhands/skinseg.hpp"
#include "airhands/wire.hpp"

namespace airhands {

inline constexpr std::uint16_t kWorkerListenPort = 7001;  // receives COMPOSITE
inline constexpr std::uint16_t kHelperListenPort = 7002;  // receives SCENE
inline constexpr std::uint16_t kDefaultUiPort = 8080;

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  /// "host:port"; throws ConfigError.
  static Endpoint parse(std::string_view text);
  std::string to_string() const;
  bool operator==(const Endpoint&) const = default;
};

struct SourceSpec {
  enum class Kind { Synthetic, Dir, Camera, Ui };
  Kind kind = Kind::Synthetic;
  std::filesystem::path path;
  int camera_device = 0;

  /// synthetic | dir:<path> | camera[:<device>] | ui
  static SourceSpec parse(std::string_view text);
  std::string to_string() const;
  bool operator==(const SourceSpec&) const = default;
};

struct SinkSpec {
  enum class Kind { Null, Dir, Ui };
  Kind kind = Kind::Null;
  std::filesystem::path path;

  /// null | dir:<path> | ui
  static SinkSpec parse(std::string_view text);
  std::string to_string() const;
  bool operator==(const SinkSpec&) const = default;
};

struct NodeConfig {
  wire::Role role = wire::Role::Helper;
  std::uint16_t listen_port = kHelperListenPort;
  Endpoint peer{"127.0.0.1", kWorkerListenPort};
  int width = 640;
  int height = 480;
  int fps_target = 15;
  int jpeg_quality = codec::kDefaultQuality;
  SourceSpec source;
  SinkSpec sink;
  skin::SkinParams skin;
  bool model_frozen = false;
  /// 0 disables the console gateway.
  std::uint16_t ui_port = kDefaultUiPort;
  std::filesystem::path ui_dir;
  /// Seconds to run before a clean shutdown; 0 runs until interrupted.
  double duration_s = 0.0;

  /// Role-specific ports: helper listens on 7002 and dials 7001, worker the
  /// reverse.
  static NodeConfig defaults_for(wire::Role role);

  /// Throws ConfigError on any invariant violation.
  void validate() const;

  wire::LocalEndpoint local_endpoint() const;
  wire::Hello hello() const;
};

/// Worker nodes send SCENE, helper nodes send COMPOSITE.
StreamId outbound_stream(wire::Role role);
StreamId inbound_stream(wire::Role role);

wire::HelloAck negotiate(const NodeConfig& local, const wire::Message& remote_hello);

}  // namespace airhands
