#include "airhands/node_config.hpp"

#include <charconv>

#include <fmt/format.h>

#include "airhands/error.hpp"

namespace airhands {

namespace {

template <typename Int>
bool parse_int(std::string_view text, Int& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && !text.empty();
}

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw ConfigError(fmt::format("endpoint '{}' is not host:port", text));
  }
  std::uint16_t port = 0;
  if (!parse_int(text.substr(colon + 1), port) || port == 0) {
    throw ConfigError(fmt::format("endpoint '{}' has an invalid port", text));
  }
  return Endpoint{std::string(text.substr(0, colon)), port};
}

std::string Endpoint::to_string() const { return fmt::format("{}:{}", host, port); }

SourceSpec SourceSpec::parse(std::string_view text) {
  SourceSpec spec;
  if (text == "synthetic") {
    spec.kind = Kind::Synthetic;
  } else if (text == "ui") {
    spec.kind = Kind::Ui;
  } else if (text == "camera") {
    spec.kind = Kind::Camera;
  } else if (text.starts_with("camera:")) {
    spec.kind = Kind::Camera;
    if (!parse_int(text.substr(7), spec.camera_device) || spec.camera_device < 0) {
      throw ConfigError(fmt::format("source '{}' has an invalid camera index", text));
    }
  } else if (text.starts_with("dir:") && text.size() > 4) {
    spec.kind = Kind::Dir;
    spec.path = std::string(text.substr(4));
  } else {
    throw ConfigError(fmt::format(
        "source '{}' is not one of synthetic, dir:<path>, camera[:N], ui", text));
  }
  return spec;
}

std::string SourceSpec::to_string() const {
  switch (kind) {
    case Kind::Synthetic:
      return "synthetic";
    case Kind::Dir:
      return "dir:" + path.string();
    case Kind::Camera:
      return fmt::format("camera:{}", camera_device);
    case Kind::Ui:
      return "ui";
  }
  return "?";
}

SinkSpec SinkSpec::parse(std::string_view text) {
  SinkSpec spec;
  if (text == "null") {
    spec.kind = Kind::Null;
  } else if (text == "ui") {
    spec.kind = Kind::Ui;
  } else if (text.starts_with("dir:") && text.size() > 4) {
    spec.kind = Kind::Dir;
    spec.path = std::string(text.substr(4));
  } else {
    throw ConfigError(fmt::format("sink '{}' is not one of null, dir:<path>, ui", text));
  }
  return spec;
}

std::string SinkSpec::to_string() const {
  switch (kind) {
    case Kind::Null:
      return "null";
    case Kind::Dir:
      return "dir:" + path.string();
    case Kind::Ui:
      return "ui";
  }
  return "?";
}

NodeConfig NodeConfig::defaults_for(wire::Role role) {
  NodeConfig cfg;
  cfg.role = role;
  if (role == wire::Role::Helper) {
    cfg.listen_port = kHelperListenPort;
    cfg.peer = Endpoint{"127.0.0.1", kWorkerListenPort};
  } else {
    cfg.listen_port = kWorkerListenPort;
    cfg.peer = Endpoint{"127.0.0.1", kHelperListenPort};
  }
  return cfg;
}

void NodeConfig::validate() const {
  if (width <= 0 || height <= 0 || width > 65535 || height > 65535) {
    throw ConfigError(fmt::format("resolution {}x{} outside 1..65535", width, height));
  }
  if (static_cast<std::uint64_t>(width) * height * 3 > 64ull * 1024 * 1024) {
    throw ConfigError(fmt::format("resolution {}x{} exceeds 64 MiB per frame", width, height));
  }
  if (fps_target < 1 || fps_target > 255) {
    throw ConfigError(fmt::format("fps target {} outside 1..255", fps_target));
  }
  if (jpeg_quality < 1 || jpeg_quality > 100) {
    throw ConfigError(fmt::format("jpeg quality {} out of range 1..100", jpeg_quality));
  }
  if (listen_port == 0) {
    throw ConfigError("listen port must be set");
  }
  if (peer.port == 0 || peer.host.empty()) {
    throw ConfigError("peer endpoint must be set");
  }
  if (role == wire::Role::Worker && source.kind == SourceSpec::Kind::Ui) {
    throw ConfigError("worker needs a scene source; 'ui' only supplies hand frames");
  }
  if (source.kind == SourceSpec::Kind::Ui && ui_port == 0) {
    throw ConfigError("source 'ui' needs the console gateway (ui port 0 disables it)");
  }
  if (!(duration_s >= 0.0)) {
    throw ConfigError("duration must be non-negative");
  }
  skin.validate();
}

wire::LocalEndpoint NodeConfig::local_endpoint() const {
  return {role, static_cast<std::uint16_t>(width), static_cast<std::uint16_t>(height)};
}

wire::Hello NodeConfig::hello() const {
  wire::Hello h;
  h.role = role;
  h.width = static_cast<std::uint16_t>(width);
  h.height = static_cast<std::uint16_t>(height);
  h.fps_target = static_cast<std::uint8_t>(fps_target);
  return h;
}

StreamId outbound_stream(wire::Role role) {
  return role == wire::Role::Worker ? StreamId::Scene : StreamId::Composite;
}

StreamId inbound_stream(wire::Role role) {
  return role == wire::Role::Worker ? StreamId::Composite : StreamId::Scene;
}

wire::HelloAck negotiate(const NodeConfig& local, const wire::Message& remote_hello) {
  return wire::negotiate(local.local_endpoint(), remote_hello);
}

}  // namespace airhands
