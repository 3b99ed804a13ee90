#pragma once

#include <optional>

#include "airhands/frame.hpp"
#include "airhands/latest_slot.hpp"
#include "airhands/node_config.hpp"
#include "airhands/skinseg.hpp"
#include "airhands/wire.hpp"

namespace airhands {

/// The subset of NodeConfig that may change while a node runs.
struct LiveParams {
  int jpeg_quality = codec::kDefaultQuality;
  skin::SkinParams skin;
  bool model_frozen = false;

  static LiveParams from(const NodeConfig& cfg);
  void apply_to(NodeConfig& cfg) const;
  bool operator==(const LiveParams&) const = default;
};

inline constexpr std::uint8_t kPreviewGray = 128;

struct HelperTickResult {
  RawFrame composite;
  skin::SkinModel model;
  skin::Mask mask;
  /// COMPOSITE frame for the worker; empty until a scene has arrived.
  std::optional<wire::Frame> outbound;
  bool had_scene = false;
  /// The scene the composite was built from.
  std::optional<RawFrame> scene;
};

/// One helper step: segment the hand frame, adapt the model (unless frozen),
/// and combine the hand with the latest scene. Before any scene arrives the
/// hand is previewed over neutral gray and nothing is sent. The scene slot
/// keeps its value, so a scene is reused until a newer one lands.
///
/// Throws DimensionError when the hand or scene does not match cfg.
HelperTickResult helper_tick(LatestSlot<RawFrame>& scene_slot, const RawFrame& hand,
                             const skin::SkinModel& model, const NodeConfig& cfg);

struct WorkerTickResult {
  std::optional<RawFrame> display;
  std::optional<wire::Frame> outbound;
  bool encode_failed = false;
};

/// One worker step: encode the scene for the helper and pick up the newest
/// unconsumed composite for display.
WorkerTickResult worker_tick(const RawFrame& scene, LatestSlot<RawFrame>& composite_slot,
                             const NodeConfig& cfg);

/// JPEG-encodes a frame into a FRAME message that carries its metadata.
wire::Frame to_wire_frame(const RawFrame& frame, int quality);

}  // namespace airhands
