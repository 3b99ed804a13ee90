#include "airhands/pipeline.hpp"

#include <fmt/format.h>

#include "airhands/codec.hpp"
#include "airhands/compositor.hpp"
#include "airhands/error.hpp"

namespace airhands {

LiveParams LiveParams::from(const NodeConfig& cfg) {
  return LiveParams{cfg.jpeg_quality, cfg.skin, cfg.model_frozen};
}

void LiveParams::apply_to(NodeConfig& cfg) const {
  cfg.jpeg_quality = jpeg_quality;
  cfg.skin = skin;
  cfg.model_frozen = model_frozen;
}

namespace {

void require_shape(const RawFrame& frame, const NodeConfig& cfg, std::string_view what) {
  if (frame.width() != cfg.width || frame.height() != cfg.height) {
    throw DimensionError(fmt::format("{} frame is {}x{}, node runs at {}x{}", what,
                                     frame.width(), frame.height(), cfg.width, cfg.height));
  }
}

}  // namespace

wire::Frame to_wire_frame(const RawFrame& frame, int quality) {
  codec::EncodedFrame encoded = codec::encode_jpeg(frame, quality);
  return wire::Frame{frame.stream_id(), frame.seq(), frame.capture_ts(),
                     std::move(encoded.payload)};
}

HelperTickResult helper_tick(LatestSlot<RawFrame>& scene_slot, const RawFrame& hand,
                             const skin::SkinModel& model, const NodeConfig& cfg) {
  require_shape(hand, cfg, "hand");
  const std::optional<RawFrame> scene = scene_slot.latest();
  if (scene) {
    require_shape(*scene, cfg, "scene");
  }

  skin::Mask mask = skin::segment(hand, model);
  skin::SkinModel next = cfg.model_frozen ? model : skin::adapt(model, hand, mask);

  if (!scene) {
    const RawFrame gray = make_solid_frame(hand.width(), hand.height(), kPreviewGray,
                                           kPreviewGray, kPreviewGray, hand.seq(),
                                           hand.capture_ts(), StreamId::Scene);
    RawFrame preview = composite(gray, hand, mask);
    return {std::move(preview), std::move(next), std::move(mask), std::nullopt, false, std::nullopt};
  }

  RawFrame combined = composite(*scene, hand, mask);
  wire::Frame outbound = to_wire_frame(combined, cfg.jpeg_quality);
  return {std::move(combined), std::move(next), std::move(mask), std::move(outbound), true, scene};
}

WorkerTickResult worker_tick(const RawFrame& scene, LatestSlot<RawFrame>& composite_slot,
                             const NodeConfig& cfg) {
  require_shape(scene, cfg, "scene");
  WorkerTickResult result;
  try {
    result.outbound = to_wire_frame(scene.restamped(scene.seq(), scene.capture_ts(),
                                                    StreamId::Scene),
                                    cfg.jpeg_quality);
  } catch (const EncodeError&) {
    result.encode_failed = true;
  }
  result.display = composite_slot.take();
  return result;
}

}  // namespace airhands
