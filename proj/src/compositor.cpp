#include "airhands/compositor.hpp"

#include <vector>

#include <fmt/format.h>

#include "airhands/error.hpp"

namespace airhands {

RawFrame composite(const RawFrame& scene, const RawFrame& hand, const skin::Mask& mask) {
  if (!scene.same_shape(hand) || mask.width() != scene.width() ||
      mask.height() != scene.height()) {
    throw DimensionError(fmt::format(
        "composite needs equal shapes: scene {}x{}, hand {}x{}, mask {}x{}",
        scene.width(), scene.height(), hand.width(), hand.height(), mask.width(),
        mask.height()));
  }
  const auto s = scene.pixels();
  const auto h = hand.pixels();
  const auto bits = mask.bits();
  std::vector<std::uint8_t> out(s.begin(), s.end());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) {
      out[3 * i] = h[3 * i];
      out[3 * i + 1] = h[3 * i + 1];
      out[3 * i + 2] = h[3 * i + 2];
    }
  }
  return make_frame(scene.width(), scene.height(), std::move(out), scene.seq(),
                    scene.capture_ts(), StreamId::Composite);
}

}  // namespace airhands
