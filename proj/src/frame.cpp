#include "airhands/frame.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "airhands/error.hpp"

namespace airhands {

std::optional<StreamId> stream_id_from_byte(std::uint8_t value) {
  switch (value) {
    case 0:
      return StreamId::Scene;
    case 1:
      return StreamId::Composite;
    case 2:
      return StreamId::Hand;
    default:
      return std::nullopt;
  }
}

std::string_view to_string(StreamId id) {
  switch (id) {
    case StreamId::Scene:
      return "scene";
    case StreamId::Composite:
      return "composite";
    case StreamId::Hand:
      return "hand";
  }
  return "invalid";
}

std::uint64_t wall_clock_ms() {
  using namespace std::chrono;
  return static_cast<std::uint64_t>(
      duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count());
}

RawFrame make_frame(int width, int height, std::vector<std::uint8_t> pixels,
                    std::uint32_t seq, std::uint64_t capture_ts, StreamId stream_id) {
  if (width <= 0 || height <= 0) {
    throw ValidationError(
        fmt::format("frame dimensions must be positive, got {}x{}", width, height));
  }
  if (!stream_id_from_byte(static_cast<std::uint8_t>(stream_id))) {
    throw ValidationError(fmt::format("undefined stream id {}",
                                      static_cast<int>(stream_id)));
  }
  const std::size_t expected =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
  if (pixels.size() != expected) {
    throw ValidationError(fmt::format("pixel buffer length mismatch: expected {}, got {}",
                                      expected, pixels.size()));
  }
  return RawFrame(width, height,
                  std::make_shared<const std::vector<std::uint8_t>>(std::move(pixels)),
                  seq, capture_ts, stream_id);
}

RawFrame make_solid_frame(int width, int height, std::uint8_t r, std::uint8_t g,
                          std::uint8_t b, std::uint32_t seq, std::uint64_t capture_ts,
                          StreamId stream_id) {
  if (width <= 0 || height <= 0) {
    throw ValidationError(
        fmt::format("frame dimensions must be positive, got {}x{}", width, height));
  }
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = r;
    pixels[i + 1] = g;
    pixels[i + 2] = b;
  }
  return make_frame(width, height, std::move(pixels), seq, capture_ts, stream_id);
}

RawFrame RawFrame::restamped(std::uint32_t seq, std::uint64_t capture_ts,
                             StreamId stream_id) const {
  return RawFrame(width_, height_, pixels_, seq, capture_ts, stream_id);
}

bool operator==(const RawFrame& a, const RawFrame& b) {
  if (a.width_ != b.width_ || a.height_ != b.height_ || a.seq_ != b.seq_ ||
      a.capture_ts_ != b.capture_ts_ || a.stream_id_ != b.stream_id_) {
    return false;
  }
  return a.pixels_ == b.pixels_ || *a.pixels_ == *b.pixels_;
}

double psnr(const RawFrame& a, const RawFrame& b) {
  if (!a.same_shape(b)) {
    throw DimensionError(fmt::format("psnr needs equal shapes, got {}x{} and {}x{}",
                                     a.width(), a.height(), b.width(), b.height()));
  }
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  std::uint64_t sum_sq = 0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const int d = static_cast<int>(pa[i]) - static_cast<int>(pb[i]);
    sum_sq += static_cast<std::uint64_t>(d * d);
  }
  if (sum_sq == 0) {
    return std::numeric_limits<double>::infinity();
  }
  const double mse = static_cast<double>(sum_sq) / static_cast<double>(pa.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace airhands
