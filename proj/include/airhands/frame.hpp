#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace airhands {

enum class StreamId : std::uint8_t { Scene = 0, Composite = 1, Hand = 2 };

std::optional<StreamId> stream_id_from_byte(std::uint8_t value);
std::string_view to_string(StreamId id);

/// Milliseconds since the Unix epoch.
std::uint64_t wall_clock_ms();

/// Immutable 8-bit interleaved RGB image plus the metadata that travels
/// with it through the pipeline. Copies share the pixel buffer.
class RawFrame {
 public:
  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const std::uint8_t> pixels() const { return *pixels_; }
  std::uint32_t seq() const { return seq_; }
  std::uint64_t capture_ts() const { return capture_ts_; }
  StreamId stream_id() const { return stream_id_; }

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  /// Same pixels, new metadata.
  RawFrame restamped(std::uint32_t seq, std::uint64_t capture_ts,
                     StreamId stream_id) const;

  bool same_shape(const RawFrame& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const RawFrame& a, const RawFrame& b);

 private:
  friend RawFrame make_frame(int, int, std::vector<std::uint8_t>, std::uint32_t,
                             std::uint64_t, StreamId);

  RawFrame(int width, int height,
           std::shared_ptr<const std::vector<std::uint8_t>> pixels,
           std::uint32_t seq, std::uint64_t capture_ts, StreamId stream_id)
      : width_(width),
        height_(height),
        pixels_(std::move(pixels)),
        seq_(seq),
        capture_ts_(capture_ts),
        stream_id_(stream_id) {}

  int width_;
  int height_;
  std::shared_ptr<const std::vector<std::uint8_t>> pixels_;
  std::uint32_t seq_;
  std::uint64_t capture_ts_;
  StreamId stream_id_;
};

/// Validates and wraps a pixel buffer. Throws ValidationError when width or
/// height is not positive, when the byte length is not width*height*3, or
/// when stream_id holds an undefined value.
RawFrame make_frame(int width, int height, std::vector<std::uint8_t> pixels,
                    std::uint32_t seq, std::uint64_t capture_ts, StreamId stream_id);

/// Uniformly filled frame.
RawFrame make_solid_frame(int width, int height, std::uint8_t r, std::uint8_t g,
                          std::uint8_t b, std::uint32_t seq = 0,
                          std::uint64_t capture_ts = 0,
                          StreamId stream_id = StreamId::Scene);

/// Peak signal-to-noise ratio over all R, G and B bytes; +infinity when the
/// frames are identical. Throws DimensionError on mismatched shapes.
double psnr(const RawFrame& a, const RawFrame& b);

}  // namespace airhands
