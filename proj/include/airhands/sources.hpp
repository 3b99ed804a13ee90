#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "airhands/frame.hpp"
#include "airhands/skinseg.hpp"

namespace airhands {

using Clock = std::function<std::uint64_t()>;

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Circle traversed once every `period` frames. A zero radius parks the
/// centre. Positions are rounded to whole pixels.
struct CircularPath {
  double center_x = 0.0;
  double center_y = 0.0;
  double radius = 0.0;
  double period = 100.0;
  double phase = 0.0;  ///< radians

  Point at(std::uint32_t index) const;
};

/// A solid skin-coloured ellipse moving over a flat background. Pixel (x, y)
/// belongs to the ellipse iff (x-cx)^2/rx^2 + (y-cy)^2/ry^2 <= 1, with
/// integer pixel coordinates standing for pixel centres.
struct SyntheticHandSpec {
  Rgb skin{200, 120, 90};
  Rgb background{0, 0, 255};
  double radius_x = 10.0;
  double radius_y = 10.0;
  CircularPath path;

  /// Ellipse of (w/10, h/8) orbiting the frame centre at radius min(w,h)/4.
  static SyntheticHandSpec for_resolution(int width, int height);

  /// Radii below one pixel are raised to one.
  double effective_radius_x() const;
  double effective_radius_y() const;

  /// Throws ValidationError if any path position puts the ellipse outside
  /// the frame, or if the skin colour is rejected by the default model.
  void validate(int width, int height) const;
};

struct SyntheticHandFrame {
  RawFrame frame;
  skin::Mask ground_truth;
};

/// Hand frame number `index`; seq = index, stream HAND.
SyntheticHandFrame synthetic_hand_frame(const SyntheticHandSpec& spec, std::uint32_t index,
                                        int width, int height,
                                        std::uint64_t capture_ts = 0);

/// Moving checkerboard over a green/blue gradient. The checkerboard lifts all
/// three channels by the same amount, so its edges carry no chroma and hue is
/// untouched. Red stays the smallest channel, so every hue lies in [120, 240]
/// and nothing passes the skin gates.
RawFrame synthetic_scene_frame(std::uint32_t index, int width, int height,
                               std::uint64_t capture_ts = 0);

// --- PPM (binary P6, maxval 255) -------------------------------------------

struct PpmImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

/// Throws SourceError if the file is missing or not a valid P6 image.
PpmImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, int width, int height,
               std::span<const std::uint8_t> rgb);
void write_ppm(const std::filesystem::path& path, const RawFrame& frame);

/// White where the mask is set, black elsewhere.
RawFrame mask_to_frame(const skin::Mask& mask);

// --- producers and consumers -----------------------------------------------

class FrameSource {
 public:
  virtual ~FrameSource() = default;
  /// The next frame, or nothing if none is available right now.
  virtual std::optional<RawFrame> next() = 0;
};

class FrameSink {
 public:
  virtual ~FrameSink() = default;
  virtual void write(const RawFrame& frame) = 0;
};

class NullSink final : public FrameSink {
 public:
  void write(const RawFrame&) override {}
};

/// Stores frame_<seq:08>.ppm per frame and appends "<seq> <capture_ts> <stream_id>"
/// to index.txt. Creates the directory if needed.
class DirSink final : public FrameSink {
 public:
  explicit DirSink(std::filesystem::path dir);
  void write(const RawFrame& frame) override;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::ofstream index_;
};

/// Replays a DirSink directory in seq order, metadata intact. The caller
/// paces the replay. With `loop`, playback restarts after the last frame.
class DirSource final : public FrameSource {
 public:
  struct Entry {
    std::uint32_t seq;
    std::uint64_t capture_ts;
    StreamId stream_id;
  };

  /// Parses index.txt up front; throws SourceError naming the bad line.
  explicit DirSource(std::filesystem::path dir, bool loop = false);
  std::optional<RawFrame> next() override;
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::filesystem::path dir_;
  std::vector<Entry> entries_;
  std::size_t cursor_ = 0;
  bool loop_;
};

class SyntheticHandSource final : public FrameSource {
 public:
  SyntheticHandSource(SyntheticHandSpec spec, int width, int height, Clock clock);
  std::optional<RawFrame> next() override;

 private:
  SyntheticHandSpec spec_;
  int width_;
  int height_;
  Clock clock_;
  std::uint32_t index_ = 0;
};

class SyntheticSceneSource final : public FrameSource {
 public:
  SyntheticSceneSource(int width, int height, Clock clock);
  std::optional<RawFrame> next() override;

 private:
  int width_;
  int height_;
  Clock clock_;
  std::uint32_t index_ = 0;
};

/// Gives every frame from `inner` a fresh counter seq, the clock's capture
/// time and a fixed stream id. Used for replayed and camera input.
class RestampingSource final : public FrameSource {
 public:
  RestampingSource(std::unique_ptr<FrameSource> inner, StreamId stream_id, Clock clock);
  std::optional<RawFrame> next() override;

 private:
  std::unique_ptr<FrameSource> inner_;
  StreamId stream_id_;
  Clock clock_;
  std::uint32_t seq_ = 0;
};

bool camera_supported();

/// Webcam capture resized to width x height. Throws ConfigError if the build
/// has no camera support or the device cannot be opened.
std::unique_ptr<FrameSource> make_camera_source(int device, int width, int height);

}  // namespace airhands
