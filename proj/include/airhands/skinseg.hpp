#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "airhands/frame.hpp"

namespace airhands::skin {

inline constexpr std::size_t kHueBins = 64;
inline constexpr double kHueBinWidth = 360.0 / kHueBins;  // 5.625 degrees

using HueHistogram = std::array<double, kHueBins>;

struct Hsv {
  double h;  ///< degrees in [0, 360)
  double s;  ///< [0, 1]
  double v;  ///< [0, 1]
};

/// Standard HSV conversion; hue is defined as 0 for achromatic pixels.
Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Histogram bin holding hue h.
std::size_t hue_bin(double h);

class Mask;

/// Tunable gates of the detector. Every field can be overridden from the
/// command line and, except the bootstrap range, from the live console.
struct SkinParams {
  double bootstrap_lo = 0.0;
  double bootstrap_hi = 50.0;
  double s_min = 0.20;
  double v_min = 0.15;
  double tau = 0.5 / kHueBins;
  double alpha = 0.05;
  std::size_t adapt_min_pixels = 200;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  bool operator==(const SkinParams&) const = default;
};

/// Adaptive hue-histogram skin classifier. Until the first adaptation the
/// model accepts hues inside the bootstrap range; afterwards it accepts hues
/// whose histogram weight reaches tau. Saturation and value gates apply in
/// both states.
class SkinModel {
 public:
  SkinModel() = default;
  explicit SkinModel(const SkinParams& params);

  /// Bootstrapped model with an explicit histogram. The weights are
  /// normalized; throws ValidationError on negative weights or zero mass.
  static SkinModel with_histogram(const SkinParams& params, const HueHistogram& hist);

  const SkinParams& params() const { return params_; }
  const HueHistogram& histogram() const { return hist_; }
  bool bootstrapped() const { return bootstrapped_; }

  /// Replaces the gates, keeping the learned histogram.
  SkinModel with_params(const SkinParams& params) const;

  bool operator==(const SkinModel&) const = default;

 private:
  friend SkinModel adapt(const SkinModel&, const RawFrame&, const Mask&);

  SkinParams params_{};
  HueHistogram hist_{};
  bool bootstrapped_ = false;
};

/// Per-pixel binary map aligned with a frame; bits are 0 or 1, row-major.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool value = false);
  /// Throws ValidationError if bits.size() != width*height or any bit is not 0/1.
  Mask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t skin_count() const { return skin_count_; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  bool at(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  bool operator[](std::size_t index) const { return bits_[index] != 0; }

  bool operator==(const Mask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
  std::size_t skin_count_ = 0;
};

bool classify_pixel(const SkinModel& model, const Hsv& hsv);

/// Per-pixel classification followed by a 3x3-cross opening (erode, dilate)
/// and closing (dilate, erode). Neighbours outside the image are ignored by
/// both erosion and dilation.
Mask segment(const RawFrame& frame, const SkinModel& model);

/// Blends the hue histogram of the masked pixels into the model:
/// hist' = (1 - alpha) * hist + alpha * H, or hist' = H on the first
/// adaptation. Masks with fewer than adapt_min_pixels set bits leave the
/// model unchanged. Throws DimensionError when mask and frame disagree.
SkinModel adapt(const SkinModel& model, const RawFrame& frame, const Mask& mask);

/// Normalized hue histogram of the pixels selected by mask.
HueHistogram masked_hue_histogram(const RawFrame& frame, const Mask& mask);

}  // namespace airhands::skin
