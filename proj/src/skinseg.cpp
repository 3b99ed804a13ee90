#include "airhands/skinseg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "airhands/error.hpp"

namespace airhands::skin {

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const int max = std::max({r, g, b});
  const int min = std::min({r, g, b});
  const int delta = max - min;
  Hsv out{0.0, 0.0, max / 255.0};
  if (max == 0) {
    return out;
  }
  out.s = static_cast<double>(delta) / max;
  if (delta == 0) {
    return out;
  }
  double h;
  if (max == r) {
    h = 60.0 * (g - b) / delta;
    if (h < 0.0) {
      h += 360.0;
    }
  } else if (max == g) {
    h = 60.0 * (b - r) / delta + 120.0;
  } else {
    h = 60.0 * (r - g) / delta + 240.0;
  }
  out.h = h >= 360.0 ? h - 360.0 : h;
  return out;
}

std::size_t hue_bin(double h) {
  if (!(h > 0.0)) {
    return 0;
  }
  const auto bin = static_cast<std::size_t>(std::floor(h / kHueBinWidth));
  return std::min(bin, kHueBins - 1);
}

void SkinParams::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(s_min)) {
    throw ConfigError(fmt::format("skin.s_min out of range 0..1: {}", s_min));
  }
  if (!in_unit(v_min)) {
    throw ConfigError(fmt::format("skin.v_min out of range 0..1: {}", v_min));
  }
  if (!in_unit(tau)) {
    throw ConfigError(fmt::format("skin.tau out of range 0..1: {}", tau));
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError(fmt::format("skin.alpha out of range (0,1]: {}", alpha));
  }
  if (!(bootstrap_lo >= 0.0 && bootstrap_hi < 360.0 && bootstrap_lo <= bootstrap_hi)) {
    throw ConfigError(fmt::format("skin bootstrap range invalid: {}..{}", bootstrap_lo,
                                  bootstrap_hi));
  }
}

SkinModel::SkinModel(const SkinParams& params) : params_(params) {
  params_.validate();
}

SkinModel SkinModel::with_histogram(const SkinParams& params, const HueHistogram& hist) {
  SkinModel model(params);
  double total = 0.0;
  for (double w : hist) {
    if (!(w >= 0.0)) {
      throw ValidationError("hue histogram weights must be non-negative");
    }
    total += w;
  }
  if (!(total > 0.0)) {
    throw ValidationError("hue histogram has no mass");
  }
  for (std::size_t i = 0; i < kHueBins; ++i) {
    model.hist_[i] = hist[i] / total;
  }
  model.bootstrapped_ = true;
  return model;
}

SkinModel SkinModel::with_params(const SkinParams& params) const {
  params.validate();
  SkinModel copy = *this;
  copy.params_ = params;
  return copy;
}

Mask::Mask(int width, int height, bool value)
    : width_(width),
      height_(height),
      bits_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0),
            value ? 1 : 0),
      skin_count_(value ? bits_.size() : 0) {
  if (width <= 0 || height <= 0) {
    throw ValidationError(fmt::format("mask dimensions must be positive, got {}x{}",
                                      width, height));
  }
}

Mask::Mask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width <= 0 || height <= 0) {
    throw ValidationError(fmt::format("mask dimensions must be positive, got {}x{}",
                                      width, height));
  }
  const std::size_t expected = static_cast<std::size_t>(width) * height;
  if (bits_.size() != expected) {
    throw ValidationError(fmt::format("mask length mismatch: expected {}, got {}",
                                      expected, bits_.size()));
  }
  for (std::uint8_t b : bits_) {
    if (b > 1) {
      throw ValidationError("mask bits must be 0 or 1");
    }
    skin_count_ += b;
  }
}

bool classify_pixel(const SkinModel& model, const Hsv& hsv) {
  const SkinParams& p = model.params();
  if (hsv.s < p.s_min || hsv.v < p.v_min) {
    return false;
  }
  if (!model.bootstrapped()) {
    return hsv.h >= p.bootstrap_lo && hsv.h <= p.bootstrap_hi;
  }
  return model.histogram()[hue_bin(hsv.h)] >= p.tau;
}

namespace {

using Bits = std::vector<std::uint8_t>;

void erode_cross(const Bits& in, Bits& out, int w, int h) {
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = in.data() + static_cast<std::size_t>(y) * w;
    const std::uint8_t* up = y > 0 ? row - w : nullptr;
    const std::uint8_t* down = y + 1 < h ? row + w : nullptr;
    std::uint8_t* dst = out.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = row[x];
      if (x > 0) v &= row[x - 1];
      if (x + 1 < w) v &= row[x + 1];
      if (up) v &= up[x];
      if (down) v &= down[x];
      dst[x] = v;
    }
  }
}

void dilate_cross(const Bits& in, Bits& out, int w, int h) {
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = in.data() + static_cast<std::size_t>(y) * w;
    const std::uint8_t* up = y > 0 ? row - w : nullptr;
    const std::uint8_t* down = y + 1 < h ? row + w : nullptr;
    std::uint8_t* dst = out.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = row[x];
      if (x > 0) v |= row[x - 1];
      if (x + 1 < w) v |= row[x + 1];
      if (up) v |= up[x];
      if (down) v |= down[x];
      dst[x] = v;
    }
  }
}

}  // namespace

Mask segment(const RawFrame& frame, const SkinModel& model) {
  const int w = frame.width();
  const int h = frame.height();
  const auto px = frame.pixels();
  Bits a(frame.pixel_count());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Hsv hsv = rgb_to_hsv(px[3 * i], px[3 * i + 1], px[3 * i + 2]);
    a[i] = classify_pixel(model, hsv) ? 1 : 0;
  }
  Bits b(a.size());
  // open
  erode_cross(a, b, w, h);
  dilate_cross(b, a, w, h);
  // close
  dilate_cross(a, b, w, h);
  erode_cross(b, a, w, h);
  return Mask(w, h, std::move(a));
}

HueHistogram masked_hue_histogram(const RawFrame& frame, const Mask& mask) {
  HueHistogram hist{};
  const auto px = frame.pixels();
  const auto bits = mask.bits();
  std::size_t n = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) {
      const Hsv hsv = rgb_to_hsv(px[3 * i], px[3 * i + 1], px[3 * i + 2]);
      hist[hue_bin(hsv.h)] += 1.0;
      ++n;
    }
  }
  if (n > 0) {
    for (double& w : hist) {
      w /= static_cast<double>(n);
    }
  }
  return hist;
}

SkinModel adapt(const SkinModel& model, const RawFrame& frame, const Mask& mask) {
  if (mask.width() != frame.width() || mask.height() != frame.height()) {
    throw DimensionError(fmt::format("mask {}x{} does not match frame {}x{}",
                                     mask.width(), mask.height(), frame.width(),
                                     frame.height()));
  }
  if (mask.skin_count() < model.params().adapt_min_pixels || mask.skin_count() == 0) {
    return model;
  }
  const HueHistogram observed = masked_hue_histogram(frame, mask);
  SkinModel next = model;
  if (!model.bootstrapped_) {
    next.hist_ = observed;
  } else {
    const double alpha = model.params().alpha;
    double total = 0.0;
    for (std::size_t i = 0; i < kHueBins; ++i) {
      next.hist_[i] = (1.0 - alpha) * model.hist_[i] + alpha * observed[i];
      total += next.hist_[i];
    }
    // keep the sum pinned at 1 against accumulated rounding
    for (double& w : next.hist_) {
      w /= total;
    }
  }
  next.bootstrapped_ = true;
  return next;
}

}  // namespace airhands::skin
