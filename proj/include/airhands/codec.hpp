#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "airhands/frame.hpp"

namespace airhands::codec {

inline constexpr int kDefaultQuality = 80;

/// Baseline sequential JFIF, 4:2:0 chroma subsampling.
struct EncodedFrame {
  std::vector<std::uint8_t> payload;
  int width = 0;
  int height = 0;
  int quality = 0;
};

struct DecodeLimits {
  int max_width = 4096;
  int max_height = 4096;
};

/// Throws ConfigError unless 1 <= quality <= 100.
EncodedFrame encode_jpeg(const RawFrame& frame, int quality);

/// Decodes a JPEG payload and attaches the envelope metadata. Any libjpeg
/// warning (corrupt or truncated data) is treated as failure.
///
/// Throws DecodeError on malformed input and ResourceError when the image
/// exceeds limits. Never aborts the process, whatever the bytes.
RawFrame decode_jpeg(std::span<const std::uint8_t> payload, std::uint32_t seq,
                     std::uint64_t capture_ts, StreamId stream_id,
                     const DecodeLimits& limits = {});

}  // namespace airhands::codec
