#include <doctest.h>

#include <chrono>
#include <random>

#include "airhands/codec.hpp"
#include "airhands/error.hpp"
#include "airhands/sources.hpp"
#include "test_util.hpp"

using namespace airhands;
using namespace airhands::codec;

namespace {

RawFrame decode(const std::vector<std::uint8_t>& bytes) {
  return decode_jpeg(bytes, 0, 0, StreamId::Scene);
}

// Decoding arbitrary bytes must either succeed or throw one of the codec
// errors; anything else escapes and fails the test.
bool decode_survives(std::span<const std::uint8_t> bytes) {
  try {
    const RawFrame f = decode_jpeg(bytes, 0, 0, StreamId::Scene, DecodeLimits{256, 256});
    return f.width() > 0;
  } catch (const DecodeError&) {
  } catch (const ResourceError&) {
  }
  return true;
}

}  // namespace

TEST_CASE("uniform gray survives at high quality") {
  const RawFrame gray = make_solid_frame(16, 16, 128, 128, 128);
  const RawFrame back = decode(encode_jpeg(gray, 90).payload);
  CHECK(psnr(gray, back) >= 40.0);
}

TEST_CASE("640x480 compresses below raw size") {
  const RawFrame f = synthetic_scene_frame(0, 640, 480);
  const EncodedFrame e = encode_jpeg(f, 80);
  CHECK(e.payload.size() < 921600u);
  CHECK(e.width == 640);
  CHECK(e.height == 480);
  CHECK(e.quality == 80);
}

TEST_CASE("quality outside 1..100 is rejected") {
  const RawFrame f = make_solid_frame(8, 8, 1, 2, 3);
  CHECK_THROWS_AS(encode_jpeg(f, 0), ConfigError);
  CHECK_THROWS_AS(encode_jpeg(f, 101), ConfigError);
  CHECK_THROWS_AS(encode_jpeg(f, -5), ConfigError);
}

TEST_CASE("dimension preservation for every quality") {
  std::mt19937 rng(1);
  for (int q = 1; q <= 100; ++q) {
    const int w = 1 + static_cast<int>(rng() % 70);
    const int h = 1 + static_cast<int>(rng() % 70);
    const RawFrame f = synthetic_scene_frame(static_cast<std::uint32_t>(q), w, h);
    const RawFrame back = decode_jpeg(encode_jpeg(f, q).payload, 5, 6, StreamId::Composite);
    REQUIRE(back.width() == w);
    REQUIRE(back.height() == h);
    REQUIRE(back.seq() == 5);
    REQUIRE(back.capture_ts() == 6);
    REQUIRE(back.stream_id() == StreamId::Composite);
  }
}

TEST_CASE("round-trip quality over the synthetic corpus") {
  double sum90 = 0;
  double sum30 = 0;
  const SyntheticHandSpec spec = SyntheticHandSpec::for_resolution(320, 240);
  for (std::uint32_t k = 0; k < 100; k += 5) {
    for (const RawFrame& f : {synthetic_hand_frame(spec, k, 320, 240).frame,
                              synthetic_scene_frame(k, 320, 240)}) {
      const double p90 = psnr(f, decode(encode_jpeg(f, 90).payload));
      const double p30 = psnr(f, decode(encode_jpeg(f, 30).payload));
      CHECK(p90 >= 35.0);
      sum90 += p90;
      sum30 += p30;
    }
  }
  CHECK(sum90 >= sum30);
}

TEST_CASE("malformed inputs raise DecodeError") {
  CHECK_THROWS_AS(decode({}), DecodeError);
  CHECK_THROWS_AS(decode({0xFF}), DecodeError);
  CHECK_THROWS_AS(decode({0xFF, 0xD8, 0xFF, 0xD9}), DecodeError);
  CHECK_THROWS_AS(decode(std::vector<std::uint8_t>(100, 0x42)), DecodeError);
}

TEST_CASE("oversized images raise ResourceError") {
  const RawFrame f = make_solid_frame(300, 20, 9, 9, 9);
  const auto payload = encode_jpeg(f, 50).payload;
  CHECK_THROWS_AS(decode_jpeg(payload, 0, 0, StreamId::Scene, DecodeLimits{256, 256}),
                  ResourceError);
  CHECK_NOTHROW(decode_jpeg(payload, 0, 0, StreamId::Scene, DecodeLimits{300, 20}));
}

TEST_CASE("truncation at every offset never crashes") {
  const RawFrame f = synthetic_scene_frame(3, 48, 40);
  const auto payload = encode_jpeg(f, 75).payload;
  for (std::size_t n = 0; n < payload.size(); ++n) {
    std::vector<std::uint8_t> cut(payload.begin(), payload.begin() + static_cast<long>(n));
    CHECK_THROWS_AS(decode(cut), DecodeError);
  }
}

TEST_CASE("mutated payloads never crash") {
  std::mt19937 rng(2);
  std::vector<std::vector<std::uint8_t>> seeds;
  for (int q : {10, 50, 95}) {
    seeds.push_back(encode_jpeg(synthetic_scene_frame(static_cast<std::uint32_t>(q), 24, 16), q)
                        .payload);
  }
  for (int i = 0; i < 20000; ++i) {
    std::vector<std::uint8_t> m = seeds[rng() % seeds.size()];
    const int edits = 1 + static_cast<int>(rng() % 8);
    for (int e = 0; e < edits; ++e) {
      switch (rng() % 4) {
        case 0: m[rng() % m.size()] = static_cast<std::uint8_t>(rng()); break;
        case 1: m[rng() % m.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8)); break;
        case 2: m.erase(m.begin() + static_cast<long>(rng() % m.size())); break;
        default: m.insert(m.begin() + static_cast<long>(rng() % m.size()),
                          static_cast<std::uint8_t>(rng()));
      }
      if (m.empty()) m.push_back(0);
    }
    REQUIRE(decode_survives(m));
  }
}
