#include <doctest.h>

#include <cmath>
#include <random>

#include "airhands/error.hpp"
#include "airhands/frame.hpp"
#include "test_util.hpp"

using namespace airhands;

TEST_CASE("make_frame accepts exactly width*height*3 bytes") {
  const RawFrame f = make_frame(2, 2, std::vector<std::uint8_t>(12), 0, 0, StreamId::Scene);
  CHECK(f.width() == 2);
  CHECK(f.height() == 2);
  CHECK(f.pixels().size() == 12);

  try {
    make_frame(2, 2, std::vector<std::uint8_t>(11), 0, 0, StreamId::Scene);
    FAIL("short buffer accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("expected 12, got 11") != std::string::npos);
  }

  const RawFrame big = make_frame(640, 480, std::vector<std::uint8_t>(921600), 7,
                                  1700000000000ull, StreamId::Hand);
  CHECK(big.seq() == 7);
  CHECK(big.capture_ts() == 1700000000000ull);
  CHECK(big.stream_id() == StreamId::Hand);
}

TEST_CASE("make_frame rejects every mismatched length and bad shapes") {
  std::mt19937 rng(11);
  for (int i = 0; i < 500; ++i) {
    const int w = 1 + static_cast<int>(rng() % 20);
    const int h = 1 + static_cast<int>(rng() % 20);
    const std::size_t ok = static_cast<std::size_t>(w) * h * 3;
    std::size_t n = rng() % (ok * 2 + 2);
    if (n == ok) ++n;
    CHECK_THROWS_AS(make_frame(w, h, std::vector<std::uint8_t>(n), 0, 0, StreamId::Scene),
                    ValidationError);
  }
  CHECK_THROWS_AS(make_frame(0, 4, {}, 0, 0, StreamId::Scene), ValidationError);
  CHECK_THROWS_AS(make_frame(-1, 4, {}, 0, 0, StreamId::Scene), ValidationError);
  CHECK_THROWS_AS(make_frame(1, 1, std::vector<std::uint8_t>(3), 0, 0, static_cast<StreamId>(9)),
                  ValidationError);
}

TEST_CASE("psnr examples") {
  const RawFrame a = make_solid_frame(8, 8, 0, 0, 0);
  const RawFrame b = make_solid_frame(8, 8, 255, 255, 255);
  CHECK(std::isinf(psnr(a, a)));
  CHECK(psnr(a, b) == doctest::Approx(0.0));
  const RawFrame g1 = make_solid_frame(8, 8, 128, 128, 128);
  const RawFrame g2 = make_solid_frame(8, 8, 129, 129, 129);
  CHECK(psnr(g1, g2) == doctest::Approx(10.0 * std::log10(65025.0)).epsilon(1e-12));
  CHECK(psnr(g1, g2) == doctest::Approx(48.13).epsilon(1e-3));
  CHECK_THROWS_AS(psnr(a, make_solid_frame(8, 7, 0, 0, 0)), DimensionError);
}

TEST_CASE("psnr is symmetric and agrees with the reference") {
  std::mt19937 rng(5);
  for (int i = 0; i < 200; ++i) {
    const int w = 1 + static_cast<int>(rng() % 16);
    const int h = 1 + static_cast<int>(rng() % 16);
    std::vector<std::uint8_t> pa(static_cast<std::size_t>(w) * h * 3);
    std::vector<std::uint8_t> pb(pa.size());
    for (auto& v : pa) v = static_cast<std::uint8_t>(rng());
    for (std::size_t k = 0; k < pb.size(); ++k) {
      pb[k] = rng() % 3 == 0 ? static_cast<std::uint8_t>(rng()) : pa[k];
    }
    const RawFrame a = make_frame(w, h, pa, 0, 0, StreamId::Scene);
    const RawFrame b = make_frame(w, h, pb, 0, 0, StreamId::Scene);
    const double ab = psnr(a, b);
    CHECK(ab == psnr(b, a));
    const double ref = oracle::psnr(testutil::image_of(a), testutil::image_of(b));
    if (std::isinf(ref)) {
      CHECK(std::isinf(ab));
    } else {
      CHECK(ab == doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("restamped keeps pixels and replaces metadata") {
  const RawFrame f = make_solid_frame(3, 2, 1, 2, 3, 4, 5, StreamId::Scene);
  const RawFrame g = f.restamped(9, 10, StreamId::Composite);
  CHECK(g.seq() == 9);
  CHECK(g.capture_ts() == 10);
  CHECK(g.stream_id() == StreamId::Composite);
  CHECK(std::equal(f.pixels().begin(), f.pixels().end(), g.pixels().begin()));
  CHECK(f.seq() == 4);
  CHECK_FALSE(f == g);
  CHECK(f == f.restamped(4, 5, StreamId::Scene));
}

TEST_CASE("stream ids") {
  CHECK(stream_id_from_byte(0) == StreamId::Scene);
  CHECK(stream_id_from_byte(1) == StreamId::Composite);
  CHECK(stream_id_from_byte(2) == StreamId::Hand);
  CHECK_FALSE(stream_id_from_byte(3).has_value());
  CHECK(to_string(StreamId::Composite) == "composite");
}
