#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "airhands/error.hpp"
#include "airhands/skinseg.hpp"
#include "airhands/sources.hpp"
#include "test_util.hpp"

using namespace airhands;
using namespace airhands::skin;

namespace {

// Floating-point slack on top of exact algebraic bounds.
constexpr double kFpSlack = 1e-12;

Hsv hsv_of(std::uint8_t r, std::uint8_t g, std::uint8_t b) { return rgb_to_hsv(r, g, b); }

RawFrame random_frame(std::mt19937& rng, int w, int h, int skin_bias) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t p = 0; p < px.size() / 3; ++p) {
    if (static_cast<int>(rng() % 100) < skin_bias) {
      // reddish, mostly skin coloured
      px[3 * p] = static_cast<std::uint8_t>(150 + rng() % 100);
      px[3 * p + 1] = static_cast<std::uint8_t>(60 + rng() % 90);
      px[3 * p + 2] = static_cast<std::uint8_t>(30 + rng() % 80);
    } else {
      px[3 * p] = static_cast<std::uint8_t>(rng());
      px[3 * p + 1] = static_cast<std::uint8_t>(rng());
      px[3 * p + 2] = static_cast<std::uint8_t>(rng());
    }
  }
  return make_frame(w, h, std::move(px), 0, 0, StreamId::Hand);
}

HueHistogram single_bin(std::size_t bin) {
  HueHistogram h{};
  h[bin] = 1.0;
  return h;
}

double hist_sum(const HueHistogram& h) { return std::accumulate(h.begin(), h.end(), 0.0); }

}  // namespace

TEST_CASE("rgb_to_hsv examples") {
  Hsv red = hsv_of(255, 0, 0);
  CHECK(red.h == 0.0);
  CHECK(red.s == 1.0);
  CHECK(red.v == 1.0);
  Hsv green = hsv_of(0, 255, 0);
  CHECK(green.h == doctest::Approx(120.0));
  CHECK(green.s == 1.0);
  Hsv gray = hsv_of(128, 128, 128);
  CHECK(gray.h == 0.0);
  CHECK(gray.s == 0.0);
  CHECK(gray.v == doctest::Approx(128.0 / 255.0));
}

TEST_CASE("rgb_to_hsv matches the exact rational hue for every channel triple sample") {
  std::mt19937 rng(1);
  for (int i = 0; i < 200000; ++i) {
    const auto r = static_cast<std::uint8_t>(rng());
    const auto g = static_cast<std::uint8_t>(rng());
    const auto b = static_cast<std::uint8_t>(rng());
    const Hsv hsv = hsv_of(r, g, b);
    REQUIRE(hsv.h >= 0.0);
    REQUIRE(hsv.h < 360.0);
    REQUIRE(hsv.h == doctest::Approx(oracle::hue(r, g, b).value()).epsilon(1e-12));
    REQUIRE(static_cast<int>(hue_bin(hsv.h)) == oracle::hue_bin(r, g, b));
  }
}

TEST_CASE("hue is invariant under brightness scaling") {
  std::mt19937 rng(2);
  for (int i = 0; i < 50000; ++i) {
    const int r = static_cast<int>(rng() % 128);
    const int g = static_cast<int>(rng() % 128);
    const int b = static_cast<int>(rng() % 128);
    const int c = 2 + static_cast<int>(rng() % 3);  // integer scale keeps channels exact
    if (std::max({r, g, b}) * c > 255) continue;
    const Hsv a = hsv_of(static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                         static_cast<std::uint8_t>(b));
    const Hsv s = hsv_of(static_cast<std::uint8_t>(r * c), static_cast<std::uint8_t>(g * c),
                         static_cast<std::uint8_t>(b * c));
    REQUIRE(std::abs(a.h - s.h) <= 1e-6);
    REQUIRE(a.s == doctest::Approx(s.s).epsilon(1e-15));
    const SkinModel model{SkinParams{}};
    if (a.v >= model.params().v_min && s.v >= model.params().v_min) {
      REQUIRE(classify_pixel(model, a) == classify_pixel(model, s));
    }
  }
}

TEST_CASE("hue bins") {
  CHECK(hue_bin(0.0) == 0);
  CHECK(hue_bin(5.624) == 0);
  CHECK(hue_bin(5.625) == 1);
  CHECK(hue_bin(359.999) == 63);
  CHECK(hue_bin(200.0) == 35);
}

TEST_CASE("classify_pixel examples") {
  const SkinModel fresh{SkinParams{}};
  CHECK(classify_pixel(fresh, Hsv{20.0, 0.5, 0.5}));
  CHECK_FALSE(classify_pixel(fresh, Hsv{20.0, 0.0, 0.5}));
  CHECK_FALSE(classify_pixel(fresh, Hsv{20.0, 0.5, 0.1}));
  CHECK_FALSE(classify_pixel(fresh, Hsv{60.0, 0.5, 0.5}));

  const SkinModel blue = SkinModel::with_histogram(SkinParams{}, single_bin(hue_bin(200.0)));
  CHECK(blue.bootstrapped());
  CHECK_FALSE(classify_pixel(blue, Hsv{20.0, 0.5, 0.5}));
  CHECK(classify_pixel(blue, Hsv{200.0, 0.5, 0.5}));
  CHECK_FALSE(classify_pixel(blue, Hsv{200.0, 0.0, 0.5}));
}

TEST_CASE("classify_pixel agrees with the reference classifier") {
  std::mt19937 rng(3);
  HueHistogram random_hist{};
  for (auto& v : random_hist) v = (rng() % 4 == 0) ? 0.0 : static_cast<double>(rng() % 100);
  const SkinModel models[] = {
      SkinModel{SkinParams{}},
      SkinModel::with_histogram(SkinParams{}, random_hist),
      SkinModel::with_histogram(SkinParams{0.0, 50.0, 0.35, 0.3, 0.02, 0.05, 200}, random_hist),
  };
  for (const SkinModel& m : models) {
    const oracle::SkinGate gate = testutil::gate_of(m);
    for (int i = 0; i < 100000; ++i) {
      const auto r = static_cast<std::uint8_t>(rng());
      const auto g = static_cast<std::uint8_t>(rng());
      const auto b = static_cast<std::uint8_t>(rng());
      REQUIRE(classify_pixel(m, hsv_of(r, g, b)) == oracle::classify(gate, r, g, b));
    }
  }
}

TEST_CASE("segment examples") {
  const SkinModel model{SkinParams{}};
  CHECK(segment(make_solid_frame(32, 32, 0, 0, 0), model).skin_count() == 0);

  // 20x20 skin block on blue: classification alone covers the block. The
  // cross-shaped opening cannot keep a square corner (a corner pixel has only
  // two set 4-neighbours), so exactly the four corners go.
  oracle::Image img{64, 64, std::vector<std::uint8_t>(64 * 64 * 3)};
  oracle::Bits block(64 * 64, 0);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * 64 + x;
      const bool in = x >= 22 && x < 42 && y >= 10 && y < 30;
      block[p] = in;
      img.rgb[3 * p] = in ? 200 : 0;
      img.rgb[3 * p + 1] = in ? 120 : 0;
      img.rgb[3 * p + 2] = in ? 90 : 255;
    }
  }
  const oracle::SkinGate gate = testutil::gate_of(model);
  CHECK(oracle::classify_all(img, gate) == block);
  const Mask mask = segment(testutil::frame_of(img), model);
  oracle::Bits trimmed = block;
  for (const auto [x, y] : {std::pair{22, 10}, std::pair{41, 10}, std::pair{22, 29},
                            std::pair{41, 29}}) {
    trimmed[static_cast<std::size_t>(y) * 64 + x] = 0;
  }
  CHECK(oracle::segment(img, gate) == trimmed);
  CHECK(testutil::bits_of(mask) == trimmed);
  CHECK(mask.skin_count() == 396);

  // isolated skin pixels vanish under the opening
  oracle::Image dots{64, 64, std::vector<std::uint8_t>(64 * 64 * 3)};
  for (std::size_t p = 0; p < 64 * 64; ++p) {
    const int x = static_cast<int>(p % 64);
    const int y = static_cast<int>(p / 64);
    const bool in = x % 4 == 1 && y % 4 == 1;
    dots.rgb[3 * p] = in ? 200 : 0;
    dots.rgb[3 * p + 1] = in ? 120 : 0;
    dots.rgb[3 * p + 2] = in ? 90 : 255;
  }
  const oracle::Bits dot_bits = oracle::classify_all(dots, gate);
  CHECK(std::count(dot_bits.begin(), dot_bits.end(), 1) == 256);
  CHECK(oracle::segment(dots, gate) == oracle::Bits(64 * 64, 0));
  CHECK(segment(testutil::frame_of(dots), model).skin_count() == 0);
}

TEST_CASE("segment equals classification plus reference morphology on random frames") {
  std::mt19937 rng(4);
  HueHistogram hist{};
  hist[2] = 3;
  hist[3] = 1;
  hist[40] = 1;
  const SkinModel models[] = {SkinModel{SkinParams{}},
                              SkinModel::with_histogram(SkinParams{}, hist)};
  for (int i = 0; i < 300; ++i) {
    const int w = 1 + static_cast<int>(rng() % 40);
    const int h = 1 + static_cast<int>(rng() % 40);
    const RawFrame f = random_frame(rng, w, h, static_cast<int>(rng() % 100));
    for (const SkinModel& m : models) {
      const Mask got = segment(f, m);
      REQUIRE(testutil::bits_of(got) ==
              oracle::segment(testutil::image_of(f), testutil::gate_of(m)));
      REQUIRE(got.skin_count() ==
              static_cast<std::size_t>(std::count(got.bits().begin(), got.bits().end(), 1)));
      REQUIRE(segment(f, m) == got);  // determinism
    }
  }
}

TEST_CASE("segment on the synthetic hand corpus matches oracle and ground truth") {
  const SkinModel model{SkinParams{}};
  const oracle::SkinGate gate = testutil::gate_of(model);
  for (const auto [w, h] : {std::pair{640, 480}, std::pair{64, 64}, std::pair{160, 120}}) {
    const SyntheticHandSpec spec = SyntheticHandSpec::for_resolution(w, h);
    for (std::uint32_t k = 0; k < 100; ++k) {
      const SyntheticHandFrame hf = synthetic_hand_frame(spec, k, w, h);
      const Mask got = segment(hf.frame, model);
      const auto bits = testutil::bits_of(got);
      REQUIRE(bits == oracle::segment(testutil::image_of(hf.frame), gate));
      REQUIRE(bits == oracle::hand_truth(static_cast<int>(k), w, h));
      REQUIRE(got == hf.ground_truth);
    }
  }
}

TEST_CASE("adapt examples") {
  const SkinParams p;
  const SkinModel fresh{p};
  const RawFrame hand = make_solid_frame(20, 20, 200, 120, 90);

  const SkinModel same = adapt(fresh, hand, Mask(20, 20, false));
  CHECK(same == fresh);
  CHECK_FALSE(same.bootstrapped());

  // 199 pixels is below the gate, 200 reaches it
  std::vector<std::uint8_t> bits(400, 0);
  std::fill(bits.begin(), bits.begin() + 199, 1);
  CHECK(adapt(fresh, hand, Mask(20, 20, bits)) == fresh);
  bits[199] = 1;
  const SkinModel learned = adapt(fresh, hand, Mask(20, 20, bits));
  CHECK(learned.bootstrapped());
  const std::size_t bin = hue_bin(rgb_to_hsv(200, 120, 90).h);
  CHECK(bin == static_cast<std::size_t>(oracle::hue_bin(200, 120, 90)));
  CHECK(learned.histogram()[bin] == doctest::Approx(1.0));
  CHECK(hist_sum(learned.histogram()) == doctest::Approx(1.0).epsilon(1e-12));

  // all mass in bin A, adapted with pixels from bin B
  const std::size_t a = hue_bin(200.0);
  const SkinModel in_a = SkinModel::with_histogram(p, single_bin(a));
  const SkinModel blended = adapt(in_a, hand, Mask(20, 20, true));
  CHECK(blended.histogram()[a] == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(blended.histogram()[bin] == doctest::Approx(0.05).epsilon(1e-12));

  CHECK_THROWS_AS(adapt(fresh, hand, Mask(20, 19, true)), DimensionError);
}

TEST_CASE("adapt keeps the histogram normalized and converges geometrically") {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    SkinParams p;
    p.alpha = trial == 0 ? 0.05 : 0.01 + (rng() % 90) / 100.0;
    p.adapt_min_pixels = 1;
    // a fixed frame and mask define the target distribution H
    const RawFrame f = random_frame(rng, 24, 24, 50);
    std::vector<std::uint8_t> bits(24 * 24);
    for (auto& b : bits) b = rng() % 2;
    bits[0] = 1;
    const Mask mask(24, 24, bits);
    const HueHistogram H = masked_hue_histogram(f, mask);
    REQUIRE(hist_sum(H) == doctest::Approx(1.0).epsilon(1e-12));

    // reference H built independently
    std::array<double, 64> ref{};
    double n = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (!bits[i]) continue;
      const auto px = f.pixels();
      ref[static_cast<std::size_t>(oracle::hue_bin(px[3 * i], px[3 * i + 1], px[3 * i + 2]))] += 1;
      n += 1;
    }
    for (std::size_t b = 0; b < 64; ++b) REQUIRE(H[b] == doctest::Approx(ref[b] / n));

    HueHistogram start{};
    for (auto& v : start) v = static_cast<double>(rng() % 10);
    start[rng() % 64] += 1;
    SkinModel m = SkinModel::with_histogram(p, start);
    double initial_gap = 0.0;
    for (std::size_t b = 0; b < 64; ++b) {
      initial_gap = std::max(initial_gap, std::abs(m.histogram()[b] - H[b]));
    }
    REQUIRE(initial_gap <= 1.0);
    for (int k = 1; k <= 100; ++k) {
      m = adapt(m, f, mask);
      REQUIRE(std::abs(hist_sum(m.histogram()) - 1.0) <= 1e-9);
      double gap = 0.0;
      for (std::size_t b = 0; b < 64; ++b) {
        gap = std::max(gap, std::abs(m.histogram()[b] - H[b]));
      }
      REQUIRE(gap <= std::pow(1.0 - p.alpha, k) * initial_gap + kFpSlack);
    }
  }
}

TEST_CASE("SkinParams validation") {
  SkinParams p;
  CHECK_NOTHROW(p.validate());
  p.s_min = -0.1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = SkinParams{};
  p.alpha = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = SkinParams{};
  p.tau = 1.5;
  CHECK_THROWS_AS(SkinModel{p}, ConfigError);
  HueHistogram bad{};
  CHECK_THROWS_AS(SkinModel::with_histogram(SkinParams{}, bad), ValidationError);
  bad[3] = -1;
  bad[4] = 2;
  CHECK_THROWS_AS(SkinModel::with_histogram(SkinParams{}, bad), ValidationError);
}

TEST_CASE("Mask validation") {
  CHECK_THROWS_AS(Mask(2, 2, std::vector<std::uint8_t>(3)), ValidationError);
  CHECK_THROWS_AS(Mask(2, 2, std::vector<std::uint8_t>{0, 1, 2, 0}), ValidationError);
  CHECK_THROWS_AS(Mask(0, 2, false), ValidationError);
  const Mask m(2, 2, std::vector<std::uint8_t>{0, 1, 1, 0});
  CHECK(m.skin_count() == 2);
  CHECK(m.at(1, 0));
  CHECK_FALSE(m.at(1, 1));
}
