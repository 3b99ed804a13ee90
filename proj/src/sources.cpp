#include "airhands/sources.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "airhands/error.hpp"

namespace airhands {

Point CircularPath::at(std::uint32_t index) const {
  if (radius == 0.0) {
    return {std::round(center_x), std::round(center_y)};
  }
  const double angle = phase + 2.0 * std::numbers::pi * index / period;
  return {std::round(center_x + radius * std::cos(angle)),
          std::round(center_y + radius * std::sin(angle))};
}

SyntheticHandSpec SyntheticHandSpec::for_resolution(int width, int height) {
  SyntheticHandSpec spec;
  spec.radius_x = width / 10.0;
  spec.radius_y = height / 8.0;
  spec.path.center_x = width / 2.0;
  spec.path.center_y = height / 2.0;
  spec.path.radius = std::min(width, height) / 4.0;
  return spec;
}

double SyntheticHandSpec::effective_radius_x() const { return std::max(radius_x, 1.0); }
double SyntheticHandSpec::effective_radius_y() const { return std::max(radius_y, 1.0); }

void SyntheticHandSpec::validate(int width, int height) const {
  const double rx = effective_radius_x();
  const double ry = effective_radius_y();
  // rounding can push the centre half a pixel further out
  const double slack = path.radius == 0.0 ? 0.5 : path.radius + 0.5;
  if (path.center_x - slack - rx < 0.0 || path.center_x + slack + rx > width - 1 ||
      path.center_y - slack - ry < 0.0 || path.center_y + slack + ry > height - 1) {
    throw ValidationError(fmt::format(
        "synthetic hand ellipse (r={}x{}) on path (c={},{} r={}) leaves {}x{} frame", rx,
        ry, path.center_x, path.center_y, path.radius, width, height));
  }
  const skin::SkinModel defaults;
  if (!skin::classify_pixel(defaults, skin::rgb_to_hsv(skin.r, skin.g, skin.b))) {
    throw ValidationError("synthetic skin colour is not skin under the default model");
  }
}

SyntheticHandFrame synthetic_hand_frame(const SyntheticHandSpec& spec, std::uint32_t index,
                                        int width, int height, std::uint64_t capture_ts) {
  const Point c = spec.path.at(index);
  const double rx = spec.effective_radius_x();
  const double ry = spec.effective_radius_y();
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<std::uint8_t> pixels(n * 3);
  std::vector<std::uint8_t> truth(n, 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = x - c.x;
      const double dy = y - c.y;
      const bool inside = (dx * dx) / (rx * rx) + (dy * dy) / (ry * ry) <= 1.0;
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      const Rgb& colour = inside ? spec.skin : spec.background;
      pixels[3 * i] = colour.r;
      pixels[3 * i + 1] = colour.g;
      pixels[3 * i + 2] = colour.b;
      truth[i] = inside ? 1 : 0;
    }
  }
  return {make_frame(width, height, std::move(pixels), index, capture_ts, StreamId::Hand),
          skin::Mask(width, height, std::move(truth))};
}

RawFrame synthetic_scene_frame(std::uint32_t index, int width, int height,
                               std::uint64_t capture_ts) {
  constexpr int kCell = 40;
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height * 3);
  const auto shift = static_cast<std::int64_t>(index);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      // triangle wave keeps the gradient free of hard wrap-around edges
      const std::int64_t t = (x + 2 * shift) % 512;
      const std::int64_t tri = t < 256 ? t : 511 - t;
      const bool dark = (((x + shift) / kCell) + ((y + shift / 2) / kCell)) % 2 == 0;
      // a gray offset shifts brightness only, keeping chroma edges out of 4:2:0
      const int lift = dark ? 0 : 60;
      const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
      pixels[i] = static_cast<std::uint8_t>(lift);
      pixels[i + 1] = static_cast<std::uint8_t>(40 + tri * 150 / 255 + lift);
      pixels[i + 2] = static_cast<std::uint8_t>(110 + y * 60 / height + lift);
    }
  }
  return make_frame(width, height, std::move(pixels), index, capture_ts, StreamId::Scene);
}

// --- PPM --------------------------------------------------------------------

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string ppm_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

int ppm_int(std::istream& in, const std::filesystem::path& path, const char* what) {
  const std::string token = ppm_token(in);
  int value = 0;
  try {
    std::size_t used = 0;
    value = std::stoi(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
  } catch (const std::exception&) {
    throw SourceError(fmt::format("{}: bad PPM {} '{}'", path.string(), what, token));
  }
  return value;
}

}  // namespace

PpmImage read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw SourceError(fmt::format("{}: cannot open", path.string()));
  }
  if (ppm_token(in) != "P6") {
    throw SourceError(fmt::format("{}: not a binary P6 PPM", path.string()));
  }
  PpmImage img;
  img.width = ppm_int(in, path, "width");
  img.height = ppm_int(in, path, "height");
  const int maxval = ppm_int(in, path, "maxval");
  if (img.width <= 0 || img.height <= 0 || img.width > 65535 || img.height > 65535) {
    throw SourceError(fmt::format("{}: bad PPM dimensions {}x{}", path.string(),
                                  img.width, img.height));
  }
  if (maxval != 255) {
    throw SourceError(fmt::format("{}: unsupported PPM maxval {}", path.string(), maxval));
  }
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * 3);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
    throw SourceError(fmt::format("{}: truncated PPM pixel data", path.string()));
  }
  return img;
}

void write_ppm(const std::filesystem::path& path, int width, int height,
               std::span<const std::uint8_t> rgb) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw SourceError(fmt::format("{}: cannot create", path.string()));
  }
  out << "P6\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()),
            static_cast<std::streamsize>(rgb.size()));
  if (!out) {
    throw SourceError(fmt::format("{}: write failed", path.string()));
  }
}

void write_ppm(const std::filesystem::path& path, const RawFrame& frame) {
  write_ppm(path, frame.width(), frame.height(), frame.pixels());
}

RawFrame mask_to_frame(const skin::Mask& mask) {
  std::vector<std::uint8_t> pixels(mask.bits().size() * 3);
  for (std::size_t i = 0; i < mask.bits().size(); ++i) {
    const std::uint8_t v = mask[i] ? 255 : 0;
    pixels[3 * i] = pixels[3 * i + 1] = pixels[3 * i + 2] = v;
  }
  return make_frame(mask.width(), mask.height(), std::move(pixels), 0, 0, StreamId::Hand);
}

// --- directory sink/source ----------------------------------------------------

namespace {

std::filesystem::path frame_file(const std::filesystem::path& dir, std::uint32_t seq) {
  return dir / fmt::format("frame_{:08}.ppm", seq);
}

}  // namespace

DirSink::DirSink(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    throw SourceError(fmt::format("{}: cannot create directory: {}", dir_.string(),
                                  ec.message()));
  }
  index_.open(dir_ / "index.txt", std::ios::app);
  if (!index_) {
    throw SourceError(fmt::format("{}: cannot open index.txt", dir_.string()));
  }
}

void DirSink::write(const RawFrame& frame) {
  write_ppm(frame_file(dir_, frame.seq()), frame);
  index_ << frame.seq() << ' ' << frame.capture_ts() << ' '
         << static_cast<int>(frame.stream_id()) << '\n';
  index_.flush();
}

DirSource::DirSource(std::filesystem::path dir, bool loop)
    : dir_(std::move(dir)), loop_(loop) {
  std::ifstream index(dir_ / "index.txt");
  if (!index) {
    throw SourceError(fmt::format("{}: missing index.txt", dir_.string()));
  }
  std::string line;
  int line_no = 0;
  while (std::getline(index, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    std::istringstream fields(line);
    long long seq = -1;
    long long ts = -1;
    int stream = -1;
    std::string extra;
    if (!(fields >> seq >> ts >> stream) || (fields >> extra) || seq < 0 ||
        seq > 0xFFFFFFFFLL || ts < 0 || !stream_id_from_byte(static_cast<std::uint8_t>(
                                             stream < 0 || stream > 255 ? 255 : stream))) {
      throw SourceError(fmt::format("{}/index.txt line {}: expected '<seq> <capture_ts> "
                                    "<stream_id>', got '{}'",
                                    dir_.string(), line_no, line));
    }
    entries_.push_back({static_cast<std::uint32_t>(seq), static_cast<std::uint64_t>(ts),
                        static_cast<StreamId>(stream)});
  }
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Entry& a, const Entry& b) { return a.seq < b.seq; });
}

std::optional<RawFrame> DirSource::next() {
  if (cursor_ >= entries_.size()) {
    if (!loop_ || entries_.empty()) {
      return std::nullopt;
    }
    cursor_ = 0;
  }
  const Entry& e = entries_[cursor_++];
  PpmImage img = read_ppm(frame_file(dir_, e.seq));
  return make_frame(img.width, img.height, std::move(img.pixels), e.seq, e.capture_ts,
                    e.stream_id);
}

SyntheticHandSource::SyntheticHandSource(SyntheticHandSpec spec, int width, int height,
                                         Clock clock)
    : spec_(spec), width_(width), height_(height), clock_(std::move(clock)) {
  spec_.validate(width_, height_);
}

std::optional<RawFrame> SyntheticHandSource::next() {
  const std::uint32_t index = index_++;
  return synthetic_hand_frame(spec_, index, width_, height_, clock_()).frame;
}

SyntheticSceneSource::SyntheticSceneSource(int width, int height, Clock clock)
    : width_(width), height_(height), clock_(std::move(clock)) {}

std::optional<RawFrame> SyntheticSceneSource::next() {
  const std::uint32_t index = index_++;
  return synthetic_scene_frame(index, width_, height_, clock_());
}

RestampingSource::RestampingSource(std::unique_ptr<FrameSource> inner, StreamId stream_id,
                                   Clock clock)
    : inner_(std::move(inner)), stream_id_(stream_id), clock_(std::move(clock)) {}

std::optional<RawFrame> RestampingSource::next() {
  auto frame = inner_->next();
  if (!frame) {
    return std::nullopt;
  }
  return frame->restamped(seq_++, clock_(), stream_id_);
}

}  // namespace airhands
