#include <fmt/format.h>

#include "airhands/error.hpp"
#include "airhands/sources.hpp"

#ifdef AIRHANDS_HAVE_OPENCV
#include <opencv2/imgproc.hpp>
#include <opencv2/videoio.hpp>
#endif

namespace airhands {

#ifdef AIRHANDS_HAVE_OPENCV

namespace {

class CameraSource final : public FrameSource {
 public:
  CameraSource(int device, int width, int height)
      : capture_(device), width_(width), height_(height) {
    if (!capture_.isOpened()) {
      throw ConfigError(fmt::format("cannot open camera device {}", device));
    }
    capture_.set(cv::CAP_PROP_FRAME_WIDTH, width);
    capture_.set(cv::CAP_PROP_FRAME_HEIGHT, height);
  }

  std::optional<RawFrame> next() override {
    cv::Mat bgr;
    if (!capture_.read(bgr) || bgr.empty()) {
      return std::nullopt;
    }
    if (bgr.cols != width_ || bgr.rows != height_) {
      cv::resize(bgr, bgr, cv::Size(width_, height_), 0, 0, cv::INTER_AREA);
    }
    cv::Mat rgb;
    cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
    std::vector<std::uint8_t> pixels(rgb.total() * 3);
    for (int y = 0; y < rgb.rows; ++y) {
      const auto* row = rgb.ptr<std::uint8_t>(y);
      std::copy(row, row + static_cast<std::size_t>(rgb.cols) * 3,
                pixels.begin() + static_cast<std::ptrdiff_t>(y) * rgb.cols * 3);
    }
    return make_frame(width_, height_, std::move(pixels), 0, 0, StreamId::Hand);
  }

 private:
  cv::VideoCapture capture_;
  int width_;
  int height_;
};

}  // namespace

bool camera_supported() { return true; }

std::unique_ptr<FrameSource> make_camera_source(int device, int width, int height) {
  return std::make_unique<CameraSource>(device, width, height);
}

#else

bool camera_supported() { return false; }

std::unique_ptr<FrameSource> make_camera_source(int, int, int) {
  throw ConfigError("this build has no camera support (OpenCV not found)");
}

#endif

}  // namespace airhands
