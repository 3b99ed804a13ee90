#include "test_util.hpp"

#include <boost/asio.hpp>

namespace testutil {

std::uint16_t free_port() {
  boost::asio::io_context io;
  boost::asio::ip::tcp::acceptor acceptor(
      io, boost::asio::ip::tcp::endpoint(boost::asio::ip::address_v4::loopback(), 0));
  return acceptor.local_endpoint().port();
}

bool wait_until(const std::function<bool()>& pred, std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline) {
    if (pred()) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  return pred();
}

oracle::Image image_of(const airhands::RawFrame& frame) {
  const auto px = frame.pixels();
  return {frame.width(), frame.height(), std::vector<std::uint8_t>(px.begin(), px.end())};
}

oracle::Bits bits_of(const airhands::skin::Mask& mask) {
  const auto b = mask.bits();
  return oracle::Bits(b.begin(), b.end());
}

airhands::RawFrame frame_of(const oracle::Image& img, std::uint32_t seq, std::uint64_t ts,
                            airhands::StreamId stream) {
  return airhands::make_frame(img.width, img.height, img.rgb, seq, ts, stream);
}

oracle::SkinGate gate_of(const airhands::skin::SkinModel& model) {
  oracle::SkinGate g;
  const auto& p = model.params();
  g.s_min = p.s_min;
  g.v_min = p.v_min;
  g.bootstrap_lo = p.bootstrap_lo;
  g.bootstrap_hi = p.bootstrap_hi;
  g.tau = p.tau;
  g.bootstrapped = model.bootstrapped();
  for (std::size_t i = 0; i < 64; ++i) g.hist[i] = model.histogram()[i];
  return g;
}

}  // namespace testutil
