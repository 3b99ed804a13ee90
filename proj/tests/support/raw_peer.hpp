#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include <boost/asio.hpp>

#include "airhands/wire.hpp"

namespace testutil {

/// Hand-driven wire endpoint for poking a node from the outside. A
/// background thread decodes everything the node sends.
class RawPeer {
 public:
  /// Dials 127.0.0.1:port.
  static std::unique_ptr<RawPeer> connect(std::uint16_t port);
  /// Waits for one inbound connection on acceptor; nullptr on timeout.
  static std::unique_ptr<RawPeer> accept(boost::asio::ip::tcp::acceptor& acceptor,
                                         std::chrono::milliseconds timeout);

  ~RawPeer();

  void send(const airhands::wire::Message& msg);
  void send_bytes(const std::vector<std::uint8_t>& bytes);
  void close();

  std::vector<airhands::wire::Message> messages() const;
  bool closed() const { return closed_; }
  bool protocol_error() const { return protocol_error_; }

  template <typename T>
  std::vector<T> all_of() const {
    std::vector<T> out;
    for (const auto& m : messages()) {
      if (const auto* v = std::get_if<T>(&m)) out.push_back(*v);
    }
    return out;
  }

  /// When the peer noticed the connection end.
  std::optional<std::chrono::steady_clock::time_point> closed_at() const;

 private:
  explicit RawPeer(std::unique_ptr<boost::asio::io_context> io,
                   boost::asio::ip::tcp::socket socket);
  void read_loop();

  std::unique_ptr<boost::asio::io_context> io_;
  boost::asio::ip::tcp::socket socket_;
  std::thread reader_;
  mutable std::mutex mutex_;
  std::vector<airhands::wire::Message> messages_;
  std::optional<std::chrono::steady_clock::time_point> closed_at_;
  std::atomic<bool> closed_{false};
  std::atomic<bool> protocol_error_{false};
};

/// Listening socket on a loopback port.
std::unique_ptr<boost::asio::ip::tcp::acceptor> listen_on(boost::asio::io_context& io,
                                                          std::uint16_t port);

}  // namespace testutil
