#include "airhands/ui_gateway.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <mutex>
#include <sstream>

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <fmt/format.h>

#include "airhands/codec.hpp"
#include "airhands/error.hpp"
#include "airhands/log.hpp"

namespace airhands::ui {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using error_code = boost::system::error_code;

// --- message formats -----------------------------------------------------------

std::vector<std::uint8_t> ws_encode_video(const RawFrame& frame, int quality,
                                          std::uint8_t tag) {
  const codec::EncodedFrame jpeg = codec::encode_jpeg(frame, quality);
  std::vector<std::uint8_t> out;
  out.reserve(kWsHeaderSize + jpeg.payload.size());
  out.push_back(tag);
  out.push_back(static_cast<std::uint8_t>(frame.stream_id()));
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(frame.seq() >> shift));
  }
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(frame.capture_ts() >> shift));
  }
  out.insert(out.end(), jpeg.payload.begin(), jpeg.payload.end());
  return out;
}

WsVideoFrame ws_decode_video(std::span<const std::uint8_t> message) {
  if (message.size() < kWsHeaderSize) {
    throw ProtocolError(fmt::format("video message of {} bytes is shorter than the {}-byte header",
                                    message.size(), kWsHeaderSize));
  }
  WsVideoFrame f;
  f.tag = message[0];
  if (f.tag != kTagVideo && f.tag != kTagHand) {
    throw ProtocolError(fmt::format("unknown video message tag 0x{:02x}", f.tag));
  }
  const auto stream = stream_id_from_byte(message[1]);
  if (!stream) {
    throw ProtocolError(fmt::format("undefined stream id {}", message[1]));
  }
  f.stream_id = *stream;
  for (int i = 0; i < 4; ++i) f.seq = (f.seq << 8) | message[2 + i];
  for (int i = 0; i < 8; ++i) f.capture_ts = (f.capture_ts << 8) | message[6 + i];
  f.payload.assign(message.begin() + kWsHeaderSize, message.end());
  return f;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<double> parse_double(std::string_view text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> parse_int(std::string_view text) {
  int v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::string err(std::string_view key, std::string_view message) {
  return fmt::format("err {} {}", key, message);
}

}  // namespace

std::string apply_set_command(std::string_view line, LiveParams& params) {
  const auto tokens = split_ws(line);
  if (tokens.empty() || tokens[0] != "set") {
    return err(tokens.empty() ? "-" : tokens[0], "unknown command");
  }
  if (tokens.size() != 3) {
    return err(tokens.size() > 1 ? tokens[1] : "-", "expected 'set <key> <value>'");
  }
  const std::string_view key = tokens[1];
  const std::string_view value = tokens[2];
  LiveParams next = params;

  auto unit_range = [&](double& field, bool open_low) -> std::optional<std::string> {
    const auto v = parse_double(value);
    if (!v) return err(key, fmt::format("invalid number '{}'", value));
    const bool ok = open_low ? (*v > 0.0 && *v <= 1.0) : (*v >= 0.0 && *v <= 1.0);
    if (!ok) return err(key, open_low ? "out of range (0,1]" : "out of range 0..1");
    field = *v;
    return std::nullopt;
  };

  std::optional<std::string> failure;
  if (key == "jpeg.quality") {
    const auto v = parse_int(value);
    if (!v) {
      failure = err(key, fmt::format("invalid integer '{}'", value));
    } else if (*v < 1 || *v > 100) {
      failure = err(key, "out of range 1..100");
    } else {
      next.jpeg_quality = *v;
    }
  } else if (key == "skin.s_min") {
    failure = unit_range(next.skin.s_min, false);
  } else if (key == "skin.v_min") {
    failure = unit_range(next.skin.v_min, false);
  } else if (key == "skin.tau") {
    failure = unit_range(next.skin.tau, false);
  } else if (key == "skin.alpha") {
    failure = unit_range(next.skin.alpha, true);
  } else if (key == "skin.frozen") {
    if (value == "1" || value == "true") {
      next.model_frozen = true;
    } else if (value == "0" || value == "false") {
      next.model_frozen = false;
    } else {
      failure = err(key, fmt::format("invalid boolean '{}'", value));
    }
  } else {
    failure = err(key, "unknown key");
  }
  if (failure) {
    return *failure;
  }
  params = next;
  return fmt::format("ack {} {}", key, value);
}

// --- server -----------------------------------------------------------------

namespace {

constexpr std::size_t kMaxQueuedText = 64;
constexpr std::size_t kMaxInboundMessage = 8u * 1024u * 1024u;

constexpr std::string_view kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>airhands node</title></head>
<body>
<h1>airhands node</h1>
<p>The console assets are not installed. Start the node with <code>--ui-dir</code>
pointing at the built console, or connect a WebSocket client to <code>/ws</code>.</p>
</body></html>
)";

std::string_view mime_type(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json" || ext == ".map") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".ico") return "image/x-icon";
  return "application/octet-stream";
}

struct Client {
  explicit Client(websocket::stream<beast::tcp_stream> s)
      : ws(std::move(s)), wake(ws.get_executor()) {
    wake.expires_at(asio::steady_timer::time_point::max());
  }

  void notify() { wake.cancel(); }

  void queue_text(std::string text) {
    if (texts.size() >= kMaxQueuedText) {
      texts.pop_front();
    }
    texts.push_back(std::move(text));
    notify();
  }

  websocket::stream<beast::tcp_stream> ws;
  asio::steady_timer wake;
  std::deque<std::string> texts;
  std::uint64_t sent_generation = 0;
  std::optional<websocket::close_code> pending_close;
  bool done = false;
};

}  // namespace

struct Gateway::Impl : std::enable_shared_from_this<Impl> {
  Impl(asio::io_context& io_, GatewayOptions options_, GatewayHooks hooks_)
      : io(io_),
        options(std::move(options_)),
        hooks(std::move(hooks_)),
        acceptor(io_),
        stats_timer(io_) {}

  asio::io_context& io;
  GatewayOptions options;
  GatewayHooks hooks;
  tcp::acceptor acceptor;
  asio::steady_timer stats_timer;
  std::atomic<std::uint16_t> bound_port{0};
  std::atomic<bool> stopped{false};

  // io thread only
  std::vector<std::weak_ptr<Client>> clients;
  std::vector<std::weak_ptr<beast::tcp_stream>> http_streams;
  std::atomic<std::size_t> client_total{0};

  std::mutex video_mutex;
  std::shared_ptr<const std::vector<std::uint8_t>> latest_video;
  std::uint64_t video_generation = 0;

  void start() {
    const tcp::endpoint ep(asio::ip::make_address(options.bind_address), options.port);
    error_code ec;
    acceptor.open(ep.protocol(), ec);
    if (!ec) acceptor.set_option(asio::socket_base::reuse_address(true), ec);
    if (!ec) acceptor.bind(ep, ec);
    if (!ec) acceptor.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) {
      throw Error(fmt::format("console gateway cannot listen on port {}: {}", options.port,
                              ec.message()));
    }
    bound_port = acceptor.local_endpoint().port();
    auto self = shared_from_this();
    asio::co_spawn(io, accept_loop(self), asio::detached);
    asio::co_spawn(io, stats_loop(self), asio::detached);
  }

  void stop() {
    if (stopped.exchange(true)) return;
    asio::post(io, [self = shared_from_this()] {
      error_code ec;
      self->acceptor.close(ec);
      self->stats_timer.cancel();
      for (auto& weak : self->clients) {
        if (auto c = weak.lock()) {
          c->pending_close = websocket::close_code::going_away;
          c->notify();
        }
      }
      for (auto& weak : self->http_streams) {
        if (auto s = weak.lock()) {
          s->socket().close(ec);
        }
      }
    });
  }

  void publish(const RawFrame& frame) {
    if (client_total.load() == 0 || stopped) return;
    const int quality = hooks.quality ? hooks.quality() : codec::kDefaultQuality;
    auto message = std::make_shared<const std::vector<std::uint8_t>>(
        ws_encode_video(frame, quality, kTagVideo));
    {
      std::lock_guard lock(video_mutex);
      latest_video = std::move(message);
      ++video_generation;
    }
    asio::post(io, [self = shared_from_this()] {
      for (auto& weak : self->clients) {
        if (auto c = weak.lock()) c->notify();
      }
    });
  }

  static asio::awaitable<void> accept_loop(std::shared_ptr<Impl> self) {
    for (;;) {
      error_code ec;
      tcp::socket socket =
          co_await self->acceptor.async_accept(asio::redirect_error(asio::use_awaitable, ec));
      if (ec) {
        if (self->stopped || ec == asio::error::operation_aborted) co_return;
        continue;
      }
      socket.set_option(tcp::no_delay(true), ec);
      asio::co_spawn(self->io, http_session(self, std::move(socket)), asio::detached);
    }
  }

  static asio::awaitable<void> stats_loop(std::shared_ptr<Impl> self) {
    while (!self->stopped) {
      self->stats_timer.expires_after(std::chrono::seconds(1));
      error_code ec;
      co_await self->stats_timer.async_wait(asio::redirect_error(asio::use_awaitable, ec));
      if (self->stopped) co_return;
      if (!self->hooks.stats) continue;
      const std::string line = format_ui_stats(self->hooks.stats());
      std::erase_if(self->clients, [](const auto& w) { return w.expired(); });
      for (auto& weak : self->clients) {
        if (auto c = weak.lock()) c->queue_text(line);
      }
    }
  }

  http::response<http::string_body> serve_static(const http::request<http::string_body>& req) {
    auto respond = [&](http::status status, std::string_view type, std::string body) {
      http::response<http::string_body> res{status, req.version()};
      res.set(http::field::server, "airhands");
      res.set(http::field::content_type, beast::string_view(type.data(), type.size()));
      res.set(http::field::cache_control, "no-store");
      res.keep_alive(req.keep_alive());
      res.body() = req.method() == http::verb::head ? std::string() : std::move(body);
      res.prepare_payload();
      return res;
    };
    if (req.method() != http::verb::get && req.method() != http::verb::head) {
      return respond(http::status::method_not_allowed, "text/plain", "method not allowed\n");
    }
    std::string target(req.target());
    if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (target.empty() || target == "/") target = "/index.html";

    const std::filesystem::path rel = std::filesystem::path(target).relative_path();
    for (const auto& part : rel) {
      if (part == "..") {
        return respond(http::status::bad_request, "text/plain", "bad path\n");
      }
    }
    if (!options.asset_dir.empty()) {
      const auto file = options.asset_dir / rel;
      std::ifstream in(file, std::ios::binary);
      if (in && std::filesystem::is_regular_file(file)) {
        std::ostringstream body;
        body << in.rdbuf();
        return respond(http::status::ok, mime_type(file), body.str());
      }
    }
    if (rel == "index.html") {
      return respond(http::status::ok, "text/html; charset=utf-8", std::string(kPlaceholderPage));
    }
    return respond(http::status::not_found, "text/plain", "not found\n");
  }

  static asio::awaitable<void> http_session(std::shared_ptr<Impl> self, tcp::socket socket) {
    auto stream = std::make_shared<beast::tcp_stream>(std::move(socket));
    self->http_streams.push_back(stream);
    std::erase_if(self->http_streams, [](const auto& w) { return w.expired(); });
    beast::flat_buffer buffer;
    for (;;) {
      http::request<http::string_body> req;
      stream->expires_after(std::chrono::seconds(30));
      error_code ec;
      co_await http::async_read(*stream, buffer, req,
                                asio::redirect_error(asio::use_awaitable, ec));
      if (ec) break;
      if (websocket::is_upgrade(req)) {
        if (req.target() != "/ws") {
          http::response<http::string_body> res{http::status::not_found, req.version()};
          res.body() = "websocket endpoint is /ws\n";
          res.prepare_payload();
          co_await http::async_write(*stream, res, asio::redirect_error(asio::use_awaitable, ec));
          break;
        }
        stream->expires_never();
        co_await websocket_session(self, std::move(*stream), std::move(req));
        co_return;
      }
      auto res = self->serve_static(req);
      const bool keep = res.keep_alive();
      co_await http::async_write(*stream, res, asio::redirect_error(asio::use_awaitable, ec));
      if (ec || !keep) break;
    }
    error_code ignored;
    stream->socket().shutdown(tcp::socket::shutdown_send, ignored);
  }

  std::string hello_line() const {
    return fmt::format("hello role={} width={} height={} hand_input={}",
                       wire::to_string(options.role), options.width, options.height,
                       options.accepts_hand_frames ? 1 : 0);
  }

  void handle_binary(Client& client, std::span<const std::uint8_t> bytes) {
    WsVideoFrame msg = ws_decode_video(bytes);  // ProtocolError closes the socket
    if (msg.tag != kTagHand) {
      throw ProtocolError("console may only send hand frames (tag 0x02)");
    }
    if (!options.accepts_hand_frames || !hooks.hand_frame) {
      client.queue_text(err("source", "hand frames ignored: node source is not ui"));
      return;
    }
    try {
      RawFrame frame = codec::decode_jpeg(msg.payload, msg.seq, msg.capture_ts, StreamId::Hand);
      if (frame.width() != options.width || frame.height() != options.height) {
        client.queue_text(err("hand.frame",
                              fmt::format("resolution {}x{} does not match node {}x{}",
                                          frame.width(), frame.height(), options.width,
                                          options.height)));
        return;
      }
      hooks.hand_frame(std::move(frame));
    } catch (const DecodeError& e) {
      client.queue_text(err("hand.frame", e.what()));
    } catch (const ResourceError& e) {
      client.queue_text(err("hand.frame", e.what()));
    }
  }

  static asio::awaitable<void> websocket_session(std::shared_ptr<Impl> self,
                                                 beast::tcp_stream stream,
                                                 http::request<http::string_body> req) {
    auto client = std::make_shared<Client>(websocket::stream<beast::tcp_stream>(std::move(stream)));
    client->ws.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    client->ws.read_message_max(kMaxInboundMessage);
    error_code ec;
    co_await client->ws.async_accept(req, asio::redirect_error(asio::use_awaitable, ec));
    if (ec) co_return;

    self->clients.push_back(client);
    ++self->client_total;
    client->queue_text(self->hello_line());
    asio::co_spawn(self->io, writer(self, client), asio::detached);

    beast::flat_buffer buffer;
    while (!client->done && !client->pending_close) {
      buffer.clear();
      co_await client->ws.async_read(buffer, asio::redirect_error(asio::use_awaitable, ec));
      if (ec) break;
      const auto data = buffer.cdata();
      if (client->ws.got_text()) {
        const std::string line = beast::buffers_to_string(data);
        if (self->hooks.control) {
          client->queue_text(self->hooks.control(line));
        }
        continue;
      }
      try {
        self->handle_binary(
            *client, {static_cast<const std::uint8_t*>(data.data()), data.size()});
      } catch (const ProtocolError& e) {
        logger().warn("console client sent a malformed binary message: {}", e.what());
        client->pending_close = websocket::close_code::protocol_error;
        client->notify();
        break;
      }
    }
    if (!client->pending_close) {
      client->done = true;
    }
    client->notify();
    --self->client_total;
  }

  static asio::awaitable<void> writer(std::shared_ptr<Impl> self, std::shared_ptr<Client> c) {
    error_code ec;
    while (!c->done) {
      if (c->pending_close) {
        co_await c->ws.async_close(*c->pending_close,
                                   asio::redirect_error(asio::use_awaitable, ec));
        c->done = true;
        break;
      }
      if (!c->texts.empty()) {
        std::string text = std::move(c->texts.front());
        c->texts.pop_front();
        c->ws.text(true);
        co_await c->ws.async_write(asio::buffer(text),
                                   asio::redirect_error(asio::use_awaitable, ec));
        if (ec) break;
        continue;
      }
      std::shared_ptr<const std::vector<std::uint8_t>> video;
      std::uint64_t generation = 0;
      {
        std::lock_guard lock(self->video_mutex);
        if (self->video_generation > c->sent_generation) {
          video = self->latest_video;
          generation = self->video_generation;
        }
      }
      if (video) {
        c->ws.binary(true);
        co_await c->ws.async_write(asio::buffer(*video),
                                   asio::redirect_error(asio::use_awaitable, ec));
        if (ec) break;
        c->sent_generation = generation;
        continue;
      }
      c->wake.expires_at(asio::steady_timer::time_point::max());
      co_await c->wake.async_wait(asio::redirect_error(asio::use_awaitable, ec));
    }
    c->done = true;
    error_code ignored;
    beast::get_lowest_layer(c->ws).socket().close(ignored);
  }
};

Gateway::Gateway(asio::io_context& io, GatewayOptions options, GatewayHooks hooks)
    : impl_(std::make_shared<Impl>(io, std::move(options), std::move(hooks))) {}

Gateway::~Gateway() { impl_->stop(); }

void Gateway::start() { impl_->start(); }
void Gateway::stop() { impl_->stop(); }
void Gateway::publish(const RawFrame& frame) { impl_->publish(frame); }
std::uint16_t Gateway::port() const { return impl_->bound_port; }
std::size_t Gateway::client_count() const { return impl_->client_total; }

}  // namespace airhands::ui
