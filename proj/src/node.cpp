#include "airhands/node.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <csignal>
#include <deque>
#include <future>
#include <iostream>
#include <mutex>
#include <ostream>
#include <thread>

#include <boost/asio.hpp>
#include <fmt/format.h>

#include "airhands/codec.hpp"
#include "airhands/error.hpp"
#include "airhands/latest_slot.hpp"
#include "airhands/log.hpp"
#include "airhands/pipeline.hpp"
#include "airhands/skinseg.hpp"
#include "airhands/ui_gateway.hpp"
#include "airhands/wire.hpp"

namespace airhands {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;
using error_code = boost::system::error_code;
using steady = std::chrono::steady_clock;
using namespace std::chrono_literals;

namespace {

constexpr auto kHeartbeatInterval = 1000ms;
constexpr auto kPeerTimeout = 5000ms;
constexpr auto kWatchdogPeriod = 100ms;
constexpr auto kBackoffInitial = 250ms;
constexpr auto kBackoffCap = 4000ms;
constexpr auto kStopGrace = 1000ms;
constexpr std::size_t kReadChunk = 64 * 1024;

using Bytes = std::vector<std::uint8_t>;
using SharedBytes = std::shared_ptr<const Bytes>;

SharedBytes encoded(const wire::Message& msg) {
  return std::make_shared<const Bytes>(wire::encode_message(msg));
}

// One TCP link to the peer in either direction. Touched only on the io thread.
struct Connection {
  explicit Connection(tcp::socket s) : socket(std::move(s)), wake(socket.get_executor()) {
    last_rx = last_tx = steady::now();
    wake.expires_at(steady::time_point::max());
  }

  void send(SharedBytes bytes) {
    control.push_back(std::move(bytes));
    wake.cancel();
  }

  void close_after_flush() {
    closing = true;
    wake.cancel();
  }

  void close() {
    if (closed) return;
    closed = true;
    error_code ec;
    socket.shutdown(tcp::socket::shutdown_both, ec);
    socket.close(ec);
    wake.cancel();
  }

  tcp::socket socket;
  asio::steady_timer wake;
  std::deque<SharedBytes> control;
  LatestSlot<SharedBytes>* frames = nullptr;  // set once the link carries video
  bool heartbeats = false;
  bool closing = false;
  bool closed = false;
  bool handshaken = false;
  steady::time_point last_rx;
  steady::time_point last_tx;
};

using ConnPtr = std::shared_ptr<Connection>;

// Hand frames pushed by the console.
class SlotSource final : public FrameSource {
 public:
  explicit SlotSource(LatestSlot<RawFrame>& slot) : slot_(slot) {}
  std::optional<RawFrame> next() override { return slot_.take(); }

 private:
  LatestSlot<RawFrame>& slot_;
};

}  // namespace

struct Node::Impl {
  Impl(NodeConfig c, RuntimeOptions o)
      : cfg(std::move(c)),
        opts(std::move(o)),
        acceptor(io),
        backoff_timer(io),
        stats_timer(io),
        live(LiveParams::from(cfg)),
        model(cfg.skin) {
    if (!opts.clock) opts.clock = wall_clock_ms;
  }

  // Declared first so it outlives every object bound to it.
  asio::io_context io;
  NodeConfig cfg;
  RuntimeOptions opts;

  tcp::acceptor acceptor;
  asio::steady_timer backoff_timer;
  asio::steady_timer stats_timer;
  std::unique_ptr<ui::Gateway> gateway;
  std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
  std::thread io_thread;
  std::thread tick_thread;
  std::promise<void> io_done;

  std::atomic<bool> running{false};
  std::atomic<bool> started{false};
  std::atomic<bool> finished{false};
  std::atomic<std::uint16_t> bound_port{0};

  // io thread only
  ConnPtr inbound;
  ConnPtr outbound;
  std::vector<std::weak_ptr<Connection>> all_connections;

  std::atomic<bool> inbound_up{false};
  std::atomic<bool> outbound_up{false};
  std::atomic<bool> inbound_rejected{false};
  std::atomic<bool> outbound_rejected{false};

  // Mailboxes between the io thread, the tick thread and the console.
  LatestSlot<RawFrame> inbound_slot;   // scene on the helper, composite on the worker
  LatestSlot<SharedBytes> outbound_slot;
  LatestSlot<RawFrame> hand_slot;      // console hand frames

  std::mutex tick_mutex;
  std::condition_variable tick_cv;

  std::mutex live_mutex;
  LiveParams live;

  // tick thread only
  std::unique_ptr<FrameSource> source;
  std::unique_ptr<FrameSink> sink;
  skin::SkinModel model;

  mutable std::mutex stats_mutex;
  RateWindow in_rate;
  RateWindow out_rate;
  LatencyWindow latency;
  std::uint64_t frames_in = 0;
  std::uint64_t frames_out = 0;
  std::uint64_t frames_displayed = 0;
  std::array<std::uint64_t, 3> frames_in_by_stream{};
  std::uint64_t errors = 0;
  std::uint64_t dropped_extra = 0;
  std::uint64_t rejections = 0;
  wire::RejectReason last_reject = wire::RejectReason::None;

  bool is_helper() const { return cfg.role == wire::Role::Helper; }
  std::string_view role_name() const { return wire::to_string(cfg.role); }

  // --- setup ---------------------------------------------------------------

  std::unique_ptr<FrameSource> make_source() {
    const StreamId stream = is_helper() ? StreamId::Hand : StreamId::Scene;
    switch (cfg.source.kind) {
      case SourceSpec::Kind::Synthetic:
        if (is_helper()) {
          return std::make_unique<SyntheticHandSource>(
              SyntheticHandSpec::for_resolution(cfg.width, cfg.height), cfg.width, cfg.height,
              opts.clock);
        }
        return std::make_unique<SyntheticSceneSource>(cfg.width, cfg.height, opts.clock);
      case SourceSpec::Kind::Dir:
        return std::make_unique<RestampingSource>(
            std::make_unique<DirSource>(cfg.source.path, true), stream, opts.clock);
      case SourceSpec::Kind::Camera:
        return std::make_unique<RestampingSource>(
            make_camera_source(cfg.source.camera_device, cfg.width, cfg.height), stream,
            opts.clock);
      case SourceSpec::Kind::Ui:
        return std::make_unique<SlotSource>(hand_slot);
    }
    throw ConfigError("unknown source kind");
  }

  std::unique_ptr<FrameSink> make_sink() {
    if (cfg.sink.kind == SinkSpec::Kind::Dir) {
      return std::make_unique<DirSink>(cfg.sink.path);
    }
    return std::make_unique<NullSink>();
  }

  void bind_listener() {
    const tcp::endpoint ep(asio::ip::address_v4::any(), cfg.listen_port);
    error_code ec;
    acceptor.open(ep.protocol(), ec);
    if (!ec) acceptor.set_option(asio::socket_base::reuse_address(true), ec);
    if (!ec) acceptor.bind(ep, ec);
    if (!ec) acceptor.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) {
      throw Error(fmt::format("{}: cannot listen on port {}: {}", role_name(), cfg.listen_port,
                              ec.message()));
    }
    bound_port = acceptor.local_endpoint().port();
  }

  void start_gateway() {
    if (cfg.ui_port == 0) return;
    ui::GatewayOptions go;
    go.port = cfg.ui_port;
    go.asset_dir = cfg.ui_dir;
    go.role = cfg.role;
    go.width = cfg.width;
    go.height = cfg.height;
    go.accepts_hand_frames = cfg.source.kind == SourceSpec::Kind::Ui;
    ui::GatewayHooks hooks;
    hooks.stats = [this] { return snapshot(); };
    hooks.control = [this](std::string_view line) { return control(line); };
    hooks.quality = [this] {
      std::lock_guard lock(live_mutex);
      return live.jpeg_quality;
    };
    hooks.hand_frame = [this](RawFrame f) { hand_slot.put(std::move(f)); };
    gateway = std::make_unique<ui::Gateway>(io, go, std::move(hooks));
    gateway->start();
  }

  void start() {
    if (started.exchange(true)) {
      throw Error("node already started");
    }
    cfg.validate();
    source = opts.source ? std::move(opts.source) : make_source();
    sink = make_sink();
    bind_listener();
    start_gateway();

    running = true;
    work.emplace(io.get_executor());
    asio::co_spawn(io, accept_loop(), asio::detached);
    asio::co_spawn(io, connect_loop(), asio::detached);
    if (opts.stats_out) {
      asio::co_spawn(io, stats_loop(), asio::detached);
    }
    io_thread = std::thread([this] {
      try {
        io.run();
      } catch (const std::exception& e) {
        logger().error("{}: io thread failed: {}", role_name(), e.what());
      }
      io_done.set_value();
    });
    tick_thread = std::thread([this] { tick_loop(); });
    logger().info("{}: listening on {}, dialing {}, {}x{} at {} fps", role_name(),
                  bound_port.load(), cfg.peer.to_string(), cfg.width, cfg.height,
                  cfg.fps_target);
  }

  // --- stats -----------------------------------------------------------------

  LinkState link_state() const {
    if (!running) return LinkState::Down;
    if (inbound_up && outbound_up) return LinkState::Up;
    if (inbound_rejected || outbound_rejected) return LinkState::Down;
    return LinkState::Connecting;
  }

  NodeStats snapshot() {
    NodeStats s;
    const auto now = steady::now();
    {
      std::lock_guard lock(stats_mutex);
      s.fps_in = in_rate.rate(now);
      s.fps_out = out_rate.rate(now);
      if (auto m = latency.median()) {
        s.latency_ms = *m;
        s.latency_valid = true;
      }
      s.frames_in = frames_in;
      s.frames_out = frames_out;
      s.frames_displayed = frames_displayed;
      s.frames_in_by_stream = frames_in_by_stream;
      s.errors = errors;
      s.handshake_rejections = rejections;
      s.last_reject = last_reject;
      s.frames_dropped = dropped_extra;
    }
    s.frames_dropped += inbound_slot.replaced_count() + outbound_slot.replaced_count() +
                        hand_slot.replaced_count();
    s.inbound_up = inbound_up;
    s.outbound_up = outbound_up;
    s.link = link_state();
    return s;
  }

  void count_error() {
    std::lock_guard lock(stats_mutex);
    ++errors;
  }

  void record_rejection(wire::RejectReason reason) {
    std::lock_guard lock(stats_mutex);
    ++rejections;
    last_reject = reason;
  }

  std::string control(std::string_view line) {
    std::lock_guard lock(live_mutex);
    return ui::apply_set_command(line, live);
  }

  // --- connections ---------------------------------------------------------

  ConnPtr track(tcp::socket socket) {
    error_code ec;
    socket.set_option(tcp::no_delay(true), ec);
    auto c = std::make_shared<Connection>(std::move(socket));
    std::erase_if(all_connections, [](const auto& w) { return w.expired(); });
    all_connections.push_back(c);
    asio::co_spawn(io, write_loop(c), asio::detached);
    asio::co_spawn(io, watchdog(c), asio::detached);
    return c;
  }

  void protocol_violation(const ConnPtr& c, std::string_view why) {
    logger().warn("{}: protocol error from peer: {}", role_name(), why);
    count_error();
    c->send(encoded(wire::Bye{wire::bye::kProtocolError}));
    c->close_after_flush();
  }

  asio::awaitable<void> write_loop(ConnPtr c) {
    error_code ec;
    while (!c->closed) {
      SharedBytes next;
      bool is_frame = false;
      if (!c->control.empty()) {
        next = std::move(c->control.front());
        c->control.pop_front();
      } else if (c->closing) {
        c->close();
        break;
      } else if (c->frames) {
        if (auto f = c->frames->take()) {
          next = std::move(*f);
          is_frame = true;
        }
      }
      if (!next) {
        const auto due = c->last_tx + kHeartbeatInterval;
        if (c->heartbeats && steady::now() >= due) {
          next = encoded(wire::Heartbeat{opts.clock()});
        } else {
          c->wake.expires_at(c->heartbeats ? due : steady::time_point::max());
          co_await c->wake.async_wait(asio::redirect_error(asio::use_awaitable, ec));
          continue;
        }
      }
      co_await asio::async_write(c->socket, asio::buffer(*next),
                                 asio::redirect_error(asio::use_awaitable, ec));
      if (ec) {
        c->close();
        break;
      }
      c->last_tx = steady::now();
      if (is_frame) {
        std::lock_guard lock(stats_mutex);
        ++frames_out;
        out_rate.record(c->last_tx);
      }
    }
  }

  asio::awaitable<void> watchdog(ConnPtr c) {
    asio::steady_timer timer(io);
    error_code ec;
    while (!c->closed) {
      timer.expires_after(kWatchdogPeriod);
      co_await timer.async_wait(asio::redirect_error(asio::use_awaitable, ec));
      if (!c->closed && steady::now() - c->last_rx > kPeerTimeout) {
        logger().warn("{}: peer silent for {} ms, closing link", role_name(),
                      std::chrono::duration_cast<std::chrono::milliseconds>(kPeerTimeout).count());
        c->close();
      }
    }
  }

  void adopt_inbound(const ConnPtr& c) {
    if (inbound && inbound != c) {
      logger().info("{}: new inbound session replaces the previous one", role_name());
      inbound->send(encoded(wire::Bye{wire::bye::kReplaced}));
      inbound->close_after_flush();
    }
    inbound = c;
    inbound_slot.clear();
    inbound_up = true;
    inbound_rejected = false;
  }

  void handle_inbound_frame(wire::Frame f) {
    const auto now = steady::now();
    {
      std::lock_guard lock(stats_mutex);
      ++frames_in;
      ++frames_in_by_stream[static_cast<std::size_t>(f.stream_id)];
      in_rate.record(now);
    }
    if (f.stream_id != inbound_stream(cfg.role)) {
      logger().debug("{}: ignoring {} frame on inbound link", role_name(),
                     to_string(f.stream_id));
      count_error();
      return;
    }
    try {
      RawFrame frame = codec::decode_jpeg(f.payload, f.seq, f.capture_ts, f.stream_id);
      if (frame.width() != cfg.width || frame.height() != cfg.height) {
        logger().warn("{}: inbound frame is {}x{}, expected {}x{}", role_name(), frame.width(),
                      frame.height(), cfg.width, cfg.height);
        count_error();
        return;
      }
      inbound_slot.put(std::move(frame));
    } catch (const Error& e) {
      logger().warn("{}: dropping undecodable frame seq={}: {}", role_name(), f.seq, e.what());
      count_error();
      return;
    }
    if (!is_helper()) {
      { std::lock_guard lock(tick_mutex); }
      tick_cv.notify_all();
    }
  }

  asio::awaitable<void> accept_loop() {
    while (running) {
      error_code ec;
      tcp::socket socket =
          co_await acceptor.async_accept(asio::redirect_error(asio::use_awaitable, ec));
      if (ec) {
        if (!running || ec == asio::error::operation_aborted) co_return;
        continue;
      }
      asio::co_spawn(io, inbound_session(track(std::move(socket))), asio::detached);
    }
  }

  asio::awaitable<void> inbound_session(ConnPtr c) {
    wire::StreamDecoder decoder;
    Bytes buffer(kReadChunk);
    error_code ec;
    while (!c->closed) {
      const std::size_t n = co_await c->socket.async_read_some(
          asio::buffer(buffer), asio::redirect_error(asio::use_awaitable, ec));
      if (ec) break;
      c->last_rx = steady::now();
      wire::DecodeResult r = decoder.feed({buffer.data(), n});
      for (auto& msg : r.messages) {
        if (c->closing || c->closed) break;
        if (!c->handshaken) {
          if (!std::holds_alternative<wire::Hello>(msg)) {
            protocol_violation(c, "expected HELLO");
            break;
          }
          const wire::HelloAck ack = negotiate(cfg, msg);
          c->send(encoded(ack));
          if (!ack.accepted) {
            logger().warn("{}: rejected inbound HELLO: {}", role_name(), to_string(ack.reason));
            record_rejection(ack.reason);
            inbound_rejected = true;
            c->close_after_flush();
            break;
          }
          c->handshaken = true;
          c->heartbeats = true;
          adopt_inbound(c);
          logger().info("{}: inbound link up", role_name());
          continue;
        }
        if (auto* frame = std::get_if<wire::Frame>(&msg)) {
          handle_inbound_frame(std::move(*frame));
        } else if (std::holds_alternative<wire::Bye>(msg)) {
          c->close();
        } else if (!std::holds_alternative<wire::Heartbeat>(msg)) {
          protocol_violation(c, "unexpected handshake message");
        }
      }
      if (r.status == wire::DecodeStatus::ProtocolError && !c->closing && !c->closed) {
        protocol_violation(c, r.error);
      }
    }
    c->close();
    if (inbound == c) {
      inbound.reset();
      inbound_up = false;
      logger().info("{}: inbound link down", role_name());
    }
  }

  // Returns whether the handshake was accepted.
  asio::awaitable<bool> outbound_session(ConnPtr c) {
    c->send(encoded(cfg.hello()));
    wire::StreamDecoder decoder;
    Bytes buffer(kReadChunk);
    error_code ec;
    bool accepted = false;
    while (!c->closed) {
      const std::size_t n = co_await c->socket.async_read_some(
          asio::buffer(buffer), asio::redirect_error(asio::use_awaitable, ec));
      if (ec) break;
      c->last_rx = steady::now();
      wire::DecodeResult r = decoder.feed({buffer.data(), n});
      for (auto& msg : r.messages) {
        if (c->closing || c->closed) break;
        if (!c->handshaken) {
          const auto* ack = std::get_if<wire::HelloAck>(&msg);
          if (!ack) {
            protocol_violation(c, "expected HELLO_ACK");
            break;
          }
          if (!ack->accepted) {
            logger().warn("{}: peer rejected HELLO: {}", role_name(), to_string(ack->reason));
            record_rejection(ack->reason);
            outbound_rejected = true;
            c->close();
            break;
          }
          if (ack->width != cfg.width || ack->height != cfg.height) {
            record_rejection(wire::RejectReason::ResolutionMismatch);
            outbound_rejected = true;
            protocol_violation(c, "HELLO_ACK resolution differs from ours");
            break;
          }
          c->handshaken = true;
          c->heartbeats = true;
          accepted = true;
          outbound_slot.clear();
          c->frames = &outbound_slot;
          outbound = c;
          outbound_up = true;
          outbound_rejected = false;
          logger().info("{}: outbound link up to {}", role_name(), cfg.peer.to_string());
          continue;
        }
        if (std::holds_alternative<wire::Bye>(msg)) {
          c->close();
        } else if (!std::holds_alternative<wire::Heartbeat>(msg)) {
          protocol_violation(c, "peer sent data on our outbound link");
        }
      }
      if (r.status == wire::DecodeStatus::ProtocolError && !c->closing && !c->closed) {
        protocol_violation(c, r.error);
      }
    }
    c->close();
    if (outbound == c) {
      outbound.reset();
      outbound_up = false;
      logger().info("{}: outbound link down", role_name());
    }
    co_return accepted;
  }

  asio::awaitable<void> connect_loop() {
    tcp::resolver resolver(io);
    auto backoff = std::chrono::duration_cast<steady::duration>(kBackoffInitial);
    while (running) {
      error_code ec;
      const auto endpoints =
          co_await resolver.async_resolve(cfg.peer.host, std::to_string(cfg.peer.port),
                                          asio::redirect_error(asio::use_awaitable, ec));
      if (!running) break;
      if (!ec) {
        tcp::socket socket(io);
        co_await asio::async_connect(socket, endpoints,
                                     asio::redirect_error(asio::use_awaitable, ec));
        if (!running) break;
        if (!ec) {
          const bool accepted = co_await outbound_session(track(std::move(socket)));
          if (accepted) backoff = kBackoffInitial;
        }
      }
      if (!running) break;
      backoff_timer.expires_after(backoff);
      co_await backoff_timer.async_wait(asio::redirect_error(asio::use_awaitable, ec));
      backoff = std::min<steady::duration>(backoff * 2, kBackoffCap);
    }
  }

  asio::awaitable<void> stats_loop() {
    error_code ec;
    while (running) {
      stats_timer.expires_after(1s);
      co_await stats_timer.async_wait(asio::redirect_error(asio::use_awaitable, ec));
      if (!running) break;
      *opts.stats_out << format_stats_line(cfg.role, snapshot()) << std::endl;
    }
  }

  void wake_outbound_writer() {
    asio::post(io, [this] {
      if (outbound) outbound->wake.cancel();
    });
  }

  // --- tick thread -----------------------------------------------------------

  void display(const RawFrame& frame, bool measure) {
    try {
      sink->write(frame);
    } catch (const Error& e) {
      logger().warn("{}: sink write failed: {}", role_name(), e.what());
      count_error();
    }
    if (gateway) {
      gateway->publish(frame);
    }
    {
      std::lock_guard lock(stats_mutex);
      ++frames_displayed;
      if (measure) {
        latency.add(static_cast<std::int64_t>(opts.clock()) -
                    static_cast<std::int64_t>(frame.capture_ts()));
      }
    }
    if (opts.on_display) opts.on_display(frame);
  }

  void submit(const wire::Frame& frame) {
    if (!outbound_up) return;
    outbound_slot.put(encoded(frame));
    wake_outbound_writer();
  }

  NodeConfig live_config() {
    NodeConfig c = cfg;
    std::lock_guard lock(live_mutex);
    live.apply_to(c);
    return c;
  }

  void run_tick() {
    std::optional<RawFrame> frame;
    try {
      frame = source->next();
    } catch (const Error& e) {
      logger().warn("{}: source failed: {}", role_name(), e.what());
      count_error();
      return;
    }
    if (!frame) return;
    const NodeConfig c = live_config();
    try {
      if (is_helper()) {
        if (!(model.params() == c.skin)) {
          model = model.with_params(c.skin);
        }
        HelperTickResult r = helper_tick(inbound_slot, *frame, model, c);
        model = std::move(r.model);
        if (r.outbound) submit(*r.outbound);
        display(r.composite, r.had_scene);
        if (opts.on_helper_tick) {
          opts.on_helper_tick(HelperTickRecord{*frame, r.scene, r.composite, r.outbound && outbound_up});
        }
      } else {
        WorkerTickResult r = worker_tick(*frame, inbound_slot, c);
        if (r.encode_failed) count_error();
        if (r.outbound) submit(*r.outbound);
        if (r.display) display(*r.display, true);
      }
    } catch (const Error& e) {
      logger().warn("{}: tick failed: {}", role_name(), e.what());
      count_error();
    }
  }

  void tick_loop() {
    const auto period = std::chrono::duration_cast<steady::duration>(
        std::chrono::duration<double>(1.0 / cfg.fps_target));
    auto next = opts.tick_epoch.value_or(steady::now());
    const bool worker = !is_helper();
    std::unique_lock lock(tick_mutex);
    while (running) {
      tick_cv.wait_until(lock, next,
                         [&] { return !running || (worker && inbound_slot.has_fresh()); });
      if (!running) break;
      if (steady::now() < next) {
        // A composite arrived between ticks: show it now.
        lock.unlock();
        if (auto f = inbound_slot.take()) display(*f, true);
        lock.lock();
        continue;
      }
      lock.unlock();
      run_tick();
      lock.lock();
      next += period;
      const auto now = steady::now();
      if (next <= now) {
        const auto missed = (now - next) / period + 1;
        std::lock_guard stats_lock(stats_mutex);
        dropped_extra += static_cast<std::uint64_t>(missed);
        next += missed * period;
      }
    }
  }

  // --- shutdown -------------------------------------------------------------

  void stop_tick_thread() {
    running = false;
    {
      std::lock_guard lock(tick_mutex);
    }
    tick_cv.notify_all();
    if (tick_thread.joinable()) tick_thread.join();
  }

  void shutdown(bool graceful) {
    if (!started || finished.exchange(true)) return;
    stop_tick_thread();
    asio::post(io, [this, graceful] {
      error_code ec;
      acceptor.close(ec);
      backoff_timer.cancel();
      stats_timer.cancel();
      if (gateway) gateway->stop();
      for (auto& weak : all_connections) {
        auto c = weak.lock();
        if (!c) continue;
        if (graceful && c->handshaken && !c->closed) {
          c->control.clear();
          c->frames = nullptr;
          c->send(encoded(wire::Bye{wire::bye::kShutdown}));
          c->close_after_flush();
        } else {
          c->close();
        }
      }
      inbound_up = false;
      outbound_up = false;
      if (!graceful) io.stop();
    });
    work.reset();
    auto done = io_done.get_future();
    if (done.wait_for(kStopGrace) != std::future_status::ready) {
      io.stop();
    }
    if (io_thread.joinable()) io_thread.join();
    gateway.reset();
    logger().info("{}: stopped", role_name());
  }
};

Node::Node(NodeConfig cfg, RuntimeOptions options)
    : impl_(std::make_shared<Impl>(std::move(cfg), std::move(options))) {}

Node::~Node() { impl_->shutdown(true); }

void Node::start() {
  try {
    impl_->start();
  } catch (...) {
    impl_->running = false;
    impl_->finished = true;
    throw;
  }
}

void Node::stop() { impl_->shutdown(true); }
void Node::kill() { impl_->shutdown(false); }
NodeStats Node::stats() const { return impl_->snapshot(); }
const NodeConfig& Node::config() const { return impl_->cfg; }
std::string Node::control(std::string_view line) { return impl_->control(line); }
std::uint16_t Node::ui_port() const { return impl_->gateway ? impl_->gateway->port() : 0; }
std::uint16_t Node::listen_port() const { return impl_->bound_port; }

int run_node(const NodeConfig& cfg) {
  RuntimeOptions opts;
  opts.stats_out = &std::cout;
  Node node(cfg, std::move(opts));
  try {
    node.start();
  } catch (const Error& e) {
    logger().error("{}", e.what());
    return 1;
  }

  asio::io_context waiter;
  asio::signal_set signals(waiter, SIGINT, SIGTERM);
  signals.async_wait([&](const error_code& ec, int sig) {
    if (!ec) logger().info("caught signal {}, shutting down", sig);
    waiter.stop();
  });
  asio::steady_timer deadline(waiter);
  if (cfg.duration_s > 0) {
    deadline.expires_after(std::chrono::duration_cast<steady::duration>(
        std::chrono::duration<double>(cfg.duration_s)));
    deadline.async_wait([&](const error_code& ec) {
      if (!ec) waiter.stop();
    });
  }
  waiter.run();
  node.stop();
  return 0;
}

}  // namespace airhands
