#include "airhands/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "airhands/error.hpp"
#include "airhands/node.hpp"
#include "airhands/sources.hpp"

extern char** environ;

namespace airhands::cli {

namespace {

long long parse_integer(std::string_view name, const std::string& text, long long lo,
                        long long hi) {
  long long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw UsageError(fmt::format("{}: expected an integer, got '{}'", name, text));
  }
  if (v < lo || v > hi) {
    throw UsageError(fmt::format("{}: {} is outside {}..{}", name, v, lo, hi));
  }
  return v;
}

double parse_real(std::string_view name, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty() || !std::isfinite(v)) {
    throw UsageError(fmt::format("{}: expected a number, got '{}'", name, text));
  }
  return v;
}

bool parse_bool(std::string_view name, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw UsageError(fmt::format("{}: expected a boolean, got '{}'", name, text));
}

wire::Role parse_role(const std::string& text) {
  if (text == "helper") return wire::Role::Helper;
  if (text == "worker") return wire::Role::Worker;
  throw UsageError(fmt::format("--role: expected helper or worker, got '{}'", text));
}

// A node flag with its environment fallback.
struct NodeFlag {
  std::string name;
  std::string env;
  std::string default_text;
  std::string help;
  std::function<void(NodeConfig&, const std::string&)> apply;
};

std::string fmt_real(double v) { return fmt::format("{}", v); }

std::vector<NodeFlag> node_flags() {
  const NodeConfig h = NodeConfig::defaults_for(wire::Role::Helper);
  const NodeConfig w = NodeConfig::defaults_for(wire::Role::Worker);
  const skin::SkinParams sp;
  std::vector<NodeFlag> flags = {
      {"--listen", "AIRHANDS_LISTEN",
       fmt::format("{} (helper), {} (worker)", h.listen_port, w.listen_port),
       "TCP port for the inbound stream",
       [](NodeConfig& c, const std::string& v) {
         c.listen_port = static_cast<std::uint16_t>(parse_integer("--listen", v, 1, 65535));
       }},
      {"--peer", "AIRHANDS_PEER",
       fmt::format("{} (helper), {} (worker)", h.peer.to_string(), w.peer.to_string()),
       "host:port of the peer's listener",
       [](NodeConfig& c, const std::string& v) {
         try {
           c.peer = Endpoint::parse(v);
         } catch (const ConfigError& e) {
           throw UsageError(fmt::format("--peer: {}", e.what()));
         }
       }},
      {"--width", "AIRHANDS_WIDTH", std::to_string(h.width), "frame width in pixels",
       [](NodeConfig& c, const std::string& v) {
         c.width = static_cast<int>(parse_integer("--width", v, 1, 65535));
       }},
      {"--height", "AIRHANDS_HEIGHT", std::to_string(h.height), "frame height in pixels",
       [](NodeConfig& c, const std::string& v) {
         c.height = static_cast<int>(parse_integer("--height", v, 1, 65535));
       }},
      {"--fps", "AIRHANDS_FPS", std::to_string(h.fps_target), "tick rate in frames per second",
       [](NodeConfig& c, const std::string& v) {
         c.fps_target = static_cast<int>(parse_integer("--fps", v, 1, 255));
       }},
      {"--quality", "AIRHANDS_QUALITY", std::to_string(h.jpeg_quality), "JPEG quality 1..100",
       [](NodeConfig& c, const std::string& v) {
         c.jpeg_quality = static_cast<int>(parse_integer("--quality", v, 1, 100));
       }},
      {"--source", "AIRHANDS_SOURCE", h.source.to_string(),
       "synthetic | dir:<path> | camera[:<n>] | ui",
       [](NodeConfig& c, const std::string& v) {
         try {
           c.source = SourceSpec::parse(v);
         } catch (const ConfigError& e) {
           throw UsageError(fmt::format("--source: {}", e.what()));
         }
       }},
      {"--sink", "AIRHANDS_SINK", h.sink.to_string(), "null | dir:<path> | ui",
       [](NodeConfig& c, const std::string& v) {
         try {
           c.sink = SinkSpec::parse(v);
         } catch (const ConfigError& e) {
           throw UsageError(fmt::format("--sink: {}", e.what()));
         }
       }},
      {"--skin.s_min", "AIRHANDS_SKIN_S_MIN", fmt_real(sp.s_min), "minimum skin saturation",
       [](NodeConfig& c, const std::string& v) { c.skin.s_min = parse_real("--skin.s_min", v); }},
      {"--skin.v_min", "AIRHANDS_SKIN_V_MIN", fmt_real(sp.v_min), "minimum skin value",
       [](NodeConfig& c, const std::string& v) { c.skin.v_min = parse_real("--skin.v_min", v); }},
      {"--skin.tau", "AIRHANDS_SKIN_TAU", fmt_real(sp.tau), "histogram acceptance threshold",
       [](NodeConfig& c, const std::string& v) { c.skin.tau = parse_real("--skin.tau", v); }},
      {"--skin.alpha", "AIRHANDS_SKIN_ALPHA", fmt_real(sp.alpha), "histogram learning rate",
       [](NodeConfig& c, const std::string& v) { c.skin.alpha = parse_real("--skin.alpha", v); }},
      {"--freeze", "AIRHANDS_FREEZE", "false", "stop adapting the skin model (true|false)",
       [](NodeConfig& c, const std::string& v) { c.model_frozen = parse_bool("--freeze", v); }},
      {"--ui-port", "AIRHANDS_UI_PORT", std::to_string(h.ui_port),
       "console HTTP/WebSocket port, 0 disables",
       [](NodeConfig& c, const std::string& v) {
         c.ui_port = static_cast<std::uint16_t>(parse_integer("--ui-port", v, 0, 65535));
       }},
      {"--ui-dir", "AIRHANDS_UI_DIR", "(built-in page)", "directory of console assets",
       [](NodeConfig& c, const std::string& v) { c.ui_dir = v; }},
      {"--duration", "AIRHANDS_DURATION", "0", "seconds to run, 0 runs until interrupted",
       [](NodeConfig& c, const std::string& v) {
         c.duration_s = parse_real("--duration", v);
         if (c.duration_s < 0) throw UsageError("--duration: must not be negative");
       }},
  };
  return flags;
}

struct NodeApp {
  CLI::App app{"Run a helper or worker node", "airhands node"};
  std::string role;
  std::vector<NodeFlag> flags = node_flags();
  std::vector<std::string> values = std::vector<std::string>(flags.size());
  std::vector<CLI::Option*> options;
  CLI::Option* role_opt = nullptr;

  NodeApp() {
    role_opt = app.add_option("--role", role, "helper | worker [env AIRHANDS_ROLE]")
                   ->default_str("helper");
    for (std::size_t i = 0; i < flags.size(); ++i) {
      auto* opt = app.add_option(flags[i].name, values[i],
                                 fmt::format("{} [env {}]", flags[i].help, flags[i].env));
      opt->default_str(flags[i].default_text);
      // --freeze alone means true. CLI11 would substitute the default string
      // for a missing value, so the default lives in the help text instead.
      if (flags[i].name == "--freeze") {
        opt->expected(0, 1)->default_str("");
        opt->description(fmt::format("{} (default {})", opt->get_description(),
                                     flags[i].default_text));
      }
      options.push_back(opt);
    }
  }
};

}  // namespace

Env process_environment() {
  Env env;
  for (char** p = environ; p && *p; ++p) {
    std::string_view entry(*p);
    if (!entry.starts_with("AIRHANDS_")) continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    env.emplace(std::string(entry.substr(0, eq)), std::string(entry.substr(eq + 1)));
  }
  return env;
}

std::string node_help() {
  NodeApp a;
  return a.app.help();
}

NodeConfig parse_config(const std::vector<std::string>& args, const Env& env) {
  NodeApp a;
  std::vector<const char*> argv{"airhands node"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    a.app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  auto lookup = [&](const std::string& name) -> std::optional<std::string> {
    if (auto it = env.find(name); it != env.end()) return it->second;
    return std::nullopt;
  };

  std::optional<std::string> role_text;
  if (a.role_opt->count() > 0) {
    role_text = a.role;
  } else {
    role_text = lookup("AIRHANDS_ROLE");
  }
  NodeConfig cfg = NodeConfig::defaults_for(role_text ? parse_role(*role_text) : wire::Role::Helper);

  for (std::size_t i = 0; i < a.flags.size(); ++i) {
    const NodeFlag& f = a.flags[i];
    if (a.options[i]->count() > 0) {
      // A bare --freeze leaves the value empty.
      f.apply(cfg, a.values[i].empty() && f.name == "--freeze" ? "true" : a.values[i]);
    } else if (auto v = lookup(f.env)) {
      f.apply(cfg, *v);
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

int cmd_segment(const std::string& input, const std::string& output,
                const skin::SkinParams& params, std::ostream& out, std::ostream& err) {
  try {
    params.validate();
  } catch (const ConfigError& e) {
    err << "airhands segment: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const PpmImage img = read_ppm(input);
    const RawFrame frame = make_frame(img.width, img.height, img.pixels, 0, 0, StreamId::Hand);
    const skin::Mask mask = skin::segment(frame, skin::SkinModel(params));
    write_ppm(output, mask_to_frame(mask));
    out << "skin_pixels=" << mask.skin_count() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "airhands segment: " << e.what() << "\n";
    return kExitFailure;
  }
}

BenchReport run_bench(const BenchOptions& options) {
  BenchReport report;
  if (options.duration_s <= 0) {
    return report;
  }
  using steady = std::chrono::steady_clock;

  auto base = [&](wire::Role role) {
    NodeConfig c = NodeConfig::defaults_for(role);
    c.width = options.width;
    c.height = options.height;
    c.fps_target = options.fps;
    c.jpeg_quality = options.quality;
    c.ui_port = 0;
    const bool helper = role == wire::Role::Helper;
    c.listen_port = helper ? options.helper_port : options.worker_port;
    c.peer = Endpoint{"127.0.0.1", helper ? options.worker_port : options.helper_port};
    return c;
  };

  // Both schedules share one anchor and the helper runs half a period behind
  // the worker, so a fresh scene is usually ready at the helper's tick and
  // the measured latency reflects pipeline cost rather than a random phase.
  const auto period = std::chrono::duration_cast<steady::duration>(
      std::chrono::duration<double>(1.0 / options.fps));
  const auto epoch = steady::now() + std::chrono::milliseconds(20);

  std::mutex latency_mutex;
  std::vector<std::int64_t> latencies;
  std::atomic<bool> measuring{false};

  RuntimeOptions worker_opts;
  worker_opts.tick_epoch = epoch;
  worker_opts.on_display = [&](const RawFrame& f) {
    if (!measuring) return;
    const auto ms =
        static_cast<std::int64_t>(wall_clock_ms()) - static_cast<std::int64_t>(f.capture_ts());
    std::lock_guard lock(latency_mutex);
    latencies.push_back(ms);
  };
  RuntimeOptions helper_opts;
  helper_opts.tick_epoch = epoch + period / 2;

  Node worker(base(wire::Role::Worker), std::move(worker_opts));
  Node helper(base(wire::Role::Helper), std::move(helper_opts));
  worker.start();
  helper.start();

  const auto start = steady::now();
  const auto deadline =
      start + std::chrono::duration_cast<steady::duration>(
                  std::chrono::duration<double>(options.duration_s));
  while (steady::now() < deadline &&
         !(worker.stats().link == LinkState::Up && helper.stats().link == LinkState::Up)) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  const auto link_time = steady::now();
  report.link_up = link_time < deadline;
  const NodeStats h0 = helper.stats();
  const NodeStats w0 = worker.stats();
  measuring = true;
  std::this_thread::sleep_until(deadline);
  measuring = false;
  const auto end = steady::now();
  const NodeStats h1 = helper.stats();
  const NodeStats w1 = worker.stats();
  helper.stop();
  worker.stop();

  const double seconds = std::chrono::duration<double>(end - link_time).count();
  report.measured_s = report.link_up ? seconds : 0.0;
  auto fill = [&](BenchNodeReport& r, const NodeStats& a, const NodeStats& b) {
    r.frames_in = b.frames_in - a.frames_in;
    r.frames_out = b.frames_out - a.frames_out;
    r.frames_dropped = b.frames_dropped;
    if (report.measured_s > 0) {
      r.fps_in = static_cast<double>(r.frames_in) / report.measured_s;
      r.fps_out = static_cast<double>(r.frames_out) / report.measured_s;
    }
  };
  fill(report.helper, h0, h1);
  fill(report.worker, w0, w1);

  std::lock_guard lock(latency_mutex);
  report.latency_samples = latencies.size();
  if (!latencies.empty()) {
    auto mid = latencies.begin() + static_cast<std::ptrdiff_t>(latencies.size() / 2);
    std::nth_element(latencies.begin(), mid, latencies.end());
    report.latency_median_ms = *mid;
  }
  return report;
}

std::string format_bench_report(const BenchReport& r) {
  std::string out;
  auto node = [&](std::string_view role, const BenchNodeReport& n) {
    out += fmt::format("bench role={} fps_in={:.1f} fps_out={:.1f} frames_in={} frames_out={} "
                       "dropped={}\n",
                       role, n.fps_in, n.fps_out, n.frames_in, n.frames_out, n.frames_dropped);
  };
  node("helper", r.helper);
  node("worker", r.worker);
  out += fmt::format("bench latency_median_ms={} samples={} measured_s={:.2f} link={}\n",
                     r.latency_median_ms ? std::to_string(*r.latency_median_ms) : "n/a",
                     r.latency_samples, r.measured_s, r.link_up ? "up" : "down");
  return out;
}

namespace {

constexpr std::string_view kTopHelp =
    "usage: airhands <command> [options]\n"
    "\n"
    "commands:\n"
    "  node      run a helper or worker node\n"
    "  segment   segment one P6 image into a skin mask\n"
    "  bench     run a helper and a worker on loopback and report throughput\n"
    "\n"
    "Run 'airhands <command> --help' for the options of a command.\n";

// Returns an exit code when parsing ends the command (help or error).
std::optional<int> parse_app(CLI::App& app, int argc, char** argv, std::ostream& out,
                             std::ostream& err) {
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << app.get_name() << ": " << e.what() << "\n";
    return kExitUsage;
  }
  return std::nullopt;
}

void add_skin_flags(CLI::App& app, skin::SkinParams& p) {
  app.add_option("--skin.s_min", p.s_min, "minimum skin saturation")->capture_default_str();
  app.add_option("--skin.v_min", p.v_min, "minimum skin value")->capture_default_str();
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  if (argc < 2) {
    err << kTopHelp;
    return kExitUsage;
  }
  const std::string command = argv[1];
  if (command == "-h" || command == "--help" || command == "help") {
    out << kTopHelp;
    return kExitOk;
  }

  if (command == "node") {
    std::vector<std::string> args(argv + 2, argv + argc);
    if (std::find_if(args.begin(), args.end(), [](const std::string& a) {
          return a == "-h" || a == "--help";
        }) != args.end()) {
      out << node_help();
      return kExitOk;
    }
    NodeConfig cfg;
    try {
      cfg = parse_config(args, process_environment());
    } catch (const UsageError& e) {
      err << "airhands node: " << e.what() << "\n";
      return kExitUsage;
    }
    return run_node(cfg);
  }

  if (command == "segment") {
    CLI::App app{"Segment one P6 image into a skin mask", "airhands segment"};
    std::string input;
    std::string output;
    skin::SkinParams params;
    app.add_option("input", input, "input P6 image")->required();
    app.add_option("output", output, "output mask, P6 white = skin")->required();
    add_skin_flags(app, params);
    app.add_option("--skin.tau", params.tau, "histogram acceptance threshold")
        ->capture_default_str();
    if (auto code = parse_app(app, argc - 1, argv + 1, out, err)) return *code;
    return cmd_segment(input, output, params, out, err);
  }

  if (command == "bench") {
    CLI::App app{"Run a helper and a worker on loopback", "airhands bench"};
    BenchOptions o;
    app.add_option("--duration", o.duration_s, "seconds to run")->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app.add_option("--width", o.width, "frame width")->capture_default_str()
        ->check(CLI::Range(1, 65535));
    app.add_option("--height", o.height, "frame height")->capture_default_str()
        ->check(CLI::Range(1, 65535));
    app.add_option("--quality", o.quality, "JPEG quality")->capture_default_str()
        ->check(CLI::Range(1, 100));
    app.add_option("--fps", o.fps, "tick rate")->capture_default_str()->check(CLI::Range(1, 255));
    app.add_option("--helper-port", o.helper_port, "helper listen port")->capture_default_str();
    app.add_option("--worker-port", o.worker_port, "worker listen port")->capture_default_str();
    if (auto code = parse_app(app, argc - 1, argv + 1, out, err)) return *code;
    try {
      out << format_bench_report(run_bench(o));
    } catch (const Error& e) {
      err << "airhands bench: " << e.what() << "\n";
      return kExitFailure;
    }
    return kExitOk;
  }

  err << "airhands: unknown command '" << command << "'\n\n" << kTopHelp;
  return kExitUsage;
}

}  // namespace airhands::cli
