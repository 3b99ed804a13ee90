#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "airhands/node_config.hpp"
#include "airhands/skinseg.hpp"

namespace airhands::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

using Env = std::map<std::string, std::string>;

/// AIRHANDS_* variables of the current process.
Env process_environment();

/// Builds a node config from `node` subcommand arguments (without the
/// subcommand itself). Flags beat AIRHANDS_* variables, which beat the
/// role defaults. Throws UsageError on unknown flags or invalid values.
NodeConfig parse_config(const std::vector<std::string>& args, const Env& env);

/// Help text for the `node` subcommand; lists every flag with its default.
std::string node_help();

/// Segments a P6 image with the default model (thresholds from params) and
/// writes a white-on-black mask. Prints `skin_pixels=<n>`.
int cmd_segment(const std::string& input, const std::string& output,
                const skin::SkinParams& params, std::ostream& out, std::ostream& err);

struct BenchOptions {
  double duration_s = 5.0;
  int width = 640;
  int height = 480;
  int quality = 80;
  int fps = 15;
  std::uint16_t helper_port = kHelperListenPort;
  std::uint16_t worker_port = kWorkerListenPort;
};

struct BenchNodeReport {
  double fps_in = 0.0;
  double fps_out = 0.0;
  std::uint64_t frames_in = 0;
  std::uint64_t frames_out = 0;
  std::uint64_t frames_dropped = 0;
};

struct BenchReport {
  BenchNodeReport helper;
  BenchNodeReport worker;
  /// Median worker display latency (display time - scene capture time).
  std::optional<std::int64_t> latency_median_ms;
  std::uint64_t latency_samples = 0;
  double measured_s = 0.0;  ///< time from link up to the end of the run
  bool link_up = false;
};

/// Hosts a helper and a worker in this process, linked over loopback with
/// synthetic sources. Throws Error if either port cannot be bound.
BenchReport run_bench(const BenchOptions& options);

std::string format_bench_report(const BenchReport& report);

/// Entry point for the airhands executable.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace airhands::cli
