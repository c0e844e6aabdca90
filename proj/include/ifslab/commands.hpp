#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>

#include "ifslab/config.hpp"

namespace ifslab {

inline constexpr const char* kToolVersion = "1.0.0";

struct RunContext {
  ExperimentConfig cfg;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string command;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
};

/// Each command computes everything first and only then writes its artifacts
/// (CSV/PPM + summary.txt + manifest.json), so a nonzero exit leaves the
/// output directory untouched. Returns a process exit code: 0 done, 2 when
/// the computation refused to certify (seed-dependent attractor and such).
int cmd_attractor(const RunContext& rc);
int cmd_measure(const RunContext& rc);
int cmd_ergodic(const RunContext& rc);
int cmd_chaos(const RunContext& rc);
int cmd_diagnose(const RunContext& rc);
int cmd_render(const RunContext& rc);

/// Dispatch on rc.command.
int run_command(const RunContext& rc);

}  // namespace ifslab
