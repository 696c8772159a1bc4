#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "circmotion/scenario.hpp"
#include "circmotion/simulator.hpp"

namespace circmotion {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

/// Environment variable naming the default output root; runs write to
/// $CIRCMOTION_OUT_DIR/<scenario name> unless --out or the scenario's
/// outputs.directory is given. Without it the root is ./out.
inline constexpr const char* kOutDirEnv = "CIRCMOTION_OUT_DIR";

/// Writes the files selected in scenario.outputs into `dir` (created if
/// needed).
void write_outputs(const std::filesystem::path& dir, const Scenario& scenario,
                   const RunResult& result);

/// Entry point of the `circmotion` tool. Results go to `out`, diagnostics to
/// `err`; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace circmotion
