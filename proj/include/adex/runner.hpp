// Subcommand orchestration: Monte Carlo loops, deterministic seeding, CSV and
// metadata emission. Output bytes are a pure function of (config, seed); the
// thread count affects speed only.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "adex/config.hpp"

namespace adex {

inline constexpr const char* kArtifactVersion = "0.1.0";

extern const std::vector<std::string> kSubcommands;

// Executes one subcommand, writing CSVs plus run_meta.json and
// config_echo.ini into out_dir. Throws on error after deleting any outputs
// already written for this run.
void run_subcommand(const std::string& subcommand, const RunConfig& cfg,
                    const std::filesystem::path& out_dir, int threads);

}  // namespace adex
