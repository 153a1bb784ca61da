#pragma once

#include <filesystem>

#include "namegame/config.hpp"

namespace namegame::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBackend = 3;
inline constexpr int kExitDesign = 4;
inline constexpr int kExitShortfall = 5;

int exit_code_for(const std::exception& error);

// Every command validates its inputs fully before any side effect and
// returns the directory (or file) it produced.

// Ranked per-race surname files plus a top-3 summary under
// <run_dir>/curation/.
std::filesystem::path cmd_curate(const RunConfig& config);

// Probes seed lists and writes the per-model pair file (34 pairs per race)
// plus a probe log under <run_dir>/probe/.
std::filesystem::path cmd_probe(const RunConfig& config);

// Construct-validity verification table under <run_dir>/verification/.
std::filesystem::path cmd_verify(const RunConfig& config);

// Executes the factorial experiments; returns the run directory.
std::filesystem::path cmd_run(const RunConfig& config);

// ANOVA/post-hoc/interaction tables and SVG plots under
// <run_dir>/analysis/.
std::filesystem::path cmd_analyze(const RunConfig& config,
                                  const std::filesystem::path& run_dir);

// Consolidated human-readable report.md derived from the analysis tables.
std::filesystem::path cmd_report(const RunConfig& config,
                                 const std::filesystem::path& run_dir);

}  // namespace namegame::cli
