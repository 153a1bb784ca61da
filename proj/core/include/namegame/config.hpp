#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "namegame/probe.hpp"
#include "namegame/runner.hpp"
#include "namegame/scoring.hpp"

namespace namegame::cli {

// Effective configuration for every subcommand: a single JSON file plus
// flag/env overrides. A snapshot of the effective config is written into the
// run manifest.
struct RunConfig {
  scoring::BackendConfig backend;
  std::string model_id = "unknown-model";

  std::filesystem::path census_path;
  std::optional<std::filesystem::path> extra_seed_path;  // CSV: race,surname
  std::optional<std::filesystem::path> pair_file;
  std::optional<std::filesystem::path> template_file;

  std::filesystem::path output_dir = "runs";
  std::string run_id = "run";

  int amt_a = 10;
  int amt_b = 2;
  int pairs_per_group = 17;
  int per_gender = 17;
  std::size_t seed_top_n = 300;
  std::size_t top_k = 100;
  std::vector<runner::Group> investor_groups{
      runner::Group{Race::White, Gender::M},
      runner::Group{Race::Asian, Gender::F}};
  bool gate_on_verification = false;
  int verify_per_cell = 1;  // (investor, trustee) pairings verified per cell
  bool allow_incomplete = false;

  probe::RacePhrases race_phrases = probe::RacePhrases::defaults();
  double alpha_anova = 0.001;
  double alpha_posthoc = 0.01;

  static RunConfig load(const std::filesystem::path& path);
  static RunConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  // NAMEGAME_ENDPOINT / NAMEGAME_OUTPUT_DIR
  void apply_env_overrides();

  std::filesystem::path run_dir() const { return output_dir / run_id; }
  game::TemplateSet templates() const;
};

}  // namespace namegame::cli
