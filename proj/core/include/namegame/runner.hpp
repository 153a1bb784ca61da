#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "namegame/common.hpp"
#include "namegame/game.hpp"
#include "namegame/probe.hpp"
#include "namegame/scoring.hpp"

namespace namegame::runner {

struct Group {
  Race race = Race::White;
  Gender gender = Gender::M;
  bool operator==(const Group&) const = default;
};

std::string group_label(const Group& g);      // "White-M"
std::string group_dir_label(const Group& g);  // "white_m"
Group group_from_label(std::string_view label);

// the ten experimental cells, race-major, M before F
std::array<Group, 10> trustee_groups();

struct ExperimentDesign {
  Group investor_group{Race::White, Gender::M};
  int pairs_per_group = 17;
  int amt_a = 10;
  int amt_b = 2;
  scoring::PromptStyle style = scoring::PromptStyle::BasePhi;
  std::string model_id;
  bool gate_on_verification = false;

  int games_per_cell() const { return pairs_per_group * (pairs_per_group - 1); }
  void validate() const;
};

// All (i, j) index pairs with i != j, i-major. The excluded diagonal is the
// same across every cell, keeping all cells balanced.
std::vector<std::pair<int, int>> enumerate_game_indices(int n);

// 272 GameSpecs for two 17-pair lists (n^2 - n in general).
std::vector<game::GameSpec> enumerate_games(
    std::span<const probe::GenderSurnamePair> investor_pairs,
    std::span<const probe::GenderSurnamePair> trustee_pairs, int amt_a,
    int amt_b, scoring::PromptStyle style);

// 17 pairs per (race, gender) group, in pair-file order.
struct PairSet {
  std::array<std::vector<probe::GenderSurnamePair>, 10> by_group;

  std::vector<probe::GenderSurnamePair>& group(const Group& g);
  const std::vector<probe::GenderSurnamePair>& group(const Group& g) const;
  static PairSet from_pairs(std::span<const probe::GenderSurnamePair> pairs);
  static PairSet from_file(const std::filesystem::path& path);
  void validate_counts(int pairs_per_group) const;  // DesignError on mismatch
};

struct GameRecord {
  Group cell;
  int i = 0;  // investor index
  int j = 0;  // trustee index
  std::string investor_surname;
  Gender investor_gender = Gender::M;
  std::string trustee_surname;
  Gender trustee_gender = Gender::M;
  std::vector<double> probs;  // amt_a + 1 entries over "0".."amt_a"
  double mean = 0.0;
  bool failed = false;
  std::string fail_reason;
};

struct CellResult {
  Group trustee_group;
  std::vector<GameRecord> outcomes;  // (i, j) order
  double mean = 0.0;    // over successful outcomes
  double stddev = 0.0;  // sample standard deviation

  std::size_t failure_count() const;
  void recompute_moments();
};

struct ExperimentResult {
  Group investor_group;
  std::vector<CellResult> cells;  // trustee_groups() order
  std::size_t failure_count() const;
  bool complete() const;
};

ExperimentResult run_experiment(const ExperimentDesign& design,
                                const PairSet& pairs,
                                scoring::ScoringClient& client,
                                const game::TemplateSet& templates);

// Raw outcome persistence. Full-precision means/probabilities; bit-identical
// across write/read round trips.
void write_outcomes_csv(const ExperimentResult& result, int amt_a,
                        const std::filesystem::path& path);
ExperimentResult read_outcomes_csv(const std::filesystem::path& path);

// Table-shaped per-cell export: investor rows, trustee columns, empty
// diagonal, means at 4 decimal places.
void export_matrix_csv(const CellResult& cell,
                       std::span<const probe::GenderSurnamePair> investor_pairs,
                       std::span<const probe::GenderSurnamePair> trustee_pairs,
                       const std::filesystem::path& path);

}  // namespace namegame::runner
