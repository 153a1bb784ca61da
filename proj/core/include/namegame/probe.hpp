#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "namegame/census.hpp"
#include "namegame/common.hpp"
#include "namegame/scoring.hpp"

namespace namegame::probe {

// A gender title + surname used to identify a player, with the per-race
// log Pr(True) - log Pr(False) measurements attached once probed.
struct GenderSurnamePair {
  std::string surname;  // uppercase storage; title-cased at render time
  Gender gender = Gender::M;
  Race assigned_race = Race::Asian;
  // NaN entries mark races whose probe failed or was never run
  std::array<double, kRaceCount> log_odds{};
  // Pr(True)+Pr(False) under the full-vocabulary distribution when the
  // backend exposes normalized scores; NaN otherwise. Diagnostic only.
  std::array<double, kRaceCount> valid_mass{};
  double spread = 0.0;  // top-1 minus top-2 log-odds

  GenderSurnamePair();

  std::string title() const;    // "Mr." / "Ms."
  std::string display() const;  // "Mr. Johnson"
  // argmax over available log-odds equals the assigned race
  bool passes_gate() const;
  void recompute_spread();
};

struct SeedList {
  Race race;
  std::vector<std::string> surnames;  // de-duplicated, order-preserving
};

// Top-n posterior surnames unioned with an external list; duplicates removed
// case-insensitively, posterior order first.
SeedList build_seed_list(const census::RacePosterior& posterior,
                         std::span<const std::string> extra,
                         std::size_t top_n = 300);

struct RacePhrases {
  std::array<std::string, kRaceCount> phrase;
  static RacePhrases defaults();
  const std::string& of(Race race) const {
    return phrase[static_cast<std::size_t>(race)];
  }
};

// Byte-exact True/False probe prompt for the given style.
std::string render_race_probe(std::string_view title,
                              std::string_view surname_display,
                              std::string_view race_phrase,
                              scoring::PromptStyle style);

struct ProbeOutcome {
  std::array<double, kRaceCount> log_odds{};
  std::array<double, kRaceCount> valid_mass{};
  std::array<bool, kRaceCount> ok{};
};

// Probes the pair against each listed race; failed races are marked missing
// (NaN), not zero.
ProbeOutcome probe_log_odds(const GenderSurnamePair& pair,
                            std::span<const Race> races,
                            const RacePhrases& phrases,
                            scoring::ScoringClient& client,
                            scoring::PromptStyle style);

// Applies the refinement gate (argmax log-odds == assigned race), then keeps
// the per_gender pairs with the largest spread for each gender. Ties break
// by higher assigned-race log-odds, then lexicographic surname. Throws
// ShortfallError listing the deficit when a gender cannot be filled.
std::vector<GenderSurnamePair> select_pairs(
    std::vector<GenderSurnamePair> candidates, int per_gender = 17);

// Pair file: race,surname,gender,logodds_<race>...,spread. Log-odds columns
// may be empty (reference fixtures ship without them).
void write_pair_file(const std::filesystem::path& path,
                     std::span<const GenderSurnamePair> pairs);
std::vector<GenderSurnamePair> read_pair_file(const std::filesystem::path& path);

}  // namespace namegame::probe
