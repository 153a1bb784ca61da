#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "namegame/common.hpp"

namespace namegame::census {

// One row of the surname file. Percentages are kept at full binary-float
// precision; "(S)"-suppressed cells are tracked until imputation.
struct SurnameRecord {
  std::string surname;                 // uppercase-normalized
  std::int64_t count = 0;
  std::array<double, kRaceCount> pct{};  // percent in [0,100], Race-indexed
  double pct_two_plus = 0.0;
  std::array<bool, kRaceCount> suppressed{};
  bool two_plus_suppressed = false;
  bool two_plus_dropped = false;       // set by drop_multirace_renormalize

  int suppressed_cells() const;
  double known_sum() const;            // sum over non-suppressed cells
};

// Parses the 2010 Census "Frequently Occurring Surnames" schema. Required
// columns (order-insensitive): name, count, pctapi, pctblack, pcthispanic,
// pctaian, pctwhite, pct2prace. The public file's rank/prop100k/cum_prop100k
// columns are tolerated and ignored; any other column is a schema error.
std::vector<SurnameRecord> parse_census(std::istream& in,
                                        const std::string& source_name = "<stream>");
std::vector<SurnameRecord> parse_census(const std::filesystem::path& path);

// Fills each "(S)" cell with (100 - known_sum) / k. Idempotent.
SurnameRecord impute_suppressed(SurnameRecord record);

// Removes pct_two_plus and rescales the five race percentages to sum to 100.
// Throws DegenerateRecordError when all five are zero.
SurnameRecord drop_multirace_renormalize(SurnameRecord record);

struct RacePosterior {
  struct Entry {
    std::string surname;
    double posterior = 0.0;
    std::int64_t count = 0;
  };
  Race race = Race::Asian;
  // sorted non-increasing by posterior; ties by descending count, then
  // lexicographic surname
  std::vector<Entry> ranked;
};

using PosteriorSet = std::array<RacePosterior, kRaceCount>;

// Pr(name) = count / total count; joint = Pr(race|name) * Pr(name);
// posterior = joint normalized within each race over the full surname set.
// Every surname appears in every race's ranked list.
// Records must already be imputed and renormalized.
PosteriorSet compute_posteriors(const std::vector<SurnameRecord>& records);

// Curation-side ranking: each surname is assigned exclusively to the race
// where its posterior is largest, and each race list ranks only its assigned
// surnames. This is what makes highly common surnames with a large minority
// share (Smith, Johnson, Williams, ...) land in the Black list instead of
// dominating the White one.
PosteriorSet assign_and_rank(const std::vector<SurnameRecord>& records);

std::vector<std::string> top_k(const RacePosterior& posterior, std::size_t k);

struct CurationResult {
  PosteriorSet assigned;                 // exclusive-assignment ranking
  std::vector<std::string> excluded;     // degenerate records, logged
  std::size_t record_count = 0;
};

// Full pipeline over parsed records: impute, drop multirace + renormalize,
// exclude degenerate rows, rank with exclusive assignment.
CurationResult curate(std::vector<SurnameRecord> records);

// Ranked-list export: columns rank,surname,posterior,count.
void write_ranked_csv(const RacePosterior& posterior, std::size_t k,
                      const std::filesystem::path& path);

}  // namespace namegame::census
