#include "namegame/census.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>

#include "namegame/csv.hpp"

namespace namegame::census {

namespace {

// Census percentages are rounded to 2 decimals, so a six-column row whose
// true sum is 100 can read as much as ~100.03. Anything beyond this bound is
// treated as corrupted data rather than rounding.
constexpr double kRoundingTolerance = 0.05;

bool is_suppressed_cell(const std::string& cell) {
  return trim(cell) == "(S)";
}

double parse_pct(const std::string& cell, std::size_t line,
                 const std::string& column) {
  try {
    std::size_t pos = 0;
    const std::string t = trim(cell);
    const double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument(t);
    if (v < 0.0 || v > 100.0)
      throw ParseError("line " + std::to_string(line) + ": column '" + column +
                       "' out of [0,100]: " + t);
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": non-numeric value '" +
                     cell + "' in column '" + column + "'");
  }
}

}  // namespace

int SurnameRecord::suppressed_cells() const {
  int k = 0;
  for (bool s : suppressed) k += s ? 1 : 0;
  if (!two_plus_dropped && two_plus_suppressed) ++k;
  return k;
}

double SurnameRecord::known_sum() const {
  double sum = 0.0;
  for (std::size_t r = 0; r < kRaceCount; ++r)
    if (!suppressed[r]) sum += pct[r];
  if (!two_plus_dropped && !two_plus_suppressed) sum += pct_two_plus;
  return sum;
}

std::vector<SurnameRecord> parse_census(std::istream& in,
                                        const std::string& source_name) {
  csv::Table table = csv::read(in);
  if (table.header.empty())
    throw SchemaError(source_name + ": missing header row");

  static const std::map<std::string, int> kKnownIgnored = {
      {"rank", 0}, {"prop100k", 0}, {"cum_prop100k", 0}};

  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    const std::string name = to_lower(trim(table.header[i]));
    if (kKnownIgnored.count(name)) continue;
    if (!col.emplace(name, i).second)
      throw SchemaError(source_name + ": duplicate column '" + name + "'");
  }

  const std::array<std::string, 8> required = {
      "name",  "count",   "pctapi",   "pctblack",
      "pcthispanic", "pctaian", "pctwhite", "pct2prace"};
  for (const auto& name : required) {
    if (!col.count(name))
      throw SchemaError(source_name + ": missing required column '" + name + "'");
  }
  for (const auto& [name, idx] : col) {
    (void)idx;
    if (std::find(required.begin(), required.end(), name) == required.end())
      throw SchemaError(source_name + ": unknown column '" + name + "'");
  }

  std::vector<SurnameRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t line = table.line_numbers[i];
    if (row.size() != table.header.size())
      throw ParseError(source_name + ": line " + std::to_string(line) +
                       ": expected " + std::to_string(table.header.size()) +
                       " fields, got " + std::to_string(row.size()));

    SurnameRecord rec;
    rec.surname = to_upper(trim(row[col.at("name")]));
    const std::string count_str = trim(row[col.at("count")]);
    try {
      std::size_t pos = 0;
      const long long c = std::stoll(count_str, &pos);
      if (pos != count_str.size() || c < 0) throw std::invalid_argument(count_str);
      rec.count = c;
    } catch (const std::exception&) {
      throw ParseError(source_name + ": line " + std::to_string(line) +
                       ": non-numeric count '" + count_str + "'");
    }

    for (std::size_t r = 0; r < kRaceCount; ++r) {
      const std::string column(race_census_column(kRaces[r]));
      const std::string& cell = row[col.at(column)];
      if (is_suppressed_cell(cell)) {
        rec.suppressed[r] = true;
      } else {
        rec.pct[r] = parse_pct(cell, line, column);
      }
    }
    const std::string& two = row[col.at("pct2prace")];
    if (is_suppressed_cell(two)) {
      rec.two_plus_suppressed = true;
    } else {
      rec.pct_two_plus = parse_pct(two, line, "pct2prace");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<SurnameRecord> parse_census(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open census file: " + path.string());
  return parse_census(in, path.string());
}

SurnameRecord impute_suppressed(SurnameRecord record) {
  const int k = record.suppressed_cells();
  if (k == 0) return record;
  const double known = record.known_sum();
  if (known > 100.0 + kRoundingTolerance)
    throw DataIntegrityError("surname " + record.surname +
                             ": known percentages sum to " +
                             format_full(known) + " > 100");
  const double fill = std::max(0.0, 100.0 - known) / k;
  for (std::size_t r = 0; r < kRaceCount; ++r) {
    if (record.suppressed[r]) {
      record.pct[r] = fill;
      record.suppressed[r] = false;
    }
  }
  if (!record.two_plus_dropped && record.two_plus_suppressed) {
    record.pct_two_plus = fill;
    record.two_plus_suppressed = false;
  }
  return record;
}

SurnameRecord drop_multirace_renormalize(SurnameRecord record) {
  const double five_sum =
      std::accumulate(record.pct.begin(), record.pct.end(), 0.0);
  if (five_sum <= 0.0)
    throw DegenerateRecordError("surname " + record.surname +
                                ": all five race percentages are zero");
  const double scale = 100.0 / five_sum;
  for (double& p : record.pct) p *= scale;
  record.pct_two_plus = 0.0;
  record.two_plus_suppressed = false;
  record.two_plus_dropped = true;
  return record;
}

namespace {

void sort_ranked(std::vector<RacePosterior::Entry>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const RacePosterior::Entry& a, const RacePosterior::Entry& b) {
              if (a.posterior != b.posterior) return a.posterior > b.posterior;
              if (a.count != b.count) return a.count > b.count;
              return a.surname < b.surname;
            });
}

// Full posterior matrix: joint[r][i] normalized per race. Shared by the
// plain and exclusive-assignment rankings.
std::array<std::vector<double>, kRaceCount> posterior_matrix(
    const std::vector<SurnameRecord>& records) {
  double total_count = 0.0;
  for (const auto& rec : records) total_count += static_cast<double>(rec.count);
  if (!(total_count > 0.0))
    throw DataIntegrityError("total surname count must be positive");

  std::array<std::vector<double>, kRaceCount> joint;
  std::array<double, kRaceCount> z{};
  for (std::size_t r = 0; r < kRaceCount; ++r)
    joint[r].resize(records.size(), 0.0);

  for (std::size_t i = 0; i < records.size(); ++i) {
    const double pr_name = static_cast<double>(records[i].count) / total_count;
    for (std::size_t r = 0; r < kRaceCount; ++r) {
      const double j = (records[i].pct[r] / 100.0) * pr_name;
      joint[r][i] = j;
      z[r] += j;
    }
  }
  for (std::size_t r = 0; r < kRaceCount; ++r) {
    if (z[r] > 0.0)
      for (double& v : joint[r]) v /= z[r];
  }
  return joint;
}

}  // namespace

PosteriorSet compute_posteriors(const std::vector<SurnameRecord>& records) {
  const auto posterior = posterior_matrix(records);
  PosteriorSet out;
  for (std::size_t r = 0; r < kRaceCount; ++r) {
    out[r].race = kRaces[r];
    out[r].ranked.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
      out[r].ranked.push_back(
          {records[i].surname, posterior[r][i], records[i].count});
    sort_ranked(out[r].ranked);
  }
  return out;
}

PosteriorSet assign_and_rank(const std::vector<SurnameRecord>& records) {
  const auto posterior = posterior_matrix(records);
  PosteriorSet out;
  for (std::size_t r = 0; r < kRaceCount; ++r) out[r].race = kRaces[r];

  for (std::size_t i = 0; i < records.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < kRaceCount; ++r) {
      if (posterior[r][i] > posterior[best][i]) best = r;
    }
    // zero-count rows have zero posterior everywhere; fall back to the
    // largest percentage so the assignment stays total
    if (posterior[best][i] == 0.0) {
      for (std::size_t r = 1; r < kRaceCount; ++r)
        if (records[i].pct[r] > records[i].pct[best]) best = r;
    }
    out[best].ranked.push_back(
        {records[i].surname, posterior[best][i], records[i].count});
  }
  for (auto& rp : out) sort_ranked(rp.ranked);
  return out;
}

std::vector<std::string> top_k(const RacePosterior& posterior, std::size_t k) {
  const std::size_t n = std::min(k, posterior.ranked.size());
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(posterior.ranked[i].surname);
  return out;
}

CurationResult curate(std::vector<SurnameRecord> records) {
  CurationResult result;
  std::vector<SurnameRecord> kept;
  kept.reserve(records.size());
  for (auto& rec : records) {
    std::string surname = rec.surname;
    try {
      kept.push_back(drop_multirace_renormalize(impute_suppressed(std::move(rec))));
    } catch (const DegenerateRecordError&) {
      result.excluded.push_back(std::move(surname));
    }
  }
  if (kept.empty())
    throw DataIntegrityError("census input contains no usable records");
  result.record_count = kept.size();
  result.assigned = assign_and_rank(kept);
  return result;
}

void write_ranked_csv(const RacePosterior& posterior, std::size_t k,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  csv::write_row(out, {"rank", "surname", "posterior", "count"});
  const std::size_t n = std::min(k, posterior.ranked.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = posterior.ranked[i];
    csv::write_row(out, {std::to_string(i + 1), e.surname,
                         format_full(e.posterior), std::to_string(e.count)});
  }
}

}  // namespace namegame::census
