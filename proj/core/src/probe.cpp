#include "namegame/probe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "namegame/csv.hpp"

namespace namegame::probe {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

GenderSurnamePair::GenderSurnamePair() {
  log_odds.fill(kNaN);
  valid_mass.fill(kNaN);
}

std::string GenderSurnamePair::title() const {
  return std::string(title_for(gender));
}

std::string GenderSurnamePair::display() const {
  return title() + " " + title_case(surname);
}

bool GenderSurnamePair::passes_gate() const {
  const std::size_t assigned = static_cast<std::size_t>(assigned_race);
  if (std::isnan(log_odds[assigned])) return false;
  for (std::size_t r = 0; r < kRaceCount; ++r) {
    if (r == assigned || std::isnan(log_odds[r])) continue;
    if (log_odds[r] >= log_odds[assigned]) return false;
  }
  return true;
}

void GenderSurnamePair::recompute_spread() {
  double top1 = -std::numeric_limits<double>::infinity();
  double top2 = -std::numeric_limits<double>::infinity();
  int available = 0;
  for (double lo : log_odds) {
    if (std::isnan(lo)) continue;
    ++available;
    if (lo > top1) {
      top2 = top1;
      top1 = lo;
    } else if (lo > top2) {
      top2 = lo;
    }
  }
  spread = available >= 2 ? top1 - top2 : 0.0;
}

SeedList build_seed_list(const census::RacePosterior& posterior,
                         std::span<const std::string> extra,
                         std::size_t top_n) {
  SeedList list;
  list.race = posterior.race;
  std::set<std::string> seen;
  auto add = [&](const std::string& surname) {
    const std::string key = to_upper(surname);
    if (seen.insert(key).second) list.surnames.push_back(key);
  };
  const std::size_t n = std::min(top_n, posterior.ranked.size());
  for (std::size_t i = 0; i < n; ++i) add(posterior.ranked[i].surname);
  for (const auto& surname : extra) add(surname);
  return list;
}

RacePhrases RacePhrases::defaults() {
  RacePhrases p;
  for (std::size_t r = 0; r < kRaceCount; ++r)
    p.phrase[r] = std::string(default_race_phrase(kRaces[r]));
  return p;
}

std::string render_race_probe(std::string_view title,
                              std::string_view surname_display,
                              std::string_view race_phrase,
                              scoring::PromptStyle style) {
  std::string statement;
  statement.reserve(title.size() + surname_display.size() + race_phrase.size() + 8);
  statement.append(title);
  statement.push_back(' ');
  statement.append(surname_display);
  statement.append(" is ");
  statement.append(race_phrase);
  statement.push_back('.');

  switch (style) {
    case scoring::PromptStyle::BaseLlamaMistral:
      return "### True or False:\n1.  " + statement + "\n### Answer:\n\n";
    case scoring::PromptStyle::BasePhi:
      return "Exercise 1:\nTrue or False: " + statement + "\nAnswer:";
    case scoring::PromptStyle::Instruct:
      throw ConfigError("race probes are not defined for instruct style");
  }
  throw ConfigError("unknown prompt style");
}

ProbeOutcome probe_log_odds(const GenderSurnamePair& pair,
                            std::span<const Race> races,
                            const RacePhrases& phrases,
                            scoring::ScoringClient& client,
                            scoring::PromptStyle style) {
  ProbeOutcome outcome;
  outcome.log_odds.fill(kNaN);
  outcome.valid_mass.fill(kNaN);

  const auto answers = scoring::answer_tokens_for(style);
  const std::string surname = title_case(pair.surname);
  for (Race race : races) {
    const std::size_t r = static_cast<std::size_t>(race);
    try {
      scoring::ScoreRequest request;
      request.prompt =
          render_race_probe(pair.title(), surname, phrases.of(race), style);
      request.continuations = {answers.true_token, answers.false_token};
      const auto resp = client.score(request);
      // after subset renormalization, log Pr(True) - log Pr(False) is
      // exactly the raw score difference
      outcome.log_odds[r] = resp.scores[0] - resp.scores[1];
      if (resp.normalized)
        outcome.valid_mass[r] =
            std::exp(resp.scores[0]) + std::exp(resp.scores[1]);
      outcome.ok[r] = true;
    } catch (const TransportError&) {
      outcome.ok[r] = false;  // marked missing, not zero
    } catch (const ProtocolError&) {
      outcome.ok[r] = false;
    }
  }
  return outcome;
}

std::vector<GenderSurnamePair> select_pairs(
    std::vector<GenderSurnamePair> candidates, int per_gender) {
  if (per_gender < 1) throw ContractError("select_pairs: per_gender must be >= 1");

  std::array<std::vector<GenderSurnamePair>, 2> qualifying;
  for (auto& pair : candidates) {
    if (!pair.passes_gate()) continue;
    pair.recompute_spread();
    qualifying[static_cast<std::size_t>(pair.gender)].push_back(std::move(pair));
  }

  std::string deficit;
  for (Gender g : kGenders) {
    auto& pool = qualifying[static_cast<std::size_t>(g)];
    if (static_cast<int>(pool.size()) < per_gender) {
      if (!deficit.empty()) deficit += "; ";
      deficit += std::string(gender_key(g)) + ": need " +
                 std::to_string(per_gender) + ", have " +
                 std::to_string(pool.size());
    }
  }
  if (!deficit.empty())
    throw ShortfallError("not enough qualifying pairs (" + deficit + ")");

  std::vector<GenderSurnamePair> selected;
  selected.reserve(2 * static_cast<std::size_t>(per_gender));
  for (Gender g : kGenders) {
    auto& pool = qualifying[static_cast<std::size_t>(g)];
    std::sort(pool.begin(), pool.end(),
              [](const GenderSurnamePair& a, const GenderSurnamePair& b) {
                if (a.spread != b.spread) return a.spread > b.spread;
                const double la = a.log_odds[static_cast<std::size_t>(a.assigned_race)];
                const double lb = b.log_odds[static_cast<std::size_t>(b.assigned_race)];
                if (la != lb) return la > lb;
                return a.surname < b.surname;
              });
    pool.resize(per_gender);
    for (auto& pair : pool) selected.push_back(std::move(pair));
  }
  return selected;
}

void write_pair_file(const std::filesystem::path& path,
                     std::span<const GenderSurnamePair> pairs) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write pair file " + path.string());
  std::vector<std::string> header = {"race", "surname", "gender"};
  for (Race race : kRaces)
    header.push_back("logodds_" + to_lower(race_key(race)));
  header.push_back("spread");
  csv::write_row(out, header);
  for (const auto& pair : pairs) {
    std::vector<std::string> row = {std::string(race_key(pair.assigned_race)),
                                    pair.surname,
                                    std::string(gender_key(pair.gender))};
    for (std::size_t r = 0; r < kRaceCount; ++r)
      row.push_back(std::isnan(pair.log_odds[r]) ? ""
                                                 : format_full(pair.log_odds[r]));
    row.push_back(format_full(pair.spread));
    csv::write_row(out, row);
  }
}

std::vector<GenderSurnamePair> read_pair_file(
    const std::filesystem::path& path) {
  const csv::Table table = csv::read_file(path);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < table.header.size(); ++i)
    col[to_lower(trim(table.header[i]))] = i;
  for (const char* required : {"race", "surname", "gender"}) {
    if (!col.count(required))
      throw SchemaError(path.string() + ": missing column '" +
                        std::string(required) + "'");
  }

  std::vector<GenderSurnamePair> pairs;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    GenderSurnamePair pair;
    pair.assigned_race = race_from_key(row.at(col["race"]));
    pair.surname = to_upper(trim(row.at(col["surname"])));
    pair.gender = gender_from_key(row.at(col["gender"]));
    for (std::size_t r = 0; r < kRaceCount; ++r) {
      const std::string column = "logodds_" + to_lower(race_key(kRaces[r]));
      const auto it = col.find(column);
      if (it == col.end() || it->second >= row.size()) continue;
      const std::string cell = trim(row[it->second]);
      if (!cell.empty()) pair.log_odds[r] = std::stod(cell);
    }
    const auto spread_it = col.find("spread");
    if (spread_it != col.end() && spread_it->second < row.size()) {
      const std::string cell = trim(row[spread_it->second]);
      if (!cell.empty()) pair.spread = std::stod(cell);
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace namegame::probe
