#include "namegame/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "namegame/csv.hpp"
#include "namegame/stats.hpp"

namespace namegame::runner {

std::string group_label(const Group& g) {
  return std::string(race_key(g.race)) + "-" + std::string(gender_key(g.gender));
}

std::string group_dir_label(const Group& g) {
  return to_lower(race_key(g.race)) + "_" + to_lower(gender_key(g.gender));
}

Group group_from_label(std::string_view label) {
  const auto sep = label.find_last_of("-,_/ ");
  if (sep == std::string_view::npos)
    throw ConfigError("group label must look like 'White-M': '" +
                      std::string(label) + "'");
  return Group{race_from_key(label.substr(0, sep)),
               gender_from_key(label.substr(sep + 1))};
}

std::array<Group, 10> trustee_groups() {
  std::array<Group, 10> groups;
  std::size_t k = 0;
  for (Race race : kRaces)
    for (Gender gender : kGenders) groups[k++] = Group{race, gender};
  return groups;
}

void ExperimentDesign::validate() const {
  if (pairs_per_group < 2)
    throw DesignError("pairs_per_group must be at least 2");
  if (amt_a <= 0) throw DesignError("amt_a must be positive");
  if (amt_b < 0) throw DesignError("amt_b must be non-negative");
}

std::vector<std::pair<int, int>> enumerate_game_indices(int n) {
  if (n < 2) throw DesignError("need at least 2 pairs per group");
  std::vector<std::pair<int, int>> indices;
  indices.reserve(static_cast<std::size_t>(n) * (n - 1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) indices.emplace_back(i, j);
  return indices;
}

std::vector<game::GameSpec> enumerate_games(
    std::span<const probe::GenderSurnamePair> investor_pairs,
    std::span<const probe::GenderSurnamePair> trustee_pairs, int amt_a,
    int amt_b, scoring::PromptStyle style) {
  if (investor_pairs.size() != trustee_pairs.size())
    throw DesignError("investor and trustee lists must have equal length (" +
                      std::to_string(investor_pairs.size()) + " vs " +
                      std::to_string(trustee_pairs.size()) + ")");
  const auto indices = enumerate_game_indices(static_cast<int>(investor_pairs.size()));
  std::vector<game::GameSpec> games;
  games.reserve(indices.size());
  for (const auto& [i, j] : indices) {
    game::GameSpec spec;
    spec.investor = game::Player::from_pair(investor_pairs[i]);
    spec.trustee = game::Player::from_pair(trustee_pairs[j]);
    spec.amt_a = amt_a;
    spec.amt_b = amt_b;
    spec.style = style;
    games.push_back(std::move(spec));
  }
  return games;
}

std::vector<probe::GenderSurnamePair>& PairSet::group(const Group& g) {
  const std::size_t idx =
      static_cast<std::size_t>(g.race) * 2 + static_cast<std::size_t>(g.gender);
  return by_group[idx];
}

const std::vector<probe::GenderSurnamePair>& PairSet::group(const Group& g) const {
  const std::size_t idx =
      static_cast<std::size_t>(g.race) * 2 + static_cast<std::size_t>(g.gender);
  return by_group[idx];
}

PairSet PairSet::from_pairs(std::span<const probe::GenderSurnamePair> pairs) {
  PairSet set;
  for (const auto& pair : pairs)
    set.group(Group{pair.assigned_race, pair.gender}).push_back(pair);
  return set;
}

PairSet PairSet::from_file(const std::filesystem::path& path) {
  return from_pairs(probe::read_pair_file(path));
}

void PairSet::validate_counts(int pairs_per_group) const {
  for (const Group& g : trustee_groups()) {
    const auto& pairs = group(g);
    if (static_cast<int>(pairs.size()) != pairs_per_group)
      throw DesignError("group " + group_label(g) + " has " +
                        std::to_string(pairs.size()) + " pairs, expected " +
                        std::to_string(pairs_per_group));
  }
}

std::size_t CellResult::failure_count() const {
  std::size_t n = 0;
  for (const auto& record : outcomes) n += record.failed ? 1 : 0;
  return n;
}

void CellResult::recompute_moments() {
  std::vector<double> means;
  means.reserve(outcomes.size());
  for (const auto& record : outcomes)
    if (!record.failed) means.push_back(record.mean);
  if (means.empty()) {
    mean = 0.0;
    stddev = 0.0;
    return;
  }
  mean = stats::mean(means);
  stddev = means.size() > 1 ? std::sqrt(stats::sample_variance(means)) : 0.0;
}

std::size_t ExperimentResult::failure_count() const {
  std::size_t n = 0;
  for (const auto& cell : cells) n += cell.failure_count();
  return n;
}

bool ExperimentResult::complete() const {
  return !cells.empty() && failure_count() == 0;
}

ExperimentResult run_experiment(const ExperimentDesign& design,
                                const PairSet& pairs,
                                scoring::ScoringClient& client,
                                const game::TemplateSet& templates) {
  design.validate();
  pairs.validate_counts(design.pairs_per_group);

  const auto& investor_pairs = pairs.group(design.investor_group);
  const auto indices = enumerate_game_indices(design.pairs_per_group);
  const auto groups = trustee_groups();

  ExperimentResult result;
  result.investor_group = design.investor_group;
  result.cells.resize(groups.size());

  struct Task {
    std::size_t cell;
    std::size_t slot;
  };
  std::vector<Task> tasks;
  tasks.reserve(groups.size() * indices.size());

  for (std::size_t c = 0; c < groups.size(); ++c) {
    auto& cell = result.cells[c];
    cell.trustee_group = groups[c];
    cell.outcomes.resize(indices.size());
    const auto& trustee_pairs = pairs.group(groups[c]);
    for (std::size_t s = 0; s < indices.size(); ++s) {
      auto& record = cell.outcomes[s];
      record.cell = groups[c];
      record.i = indices[s].first;
      record.j = indices[s].second;
      record.investor_surname = investor_pairs[record.i].surname;
      record.investor_gender = investor_pairs[record.i].gender;
      record.trustee_surname = trustee_pairs[record.j].surname;
      record.trustee_gender = trustee_pairs[record.j].gender;
      tasks.push_back({c, s});
    }
  }

  scoring::parallel_for(
      tasks.size(), client.config().max_parallel, [&](std::size_t t) {
        const Task& task = tasks[t];
        GameRecord& record = result.cells[task.cell].outcomes[task.slot];
        const auto& trustee_pairs = pairs.group(result.cells[task.cell].trustee_group);

        game::GameSpec spec;
        spec.investor = game::Player::from_pair(investor_pairs[record.i]);
        spec.trustee = game::Player::from_pair(trustee_pairs[record.j]);
        spec.amt_a = design.amt_a;
        spec.amt_b = design.amt_b;
        spec.style = design.style;
        try {
          if (design.gate_on_verification) {
            const auto verification = game::verify_prompt(spec, client, templates);
            if (!verification.pass) {
              record.failed = true;
              record.fail_reason = "verification failed";
              return;
            }
          }
          const auto outcome = game::predict_investment(spec, client, templates);
          record.probs.reserve(outcome.distribution.entries.size());
          for (const auto& entry : outcome.distribution.entries)
            record.probs.push_back(entry.probability);
          record.mean = outcome.mean;
        } catch (const Error& e) {
          record.failed = true;
          record.fail_reason = e.what();
        }
      });

  for (auto& cell : result.cells) cell.recompute_moments();
  return result;
}

void write_outcomes_csv(const ExperimentResult& result, int amt_a,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write outcomes file " + path.string());
  std::vector<std::string> header = {
      "investor_race",   "cell_race",       "cell_gender",
      "i",               "j",               "investor_surname",
      "investor_gender", "trustee_surname", "trustee_gender",
      "failed",          "fail_reason",     "mean"};
  for (int v = 0; v <= amt_a; ++v) header.push_back("p" + std::to_string(v));
  csv::write_row(out, header);

  for (const auto& cell : result.cells) {
    for (const auto& record : cell.outcomes) {
      std::vector<std::string> row = {
          std::string(race_key(result.investor_group.race)),
          std::string(race_key(record.cell.race)),
          std::string(gender_key(record.cell.gender)),
          std::to_string(record.i),
          std::to_string(record.j),
          record.investor_surname,
          std::string(gender_key(record.investor_gender)),
          record.trustee_surname,
          std::string(gender_key(record.trustee_gender)),
          record.failed ? "1" : "0",
          record.fail_reason,
          record.failed ? "" : format_full(record.mean)};
      for (int v = 0; v <= amt_a; ++v) {
        row.push_back(record.failed || v >= static_cast<int>(record.probs.size())
                          ? ""
                          : format_full(record.probs[v]));
      }
      csv::write_row(out, row);
    }
  }
}

ExperimentResult read_outcomes_csv(const std::filesystem::path& path) {
  const csv::Table table = csv::read_file(path);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < table.header.size(); ++i)
    col[table.header[i]] = i;
  for (const char* required :
       {"cell_race", "cell_gender", "i", "j", "investor_surname",
        "investor_gender", "trustee_surname", "trustee_gender", "failed",
        "mean"}) {
    if (!col.count(required))
      throw SchemaError(path.string() + ": missing column '" +
                        std::string(required) + "'");
  }
  std::vector<std::size_t> prob_cols;
  for (int v = 0;; ++v) {
    const auto it = col.find("p" + std::to_string(v));
    if (it == col.end()) break;
    prob_cols.push_back(it->second);
  }

  std::map<std::pair<int, int>, CellResult> cells;  // keyed by (race, gender)
  Group investor_group;
  bool have_investor_group = false;
  for (const auto& row : table.rows) {
    GameRecord record;
    if (col.count("investor_race")) {
      investor_group.race = race_from_key(row.at(col["investor_race"]));
      investor_group.gender = gender_from_key(row.at(col["investor_gender"]));
      have_investor_group = true;
    }
    record.cell.race = race_from_key(row.at(col["cell_race"]));
    record.cell.gender = gender_from_key(row.at(col["cell_gender"]));
    record.i = std::stoi(row.at(col["i"]));
    record.j = std::stoi(row.at(col["j"]));
    record.investor_surname = row.at(col["investor_surname"]);
    record.investor_gender = gender_from_key(row.at(col["investor_gender"]));
    record.trustee_surname = row.at(col["trustee_surname"]);
    record.trustee_gender = gender_from_key(row.at(col["trustee_gender"]));
    record.failed = row.at(col["failed"]) == "1";
    if (col.count("fail_reason")) record.fail_reason = row.at(col["fail_reason"]);
    if (!record.failed) {
      record.mean = std::stod(row.at(col["mean"]));
      for (std::size_t pc : prob_cols) {
        const std::string& cell_value = row.at(pc);
        if (!cell_value.empty()) record.probs.push_back(std::stod(cell_value));
      }
    }
    const std::pair<int, int> key{static_cast<int>(record.cell.race),
                                  static_cast<int>(record.cell.gender)};
    auto& cell = cells[key];
    cell.trustee_group = record.cell;
    cell.outcomes.push_back(std::move(record));
  }

  ExperimentResult result;
  for (const Group& g : trustee_groups()) {
    const std::pair<int, int> key{static_cast<int>(g.race),
                                  static_cast<int>(g.gender)};
    const auto it = cells.find(key);
    if (it == cells.end()) continue;
    it->second.recompute_moments();
    result.cells.push_back(std::move(it->second));
  }
  if (have_investor_group) result.investor_group = investor_group;
  return result;
}

void export_matrix_csv(const CellResult& cell,
                       std::span<const probe::GenderSurnamePair> investor_pairs,
                       std::span<const probe::GenderSurnamePair> trustee_pairs,
                       const std::filesystem::path& path) {
  const int n = static_cast<int>(investor_pairs.size());
  std::vector<std::vector<std::string>> grid(
      n, std::vector<std::string>(trustee_pairs.size()));
  for (const auto& record : cell.outcomes) {
    if (record.i < 0 || record.i >= n || record.j < 0 ||
        record.j >= static_cast<int>(trustee_pairs.size()))
      throw DataIntegrityError("matrix export: record index out of range");
    grid[record.i][record.j] =
        record.failed ? "" : format_fixed(record.mean, 4);
  }

  std::ofstream out(path);
  if (!out) throw Error("cannot write matrix file " + path.string());

  std::vector<std::string> surname_row = {"Surname", ""};
  std::vector<std::string> gender_row = {"Gender", ""};
  for (const auto& pair : trustee_pairs) {
    surname_row.push_back(title_case(pair.surname));
    gender_row.push_back(std::string(gender_key(pair.gender)));
  }
  csv::write_row(out, surname_row);
  csv::write_row(out, gender_row);
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> row = {title_case(investor_pairs[i].surname),
                                    std::string(gender_key(investor_pairs[i].gender))};
    for (const auto& value : grid[i]) row.push_back(value);
    csv::write_row(out, row);
  }
}

}  // namespace namegame::runner
