#include "namegame/commands.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "namegame/census.hpp"
#include "namegame/csv.hpp"
#include "namegame/game.hpp"
#include "namegame/plot.hpp"
#include "namegame/stats.hpp"

namespace namegame::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error)) return kExitConfig;
  if (dynamic_cast<const SchemaError*>(&error)) return kExitConfig;
  if (dynamic_cast<const TransportError*>(&error)) return kExitBackend;
  if (dynamic_cast<const ProtocolError*>(&error)) return kExitBackend;
  if (dynamic_cast<const DesignError*>(&error)) return kExitDesign;
  if (dynamic_cast<const ShortfallError*>(&error)) return kExitShortfall;
  return kExitFailure;
}

namespace {

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string file_sha256(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return scoring::sha256_hex(data);
}

// Exclusive lock marker; a second invocation on the same run directory is
// rejected until the holder releases it.
class RunLock {
 public:
  explicit RunLock(const fs::path& run_dir) : path_(run_dir / ".lock") {
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      if (errno == EEXIST)
        throw Error("run directory is locked by another invocation: " +
                    run_dir.string());
      throw Error("cannot create lock marker " + path_.string());
    }
    ::close(fd);
  }
  ~RunLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  fs::path path_;
};

void require_file(const fs::path& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " not configured");
  if (!fs::exists(path))
    throw ConfigError(what + " does not exist: " + path.string());
}

scoring::ScoringClient make_client(const RunConfig& config) {
  auto backend = scoring::make_backend(config.backend);
  return scoring::ScoringClient(std::move(backend), config.backend);
}

// external seed additions: CSV with columns race,surname
std::array<std::vector<std::string>, kRaceCount> load_extra_seeds(
    const fs::path& path) {
  std::array<std::vector<std::string>, kRaceCount> extra;
  const csv::Table table = csv::read_file(path);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < table.header.size(); ++i)
    col[to_lower(trim(table.header[i]))] = i;
  if (!col.count("race") || !col.count("surname"))
    throw SchemaError(path.string() + ": needs columns race,surname");
  for (const auto& row : table.rows) {
    const Race race = race_from_key(row.at(col["race"]));
    extra[static_cast<std::size_t>(race)].push_back(
        to_upper(trim(row.at(col["surname"]))));
  }
  return extra;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  json doc;
  in >> doc;
  return doc;
}

}  // namespace

// ---------------------------------------------------------------------------
// curate

fs::path cmd_curate(const RunConfig& config) {
  require_file(config.census_path, "census file");

  // parse + curate fully before touching the output directory
  auto records = census::parse_census(config.census_path);
  std::map<std::string, census::SurnameRecord> raw_by_surname;
  for (const auto& rec : records) raw_by_surname.emplace(rec.surname, rec);
  const census::CurationResult curation = census::curate(std::move(records));

  const fs::path out_dir = config.run_dir() / "curation";
  fs::create_directories(out_dir);

  for (const auto& posterior : curation.assigned) {
    const fs::path path =
        out_dir / ("ranked_" + to_lower(race_key(posterior.race)) + ".csv");
    census::write_ranked_csv(posterior, config.top_k, path);
  }

  // Table-2-style summary: top 3 per race with the original census
  // composition
  {
    std::ofstream out(out_dir / "top3_summary.csv");
    if (!out) throw Error("cannot write top3_summary.csv");
    std::vector<std::string> header = {"race", "rank", "surname", "count"};
    for (Race race : kRaces)
      header.push_back(std::string(race_census_column(race)));
    csv::write_row(out, header);
    for (const auto& posterior : curation.assigned) {
      const auto top = census::top_k(posterior, 3);
      for (std::size_t i = 0; i < top.size(); ++i) {
        const auto& raw = raw_by_surname.at(top[i]);
        std::vector<std::string> row = {std::string(race_key(posterior.race)),
                                        std::to_string(i + 1),
                                        title_case(top[i]),
                                        std::to_string(raw.count)};
        for (std::size_t r = 0; r < kRaceCount; ++r)
          row.push_back(raw.suppressed[r] ? "(S)" : format_fixed(raw.pct[r], 2));
        csv::write_row(out, row);
      }
    }
  }

  if (!curation.excluded.empty()) {
    std::ofstream out(out_dir / "excluded.log");
    for (const auto& surname : curation.excluded)
      out << surname << ": all five race percentages zero after imputation\n";
  }
  return out_dir;
}

// ---------------------------------------------------------------------------
// probe

fs::path cmd_probe(const RunConfig& config) {
  require_file(config.census_path, "census file");
  config.backend.validate();
  if (config.backend.prompt_style == scoring::PromptStyle::Instruct)
    throw ConfigError(
        "race probes need a base prompt style; instruct runs reuse the base "
        "model's pair file");
  if (config.extra_seed_path) require_file(*config.extra_seed_path, "extra seed file");

  auto records = census::parse_census(config.census_path);
  const census::CurationResult curation = census::curate(std::move(records));

  std::array<std::vector<std::string>, kRaceCount> extra;
  if (config.extra_seed_path) extra = load_extra_seeds(*config.extra_seed_path);

  auto client = make_client(config);

  // candidates: every seed surname x both genders, per race
  std::vector<probe::GenderSurnamePair> candidates;
  for (std::size_t r = 0; r < kRaceCount; ++r) {
    const probe::SeedList seeds = probe::build_seed_list(
        curation.assigned[r], extra[r], config.seed_top_n);
    for (const auto& surname : seeds.surnames) {
      for (Gender gender : kGenders) {
        probe::GenderSurnamePair pair;
        pair.surname = surname;
        pair.gender = gender;
        pair.assigned_race = kRaces[r];
        candidates.push_back(std::move(pair));
      }
    }
  }

  scoring::parallel_for(
      candidates.size(), config.backend.max_parallel, [&](std::size_t i) {
        auto& pair = candidates[i];
        const auto outcome =
            probe::probe_log_odds(pair, kRaces, config.race_phrases, client,
                                  config.backend.prompt_style);
        pair.log_odds = outcome.log_odds;
        pair.valid_mass = outcome.valid_mass;
        pair.recompute_spread();
      });

  const fs::path out_dir = config.run_dir() / "probe";
  fs::create_directories(out_dir);

  // probe log: every candidate with raw measurements, before selection
  {
    std::ofstream out(out_dir / "probe_log.csv");
    if (!out) throw Error("cannot write probe_log.csv");
    std::vector<std::string> header = {"race", "surname", "gender"};
    for (Race race : kRaces)
      header.push_back("logodds_" + to_lower(race_key(race)));
    for (Race race : kRaces)
      header.push_back("validmass_" + to_lower(race_key(race)));
    header.push_back("spread");
    header.push_back("passes_gate");
    csv::write_row(out, header);
    for (const auto& pair : candidates) {
      std::vector<std::string> row = {std::string(race_key(pair.assigned_race)),
                                      pair.surname,
                                      std::string(gender_key(pair.gender))};
      for (double v : pair.log_odds)
        row.push_back(std::isnan(v) ? "" : format_full(v));
      for (double v : pair.valid_mass)
        row.push_back(std::isnan(v) ? "" : format_full(v));
      row.push_back(format_full(pair.spread));
      row.push_back(pair.passes_gate() ? "1" : "0");
      csv::write_row(out, row);
    }
  }

  // per-race selection; a shortfall anywhere fails the command after the
  // probe log is persisted
  std::vector<probe::GenderSurnamePair> selected;
  std::string shortfall;
  for (std::size_t r = 0; r < kRaceCount; ++r) {
    std::vector<probe::GenderSurnamePair> race_candidates;
    for (const auto& pair : candidates)
      if (pair.assigned_race == kRaces[r]) race_candidates.push_back(pair);
    try {
      auto picked = probe::select_pairs(std::move(race_candidates),
                                        config.per_gender);
      selected.insert(selected.end(), picked.begin(), picked.end());
    } catch (const ShortfallError& e) {
      if (!shortfall.empty()) shortfall += "; ";
      shortfall += std::string(race_key(kRaces[r])) + ": " + e.what();
    }
  }
  if (!shortfall.empty()) throw ShortfallError(shortfall);

  const fs::path pair_path =
      config.pair_file ? *config.pair_file : out_dir / "pairs.csv";
  if (pair_path.has_parent_path()) fs::create_directories(pair_path.parent_path());
  probe::write_pair_file(pair_path, selected);
  return pair_path;
}

// ---------------------------------------------------------------------------
// verify

fs::path cmd_verify(const RunConfig& config) {
  if (!config.pair_file) throw ConfigError("pair_file not configured");
  require_file(*config.pair_file, "pair file");
  config.backend.validate();
  if (config.verify_per_cell < 1)
    throw ConfigError("verify_per_cell must be >= 1");

  const runner::PairSet pairs = runner::PairSet::from_file(*config.pair_file);
  pairs.validate_counts(config.pairs_per_group);
  const auto templates = config.templates();
  auto client = make_client(config);

  const fs::path out_dir = config.run_dir() / "verification";
  fs::create_directories(out_dir);

  std::ofstream out(out_dir / "report.csv");
  if (!out) throw Error("cannot write verification report");
  csv::write_row(out, {"investor_group", "trustee_group", "investor", "trustee",
                       "amt", "q1", "q2", "q3", "note"});

  const auto indices = runner::enumerate_game_indices(config.pairs_per_group);
  std::size_t total_rows = 0, passed_rows = 0;
  json details = json::array();

  for (const auto& investor_group : config.investor_groups) {
    const auto& investor_pairs = pairs.group(investor_group);
    for (const auto& trustee_group : runner::trustee_groups()) {
      const auto& trustee_pairs = pairs.group(trustee_group);
      const int sample = std::min<int>(config.verify_per_cell,
                                       static_cast<int>(indices.size()));
      for (int s = 0; s < sample; ++s) {
        const auto [i, j] = indices[s];
        game::GameSpec spec;
        spec.investor = game::Player::from_pair(investor_pairs[i]);
        spec.trustee = game::Player::from_pair(trustee_pairs[j]);
        spec.amt_a = config.amt_a;
        spec.amt_b = config.amt_b;
        spec.style = config.backend.prompt_style;

        const auto report = game::verify_prompt(spec, client, templates);
        for (const auto& row : report.per_amt) {
          ++total_rows;
          const bool ok = row.q1_ok && row.q2_ok && row.q3_ok;
          passed_rows += ok ? 1 : 0;
          csv::write_row(out, {runner::group_label(investor_group),
                               runner::group_label(trustee_group),
                               spec.investor.display, spec.trustee.display,
                               std::to_string(row.amt), row.q1_ok ? "1" : "0",
                               row.q2_ok ? "1" : "0", row.q3_ok ? "1" : "0",
                               row.note});
        }
        details.push_back({{"investor_group", runner::group_label(investor_group)},
                           {"trustee_group", runner::group_label(trustee_group)},
                           {"investor", spec.investor.display},
                           {"trustee", spec.trustee.display},
                           {"pass", report.pass}});
      }
    }
  }

  const double pass_rate =
      total_rows == 0 ? 0.0
                      : static_cast<double>(passed_rows) /
                            static_cast<double>(total_rows);
  write_json(out_dir / "report.json",
             {{"rows", total_rows},
              {"passed", passed_rows},
              {"pass_rate", pass_rate},
              {"pairings", std::move(details)}});
  return out_dir;
}

// ---------------------------------------------------------------------------
// run

fs::path cmd_run(const RunConfig& config) {
  if (!config.pair_file) throw ConfigError("pair_file not configured");
  require_file(*config.pair_file, "pair file");
  config.backend.validate();
  if (config.investor_groups.empty())
    throw ConfigError("investor_groups must not be empty");

  const runner::PairSet pairs = runner::PairSet::from_file(*config.pair_file);
  pairs.validate_counts(config.pairs_per_group);
  const auto templates = config.templates();

  const fs::path run_dir = config.run_dir();
  fs::create_directories(run_dir);
  RunLock lock(run_dir);

  auto client = make_client(config);

  json manifest = {
      {"run_id", config.run_id},
      {"model_id", config.model_id},
      {"created_at", now_iso8601()},
      {"config", config.to_json()},
      {"pair_file", config.pair_file->string()},
      {"pair_file_sha256", file_sha256(*config.pair_file)},
      {"status", "running"},
  };
  write_json(run_dir / "manifest.json", manifest);

  json experiments = json::array();
  json failed_games = json::array();
  std::size_t total_failures = 0;

  for (const auto& investor_group : config.investor_groups) {
    runner::ExperimentDesign design;
    design.investor_group = investor_group;
    design.pairs_per_group = config.pairs_per_group;
    design.amt_a = config.amt_a;
    design.amt_b = config.amt_b;
    design.style = config.backend.prompt_style;
    design.model_id = config.model_id;
    design.gate_on_verification = config.gate_on_verification;

    const auto result = runner::run_experiment(design, pairs, client, templates);
    total_failures += result.failure_count();

    const std::string label = runner::group_dir_label(investor_group);
    const fs::path exp_dir = run_dir / label;
    fs::create_directories(exp_dir / "matrices");

    // raw outcomes persist before any aggregation
    runner::write_outcomes_csv(result, config.amt_a, exp_dir / "outcomes.csv");

    json cells = json::array();
    for (const auto& cell : result.cells) {
      runner::export_matrix_csv(
          cell, pairs.group(investor_group), pairs.group(cell.trustee_group),
          exp_dir / "matrices" /
              (runner::group_dir_label(cell.trustee_group) + ".csv"));
      cells.push_back({{"trustee_group", runner::group_label(cell.trustee_group)},
                       {"games", cell.outcomes.size()},
                       {"failures", cell.failure_count()},
                       {"mean", cell.mean},
                       {"stddev", cell.stddev}});
    }
    experiments.push_back({{"investor_group", runner::group_label(investor_group)},
                           {"directory", label},
                           {"games_per_cell", design.games_per_cell()},
                           {"cells", std::move(cells)}});
  }

  manifest["experiments"] = std::move(experiments);
  manifest["finished_at"] = now_iso8601();
  manifest["status"] = total_failures == 0 ? "complete" : "incomplete";
  manifest["failures"] = total_failures;
  manifest["backend"] = {{"calls", client.backend_calls()},
                         {"cache_hits", client.cache_hits()}};
  write_json(run_dir / "manifest.json", manifest);
  return run_dir;
}

// ---------------------------------------------------------------------------
// analyze

namespace {

struct ExperimentTables {
  std::string label;  // directory label, e.g. "white_m"
  std::string investor;
  json summary;
};

ExperimentTables analyze_experiment(const RunConfig& config,
                                    const fs::path& exp_dir,
                                    const std::string& investor_label,
                                    const fs::path& out_dir) {
  const auto result = runner::read_outcomes_csv(exp_dir / "outcomes.csv");
  const std::string label = exp_dir.filename().string();

  const std::size_t failures = result.failure_count();
  std::size_t games = 0;
  for (const auto& cell : result.cells) games += cell.outcomes.size();
  if (failures > 0 && !config.allow_incomplete)
    throw DesignError("experiment " + label + " is incomplete (" +
                      std::to_string(failures) +
                      " failed games); pass --allow-incomplete to analyze anyway");

  // observations: one per successful game, keyed by trustee group
  std::vector<stats::Observation> observations;
  std::vector<stats::CellData> cell_data;
  observations.reserve(games);
  for (const auto& cell : result.cells) {
    stats::CellData data;
    data.race = cell.trustee_group.race;
    data.gender = cell.trustee_group.gender;
    for (const auto& record : cell.outcomes) {
      if (record.failed) continue;
      observations.push_back(
          {cell.trustee_group.gender, cell.trustee_group.race, record.mean});
      data.values.push_back(record.mean);
    }
    cell_data.push_back(std::move(data));
  }

  json summary;
  summary["investor_group"] = investor_label;
  summary["observations"] = observations.size();
  summary["failures"] = failures;

  // ANOVA (balanced only; incomplete data reports it unavailable)
  bool anova_done = false;
  try {
    const stats::AnovaTable table = stats::two_way_anova(observations);
    anova_done = true;
    std::ofstream out(out_dir / ("anova_" + label + ".csv"));
    if (!out) throw Error("cannot write anova table");
    csv::write_row(out, {"effect", "sum_of_squares", "df", "mean_square", "F",
                         "p", "significant"});
    const auto emit = [&](const std::string& name, const stats::EffectRow& row) {
      csv::write_row(out, {name, format_full(row.ss), std::to_string(row.df),
                           format_full(row.ms), format_full(row.F),
                           format_full(row.p),
                           row.p < config.alpha_anova ? "1" : "0"});
      summary["anova"][name] = {{"ss", row.ss}, {"df", row.df},
                                {"ms", row.ms}, {"F", row.F},
                                {"p", row.p},
                                {"significant", row.p < config.alpha_anova}};
    };
    emit("gender", table.gender);
    emit("race", table.race);
    emit("interaction", table.interaction);
    csv::write_row(out, {"residual", format_full(table.ss_residual),
                         std::to_string(table.df_residual),
                         format_full(table.ms_residual), "", "", ""});
    csv::write_row(out, {"total", format_full(table.ss_total),
                         std::to_string(table.df_total), "", "", "", ""});
    summary["anova"]["residual"] = {{"ss", table.ss_residual},
                                    {"df", table.df_residual},
                                    {"ms", table.ms_residual}};
    summary["anova"]["total"] = {{"ss", table.ss_total},
                                 {"df", table.df_total}};
  } catch (const DesignError& e) {
    if (!config.allow_incomplete) throw;
    summary["anova"] = {{"skipped", e.what()}};
  }
  (void)anova_done;

  // post-hoc gender contrasts within each trustee race: Female minus Male
  {
    std::ofstream out(out_dir / ("posthoc_" + label + ".csv"));
    if (!out) throw Error("cannot write posthoc table");
    csv::write_row(out, {"trustee_race", "t", "df", "p", "cohens_d",
                         "mean_diff_f_minus_m", "significant"});
    for (Race race : kRaces) {
      const std::vector<double>*female = nullptr, *male = nullptr;
      for (const auto& data : cell_data) {
        if (data.race != race) continue;
        if (data.gender == Gender::F) female = &data.values;
        else male = &data.values;
      }
      if (!female || !male || female->size() < 2 || male->size() < 2) {
        csv::write_row(out, {std::string(race_key(race)), "", "", "", "", "",
                             "insufficient data"});
        continue;
      }
      const auto t = stats::t_test(*female, *male,
                                   std::string(race_key(race)) + "-F",
                                   std::string(race_key(race)) + "-M");
      csv::write_row(out, {std::string(race_key(race)), format_full(t.t),
                           std::to_string(t.df), format_full(t.p),
                           format_full(t.cohens_d), format_full(t.mean_diff),
                           t.p < config.alpha_posthoc ? "1" : "0"});
      summary["posthoc"][std::string(race_key(race))] = {
          {"t", t.t},       {"df", t.df},
          {"p", t.p},       {"cohens_d", t.cohens_d},
          {"mean_diff", t.mean_diff},
          {"significant", t.p < config.alpha_posthoc}};
    }
  }

  // interaction summary + plot
  const auto summaries = stats::interaction_summary(cell_data);
  {
    std::ofstream out(out_dir / ("interaction_" + label + ".csv"));
    if (!out) throw Error("cannot write interaction table");
    csv::write_row(out, {"trustee_race", "trustee_gender", "n", "mean",
                         "stddev", "ci95_half_width"});
    for (const auto& s : summaries) {
      csv::write_row(out, {std::string(race_key(s.race)),
                           std::string(gender_key(s.gender)),
                           std::to_string(s.n), format_full(s.mean),
                           format_full(s.stddev),
                           format_full(s.ci_half_width)});
      summary["cells"][std::string(race_key(s.race))]
             [std::string(gender_key(s.gender))] = {
                 {"n", s.n},
                 {"mean", s.mean},
                 {"stddev", s.stddev},
                 {"ci95_half_width", s.ci_half_width}};
    }
  }
  {
    plot::InteractionPlot figure;
    figure.title = investor_label + " investors";
    for (const auto& s : summaries) {
      auto& series = s.gender == Gender::M ? figure.male : figure.female;
      series[static_cast<std::size_t>(s.race)] = {s.mean, s.ci_half_width};
    }
    plot::write_svg(figure, out_dir / ("interaction_" + label + ".svg"));
  }

  return {label, investor_label, std::move(summary)};
}

}  // namespace

fs::path cmd_analyze(const RunConfig& config, const fs::path& run_dir) {
  require_file(run_dir / "manifest.json", "run manifest");
  const json manifest = read_json(run_dir / "manifest.json");
  if (!manifest.contains("experiments"))
    throw Error("run manifest has no experiments; did the run finish?");

  const fs::path out_dir = run_dir / "analysis";
  fs::create_directories(out_dir);

  json summary;
  summary["run_id"] = manifest.value("run_id", "");
  summary["model_id"] = manifest.value("model_id", "");
  summary["alpha_anova"] = config.alpha_anova;
  summary["alpha_posthoc"] = config.alpha_posthoc;
  summary["experiments"] = json::array();

  for (const auto& exp : manifest["experiments"]) {
    const std::string dir_label = exp.at("directory").get<std::string>();
    const std::string investor = exp.at("investor_group").get<std::string>();
    auto tables =
        analyze_experiment(config, run_dir / dir_label, investor, out_dir);
    tables.summary["directory"] = dir_label;
    summary["experiments"].push_back(std::move(tables.summary));
  }

  write_json(out_dir / "summary.json", summary);
  return out_dir;
}

// ---------------------------------------------------------------------------
// report

fs::path cmd_report(const RunConfig& config, const fs::path& run_dir) {
  (void)config;
  require_file(run_dir / "analysis" / "summary.json", "analysis summary");
  const json summary = read_json(run_dir / "analysis" / "summary.json");
  const json manifest = read_json(run_dir / "manifest.json");

  const fs::path path = run_dir / "report.md";
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());

  out << "# Trust Game bias audit: " << summary.value("model_id", "?") << "\n\n";
  out << "- run id: `" << summary.value("run_id", "?") << "`\n";
  out << "- status: " << manifest.value("status", "?") << "\n";
  if (manifest.contains("backend"))
    out << "- backend calls: " << manifest["backend"].value("calls", 0)
        << " (cache hits: " << manifest["backend"].value("cache_hits", 0)
        << ")\n";
  out << "\n";

  for (const auto& exp : summary["experiments"]) {
    const std::string investor = exp.value("investor_group", "?");
    out << "## " << investor << " investors\n\n";
    out << "- observations: " << exp.value("observations", 0)
        << ", failed games: " << exp.value("failures", 0) << "\n\n";

    if (exp.contains("anova") && !exp["anova"].contains("skipped")) {
      out << "| effect | SS | df | MS | F | p | sig (α="
          << summary.value("alpha_anova", 0.001) << ") |\n";
      out << "|---|---|---|---|---|---|---|\n";
      for (const char* effect : {"gender", "race", "interaction"}) {
        const auto& row = exp["anova"][effect];
        out << "| " << effect << " | " << format_fixed(row.value("ss", 0.0), 4)
            << " | " << row.value("df", 0) << " | "
            << format_fixed(row.value("ms", 0.0), 4) << " | "
            << format_fixed(row.value("F", 0.0), 4) << " | "
            << format_fixed(row.value("p", 1.0), 6) << " | "
            << (row.value("significant", false) ? "yes" : "no") << " |\n";
      }
      const auto& residual = exp["anova"]["residual"];
      out << "| residual | " << format_fixed(residual.value("ss", 0.0), 4)
          << " | " << residual.value("df", 0) << " | "
          << format_fixed(residual.value("ms", 0.0), 4) << " | | | |\n\n";
    } else if (exp.contains("anova")) {
      out << "ANOVA unavailable: " << exp["anova"].value("skipped", "") << "\n\n";
    }

    if (exp.contains("posthoc")) {
      out << "Gender contrast (Female − Male) within each trustee race:\n\n";
      out << "| trustee race | t | df | p | Cohen's d | mean diff |\n";
      out << "|---|---|---|---|---|---|\n";
      for (Race race : kRaces) {
        const std::string key(race_key(race));
        if (!exp["posthoc"].contains(key)) continue;
        const auto& row = exp["posthoc"][key];
        out << "| " << key << " | " << format_fixed(row.value("t", 0.0), 4)
            << " | " << row.value("df", 0) << " | "
            << format_fixed(row.value("p", 1.0), 4) << " | "
            << format_fixed(row.value("cohens_d", 0.0), 4) << " | "
            << format_fixed(row.value("mean_diff", 0.0), 4) << " |\n";
      }
      out << "\n";
    }

    const std::string dir_label = exp.value("directory", "");
    out << "![interaction plot](analysis/interaction_" << dir_label
        << ".svg)\n\n";
  }
  return path;
}

}  // namespace namegame::cli
