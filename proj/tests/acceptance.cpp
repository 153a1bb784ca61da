// Acceptance suite: one line per criterion, [PASS]/[FAIL]/[SKIP], nonzero
// exit when anything fails. Criteria needing external inputs (the public
// census file, a live model backend) run fully when those are provided and
// report SKIP otherwise.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "namegame/commands.hpp"
#include "namegame/csv.hpp"
#include "namegame/game.hpp"
#include "namegame/mathx.hpp"
#include "namegame/runner.hpp"
#include "namegame/stats.hpp"

using namespace namegame;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int g_failures = 0;

struct Check {
  std::ostringstream detail;
  bool ok = true;
  void require(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << what;
    }
  }
};

void report(int index, const std::string& name, const Check& check) {
  std::cout << "[" << index << "] " << name << " ... "
            << (check.ok ? "PASS" : "FAIL");
  if (!check.ok) {
    std::cout << " (" << check.detail.str() << ")";
    ++g_failures;
  }
  std::cout << "\n";
}

void report_skip(int index, const std::string& name, const std::string& why) {
  std::cout << "[" << index << "] " << name << " ... SKIP (" << why << ")\n";
}

std::optional<fs::path> census_file() {
  if (const char* env = std::getenv("NAMEGAME_CENSUS")) {
    if (fs::exists(env)) return fs::path(env);
  }
  const fs::path repo = testutil::repo_dir() / "data" / "Names_2010Census.csv";
  if (fs::exists(repo)) return repo;
  return std::nullopt;
}

const std::array<std::vector<std::string>, 5> kTable2Top3 = {{
    {"NGUYEN", "LEE", "KIM"},
    {"WILLIAMS", "JOHNSON", "SMITH"},
    {"GARCIA", "RODRIGUEZ", "HERNANDEZ"},
    {"BEGAY", "LOCKLEAR", "YAZZIE"},
    {"MILLER", "BAKER", "MURPHY"},
}};

const std::array<std::vector<std::string>, 5> kAppendixTop10 = {{
    {"NGUYEN", "LEE", "KIM", "PATEL", "TRAN", "CHEN", "LI", "LE", "WANG",
     "YANG"},
    {"WILLIAMS", "JOHNSON", "SMITH", "JONES", "BROWN", "JACKSON", "DAVIS",
     "THOMAS", "HARRIS", "ROBINSON"},
    {"GARCIA", "RODRIGUEZ", "HERNANDEZ", "MARTINEZ", "LOPEZ", "GONZALEZ",
     "PEREZ", "SANCHEZ", "RAMIREZ", "TORRES"},
    {"BEGAY", "LOCKLEAR", "YAZZIE", "MARTIN", "HUNT", "JAMES", "BENALLY",
     "TSOSIE", "NELSON", "OXENDINE"},
    {"MILLER", "BAKER", "MURPHY", "COOK", "PETERSON", "WOOD", "COX", "MYERS",
     "SULLIVAN", "FISHER"},
}};

// ----------------------------------------------------------------------
// criterion 1 + 2: census reproduction

void criterion_census(const testutil::TempDir& work) {
  // Unconditional: the Bayesian ranking reproduces the published within-race
  // order on the fixture built from the paper's own rows.
  Check subset;
  {
    auto records = census::parse_census(testutil::mini_census());
    std::vector<census::SurnameRecord> curated;
    for (auto& rec : records)
      curated.push_back(census::drop_multirace_renormalize(
          census::impute_suppressed(std::move(rec))));
    const auto posteriors = census::compute_posteriors(curated);
    for (std::size_t r = 0; r < kRaceCount; ++r) {
      const auto& ranked = posteriors[r].ranked;
      auto rank_of = [&](const std::string& s) {
        for (std::size_t i = 0; i < ranked.size(); ++i)
          if (ranked[i].surname == s) return i;
        return ranked.size();
      };
      const auto& trio = kTable2Top3[r];
      subset.require(rank_of(trio[0]) < rank_of(trio[1]) &&
                         rank_of(trio[1]) < rank_of(trio[2]),
                     std::string(race_key(kRaces[r])) +
                         " paper-excerpt order mismatch");
    }
  }

  const auto census_path = census_file();
  if (!census_path) {
    if (!subset.ok) {
      report(1, "census reproduction (Table 2 top-3)", subset);
      report(2, "Appendix-B reproduction (top-10 prefixes)", subset);
      return;
    }
    report_skip(1, "census reproduction (Table 2 top-3)",
                "public census file not provided; set NAMEGAME_CENSUS "
                "(paper-excerpt subset order verified)");
    report_skip(2, "Appendix-B reproduction (top-10 prefixes)",
                "public census file not provided; set NAMEGAME_CENSUS");
    return;
  }

  Check full;
  const auto start = std::chrono::steady_clock::now();
  cli::RunConfig config;
  config.backend.endpoint = "mock:unused";
  config.census_path = *census_path;
  config.output_dir = work.path / "census_runs";
  config.run_id = "census";
  config.top_k = 100;
  fs::path out_dir;
  try {
    out_dir = cli::cmd_curate(config);
  } catch (const std::exception& e) {
    full.require(false, std::string("cmd_curate failed: ") + e.what());
    report(1, "census reproduction (Table 2 top-3)", full);
    report(2, "Appendix-B reproduction (top-10 prefixes)", full);
    return;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  full.require(elapsed < 60.0,
               "curation took " + format_fixed(elapsed, 1) + "s >= 60s");

  Check appendix;
  int matched3 = 0, matched10 = 0;
  for (std::size_t r = 0; r < kRaceCount; ++r) {
    const auto table = csv::read_file(
        out_dir / ("ranked_" + to_lower(race_key(kRaces[r])) + ".csv"));
    for (std::size_t i = 0; i < 10 && i < table.rows.size(); ++i) {
      const std::string& got = table.rows[i][1];
      if (i < 3 && got == kTable2Top3[r][i]) ++matched3;
      if (got == kAppendixTop10[r][i]) ++matched10;
    }
  }
  full.require(matched3 == 15, "Table 2 matches " + std::to_string(matched3) +
                                   "/15 names");
  appendix.require(matched10 == 50, "Appendix B matches " +
                                        std::to_string(matched10) +
                                        "/50 names");
  report(1, "census reproduction (Table 2 top-3)", full);
  report(2, "Appendix-B reproduction (top-10 prefixes)", appendix);
}

// ----------------------------------------------------------------------
// criterion 3: imputation golden

void criterion_imputation() {
  Check check;
  const auto records = census::parse_census(testutil::mini_census());
  const auto& raw = records.back();
  check.require(raw.surname == "DORIOTT", "fixture order changed");

  const auto imputed = census::impute_suppressed(raw);
  check.require(imputed.pct[static_cast<std::size_t>(Race::Asian)] == 3.0,
                "Asian cell != 3.0");
  check.require(imputed.pct[static_cast<std::size_t>(Race::Hispanic)] == 3.0,
                "Hispanic cell != 3.0");

  const auto renorm = census::drop_multirace_renormalize(imputed);
  const std::array<double, 5> want = {300.0 / 95.0, 0.0, 300.0 / 95.0, 0.0,
                                      8900.0 / 95.0};
  for (std::size_t r = 0; r < kRaceCount; ++r)
    check.require(std::fabs(renorm.pct[r] - want[r]) < 1e-9,
                  "renormalized cell " + std::to_string(r) + " off by " +
                      format_full(std::fabs(renorm.pct[r] - want[r])));
  report(3, "imputation golden (Doriott row)", check);
}

// ----------------------------------------------------------------------
// criterion 4: design bookkeeping on a mock end-to-end run

fs::path mock_run_dir_for_9;  // reused by criterion 9

void criterion_design(const testutil::TempDir& work) {
  Check check;
  for (int n = 2; n <= 17; ++n) {
    const auto indices = runner::enumerate_game_indices(n);
    std::size_t expected = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) ++expected;
    check.require(indices.size() == expected,
                  "enumeration mismatch at n=" + std::to_string(n));
  }

  const auto fixture = testutil::write_fallback_fixture(work.path);
  cli::RunConfig config;
  config.backend = testutil::mock_config(fixture);
  config.backend.cache_dir = work.path / "cache";
  config.backend.max_parallel = 8;
  config.pair_file = testutil::repo_dir() / "data" / "reference_pairs" / "phi-2.csv";
  config.output_dir = work.path / "runs";
  config.run_id = "design";
  config.model_id = "mock-phi-2";

  try {
    const auto run_dir = cli::cmd_run(config);
    mock_run_dir_for_9 = run_dir;
    const auto manifest =
        json::parse(testutil::read_file(run_dir / "manifest.json"));
    check.require(manifest.at("status") == "complete", "run incomplete");
    check.require(manifest.at("experiments").size() == 2,
                  "expected 2 experiments");
    for (const auto& exp : manifest.at("experiments")) {
      check.require(exp.at("cells").size() == 10, "expected 10 cells");
      for (const auto& cell : exp.at("cells"))
        check.require(cell.at("games").get<int>() == 272,
                      "cell games != 272");
    }
    const auto analysis = cli::cmd_analyze(config, run_dir);
    const auto summary =
        json::parse(testutil::read_file(analysis / "summary.json"));
    for (const auto& exp : summary.at("experiments")) {
      const auto& anova = exp.at("anova");
      check.require(anova.at("gender").at("df") == 1 &&
                        anova.at("race").at("df") == 4 &&
                        anova.at("interaction").at("df") == 4 &&
                        anova.at("residual").at("df") == 2710,
                    "ANOVA df != (1, 4, 4, 2710)");
      check.require(exp.at("observations").get<int>() == 2720,
                    "observations != 2720");
    }
  } catch (const std::exception& e) {
    check.require(false, std::string("mock run failed: ") + e.what());
  }
  report(4, "design bookkeeping (2x10x272, df, enumeration oracle)", check);
}

// ----------------------------------------------------------------------
// criterion 5: statistics oracle

void criterion_statistics() {
  Check check;
  std::mt19937 rng(424242);
  std::uniform_int_distribution<int> n_dist(2, 20);
  std::uniform_real_distribution<double> effect(-1.5, 1.5);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto rel_close = [](double a, double b, double tol) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-30});
    return std::fabs(a - b) <= tol * scale || std::fabs(a - b) <= tol;
  };

  int anova_trials = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = n_dist(rng);
    std::vector<stats::Observation> obs;
    std::array<std::vector<double>, 10> cells;
    const double ga = effect(rng), ra = effect(rng), ia = effect(rng);
    for (Gender g : kGenders) {
      for (Race r : kRaces) {
        for (int k = 0; k < n; ++k) {
          double v = 5.0 + (g == Gender::F ? ga : 0.0) +
                     ra * static_cast<double>(r) +
                     ((g == Gender::F && r == Race::White) ? ia : 0.0) +
                     gauss(rng);
          obs.push_back({g, r, v});
          cells[static_cast<std::size_t>(g) * 5 + static_cast<std::size_t>(r)]
              .push_back(v);
        }
      }
    }
    ++anova_trials;
    const auto table = stats::two_way_anova(obs);

    // brute-force mean decomposition
    auto avg = [](const std::vector<double>& xs) {
      double s = 0;
      for (double x : xs) s += x;
      return s / xs.size();
    };
    std::vector<double> all;
    for (const auto& c : cells) all.insert(all.end(), c.begin(), c.end());
    const double grand = avg(all);
    std::array<double, 10> cm{};
    for (int c = 0; c < 10; ++c) cm[c] = avg(cells[c]);
    std::array<double, 2> am{};
    std::array<double, 5> bm{};
    for (int a = 0; a < 2; ++a) {
      double s = 0;
      for (int b = 0; b < 5; ++b) s += cm[a * 5 + b];
      am[a] = s / 5.0;
    }
    for (int b = 0; b < 5; ++b) {
      double s = 0;
      for (int a = 0; a < 2; ++a) s += cm[a * 5 + b];
      bm[b] = s / 2.0;
    }
    double ss_a = 0, ss_b = 0, ss_ab = 0, ss_e = 0;
    for (int a = 0; a < 2; ++a) ss_a += 5.0 * n * std::pow(am[a] - grand, 2);
    for (int b = 0; b < 5; ++b) ss_b += 2.0 * n * std::pow(bm[b] - grand, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 5; ++b)
        ss_ab += n * std::pow(cm[a * 5 + b] - am[a] - bm[b] + grand, 2);
    for (int c = 0; c < 10; ++c)
      for (double x : cells[c]) ss_e += std::pow(x - cm[c], 2);

    const int dfe = static_cast<int>(obs.size()) - 10;
    check.require(rel_close(table.gender.ss, ss_a, 1e-8), "SS gender");
    check.require(rel_close(table.race.ss, ss_b, 1e-8), "SS race");
    check.require(rel_close(table.interaction.ss, ss_ab, 1e-8), "SS interaction");
    check.require(rel_close(table.ss_residual, ss_e, 1e-8), "SS residual");
    check.require(rel_close(table.race.F, (ss_b / 4.0) / (ss_e / dfe), 1e-8),
                  "F race");
    check.require(
        rel_close(table.race.p, mathx::f_tail(table.race.F, 4, dfe), 1e-8),
        "p race");
  }
  check.require(anova_trials >= 50, "fewer than 50 randomized designs");

  // pooled t and Cohen's d hand-formula oracles at 1e-10
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(20 + trial % 7), b(25 + trial % 5);
    for (double& x : a) x = gauss(rng);
    for (double& x : b) x = gauss(rng) + 0.3;
    const auto r = stats::t_test(a, b);
    auto avg = [](const std::vector<double>& xs) {
      double s = 0;
      for (double x : xs) s += x;
      return s / xs.size();
    };
    auto var = [&](const std::vector<double>& xs) {
      const double mu = avg(xs);
      double s = 0;
      for (double x : xs) s += (x - mu) * (x - mu);
      return s / (xs.size() - 1);
    };
    const double sp2 = ((a.size() - 1) * var(a) + (b.size() - 1) * var(b)) /
                       (a.size() + b.size() - 2.0);
    const double t_ref = (avg(a) - avg(b)) /
                         std::sqrt(sp2 * (1.0 / a.size() + 1.0 / b.size()));
    const double d_ref = (avg(a) - avg(b)) / std::sqrt(sp2);
    check.require(std::fabs(r.t - t_ref) < 1e-10, "t oracle");
    check.require(std::fabs(r.cohens_d - d_ref) < 1e-10, "d oracle");
    check.require(r.df == static_cast<int>(a.size() + b.size()) - 2, "t df");
  }

  std::vector<double> a(272), b(272);
  for (double& x : a) x = gauss(rng);
  for (double& x : b) x = gauss(rng);
  check.require(stats::t_test(a, b).df == 542, "272+272 df != 542");

  report(5, "statistics oracle (ANOVA 1e-8, t/d 1e-10, df 542)", check);
}

// ----------------------------------------------------------------------
// criterion 6: distribution properties

void criterion_distribution() {
  Check check;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-30.0, 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(11);
    for (double& v : s) v = dist(rng);
    const auto p = scoring::softmax(s);
    double sum = 0;
    for (double v : p) sum += v;
    check.require(std::fabs(sum - 1.0) < 1e-9, "softmax sum");

    auto shifted = s;
    const double c = dist(rng);
    for (double& v : shifted) v += c;
    const auto q = scoring::softmax(shifted);
    for (std::size_t i = 0; i < p.size(); ++i)
      check.require(std::fabs(p[i] - q[i]) < 1e-12, "shift invariance");

    const auto d = scoring::renormalize(scoring::integer_continuations(0, 10), s);
    const double ev = scoring::expected_value(d, scoring::integer_value_map(0, 10));
    check.require(ev >= 0.0 && ev <= 10.0, "expected value out of range");
  }
  const auto uniform = scoring::renormalize(
      scoring::integer_continuations(0, 10), std::vector<double>(11, -2.5));
  const double ev =
      scoring::expected_value(uniform, scoring::integer_value_map(0, 10));
  check.require(std::fabs(ev - 5.0) < 1e-12, "uniform mean != 5.0");
  report(6, "distribution properties (shift/sum/bounds/uniform)", check);
}

// ----------------------------------------------------------------------
// criterion 7: prompt goldens

void criterion_goldens() {
  Check check;
  const auto goldens = testutil::load_goldens();

  probe::GenderSurnamePair lopez;
  lopez.surname = "LOPEZ";
  lopez.gender = Gender::F;
  probe::GenderSurnamePair tsosie;
  tsosie.surname = "TSOSIE";
  tsosie.gender = Gender::M;
  game::GameSpec spec;
  spec.investor = game::Player::from_pair(lopez);
  spec.trustee = game::Player::from_pair(tsosie);

  auto expect = [&](const std::string& key, const std::string& got) {
    check.require(got == goldens.at(key).get<std::string>(),
                  key + " not byte-exact");
  };
  expect("game_base", game::render_game_prompt(spec));
  spec.style = scoring::PromptStyle::Instruct;
  expect("game_instruct", game::render_game_prompt(spec));
  spec.style = scoring::PromptStyle::BasePhi;

  expect("probe_phi", probe::render_race_probe("Mr.", "Johnson",
                                               "African American",
                                               scoring::PromptStyle::BasePhi));
  expect("probe_llama_mistral",
         probe::render_race_probe("Mr.", "Johnson", "African American",
                                  scoring::PromptStyle::BaseLlamaMistral));

  const auto templates = game::TemplateSet::defaults();
  expect("q1_amt4", game::render_probe_question_prompt(spec, 1, 4, templates));
  expect("q2_amt4", game::render_probe_question_prompt(spec, 2, 4, templates));
  expect("q3_amt4", game::render_probe_question_prompt(spec, 3, 4, templates));

  for (int amt = 0; amt <= 10; ++amt) {
    const auto answers = game::verification_answers(amt, 10, 2);
    check.require(answers[0] == 3 * amt && answers[1] == 2 + 3 * amt &&
                      answers[2] == 10 - amt,
                  "verification answers wrong at amt=" + std::to_string(amt));
  }
  report(7, "prompt goldens (byte-exact) and probe answers", check);
}

// ----------------------------------------------------------------------
// criterion 8: paper model results (integration only)

void criterion_integration(const testutil::TempDir& work) {
  const char* endpoint = std::getenv("NAMEGAME_INTEGRATION_ENDPOINT");
  if (!endpoint) {
    report_skip(8,
                "paper model results (Table 3 cells, effect ordering)",
                "requires the actual model weights; set "
                "NAMEGAME_INTEGRATION_ENDPOINT to enable; default mock suite "
                "covers criteria 4-7 and 9");
    return;
  }

  Check check;
  try {
    scoring::BackendConfig backend;
    backend.endpoint = endpoint;
    backend.prompt_style = scoring::PromptStyle::BasePhi;
    backend.cache_dir = work.path / "integration_cache";
    scoring::ScoringClient client(scoring::make_backend(backend), backend);

    const auto pairs = runner::PairSet::from_file(
        testutil::repo_dir() / "data" / "reference_pairs" / "phi-2.csv");
    auto find_pair = [&](Race race, Gender gender, const std::string& surname) {
      for (const auto& pair : pairs.group({race, gender}))
        if (pair.surname == surname) return pair;
      throw Error("pair not found: " + surname);
    };

    const auto play = [&](const probe::GenderSurnamePair& investor,
                          const probe::GenderSurnamePair& trustee) {
      game::GameSpec spec;
      spec.investor = game::Player::from_pair(investor);
      spec.trustee = game::Player::from_pair(trustee);
      return game::predict_investment(spec, client).mean;
    };
    const double burns_gueye = play(find_pair(Race::White, Gender::M, "BURNS"),
                                    find_pair(Race::Black, Gender::F, "GUEYE"));
    const double bean_smalls = play(find_pair(Race::White, Gender::M, "BEAN"),
                                    find_pair(Race::Black, Gender::F, "SMALLS"));
    check.require(std::fabs(burns_gueye - 4.8441) < 1e-3,
                  "Burns x Gueye = " + format_fixed(burns_gueye, 4));
    check.require(std::fabs(bean_smalls - 4.4635) < 1e-3,
                  "Bean x Smalls = " + format_fixed(bean_smalls, 4));

    // effect signs/ordering for the Asian-F experiment
    runner::ExperimentDesign design;
    design.investor_group = {Race::Asian, Gender::F};
    const auto result = runner::run_experiment(design, pairs, client,
                                               game::TemplateSet::defaults());
    std::vector<double> hisp_f, hisp_m;
    std::vector<stats::Observation> obs;
    for (const auto& cell : result.cells) {
      for (const auto& record : cell.outcomes) {
        if (record.failed) continue;
        obs.push_back({cell.trustee_group.gender, cell.trustee_group.race,
                       record.mean});
        if (cell.trustee_group.race == Race::Hispanic) {
          (cell.trustee_group.gender == Gender::F ? hisp_f : hisp_m)
              .push_back(record.mean);
        }
      }
    }
    const double d = stats::cohens_d(hisp_f, hisp_m);
    check.require(d > 0, "Hispanic F-M Cohen's d sign");
    const auto table = stats::two_way_anova(obs);
    check.require(table.gender.p < 0.001, "gender main effect significance");
    check.require(table.race.p < 0.001, "race main effect significance");
  } catch (const std::exception& e) {
    check.require(false, std::string("integration run failed: ") + e.what());
  }
  report(8, "paper model results (integration backend)", check);
}

// ----------------------------------------------------------------------
// criterion 9: determinism under a warm cache

void criterion_determinism(const testutil::TempDir& work) {
  Check check;
  const auto fixture = testutil::write_fallback_fixture(work.path);
  cli::RunConfig config;
  config.backend = testutil::mock_config(fixture);
  config.backend.cache_dir = work.path / "cache";  // warmed by criterion 4
  config.backend.max_parallel = 8;
  config.pair_file = testutil::repo_dir() / "data" / "reference_pairs" / "phi-2.csv";
  config.output_dir = work.path / "runs";
  config.model_id = "mock-phi-2";
  config.run_id = "determinism";

  try {
    const auto run_dir = cli::cmd_run(config);
    const auto manifest =
        json::parse(testutil::read_file(run_dir / "manifest.json"));
    check.require(manifest.at("backend").at("calls").get<int>() == 0,
                  "second run made " +
                      std::to_string(manifest.at("backend").at("calls").get<int>()) +
                      " backend calls");
    check.require(!mock_run_dir_for_9.empty(), "first run missing");
    for (const char* label : {"white_m", "asian_f"}) {
      const auto a = testutil::read_file(mock_run_dir_for_9 / label / "outcomes.csv");
      const auto b = testutil::read_file(run_dir / label / "outcomes.csv");
      check.require(!a.empty() && a == b,
                    std::string(label) + " outcomes differ between runs");
    }
  } catch (const std::exception& e) {
    check.require(false, std::string("determinism run failed: ") + e.what());
  }
  report(9, "determinism (byte-identical rerun, zero backend calls)", check);
}

}  // namespace

int main() {
  testutil::TempDir work;
  std::cout << "acceptance suite\n";

  criterion_census(work);
  criterion_imputation();
  criterion_design(work);
  criterion_statistics();
  criterion_distribution();
  criterion_goldens();
  criterion_integration(work);
  criterion_determinism(work);

  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) FAILED\n";
    return 1;
  }
  std::cout << "all executed criteria passed\n";
  return 0;
}
