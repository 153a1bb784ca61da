#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "namegame/census.hpp"
#include "namegame/game.hpp"
#include "namegame/mathx.hpp"
#include "namegame/runner.hpp"
#include "namegame/scoring.hpp"
#include "namegame/stats.hpp"

using namespace namegame;

namespace {

// synthetic census at the scale of the real file (162k surnames)
std::vector<census::SurnameRecord> synthetic_census(std::size_t n) {
  std::mt19937 rng(12345);
  std::uniform_int_distribution<int> count_dist(100, 2000000);
  std::uniform_real_distribution<double> pct_dist(0.0, 1.0);
  std::vector<census::SurnameRecord> records(n);
  for (std::size_t i = 0; i < n; ++i) {
    records[i].surname = "NAME" + std::to_string(i);
    records[i].count = count_dist(rng);
    double sum = 0.0;
    for (double& p : records[i].pct) {
      p = pct_dist(rng);
      sum += p;
    }
    for (double& p : records[i].pct) p *= 100.0 / sum;
  }
  return records;
}

game::GameSpec bench_spec() {
  probe::GenderSurnamePair lopez;
  lopez.surname = "LOPEZ";
  lopez.gender = Gender::F;
  probe::GenderSurnamePair tsosie;
  tsosie.surname = "TSOSIE";
  tsosie.gender = Gender::M;
  game::GameSpec spec;
  spec.investor = game::Player::from_pair(lopez);
  spec.trustee = game::Player::from_pair(tsosie);
  return spec;
}

void BM_PosteriorAssignRank(benchmark::State& state) {
  const auto records = synthetic_census(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto ranked = census::assign_and_rank(records);
    benchmark::DoNotOptimize(ranked);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SoftmaxRenormalize(benchmark::State& state) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-20.0, 0.0);
  std::vector<double> scores(static_cast<std::size_t>(state.range(0)));
  for (double& s : scores) s = dist(rng);
  for (auto _ : state) {
    auto probs = scoring::softmax(scores);
    benchmark::DoNotOptimize(probs);
  }
}

void BM_TwoWayAnova(benchmark::State& state) {
  std::mt19937 rng(9);
  std::normal_distribution<double> gauss(5.0, 1.0);
  std::vector<stats::Observation> obs;
  const int n = static_cast<int>(state.range(0));
  for (Gender g : kGenders)
    for (Race r : kRaces)
      for (int k = 0; k < n; ++k) obs.push_back({g, r, gauss(rng)});
  for (auto _ : state) {
    auto table = stats::two_way_anova(obs);
    benchmark::DoNotOptimize(table);
  }
  state.SetItemsProcessed(state.iterations() * obs.size());
}

void BM_RenderGamePrompt(benchmark::State& state) {
  const auto spec = bench_spec();
  const auto templates = game::TemplateSet::defaults();
  for (auto _ : state) {
    auto prompt = game::render_game_prompt(spec, templates);
    benchmark::DoNotOptimize(prompt);
  }
}

void BM_EnumerateGames(benchmark::State& state) {
  std::vector<probe::GenderSurnamePair> pairs(17);
  for (int i = 0; i < 17; ++i) {
    pairs[i].surname = "NAME" + std::to_string(i);
    pairs[i].gender = i % 2 ? Gender::F : Gender::M;
  }
  for (auto _ : state) {
    auto games = runner::enumerate_games(pairs, pairs, 10, 2,
                                         scoring::PromptStyle::BasePhi);
    benchmark::DoNotOptimize(games);
  }
}

void BM_TTailProbability(benchmark::State& state) {
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mathx::t_two_sided_p(t, 542.0));
    t += 0.001;
    if (t > 20.0) t = 0.1;
  }
}

}  // namespace

BENCHMARK(BM_PosteriorAssignRank)->Arg(10000)->Arg(162253)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SoftmaxRenormalize)->Arg(11)->Arg(41);
BENCHMARK(BM_TwoWayAnova)->Arg(27)->Arg(272)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RenderGamePrompt);
BENCHMARK(BM_EnumerateGames)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_TTailProbability);

BENCHMARK_MAIN();
