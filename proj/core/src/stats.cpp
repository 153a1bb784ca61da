#include "namegame/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "namegame/mathx.hpp"

namespace namegame::stats {

namespace {

constexpr double kVarianceFloor = 0.0;  // exact-zero residual handled explicitly

std::size_t cell_index(Gender g, Race r) {
  return static_cast<std::size_t>(g) * kRaceCount + static_cast<std::size_t>(r);
}

}  // namespace

double mean(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

AnovaTable two_way_anova(std::span<const Observation> observations) {
  constexpr std::size_t kLevelsA = 2;          // gender
  constexpr std::size_t kLevelsB = kRaceCount; // race
  constexpr std::size_t kCells = kLevelsA * kLevelsB;

  std::array<double, kCells> cell_sum{};
  std::array<std::size_t, kCells> cell_n{};
  for (const auto& obs : observations) {
    const std::size_t c = cell_index(obs.gender, obs.race);
    cell_sum[c] += obs.value;
    cell_n[c] += 1;
  }
  const std::size_t n_per_cell = cell_n[0];
  for (std::size_t c = 0; c < kCells; ++c) {
    if (cell_n[c] == 0)
      throw DesignError("two_way_anova: empty cell " +
                        std::string(gender_key(kGenders[c / kLevelsB])) + "/" +
                        std::string(race_key(kRaces[c % kLevelsB])));
    if (cell_n[c] != n_per_cell)
      throw DesignError("two_way_anova: unbalanced cells (" +
                        std::to_string(cell_n[c]) + " vs " +
                        std::to_string(n_per_cell) + " observations)");
  }
  const double n = static_cast<double>(n_per_cell);
  const double N = static_cast<double>(observations.size());

  std::array<double, kCells> cell_mean{};
  for (std::size_t c = 0; c < kCells; ++c) cell_mean[c] = cell_sum[c] / n;

  double grand = 0.0;
  for (const auto& obs : observations) grand += obs.value;
  grand /= N;

  std::array<double, kLevelsA> a_mean{};
  std::array<double, kLevelsB> b_mean{};
  for (std::size_t a = 0; a < kLevelsA; ++a) {
    for (std::size_t b = 0; b < kLevelsB; ++b)
      a_mean[a] += cell_mean[a * kLevelsB + b];
    a_mean[a] /= static_cast<double>(kLevelsB);
  }
  for (std::size_t b = 0; b < kLevelsB; ++b) {
    for (std::size_t a = 0; a < kLevelsA; ++a)
      b_mean[b] += cell_mean[a * kLevelsB + b];
    b_mean[b] /= static_cast<double>(kLevelsA);
  }

  AnovaTable table;
  for (std::size_t a = 0; a < kLevelsA; ++a) {
    const double d = a_mean[a] - grand;
    table.gender.ss += n * static_cast<double>(kLevelsB) * d * d;
  }
  for (std::size_t b = 0; b < kLevelsB; ++b) {
    const double d = b_mean[b] - grand;
    table.race.ss += n * static_cast<double>(kLevelsA) * d * d;
  }
  for (std::size_t a = 0; a < kLevelsA; ++a) {
    for (std::size_t b = 0; b < kLevelsB; ++b) {
      const double d = cell_mean[a * kLevelsB + b] - a_mean[a] - b_mean[b] + grand;
      table.interaction.ss += n * d * d;
    }
  }
  for (const auto& obs : observations) {
    const double d = obs.value - cell_mean[cell_index(obs.gender, obs.race)];
    table.ss_residual += d * d;
    const double dt = obs.value - grand;
    table.ss_total += dt * dt;
  }

  table.gender.df = static_cast<int>(kLevelsA) - 1;
  table.race.df = static_cast<int>(kLevelsB) - 1;
  table.interaction.df = table.gender.df * table.race.df;
  table.df_residual = static_cast<int>(observations.size() - kCells);
  table.df_total = static_cast<int>(observations.size()) - 1;
  if (table.df_residual <= 0)
    throw DesignError("two_way_anova: needs more than one observation per cell");

  table.ms_residual = table.ss_residual / table.df_residual;
  for (EffectRow* row : {&table.gender, &table.race, &table.interaction}) {
    row->ms = row->ss / row->df;
    if (table.ms_residual > kVarianceFloor) {
      row->F = row->ms / table.ms_residual;
      row->p = mathx::f_tail(row->F, row->df, table.df_residual);
    } else if (row->ss > 0.0) {
      row->F = std::numeric_limits<double>::infinity();
      row->p = 0.0;
    } else {
      row->F = 0.0;  // 0/0: no variance anywhere
      row->p = 1.0;
    }
  }
  return table;
}

TTestResult t_test(std::span<const double> a, std::span<const double> b,
                   std::string label_a, std::string label_b) {
  if (a.size() < 2 || b.size() < 2)
    throw ContractError("t_test: each sample needs at least 2 observations");
  TTestResult result;
  result.group_a = std::move(label_a);
  result.group_b = std::move(label_b);
  result.df = static_cast<int>(a.size() + b.size()) - 2;

  const double ma = mean(a);
  const double mb = mean(b);
  result.mean_diff = ma - mb;

  const double va = sample_variance(a);
  const double vb = sample_variance(b);
  const double pooled_var =
      ((a.size() - 1) * va + (b.size() - 1) * vb) / result.df;
  const double se =
      std::sqrt(pooled_var * (1.0 / a.size() + 1.0 / b.size()));

  if (se == 0.0) {
    if (result.mean_diff == 0.0) {
      result.t = 0.0;
      result.p = 1.0;
      result.cohens_d = 0.0;
    } else {
      result.t = std::copysign(std::numeric_limits<double>::infinity(),
                               result.mean_diff);
      result.p = 0.0;
      result.cohens_d = result.t;
    }
    return result;
  }
  result.t = result.mean_diff / se;
  result.p = mathx::t_two_sided_p(result.t, result.df);
  result.cohens_d = result.mean_diff / std::sqrt(pooled_var);
  return result;
}

double cohens_d(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw ContractError("cohens_d: each sample needs at least 2 observations");
  const int df = static_cast<int>(a.size() + b.size()) - 2;
  const double pooled_var =
      ((a.size() - 1) * sample_variance(a) + (b.size() - 1) * sample_variance(b)) /
      df;
  const double diff = mean(a) - mean(b);
  if (pooled_var == 0.0) {
    if (diff == 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  return diff / std::sqrt(pooled_var);
}

std::vector<CellSummary> interaction_summary(std::span<const CellData> cells) {
  std::vector<CellSummary> out;
  out.reserve(cells.size());
  for (const auto& cell : cells) {
    if (cell.values.empty())
      throw ContractError("interaction_summary: empty cell " +
                          std::string(race_key(cell.race)) + "/" +
                          std::string(gender_key(cell.gender)));
    CellSummary s;
    s.race = cell.race;
    s.gender = cell.gender;
    s.n = cell.values.size();
    s.mean = mean(cell.values);
    s.stddev = cell.values.size() > 1 ? std::sqrt(sample_variance(cell.values)) : 0.0;
    s.ci_half_width = 1.96 * s.stddev / std::sqrt(static_cast<double>(s.n));
    out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const CellSummary& a, const CellSummary& b) {
    if (a.race != b.race) return static_cast<int>(a.race) < static_cast<int>(b.race);
    return static_cast<int>(a.gender) < static_cast<int>(b.gender);
  });
  return out;
}

}  // namespace namegame::stats
