#pragma once

#include <span>
#include <string>
#include <vector>

#include "namegame/common.hpp"

namespace namegame::stats {

struct Observation {
  Gender gender;
  Race race;
  double value;
};

struct EffectRow {
  double ss = 0.0;
  int df = 0;
  double ms = 0.0;
  double F = 0.0;
  double p = 1.0;
};

struct AnovaTable {
  EffectRow gender;
  EffectRow race;
  EffectRow interaction;
  double ss_residual = 0.0;
  int df_residual = 0;
  double ms_residual = 0.0;
  double ss_total = 0.0;
  int df_total = 0;
};

// Fixed-effects two-way ANOVA with interaction on the 2 (gender) x 5 (race)
// design. Cells must be balanced and non-empty (DesignError otherwise).
// Zero residual variance: F = +inf, p = 0 for effects with nonzero SS;
// all-constant data reports F = 0, p = 1.
AnovaTable two_way_anova(std::span<const Observation> observations);

struct TTestResult {
  std::string group_a;
  std::string group_b;
  double t = 0.0;
  int df = 0;
  double p = 1.0;
  double cohens_d = 0.0;
  double mean_diff = 0.0;
};

// Pooled-variance two-sample t-test, two-sided p, df = n_a + n_b - 2.
TTestResult t_test(std::span<const double> a, std::span<const double> b,
                   std::string label_a = "a", std::string label_b = "b");

// (mean_a - mean_b) / pooled_sd; first argument minus second.
double cohens_d(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);  // n-1 denominator

struct CellData {
  Race race;
  Gender gender;
  std::vector<double> values;
};

struct CellSummary {
  Race race;
  Gender gender;
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double ci_half_width = 0.0;  // 1.96 * sd / sqrt(n)
};

// Per-cell means and normal-approximation 95% CIs, ordered race-major then
// gender (M before F).
std::vector<CellSummary> interaction_summary(std::span<const CellData> cells);

}  // namespace namegame::stats
