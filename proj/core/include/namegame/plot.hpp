#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>

#include "namegame/common.hpp"

namespace namegame::plot {

struct SeriesPoint {
  double mean = 0.0;
  double ci_half_width = 0.0;
};

// One interaction plot: x = trustee race (fixed order), y = mean investment,
// one line per trustee gender with 95% CI bars.
struct InteractionPlot {
  std::string title;
  std::array<SeriesPoint, kRaceCount> male;
  std::array<SeriesPoint, kRaceCount> female;
  std::optional<std::pair<double, double>> y_range;  // auto-fit when unset
};

// All styling constants live here so golden files stay stable.
struct PlotStyle {
  int width = 640;
  int height = 420;
  int margin_left = 64;
  int margin_right = 24;
  int margin_top = 48;
  int margin_bottom = 56;
  std::string male_color = "#1f77b4";
  std::string female_color = "#d62728";
  std::string axis_color = "#333333";
  std::string font_family = "sans-serif";
  int font_size = 13;
  double marker_radius = 3.5;
  double cap_half_width = 4.0;
};

// The SVG embeds its numeric data in a <metadata> JSON block so plots are
// diffable against the tables they came from.
std::string render_svg(const InteractionPlot& plot,
                       const PlotStyle& style = PlotStyle{});

void write_svg(const InteractionPlot& plot, const std::filesystem::path& path,
               const PlotStyle& style = PlotStyle{});

}  // namespace namegame::plot
