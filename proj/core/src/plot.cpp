#include "namegame/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace namegame::plot {

using nlohmann::json;

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string num(double v) { return format_fixed(v, 2); }

}  // namespace

std::string render_svg(const InteractionPlot& plot, const PlotStyle& style) {
  double lo, hi;
  if (plot.y_range) {
    lo = plot.y_range->first;
    hi = plot.y_range->second;
  } else {
    lo = 1e300;
    hi = -1e300;
    for (const auto* series : {&plot.male, &plot.female}) {
      for (const auto& p : *series) {
        lo = std::min(lo, p.mean - p.ci_half_width);
        hi = std::max(hi, p.mean + p.ci_half_width);
      }
    }
    const double pad = std::max(0.25, 0.08 * (hi - lo));
    lo -= pad;
    hi += pad;
  }
  if (!(hi > lo)) hi = lo + 1.0;

  const double plot_w = style.width - style.margin_left - style.margin_right;
  const double plot_h = style.height - style.margin_top - style.margin_bottom;
  const auto x_of = [&](std::size_t race_idx) {
    return style.margin_left +
           plot_w * (static_cast<double>(race_idx) + 0.5) / kRaceCount;
  };
  const auto y_of = [&](double v) {
    return style.margin_top + plot_h * (1.0 - (v - lo) / (hi - lo));
  };

  json meta;
  meta["title"] = plot.title;
  meta["y_range"] = {lo, hi};
  for (const auto& [name, series] :
       {std::pair{"M", &plot.male}, std::pair{"F", &plot.female}}) {
    json arr = json::array();
    for (std::size_t r = 0; r < kRaceCount; ++r) {
      arr.push_back({{"race", std::string(race_key(kRaces[r]))},
                     {"mean", (*series)[r].mean},
                     {"ci", (*series)[r].ci_half_width}});
    }
    meta["series"][name] = std::move(arr);
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width
      << "\" height=\"" << style.height << "\" viewBox=\"0 0 " << style.width
      << " " << style.height << "\">\n";
  svg << "<metadata id=\"series-data\">" << xml_escape(meta.dump())
      << "</metadata>\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << style.width / 2 << "\" y=\"" << style.margin_top - 20
      << "\" text-anchor=\"middle\" font-family=\"" << style.font_family
      << "\" font-size=\"" << style.font_size + 3 << "\">"
      << xml_escape(plot.title) << "</text>\n";

  // axes
  svg << "<line x1=\"" << style.margin_left << "\" y1=\"" << style.margin_top
      << "\" x2=\"" << style.margin_left << "\" y2=\""
      << style.margin_top + plot_h << "\" stroke=\"" << style.axis_color
      << "\"/>\n";
  svg << "<line x1=\"" << style.margin_left << "\" y1=\""
      << style.margin_top + plot_h << "\" x2=\"" << style.margin_left + plot_w
      << "\" y2=\"" << style.margin_top + plot_h << "\" stroke=\""
      << style.axis_color << "\"/>\n";

  // y ticks
  const int n_ticks = 5;
  for (int t = 0; t <= n_ticks; ++t) {
    const double v = lo + (hi - lo) * t / n_ticks;
    const double y = y_of(v);
    svg << "<line x1=\"" << style.margin_left - 4 << "\" y1=\"" << num(y)
        << "\" x2=\"" << style.margin_left << "\" y2=\"" << num(y)
        << "\" stroke=\"" << style.axis_color << "\"/>\n";
    svg << "<text x=\"" << style.margin_left - 8 << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-family=\"" << style.font_family
        << "\" font-size=\"" << style.font_size - 2 << "\">" << num(v)
        << "</text>\n";
  }

  // x labels
  for (std::size_t r = 0; r < kRaceCount; ++r) {
    svg << "<text x=\"" << num(x_of(r)) << "\" y=\""
        << style.margin_top + plot_h + 20 << "\" text-anchor=\"middle\" "
        << "font-family=\"" << style.font_family << "\" font-size=\""
        << style.font_size - 1 << "\">"
        << xml_escape(default_race_phrase(kRaces[r])) << "</text>\n";
  }
  svg << "<text x=\"" << style.width / 2 << "\" y=\"" << style.height - 10
      << "\" text-anchor=\"middle\" font-family=\"" << style.font_family
      << "\" font-size=\"" << style.font_size << "\">Trustee race</text>\n";
  svg << "<text x=\"16\" y=\"" << style.margin_top + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"" << style.font_family
      << "\" font-size=\"" << style.font_size << "\" transform=\"rotate(-90 16 "
      << style.margin_top + plot_h / 2
      << ")\">Mean investment ($)</text>\n";

  for (const auto& [name, series, color] :
       {std::tuple{"M", &plot.male, &style.male_color},
        std::tuple{"F", &plot.female, &style.female_color}}) {
    std::ostringstream points;
    for (std::size_t r = 0; r < kRaceCount; ++r) {
      if (r) points << ' ';
      points << num(x_of(r)) << ',' << num(y_of((*series)[r].mean));
    }
    svg << "<polyline fill=\"none\" stroke=\"" << *color
        << "\" stroke-width=\"2\" points=\"" << points.str() << "\"/>\n";
    for (std::size_t r = 0; r < kRaceCount; ++r) {
      const double x = x_of(r);
      const double yc = y_of((*series)[r].mean);
      const double ylo = y_of((*series)[r].mean - (*series)[r].ci_half_width);
      const double yhi = y_of((*series)[r].mean + (*series)[r].ci_half_width);
      svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(ylo) << "\" x2=\""
          << num(x) << "\" y2=\"" << num(yhi) << "\" stroke=\"" << *color
          << "\"/>\n";
      for (double ye : {ylo, yhi}) {
        svg << "<line x1=\"" << num(x - style.cap_half_width) << "\" y1=\""
            << num(ye) << "\" x2=\"" << num(x + style.cap_half_width)
            << "\" y2=\"" << num(ye) << "\" stroke=\"" << *color << "\"/>\n";
      }
      svg << "<circle cx=\"" << num(x) << "\" cy=\"" << num(yc) << "\" r=\""
          << style.marker_radius << "\" fill=\"" << *color << "\"/>\n";
    }
    (void)name;
  }

  // legend
  const double lx = style.margin_left + plot_w - 110;
  const double ly = style.margin_top + 8;
  svg << "<rect x=\"" << num(lx - 8) << "\" y=\"" << num(ly - 14)
      << "\" width=\"112\" height=\"40\" fill=\"white\" stroke=\""
      << style.axis_color << "\" opacity=\"0.9\"/>\n";
  svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\""
      << num(lx + 22) << "\" y2=\"" << num(ly) << "\" stroke=\""
      << style.male_color << "\" stroke-width=\"2\"/>\n";
  svg << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(ly + 4)
      << "\" font-family=\"" << style.font_family << "\" font-size=\""
      << style.font_size - 1 << "\">Male</text>\n";
  svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly + 18) << "\" x2=\""
      << num(lx + 22) << "\" y2=\"" << num(ly + 18) << "\" stroke=\""
      << style.female_color << "\" stroke-width=\"2\"/>\n";
  svg << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(ly + 22)
      << "\" font-family=\"" << style.font_family << "\" font-size=\""
      << style.font_size - 1 << "\">Female</text>\n";

  svg << "</svg>\n";
  return svg.str();
}

void write_svg(const InteractionPlot& plot, const std::filesystem::path& path,
               const PlotStyle& style) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write plot " + path.string());
  out << render_svg(plot, style);
}

}  // namespace namegame::plot
