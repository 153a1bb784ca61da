#include "namegame/common.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace namegame {

namespace {

std::string fold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == ' ' || c == '_' || c == '-') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::string_view race_key(Race race) {
  switch (race) {
    case Race::Asian: return "Asian";
    case Race::Black: return "Black";
    case Race::Hispanic: return "Hispanic";
    case Race::NativeAmerican: return "NativeAmerican";
    case Race::White: return "White";
  }
  return "?";
}

std::string_view race_census_column(Race race) {
  switch (race) {
    case Race::Asian: return "pctapi";
    case Race::Black: return "pctblack";
    case Race::Hispanic: return "pcthispanic";
    case Race::NativeAmerican: return "pctaian";
    case Race::White: return "pctwhite";
  }
  return "?";
}

Race race_from_key(std::string_view key) {
  const std::string k = fold(key);
  if (k == "asian" || k == "api") return Race::Asian;
  if (k == "black" || k == "africanamerican") return Race::Black;
  if (k == "hispanic") return Race::Hispanic;
  if (k == "nativeamerican" || k == "native" || k == "aian")
    return Race::NativeAmerican;
  if (k == "white") return Race::White;
  throw ConfigError("unknown race key: '" + std::string(key) + "'");
}

std::string_view default_race_phrase(Race race) {
  switch (race) {
    case Race::Asian: return "Asian";
    case Race::Black: return "African American";
    case Race::Hispanic: return "Hispanic";
    case Race::NativeAmerican: return "Native American";
    case Race::White: return "White";
  }
  return "?";
}

std::string_view gender_key(Gender g) { return g == Gender::M ? "M" : "F"; }

Gender gender_from_key(std::string_view key) {
  const std::string k = fold(key);
  if (k == "m" || k == "male") return Gender::M;
  if (k == "f" || k == "female") return Gender::F;
  throw ConfigError("unknown gender key: '" + std::string(key) + "'");
}

std::string_view title_for(Gender g) { return g == Gender::M ? "Mr." : "Ms."; }
std::string_view subject_pronoun(Gender g) { return g == Gender::M ? "he" : "she"; }
std::string_view possessive_pronoun(Gender g) { return g == Gender::M ? "his" : "her"; }

std::string to_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::toupper(c));
  });
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string title_case(std::string_view s) {
  std::string out = to_lower(s);
  if (!out.empty())
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string format_full(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

}  // namespace namegame
