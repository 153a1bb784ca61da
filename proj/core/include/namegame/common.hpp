#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace namegame {

// The five census race categories, in the fixed order used throughout
// (file columns, plots, exported tables).
enum class Race { Asian = 0, Black, Hispanic, NativeAmerican, White };

inline constexpr std::array<Race, 5> kRaces = {
    Race::Asian, Race::Black, Race::Hispanic, Race::NativeAmerican,
    Race::White};
inline constexpr std::size_t kRaceCount = kRaces.size();

std::string_view race_key(Race race);            // "Asian", "NativeAmerican", ...
std::string_view race_census_column(Race race);  // "pctapi", "pctblack", ...
Race race_from_key(std::string_view key);        // case-insensitive, tolerates spaces
std::string_view default_race_phrase(Race race); // phrasing used inside prompts

enum class Gender { M = 0, F };
inline constexpr std::array<Gender, 2> kGenders = {Gender::M, Gender::F};

std::string_view gender_key(Gender g);  // "M" / "F"
Gender gender_from_key(std::string_view key);
std::string_view title_for(Gender g);               // "Mr." / "Ms."
std::string_view subject_pronoun(Gender g);         // "he" / "she"
std::string_view possessive_pronoun(Gender g);      // "his" / "her"

// Error hierarchy; the CLI maps each class to a distinct exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct DataIntegrityError : Error { using Error::Error; };
struct DegenerateRecordError : DataIntegrityError {
  using DataIntegrityError::DataIntegrityError;
};
struct DesignError : Error { using Error::Error; };
struct ShortfallError : Error { using Error::Error; };
struct TransportError : Error { using Error::Error; };
struct ProtocolError : Error { using Error::Error; };
struct ContractError : Error { using Error::Error; };
struct NumericError : Error { using Error::Error; };

std::string to_upper(std::string_view s);
std::string to_lower(std::string_view s);
std::string title_case(std::string_view s);  // "SMITH" -> "Smith"
std::string trim(std::string_view s);

// Round-trippable decimal formatting for doubles (%.17g).
std::string format_full(double v);
// Fixed presentation formatting, e.g. format_fixed(4.84409, 4) == "4.8441".
std::string format_fixed(double v, int decimals);

}  // namespace namegame
