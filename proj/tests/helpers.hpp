#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "namegame/census.hpp"
#include "namegame/probe.hpp"
#include "namegame/scoring.hpp"

namespace testutil {

namespace fs = std::filesystem;
using nlohmann::json;

inline fs::path data_dir() { return fs::path(NAMEGAME_TEST_DATA_DIR); }
inline fs::path repo_dir() { return fs::path(NAMEGAME_REPO_DIR); }

inline fs::path mini_census() { return data_dir() / "mini_census.csv"; }

// fresh scratch directory, removed on destruction
struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path = fs::temp_directory_path() /
           ("namegame_test_" + std::to_string(rd()) + "_" +
            std::to_string(counter.fetch_add(1)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline json load_goldens() {
  return json::parse(read_file(data_dir() / "goldens.json"));
}

inline fs::path write_fixture(const fs::path& dir, const json& doc,
                              const std::string& name = "fixtures.json") {
  const fs::path path = dir / name;
  std::ofstream out(path);
  out << doc.dump(2);
  return path;
}

// fixture with no rules: every score comes from the seeded fallback hash
inline fs::path write_fallback_fixture(const fs::path& dir) {
  return write_fixture(dir, {{"entries", json::array()}});
}

inline namegame::scoring::BackendConfig mock_config(
    const fs::path& fixture, std::uint64_t seed = 1234,
    namegame::scoring::PromptStyle style =
        namegame::scoring::PromptStyle::BasePhi) {
  namegame::scoring::BackendConfig config;
  config.endpoint = "mock:" + fixture.string();
  config.prompt_style = style;
  config.mock_seed = seed;
  config.max_parallel = 4;
  return config;
}

inline namegame::scoring::ScoringClient mock_client(
    const fs::path& fixture, std::uint64_t seed = 1234,
    std::optional<fs::path> cache_dir = std::nullopt) {
  auto config = mock_config(fixture, seed);
  config.cache_dir = std::move(cache_dir);
  auto backend = namegame::scoring::make_backend(config);
  return namegame::scoring::ScoringClient(std::move(backend), config);
}

// point-mass fixture: investment prompts always answer `value`
inline json point_mass_game_fixture(int value, int amt_a = 10) {
  json entries = json::array();
  for (int v = 0; v <= amt_a; ++v) {
    entries.push_back({{"prompt_contains", "will pass to the banker $"},
                       {"continuation", std::to_string(v)},
                       {"score", v == value ? 0.0 : -1000.0}});
  }
  return {{"entries", std::move(entries)}};
}

// uniform fixture: equal scores for every investment continuation
inline json uniform_game_fixture(int amt_a = 10) {
  json entries = json::array();
  for (int v = 0; v <= amt_a; ++v) {
    entries.push_back({{"prompt_contains", "will pass to the banker $"},
                       {"continuation", std::to_string(v)},
                       {"score", -1.0}});
  }
  return {{"entries", std::move(entries)}};
}

// pair set fixture: n surnames per (race, gender), synthetic names
inline std::vector<namegame::probe::GenderSurnamePair> synthetic_pairs(int n) {
  using namegame::Gender;
  using namegame::Race;
  std::vector<namegame::probe::GenderSurnamePair> pairs;
  for (Race race : namegame::kRaces) {
    for (Gender gender : namegame::kGenders) {
      for (int i = 0; i < n; ++i) {
        namegame::probe::GenderSurnamePair pair;
        pair.surname = std::string(namegame::race_key(race)) + "NAME" +
                       std::to_string(i);
        pair.surname = namegame::to_upper(pair.surname);
        pair.gender = gender;
        pair.assigned_race = race;
        pairs.push_back(std::move(pair));
      }
    }
  }
  return pairs;
}

}  // namespace testutil
