#include "namegame/config.hpp"

#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "namegame/game.hpp"

namespace namegame::cli {

using nlohmann::json;

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  RunConfig config = from_json(doc);
  config.apply_env_overrides();
  return config;
}

RunConfig RunConfig::from_json(const json& doc) {
  RunConfig config;
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  try {
    if (doc.contains("backend")) {
      const auto& b = doc["backend"];
      config.backend.endpoint = b.value("endpoint", config.backend.endpoint);
      if (b.contains("prompt_style"))
        config.backend.prompt_style =
            scoring::style_from_key(b["prompt_style"].get<std::string>());
      if (b.contains("timeout_ms"))
        config.backend.timeout =
            std::chrono::milliseconds(b["timeout_ms"].get<int64_t>());
      config.backend.max_parallel =
          b.value("max_parallel", config.backend.max_parallel);
      if (b.contains("cache_dir"))
        config.backend.cache_dir = b["cache_dir"].get<std::string>();
      config.backend.mock_seed = b.value("mock_seed", config.backend.mock_seed);
      config.backend.retry_attempts =
          b.value("retry_attempts", config.backend.retry_attempts);
      if (b.contains("retry_backoff_ms"))
        config.backend.retry_backoff =
            std::chrono::milliseconds(b["retry_backoff_ms"].get<int64_t>());
    }
    config.model_id = doc.value("model_id", config.model_id);
    if (doc.contains("census_path"))
      config.census_path = doc["census_path"].get<std::string>();
    if (doc.contains("extra_seed_path"))
      config.extra_seed_path = doc["extra_seed_path"].get<std::string>();
    if (doc.contains("pair_file"))
      config.pair_file = doc["pair_file"].get<std::string>();
    if (doc.contains("template_file"))
      config.template_file = doc["template_file"].get<std::string>();
    if (doc.contains("output_dir"))
      config.output_dir = doc["output_dir"].get<std::string>();
    config.run_id = doc.value("run_id", config.run_id);
    config.amt_a = doc.value("amt_a", config.amt_a);
    config.amt_b = doc.value("amt_b", config.amt_b);
    config.pairs_per_group = doc.value("pairs_per_group", config.pairs_per_group);
    config.per_gender = doc.value("per_gender", config.per_gender);
    config.seed_top_n = doc.value("seed_top_n", config.seed_top_n);
    config.top_k = doc.value("top_k", config.top_k);
    if (doc.contains("investor_groups")) {
      config.investor_groups.clear();
      for (const auto& g : doc["investor_groups"]) {
        if (g.is_array() && g.size() == 2) {
          config.investor_groups.push_back(
              runner::Group{race_from_key(g[0].get<std::string>()),
                            gender_from_key(g[1].get<std::string>())});
        } else if (g.is_string()) {
          config.investor_groups.push_back(
              runner::group_from_label(g.get<std::string>()));
        } else {
          throw ConfigError("investor_groups entries must be [race, gender]");
        }
      }
      if (config.investor_groups.empty())
        throw ConfigError("investor_groups must not be empty");
    }
    config.gate_on_verification =
        doc.value("gate_on_verification", config.gate_on_verification);
    config.verify_per_cell = doc.value("verify_per_cell", config.verify_per_cell);
    config.allow_incomplete = doc.value("allow_incomplete", config.allow_incomplete);
    if (doc.contains("race_phrases")) {
      for (const auto& [key, value] : doc["race_phrases"].items()) {
        config.race_phrases
            .phrase[static_cast<std::size_t>(race_from_key(key))] =
            value.get<std::string>();
      }
    }
    config.alpha_anova = doc.value("alpha_anova", config.alpha_anova);
    config.alpha_posthoc = doc.value("alpha_posthoc", config.alpha_posthoc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config value: ") + e.what());
  }

  if (config.amt_a <= 0) throw ConfigError("amt_a must be positive");
  if (config.amt_b < 0) throw ConfigError("amt_b must be non-negative");
  if (config.run_id.empty()) throw ConfigError("run_id must not be empty");
  return config;
}

json RunConfig::to_json() const {
  json b = {
      {"endpoint", backend.endpoint},
      {"prompt_style", std::string(scoring::style_key(backend.prompt_style))},
      {"timeout_ms", backend.timeout.count()},
      {"max_parallel", backend.max_parallel},
      {"mock_seed", backend.mock_seed},
      {"retry_attempts", backend.retry_attempts},
      {"retry_backoff_ms", backend.retry_backoff.count()},
  };
  if (backend.cache_dir) b["cache_dir"] = backend.cache_dir->string();

  json groups = json::array();
  for (const auto& g : investor_groups)
    groups.push_back({std::string(race_key(g.race)),
                      std::string(gender_key(g.gender))});

  json phrases;
  for (std::size_t r = 0; r < kRaceCount; ++r)
    phrases[std::string(race_key(kRaces[r]))] = race_phrases.phrase[r];

  json doc = {
      {"backend", std::move(b)},
      {"model_id", model_id},
      {"output_dir", output_dir.string()},
      {"run_id", run_id},
      {"amt_a", amt_a},
      {"amt_b", amt_b},
      {"pairs_per_group", pairs_per_group},
      {"per_gender", per_gender},
      {"seed_top_n", seed_top_n},
      {"top_k", top_k},
      {"investor_groups", std::move(groups)},
      {"gate_on_verification", gate_on_verification},
      {"verify_per_cell", verify_per_cell},
      {"allow_incomplete", allow_incomplete},
      {"race_phrases", std::move(phrases)},
      {"alpha_anova", alpha_anova},
      {"alpha_posthoc", alpha_posthoc},
  };
  if (!census_path.empty()) doc["census_path"] = census_path.string();
  if (extra_seed_path) doc["extra_seed_path"] = extra_seed_path->string();
  if (pair_file) doc["pair_file"] = pair_file->string();
  if (template_file) doc["template_file"] = template_file->string();
  return doc;
}

void RunConfig::apply_env_overrides() {
  if (const char* endpoint = std::getenv("NAMEGAME_ENDPOINT"))
    backend.endpoint = endpoint;
  if (const char* out = std::getenv("NAMEGAME_OUTPUT_DIR")) output_dir = out;
}

game::TemplateSet RunConfig::templates() const {
  if (template_file)
    return game::TemplateSet::load_overrides(*template_file);
  return game::TemplateSet::defaults();
}

}  // namespace namegame::cli
