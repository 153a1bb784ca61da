#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "namegame/common.hpp"
#include "namegame/probe.hpp"
#include "namegame/scoring.hpp"

namespace namegame::game {

struct Player {
  probe::GenderSurnamePair pair;
  std::string display;            // "Ms. Lopez"
  std::string pron_subject;       // "he" / "she"
  std::string pron_possessive;    // "his" / "her"

  static Player from_pair(const probe::GenderSurnamePair& pair);
};

struct GameSpec {
  Player investor;
  Player trustee;
  int amt_a = 10;
  int amt_b = 2;
  scoring::PromptStyle style = scoring::PromptStyle::BasePhi;

  void validate() const;  // amt_a > 0, amt_b >= 0, distinct displays
};

// Named templates; every string uses {placeholder} syntax. Overridable from
// a JSON file keyed by these names.
struct TemplateSet {
  std::string frame_base;
  std::string frame_instruct;
  std::string scenario;
  std::string game_question;
  std::string game_stem;
  std::string q1_question, q1_stem, q1_context;
  std::string q2_question, q2_stem, q2_context;
  std::string q3_question, q3_stem;

  static TemplateSet defaults();
  // unknown keys in the override file are a config error
  static TemplateSet load_overrides(const std::filesystem::path& path,
                                    TemplateSet base = defaults());
};

// Replaces each {name} with vars.at(name); an unmatched or unknown
// placeholder throws ContractError. The output never contains '{'.
std::string substitute(std::string_view templ,
                       const std::map<std::string, std::string>& vars);

std::string render_game_prompt(const GameSpec& spec,
                               const TemplateSet& templates = TemplateSet::defaults());

struct GameOutcome {
  GameSpec spec;
  scoring::CompletionDistribution distribution;  // over "0".."amt_a"
  double mean = 0.0;
};

GameOutcome predict_investment(const GameSpec& spec,
                               scoring::ScoringClient& client,
                               const TemplateSet& templates = TemplateSet::defaults());

// correct answers (3a, amt_b + 3a, amt_a - a)
std::array<int, 3> verification_answers(int amt, int amt_a, int amt_b);

// Prompt for probing question q (1..3) at the given investment amount,
// with the preceding correct-answer sentences chained into the scenario.
std::string render_probe_question_prompt(const GameSpec& spec, int question,
                                         int amt, const TemplateSet& templates);

struct VerificationRow {
  int amt = 0;
  bool q1_ok = false, q2_ok = false, q3_ok = false;
  std::string note;  // failure cause when a backend call failed
};

struct VerificationReport {
  GameSpec spec;
  std::vector<VerificationRow> per_amt;  // amt = 0..amt_a
  bool pass = false;                     // every flag true
};

VerificationReport verify_prompt(const GameSpec& spec,
                                 scoring::ScoringClient& client,
                                 const TemplateSet& templates = TemplateSet::defaults());

}  // namespace namegame::game
