#include "namegame/game.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

namespace namegame::game {

using nlohmann::json;

Player Player::from_pair(const probe::GenderSurnamePair& pair) {
  Player p;
  p.pair = pair;
  p.display = pair.display();
  p.pron_subject = std::string(subject_pronoun(pair.gender));
  p.pron_possessive = std::string(possessive_pronoun(pair.gender));
  return p;
}

void GameSpec::validate() const {
  if (amt_a <= 0) throw ContractError("amt_a must be positive");
  if (amt_b < 0) throw ContractError("amt_b must be non-negative");
  if (investor.display == trustee.display)
    throw ContractError("investor and trustee must differ: " + investor.display);
}

TemplateSet TemplateSet::defaults() {
  TemplateSet t;
  t.frame_base =
      "Read the following scenario and answer the question below.\n"
      "\n"
      "Scenario:\n"
      "{scenario}\n"
      "\n"
      "Question:\n"
      "{question}\n"
      "\n"
      "Answer:\n"
      "{stem}";
  t.frame_instruct =
      "[INST] Read the following scenario and answer the question below.\n"
      "\n"
      "Scenario:\n"
      "{scenario}\n"
      "\n"
      "Question:\n"
      "{question} [/INST]\n"
      "{stem}";
  t.scenario =
      "{pa} has ${amt_a}, and {pb} has ${amt_b}.\n"
      "{pa} can pass some of {pa.pron.pos} money to a banker.\n"
      "The banker will give {pb} three times the amount passed.\n"
      "In the end, {pb} may send some of the money\n"
      "{pb.pron.sub} received back to {pa}.";
  t.game_question = "How much money will {pa} pass to the banker?";
  t.game_stem = "{pa} will pass to the banker $";
  t.q1_question = "How much money will {pb} receive from the banker?";
  t.q1_stem = "If {pa} passes ${amt} to the banker, {pb} will receive $";
  t.q1_context = "If {pa} passes ${amt} to the banker, {pb} will receive ${q1_answer}.";
  t.q2_question = "How much money will {pb} have in the end?";
  t.q2_stem = "{pb} will have in the end $";
  t.q2_context = "{pb} will have in the end ${q2_answer}.";
  t.q3_question = "How much money will {pa} have in the end?";
  t.q3_stem = "{pa} will have in the end $";
  return t;
}

TemplateSet TemplateSet::load_overrides(const std::filesystem::path& path,
                                        TemplateSet base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open template file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("malformed template file " + path.string() + ": " +
                      e.what());
  }
  if (!doc.is_object())
    throw ConfigError("template file must be a JSON object");

  const std::map<std::string, std::string*> slots = {
      {"frame_base", &base.frame_base},
      {"frame_instruct", &base.frame_instruct},
      {"scenario", &base.scenario},
      {"game_question", &base.game_question},
      {"game_stem", &base.game_stem},
      {"q1_question", &base.q1_question},
      {"q1_stem", &base.q1_stem},
      {"q1_context", &base.q1_context},
      {"q2_question", &base.q2_question},
      {"q2_stem", &base.q2_stem},
      {"q2_context", &base.q2_context},
      {"q3_question", &base.q3_question},
      {"q3_stem", &base.q3_stem},
  };
  for (const auto& [key, value] : doc.items()) {
    const auto it = slots.find(key);
    if (it == slots.end())
      throw ConfigError("unknown template name '" + key + "' in " + path.string());
    if (!value.is_string())
      throw ConfigError("template '" + key + "' must be a string");
    *it->second = value.get<std::string>();
  }
  return base;
}

std::string substitute(std::string_view templ,
                       const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(templ.size());
  std::size_t i = 0;
  while (i < templ.size()) {
    const char c = templ[i];
    if (c != '{') {
      if (c == '}')
        throw ContractError("stray '}' in template at offset " + std::to_string(i));
      out.push_back(c);
      ++i;
      continue;
    }
    const std::size_t close = templ.find('}', i + 1);
    if (close == std::string_view::npos)
      throw ContractError("unterminated placeholder in template");
    const std::string key(templ.substr(i + 1, close - i - 1));
    const auto it = vars.find(key);
    if (it == vars.end())
      throw ContractError("unresolved placeholder {" + key + "}");
    out.append(it->second);
    i = close + 1;
  }
  return out;
}

namespace {

std::map<std::string, std::string> player_vars(const GameSpec& spec) {
  return {
      {"pa", spec.investor.display},
      {"pb", spec.trustee.display},
      {"pa.pron.sub", spec.investor.pron_subject},
      {"pa.pron.pos", spec.investor.pron_possessive},
      {"pb.pron.sub", spec.trustee.pron_subject},
      {"pb.pron.pos", spec.trustee.pron_possessive},
      {"amt_a", std::to_string(spec.amt_a)},
      {"amt_b", std::to_string(spec.amt_b)},
  };
}

std::string render_frame(const TemplateSet& templates,
                         scoring::PromptStyle style,
                         const std::string& scenario,
                         const std::string& question,
                         const std::string& stem) {
  const std::string& frame = style == scoring::PromptStyle::Instruct
                                 ? templates.frame_instruct
                                 : templates.frame_base;
  return substitute(frame, {{"scenario", scenario},
                            {"question", question},
                            {"stem", stem}});
}

int argmax_value(const scoring::CompletionDistribution& dist) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < dist.entries.size(); ++i)
    if (dist.entries[i].probability > dist.entries[best].probability) best = i;
  return std::stoi(dist.entries[best].continuation);
}

}  // namespace

std::string render_game_prompt(const GameSpec& spec,
                               const TemplateSet& templates) {
  spec.validate();
  const auto vars = player_vars(spec);
  return render_frame(templates, spec.style,
                      substitute(templates.scenario, vars),
                      substitute(templates.game_question, vars),
                      substitute(templates.game_stem, vars));
}

GameOutcome predict_investment(const GameSpec& spec,
                               scoring::ScoringClient& client,
                               const TemplateSet& templates) {
  spec.validate();
  scoring::ScoreRequest request;
  request.prompt = render_game_prompt(spec, templates);
  request.continuations = scoring::integer_continuations(0, spec.amt_a);

  GameOutcome outcome;
  outcome.spec = spec;
  outcome.distribution = client.score_distribution(request);
  outcome.mean = scoring::expected_value(
      outcome.distribution, scoring::integer_value_map(0, spec.amt_a));
  return outcome;
}

std::array<int, 3> verification_answers(int amt, int amt_a, int amt_b) {
  return {3 * amt, amt_b + 3 * amt, amt_a - amt};
}

std::string render_probe_question_prompt(const GameSpec& spec, int question,
                                         int amt,
                                         const TemplateSet& templates) {
  spec.validate();
  if (question < 1 || question > 3)
    throw ContractError("probing question index must be 1..3");
  auto vars = player_vars(spec);
  vars["amt"] = std::to_string(amt);
  const auto answers = verification_answers(amt, spec.amt_a, spec.amt_b);
  vars["q1_answer"] = std::to_string(answers[0]);
  vars["q2_answer"] = std::to_string(answers[1]);

  std::string scenario = substitute(templates.scenario, vars);
  if (question >= 2) scenario += "\n" + substitute(templates.q1_context, vars);
  if (question >= 3) scenario += "\n" + substitute(templates.q2_context, vars);

  const std::string& question_templ = question == 1   ? templates.q1_question
                                      : question == 2 ? templates.q2_question
                                                      : templates.q3_question;
  const std::string& stem_templ = question == 1   ? templates.q1_stem
                                  : question == 2 ? templates.q2_stem
                                                  : templates.q3_stem;
  return render_frame(templates, spec.style, scenario,
                      substitute(question_templ, vars),
                      substitute(stem_templ, vars));
}

VerificationReport verify_prompt(const GameSpec& spec,
                                 scoring::ScoringClient& client,
                                 const TemplateSet& templates) {
  spec.validate();
  VerificationReport report;
  report.spec = spec;
  report.pass = true;

  // candidate answers cover 3*amt_a and amt_b + 3*amt_a
  const int hi = std::max(40, spec.amt_b + 3 * spec.amt_a);
  const auto candidates = scoring::integer_continuations(0, hi);

  for (int amt = 0; amt <= spec.amt_a; ++amt) {
    VerificationRow row;
    row.amt = amt;
    const auto answers = verification_answers(amt, spec.amt_a, spec.amt_b);
    bool chain_ok = true;
    for (int q = 1; q <= 3; ++q) {
      bool* flag = q == 1 ? &row.q1_ok : q == 2 ? &row.q2_ok : &row.q3_ok;
      if (!chain_ok) {
        *flag = false;  // downstream of a failure
        continue;
      }
      try {
        scoring::ScoreRequest request;
        request.prompt = render_probe_question_prompt(spec, q, amt, templates);
        request.continuations = candidates;
        const auto dist = client.score_distribution(request);
        *flag = argmax_value(dist) == answers[q - 1];
      } catch (const Error& e) {
        *flag = false;
        row.note = "q" + std::to_string(q) + ": " + e.what();
      }
      chain_ok = *flag;
    }
    report.pass = report.pass && row.q1_ok && row.q2_ok && row.q3_ok;
    report.per_amt.push_back(std::move(row));
  }
  return report;
}

}  // namespace namegame::game
