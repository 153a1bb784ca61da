// namegame: audits name-based gender and race biases in language models by
// scoring Trust Game prompts through a candidate-continuation endpoint.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "namegame/commands.hpp"

namespace fs = std::filesystem;
using namegame::cli::RunConfig;

namespace {

struct CommonFlags {
  std::optional<std::string> config_path;
  std::optional<std::string> endpoint;
  std::optional<std::string> output_dir;
  std::optional<std::string> run_id;
  std::optional<std::string> census;
  std::optional<std::string> pair_file;
  std::optional<std::string> model_id;
  std::optional<std::string> investor;  // single-group override, "White,M"
  std::optional<std::string> cache_dir;
  std::optional<int> top_k;
  std::optional<int> max_parallel;
  bool allow_incomplete = false;
  bool gate_on_verification = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("-c,--config", flags.config_path, "JSON config file");
  cmd->add_option("--endpoint", flags.endpoint,
                  "backend endpoint (http(s)://... or mock:<fixtures.json>)");
  cmd->add_option("-o,--output-dir", flags.output_dir, "output directory");
  cmd->add_option("--run-id", flags.run_id, "run identifier");
  cmd->add_option("--census", flags.census, "census surname CSV");
  cmd->add_option("--pairs", flags.pair_file, "gender-surname pair file");
  cmd->add_option("--model-id", flags.model_id, "model identifier");
  cmd->add_option("--investor", flags.investor,
                  "restrict to one investor group, e.g. 'Hispanic,F'");
  cmd->add_option("--cache-dir", flags.cache_dir, "scoring cache directory");
  cmd->add_option("--top-k", flags.top_k, "ranked surnames per race to export");
  cmd->add_option("--max-parallel", flags.max_parallel,
                  "max in-flight score calls");
  cmd->add_flag("--allow-incomplete", flags.allow_incomplete,
                "analyze runs with failed games");
  cmd->add_flag("--gate-on-verification", flags.gate_on_verification,
                "require construct-validity pass per pairing");
}

RunConfig build_config(const CommonFlags& flags) {
  RunConfig config;
  if (flags.config_path) {
    config = RunConfig::load(*flags.config_path);
  } else {
    config.apply_env_overrides();
  }
  if (flags.endpoint) config.backend.endpoint = *flags.endpoint;
  if (flags.output_dir) config.output_dir = *flags.output_dir;
  if (flags.run_id) config.run_id = *flags.run_id;
  if (flags.census) config.census_path = *flags.census;
  if (flags.pair_file) config.pair_file = *flags.pair_file;
  if (flags.model_id) config.model_id = *flags.model_id;
  if (flags.cache_dir) config.backend.cache_dir = *flags.cache_dir;
  if (flags.top_k) config.top_k = static_cast<std::size_t>(*flags.top_k);
  if (flags.max_parallel) config.backend.max_parallel = *flags.max_parallel;
  if (flags.allow_incomplete) config.allow_incomplete = true;
  if (flags.gate_on_verification) config.gate_on_verification = true;
  if (flags.investor)
    config.investor_groups = {namegame::runner::group_from_label(*flags.investor)};
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Trust Game bias audit harness: surname curation, model perception "
      "probes, game simulation, and statistical analysis"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string run_dir_arg;

  auto* curate = app.add_subcommand(
      "curate", "rank census surnames per race by Bayesian posterior");
  add_common(curate, flags);

  auto* probe = app.add_subcommand(
      "probe", "refine seed surnames into model-perceived gender-surname pairs");
  add_common(probe, flags);

  auto* verify = app.add_subcommand(
      "verify", "run the three construct-validity probing questions");
  add_common(verify, flags);

  auto* run = app.add_subcommand(
      "run", "execute the 2x5 factorial Trust Game experiments");
  add_common(run, flags);

  auto* analyze = app.add_subcommand(
      "analyze", "ANOVA, post-hoc t-tests, effect sizes, interaction plots");
  add_common(analyze, flags);
  analyze->add_option("run_dir", run_dir_arg, "run directory to analyze");

  auto* report = app.add_subcommand(
      "report", "consolidated markdown report from an analyzed run");
  add_common(report, flags);
  report->add_option("run_dir", run_dir_arg, "run directory to report on");

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig config = build_config(flags);
    fs::path produced;
    if (curate->parsed()) {
      produced = namegame::cli::cmd_curate(config);
    } else if (probe->parsed()) {
      produced = namegame::cli::cmd_probe(config);
    } else if (verify->parsed()) {
      produced = namegame::cli::cmd_verify(config);
    } else if (run->parsed()) {
      produced = namegame::cli::cmd_run(config);
    } else if (analyze->parsed()) {
      const fs::path run_dir =
          run_dir_arg.empty() ? config.run_dir() : fs::path(run_dir_arg);
      produced = namegame::cli::cmd_analyze(config, run_dir);
    } else if (report->parsed()) {
      const fs::path run_dir =
          run_dir_arg.empty() ? config.run_dir() : fs::path(run_dir_arg);
      produced = namegame::cli::cmd_report(config, run_dir);
    }
    std::cout << produced.string() << "\n";
    return namegame::cli::kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return namegame::cli::exit_code_for(e);
  }
}
