#include <iostream>
#include <optional>
#include <string>

#include "dredge/adapter.hpp"
#include "dredge/errors.hpp"
#include "dredge/runner.hpp"
#include "dredge/version.hpp"

#include <CLI11.hpp>

namespace {

dredge::ModelSpec build_model_spec(const std::string& model_kind,
                                   const std::string& model_config,
                                   const std::string& adapter_cmd,
                                   int adapter_timeout_ms) {
  if (model_kind == "external") {
    if (adapter_cmd.empty()) {
      throw dredge::ConfigError("--model external requires --adapter-cmd");
    }
    return dredge::ModelSpec::external(
        dredge::split_command_line(adapter_cmd), adapter_timeout_ms);
  }
  if (model_kind == "linear-bag" || model_kind == "keyword-rule") {
    if (model_config.empty()) {
      throw dredge::ConfigError("--model " + model_kind +
                                " requires --model-config FILE");
    }
    return dredge::ModelSpec::from_json_file(model_config, model_kind);
  }
  throw dredge::ConfigError("unknown model kind '" + model_kind +
                            "' (expected linear-bag, keyword-rule or external)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dredge: prediction-preserving program reduction and "
               "distractor-token extraction for code models"};
  app.set_version_flag("--version", std::string(dredge::kVersion));
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand(
      "run", "Reduce a corpus, persist traces, emit reports");
  std::string corpus;
  std::string lang = "c";
  std::string model_kind = "linear-bag";
  std::string model_config;
  std::string adapter_cmd;
  int adapter_timeout_ms = 30000;
  double tau = 0.1;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::uint64_t budget = 50000;
  std::string out_dir;
  std::string format = "all";
  bool no_cache = false;
  bool verify = false;
  run->add_option("--corpus", corpus,
                  "Corpus: directory of sources or a JSONL file")
      ->required()
      ->envname("DREDGE_CORPUS");
  run->add_option("--lang", lang, "Language: c | java | python")
      ->envname("DREDGE_LANG");
  run->add_option("--model", model_kind,
                  "Model kind: linear-bag | keyword-rule | external")
      ->envname("DREDGE_MODEL");
  run->add_option("--model-config", model_config,
                  "JSON config for a builtin model")
      ->envname("DREDGE_MODEL_CONFIG");
  run->add_option("--adapter-cmd", adapter_cmd,
                  "Command line of an external adapter process")
      ->envname("DREDGE_ADAPTER_CMD");
  run->add_option("--adapter-timeout-ms", adapter_timeout_ms,
                  "Per-request adapter timeout")
      ->envname("DREDGE_ADAPTER_TIMEOUT_MS");
  run->add_option("--tau", tau, "Significance threshold in (0,1)")
      ->envname("DREDGE_TAU");
  run->add_option("--samples", samples,
                  "Random subset size (0 = whole corpus)")
      ->envname("DREDGE_SAMPLES");
  run->add_option("--seed", seed, "Seed for subset selection")
      ->envname("DREDGE_SEED");
  run->add_option("--jobs", jobs, "Worker count")->envname("DREDGE_JOBS");
  run->add_option("--budget", budget,
                  "Model queries per sample (0 = unlimited)")
      ->envname("DREDGE_BUDGET");
  run->add_option("--out", out_dir, "Output directory")
      ->required()
      ->envname("DREDGE_OUT");
  run->add_option("--format", format, "Report format: json | csv | md | all")
      ->envname("DREDGE_FORMAT");
  run->add_flag("--no-cache", no_cache, "Disable query memoization");
  run->add_flag("--verify", verify,
                "Re-check 1-minimality of every complete trace");

  // reanalyze
  auto* reanalyze = app.add_subcommand(
      "reanalyze", "Re-apply the threshold to persisted traces (no queries)");
  std::string reanalyze_dir;
  double reanalyze_tau = 0.1;
  bool reanalyze_tau_set = false;
  std::string reanalyze_out;
  std::string reanalyze_format = "all";
  reanalyze->add_option("trace-dir", reanalyze_dir,
                        "Run directory or its traces/ subdirectory")
      ->required();
  reanalyze->add_option("--tau", reanalyze_tau, "New threshold")
      ->each([&](const std::string&) { reanalyze_tau_set = true; });
  reanalyze->add_option("--out", reanalyze_out,
                        "Output directory (default: trace dir's run dir)");
  reanalyze->add_option("--format", reanalyze_format,
                        "Report format: json | csv | md | all");

  // report
  auto* report = app.add_subcommand(
      "report", "Regenerate reports from persisted traces");
  std::string report_dir;
  std::string report_out;
  std::string report_format = "all";
  report->add_option("trace-dir", report_dir,
                     "Run directory or its traces/ subdirectory")
      ->required();
  report->add_option("--out", report_out,
                     "Output directory (default: the run directory)");
  report->add_option("--format", report_format,
                     "Report format: json | csv | md | all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : dredge::kExitConfig;
  }

  try {
    if (run->parsed()) {
      dredge::RunConfig config;
      config.corpus = corpus;
      config.language = dredge::language_from_string(lang);
      config.model =
          build_model_spec(model_kind, model_config, adapter_cmd,
                           adapter_timeout_ms);
      config.tau = tau;
      config.sample_count = samples;
      config.seed = seed;
      config.jobs = jobs;
      config.budget = budget;
      config.out_dir = out_dir;
      config.format = format;
      config.use_cache = !no_cache;
      config.verify_minimality = verify;
      dredge::RunTotals totals = dredge::run_corpus(config, std::cerr);
      std::cerr << "analyzed " << totals.n_analyzed << "/" << totals.n_ingested
                << " samples (" << totals.n_failed << " failed, "
                << totals.n_ingest_failures << " ingest failures), "
                << totals.total_queries << " candidate queries\n";
      return totals.exit_code;
    }
    if (reanalyze->parsed()) {
      std::filesystem::path dir(reanalyze_dir);
      std::filesystem::path out =
          reanalyze_out.empty() ? dir : std::filesystem::path(reanalyze_out);
      std::optional<double> tau_override;
      if (reanalyze_tau_set) tau_override = reanalyze_tau;
      dredge::RunTotals totals =
          dredge::reaggregate(dir, tau_override, out, reanalyze_format);
      std::cerr << "reanalyzed " << totals.n_analyzed << " traces ("
                << totals.n_failed << " failed)\n";
      return totals.exit_code;
    }
    if (report->parsed()) {
      std::filesystem::path dir(report_dir);
      std::filesystem::path out =
          report_out.empty() ? dir : std::filesystem::path(report_out);
      dredge::RunTotals totals =
          dredge::reaggregate(dir, std::nullopt, out, report_format);
      std::cerr << "reported on " << totals.n_analyzed << " traces ("
                << totals.n_failed << " failed)\n";
      return totals.exit_code;
    }
  } catch (const dredge::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return dredge::kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dredge::kExitConfig;
  }
  return dredge::kExitConfig;
}
