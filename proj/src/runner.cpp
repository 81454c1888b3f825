#include "dredge/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "dredge/distractor.hpp"
#include "dredge/errors.hpp"
#include "dredge/report.hpp"
#include "dredge/trace_io.hpp"
#include "dredge/version.hpp"

#include <nlohmann/json.hpp>

namespace dredge {

namespace {

std::string sanitize_filename(const std::string& source_id) {
  std::string out;
  out.reserve(source_id.size());
  for (char c : source_id) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' ||
              c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  if (out.empty()) out = "sample";
  return out;
}

struct SampleOutcome {
  std::string source_id;
  std::string status;  // complete | budget-exhausted | adapter-failed | ...
  std::string detail;
  std::string trace_file;
  std::uint64_t total_queries = 0;
  std::uint64_t distinct_queries = 0;
  bool analyzed = false;
  std::optional<bool> one_minimal;
  AnalysisResult analysis;
};

void process_sample(const RunConfig& config, const CorpusSample& sample,
                    Model& model, SampleOutcome& outcome,
                    const std::filesystem::path& trace_path) {
  Program program;
  try {
    program = tokenize(sample.code, config.language, sample.source_id);
  } catch (const LexError& e) {
    outcome.status = "lex-failed";
    outcome.detail = e.what();
    return;
  }
  if (program.tokens.empty()) {
    outcome.status = "empty-program";
    return;
  }

  QueryCache cache;
  QueryCache* cache_ptr = config.use_cache ? &cache : nullptr;
  // Effective cap: the run-level budget, tightened by any cap the model
  // spec carries.
  std::optional<std::uint64_t> budget;
  if (config.budget > 0) budget = config.budget;
  if (config.model.query_budget) {
    budget = budget ? std::min(*budget, *config.model.query_budget)
                    : config.model.query_budget;
  }

  ReductionTrace trace;
  try {
    trace = reduce(program, model, cache_ptr, budget);
  } catch (const AdapterError& e) {
    outcome.status = "adapter-failed";
    outcome.detail = e.what();
    return;
  } catch (const ProtocolError& e) {
    outcome.status = "protocol-error";
    outcome.detail = e.what();
    return;
  }

  outcome.status = std::string(to_string(trace.status));
  outcome.total_queries = trace.total_queries;
  outcome.distinct_queries = trace.distinct_queries;
  write_trace(trace_path, trace);
  outcome.trace_file = trace_path.filename().string();

  if (trace.status == TraceStatus::complete) {
    if (config.verify_minimality) {
      try {
        outcome.one_minimal = verify_one_minimal(trace, model, cache_ptr);
      } catch (const std::runtime_error&) {
        outcome.one_minimal = std::nullopt;
      }
    }
    outcome.analysis = analyze(trace, Threshold(config.tau));
    outcome.analyzed = true;
  }
}

nlohmann::ordered_json config_echo(const RunConfig& config) {
  nlohmann::ordered_json doc;
  doc["corpus"] = config.corpus.string();
  doc["language"] = std::string(to_string(config.language));
  doc["model"] = config.model.kind;
  doc["tau"] = config.tau;
  doc["sample_count"] = config.sample_count;
  doc["seed"] = config.seed;
  doc["jobs"] = config.jobs;
  doc["budget"] = config.budget;
  doc["format"] = config.format;
  doc["cache"] = config.use_cache;
  return doc;
}

void write_aggregates(const std::filesystem::path& out_dir,
                      const std::vector<SampleStats>& stats,
                      const std::vector<DistractorRecord>& records,
                      Threshold tau, std::size_t n_failed, Language language,
                      const std::string& formats) {
  CorpusSummary summary;
  if (!stats.empty()) {
    summary = summarize(stats, records, tau, n_failed);
  } else {
    summary.tau = tau.tau;
    summary.n_failed = n_failed;
  }
  MaxChangeDistribution distribution = max_change_distribution(stats);
  TopDistractors tops = top_distractors(records, language);
  write_reports(out_dir / "reports", summary, distribution, tops, formats);
}

}  // namespace

RunTotals run_corpus(const RunConfig& config, std::ostream& progress) {
  Threshold tau(config.tau);
  if (config.jobs < 1) throw ConfigError("worker count must be >= 1");
  if (config.out_dir.empty()) throw ConfigError("output directory not set");

  // Validate the model spec (and the adapter command) before any sample
  // is touched; config errors must abort the run up front.
  { auto probe = config.model.instantiate(); }

  IngestResult ingested = ingest(config);
  std::vector<CorpusSample>& samples = ingested.samples;

  std::filesystem::create_directories(config.out_dir / "traces");

  // Trace filenames are fixed up front so id sanitization collisions
  // resolve the same way regardless of completion order.
  std::vector<std::filesystem::path> trace_paths(samples.size());
  {
    std::unordered_set<std::string> used;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      std::string base = sanitize_filename(samples[i].source_id);
      std::string name = base + ".json";
      for (int suffix = 2; !used.insert(name).second; ++suffix) {
        name = base + "-" + std::to_string(suffix) + ".json";
      }
      trace_paths[i] = config.out_dir / "traces" / name;
    }
  }

  std::vector<SampleOutcome> outcomes(samples.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  std::size_t worker_count = std::min(config.jobs, std::max<std::size_t>(
                                                       samples.size(), 1));
  auto worker = [&]() {
    std::unique_ptr<Model> model;  // lazily built: workers may get no work
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= samples.size()) break;
      SampleOutcome& outcome = outcomes[i];
      outcome.source_id = samples[i].source_id;
      try {
        if (!model) model = config.model.instantiate();
        process_sample(config, samples[i], *model, outcome, trace_paths[i]);
      } catch (const std::runtime_error& e) {
        outcome.status = "failed";
        outcome.detail = e.what();
      }
      std::size_t completed = done.fetch_add(1) + 1;
      std::lock_guard lock(progress_mutex);
      progress << "[" << completed << "/" << samples.size() << "] "
               << outcome.source_id << ": " << outcome.status << "\n";
    }
  };

  if (worker_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (std::size_t i = 0; i < worker_count; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // Aggregate in source_id order (samples are already sorted by ingest).
  std::vector<SampleStats> stats;
  std::vector<DistractorRecord> records;
  RunTotals totals;
  totals.n_ingested = samples.size();
  totals.n_ingest_failures = ingested.failures.size();
  for (const SampleOutcome& outcome : outcomes) {
    totals.total_queries += outcome.total_queries;
    if (outcome.analyzed) {
      ++totals.n_analyzed;
      stats.push_back(outcome.analysis.stats);
      records.insert(records.end(), outcome.analysis.records.begin(),
                     outcome.analysis.records.end());
    } else {
      ++totals.n_failed;
    }
  }

  write_aggregates(config.out_dir, stats, records, tau, totals.n_failed,
                   config.language, config.format);

  nlohmann::ordered_json manifest;
  manifest["tool"] = "dredge";
  manifest["version"] = std::string(kVersion);
  manifest["mode"] = "run";
  manifest["config"] = config_echo(config);
  manifest["counts"] = {{"ingested", totals.n_ingested},
                        {"analyzed", totals.n_analyzed},
                        {"failed", totals.n_failed},
                        {"ingest_failures", totals.n_ingest_failures}};
  manifest["total_queries"] = totals.total_queries;
  auto ingest_failures = nlohmann::ordered_json::array();
  for (const std::string& failure : ingested.failures) {
    ingest_failures.push_back(failure);
  }
  manifest["ingest_failures"] = std::move(ingest_failures);
  auto sample_docs = nlohmann::ordered_json::array();
  for (const SampleOutcome& outcome : outcomes) {
    nlohmann::ordered_json doc;
    doc["id"] = outcome.source_id;
    doc["status"] = outcome.status;
    if (!outcome.detail.empty()) doc["detail"] = outcome.detail;
    if (!outcome.trace_file.empty()) doc["trace"] = outcome.trace_file;
    doc["queries"] = outcome.total_queries;
    doc["distinct_queries"] = outcome.distinct_queries;
    if (outcome.one_minimal) doc["one_minimal_verified"] = *outcome.one_minimal;
    sample_docs.push_back(std::move(doc));
  }
  manifest["samples"] = std::move(sample_docs);
  {
    std::ofstream out(config.out_dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << "\n";
  }

  totals.exit_code = totals.n_failed > 0 ? kExitPartial : kExitOk;
  return totals;
}

RunTotals reaggregate(const std::filesystem::path& dir,
                      std::optional<double> tau_override,
                      const std::filesystem::path& out_dir,
                      const std::string& formats) {
  std::filesystem::path trace_dir = dir;
  if (std::filesystem::is_directory(dir / "traces")) trace_dir = dir / "traces";

  double tau_value = 0.1;
  std::size_t manifest_failed_without_trace = 0;
  Language language = Language::c;
  bool have_language = false;
  std::filesystem::path manifest_path = dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) {
    manifest_path = trace_dir.parent_path() / "manifest.json";
  }
  if (std::filesystem::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    nlohmann::json manifest;
    try {
      in >> manifest;
      tau_value = manifest.at("config").value("tau", 0.1);
      std::string lang = manifest.at("config").value("language", "");
      if (!lang.empty()) {
        language = language_from_string(lang);
        have_language = true;
      }
      for (const auto& sample : manifest.value("samples", nlohmann::json::array())) {
        if (!sample.contains("trace")) ++manifest_failed_without_trace;
      }
    } catch (const nlohmann::json::exception&) {
      // fall back to defaults; the traces are the source of truth
    }
  }
  if (tau_override) tau_value = *tau_override;
  Threshold tau(tau_value);

  std::vector<ReductionTrace> traces = read_trace_dir(trace_dir);
  if (!have_language && !traces.empty()) {
    language = traces.front().original_program.language;
  }

  RunTotals totals;
  totals.n_ingested = traces.size() + manifest_failed_without_trace;
  totals.n_failed = manifest_failed_without_trace;
  std::vector<SampleStats> stats;
  std::vector<DistractorRecord> records;
  for (const ReductionTrace& trace : traces) {
    totals.total_queries += trace.total_queries;
    if (trace.status != TraceStatus::complete) {
      ++totals.n_failed;
      continue;
    }
    AnalysisResult analysis = analyze(trace, tau);
    stats.push_back(analysis.stats);
    records.insert(records.end(), analysis.records.begin(),
                   analysis.records.end());
    ++totals.n_analyzed;
  }

  write_aggregates(out_dir, stats, records, tau, totals.n_failed, language,
                   formats);

  // Named reanalysis.json so re-running into the original run directory
  // never clobbers the run manifest.
  nlohmann::ordered_json manifest;
  manifest["tool"] = "dredge";
  manifest["version"] = std::string(kVersion);
  manifest["mode"] = "reanalyze";
  manifest["tau"] = tau.tau;
  manifest["counts"] = {{"traces", traces.size()},
                        {"analyzed", totals.n_analyzed},
                        {"failed", totals.n_failed},
                        {"distractor_records", records.size()}};
  manifest["total_queries"] = totals.total_queries;
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "reanalysis.json", std::ios::binary);
    out << manifest.dump(2) << "\n";
  }

  totals.exit_code = kExitOk;
  return totals;
}

}  // namespace dredge
