#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "dredge/corpus.hpp"

namespace dredge {

struct RunTotals {
  std::size_t n_ingested = 0;
  std::size_t n_analyzed = 0;
  std::size_t n_failed = 0;
  std::size_t n_ingest_failures = 0;
  std::uint64_t total_queries = 0;
  int exit_code = kExitOk;
};

/// Full pipeline: ingest, reduce + analyze every sample across a worker
/// pool, persist one trace per sample under <out>/traces, then aggregate
/// into <out>/reports and <out>/manifest.json. Per-sample failures never
/// abort the run; configuration problems throw ConfigError before any
/// model sees a sample. Output bytes are independent of the worker count.
RunTotals run_corpus(const RunConfig& config, std::ostream& progress);

/// Re-runs the analysis/report stage from persisted traces alone — no
/// model is ever constructed. `dir` may be a run directory or its traces/
/// subdirectory. `tau` overrides the run's threshold when given.
RunTotals reaggregate(const std::filesystem::path& dir,
                      std::optional<double> tau,
                      const std::filesystem::path& out_dir,
                      const std::string& formats);

}  // namespace dredge
