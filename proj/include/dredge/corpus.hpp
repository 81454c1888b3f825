#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dredge/model.hpp"
#include "dredge/token.hpp"

namespace dredge {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitConfig = 2;

struct RunConfig {
  std::filesystem::path corpus;  // directory of sources, or a JSONL file
  Language language = Language::c;
  ModelSpec model;
  double tau = 0.1;
  std::size_t sample_count = 0;  // 0 = whole corpus
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::uint64_t budget = 50000;  // model queries per sample, 0 = unlimited
  std::filesystem::path out_dir;
  std::string format = "all";  // json | csv | md | all
  bool use_cache = true;
  bool verify_minimality = false;
};

struct CorpusSample {
  std::string source_id;
  std::string code;
  std::optional<std::string> expected_label;  // informational only
};

struct IngestResult {
  std::vector<CorpusSample> samples;  // ordered by source_id
  std::vector<std::string> failures;  // skipped entries, with line numbers
};

/// Reads the corpus. Directory mode picks up files by the language's
/// extension (.c / .java / .py), JSONL mode reads one {"id","code",
/// "label"?} object per line. When sample_count is positive and smaller
/// than the corpus, a seeded uniform subset is drawn without replacement;
/// a fixed seed selects the same subset every run. Malformed entries are
/// skipped and reported, never fatal.
IngestResult ingest(const RunConfig& config);

}  // namespace dredge
