#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dredge/distractor.hpp"
#include "dredge/token.hpp"

namespace dredge {

struct PoolStats {
  std::size_t events = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

/// Corpus-level roll-up: pooled significant step deltas in each direction
/// plus the share of samples that showed any significant change.
struct CorpusSummary {
  PoolStats pi_stats;  // magnitudes of significant increases
  PoolStats pd_stats;  // magnitudes of significant decreases
  double pct_pi = 0.0;
  double pct_pd = 0.0;
  double pct_union = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_failed = 0;
  double tau = 0.1;
};

struct MaxChangeRow {
  std::string source_id;
  double mpi = 0.0;
  double mpd = 0.0;
};

/// Per-sample maxima, plus sorted value vectors ready for plotting.
struct MaxChangeDistribution {
  std::vector<MaxChangeRow> rows;  // ordered by source_id
  std::vector<double> sorted_mpi;
  std::vector<double> sorted_mpd;
};

struct TokenCount {
  std::string text;
  TokenCategory category = TokenCategory::others;
  std::uint64_t count = 0;
};

/// Most frequent removed tokens across all significant steps, ranked by
/// count (ties broken by lexeme) and truncated to the top k overall.
struct TopDistractors {
  std::vector<TokenCount> ranked;      // overall ranking, length <= k
  std::size_t k = 16;
  std::uint64_t total_occurrences = 0;  // pre-truncation conservation count

  std::vector<TokenCount> for_category(TokenCategory category) const;
};

/// Pools all significant step deltas across samples. `stats` must cover
/// the successfully analyzed samples only; failures are reported via
/// `n_failed` and excluded from percentages. Throws EmptyCorpusError when
/// `stats` is empty.
CorpusSummary summarize(const std::vector<SampleStats>& stats,
                        const std::vector<DistractorRecord>& records,
                        Threshold tau, std::size_t n_failed = 0);

MaxChangeDistribution max_change_distribution(
    const std::vector<SampleStats>& stats);

/// Occurrence counts of removed tokens over all records; categories are
/// recomputed from `language` so loaded traces rank identically to fresh
/// runs.
TopDistractors top_distractors(const std::vector<DistractorRecord>& records,
                               Language language, std::size_t k = 16);

enum class ReportFormat { json, csv, markdown };

ReportFormat report_format_from_string(std::string_view name);

std::string render_summary(const CorpusSummary& summary, ReportFormat format);
std::string render_max_changes_csv(const MaxChangeDistribution& distribution);
std::string render_top_tokens(const TopDistractors& tops, ReportFormat format);

/// All report documents keyed by filename: summary.* and top_tokens.* in
/// the requested format, and max_changes.csv. Deterministic bytes.
std::map<std::string, std::string> emit(const CorpusSummary& summary,
                                        const MaxChangeDistribution& distribution,
                                        const TopDistractors& tops,
                                        ReportFormat format);

/// Writes the documents for every format in `formats` ("json", "csv",
/// "md", or "all") into `dir`, creating it if needed.
void write_reports(const std::filesystem::path& dir,
                   const CorpusSummary& summary,
                   const MaxChangeDistribution& distribution,
                   const TopDistractors& tops, const std::string& formats);

}  // namespace dredge
