#include "dredge/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "dredge/errors.hpp"

#include <nlohmann/json.hpp>

namespace dredge {

namespace {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

PoolStats pool_stats(std::vector<double> values) {
  PoolStats stats;
  stats.events = values.size();
  if (values.empty()) return stats;
  std::sort(values.begin(), values.end());
  stats.min = values.front();
  stats.max = values.back();
  stats.mean = std::accumulate(values.begin(), values.end(), 0.0) /
               static_cast<double>(values.size());
  return stats;
}

const std::array<TokenCategory, 7>& category_order() {
  static const std::array<TokenCategory, 7> order = {
      TokenCategory::control_flow, TokenCategory::datatypes,
      TokenCategory::digits,       TokenCategory::identifiers,
      TokenCategory::operators,    TokenCategory::modifiers,
      TokenCategory::others};
  return order;
}

}  // namespace

std::vector<TokenCount> TopDistractors::for_category(
    TokenCategory category) const {
  std::vector<TokenCount> out;
  for (const TokenCount& entry : ranked) {
    if (entry.category == category) out.push_back(entry);
  }
  return out;
}

CorpusSummary summarize(const std::vector<SampleStats>& stats,
                        const std::vector<DistractorRecord>& records,
                        Threshold tau, std::size_t n_failed) {
  if (stats.empty()) {
    throw EmptyCorpusError("summarize called with zero analyzed samples");
  }
  CorpusSummary summary;
  summary.tau = tau.tau;
  summary.n_samples = stats.size();
  summary.n_failed = n_failed;

  std::vector<double> increases;
  std::vector<double> decreases;
  for (const DistractorRecord& record : records) {
    if (record.direction == Direction::increase) {
      increases.push_back(record.magnitude);
    } else if (record.direction == Direction::decrease) {
      decreases.push_back(record.magnitude);
    }
  }
  summary.pi_stats = pool_stats(std::move(increases));
  summary.pd_stats = pool_stats(std::move(decreases));

  std::size_t n_pi = 0;
  std::size_t n_pd = 0;
  std::size_t n_union = 0;
  for (const SampleStats& sample : stats) {
    if (sample.has_pi) ++n_pi;
    if (sample.has_pd) ++n_pd;
    if (sample.has_pi || sample.has_pd) ++n_union;
  }
  double denom = static_cast<double>(stats.size());
  summary.pct_pi = 100.0 * static_cast<double>(n_pi) / denom;
  summary.pct_pd = 100.0 * static_cast<double>(n_pd) / denom;
  summary.pct_union = 100.0 * static_cast<double>(n_union) / denom;
  return summary;
}

MaxChangeDistribution max_change_distribution(
    const std::vector<SampleStats>& stats) {
  MaxChangeDistribution distribution;
  distribution.rows.reserve(stats.size());
  for (const SampleStats& sample : stats) {
    distribution.rows.push_back(
        {sample.source_id, sample.max_increase, sample.max_decrease});
  }
  std::sort(distribution.rows.begin(), distribution.rows.end(),
            [](const MaxChangeRow& a, const MaxChangeRow& b) {
              return a.source_id < b.source_id;
            });
  for (const MaxChangeRow& row : distribution.rows) {
    distribution.sorted_mpi.push_back(row.mpi);
    distribution.sorted_mpd.push_back(row.mpd);
  }
  std::sort(distribution.sorted_mpi.begin(), distribution.sorted_mpi.end());
  std::sort(distribution.sorted_mpd.begin(), distribution.sorted_mpd.end());
  return distribution;
}

TopDistractors top_distractors(const std::vector<DistractorRecord>& records,
                               Language language, std::size_t k) {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;
  for (const DistractorRecord& record : records) {
    for (const Token& token : record.tokens) {
      ++counts[token.text];
      ++total;
    }
  }
  std::vector<TokenCount> ranked;
  ranked.reserve(counts.size());
  for (const auto& [text, count] : counts) {
    ranked.push_back({text, categorize(text, language), count});
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const TokenCount& a, const TokenCount& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.text < b.text;
            });
  if (ranked.size() > k) ranked.resize(k);

  TopDistractors tops;
  tops.ranked = std::move(ranked);
  tops.k = k;
  tops.total_occurrences = total;
  return tops;
}

ReportFormat report_format_from_string(std::string_view name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  if (name == "md" || name == "markdown") return ReportFormat::markdown;
  throw ConfigError("unknown report format: '" + std::string(name) +
                    "' (expected json, csv or md)");
}

std::string render_summary(const CorpusSummary& summary, ReportFormat format) {
  // PD values are stored as magnitudes and reported with a negative sign.
  double pd_min = summary.pd_stats.events ? -summary.pd_stats.min : 0.0;
  double pd_max = summary.pd_stats.events ? -summary.pd_stats.max : 0.0;
  double pd_mean = summary.pd_stats.events ? -summary.pd_stats.mean : 0.0;

  switch (format) {
    case ReportFormat::json: {
      nlohmann::ordered_json doc;
      doc["n_samples"] = summary.n_samples;
      doc["n_failed"] = summary.n_failed;
      doc["tau"] = summary.tau;
      doc["probability_increase"] = {{"events", summary.pi_stats.events},
                                     {"min", summary.pi_stats.min},
                                     {"max", summary.pi_stats.max},
                                     {"mean", summary.pi_stats.mean}};
      doc["probability_decrease"] = {{"events", summary.pd_stats.events},
                                     {"min", pd_min},
                                     {"max", pd_max},
                                     {"mean", pd_mean}};
      doc["sample_pct"] = {{"pi", summary.pct_pi},
                           {"pd", summary.pct_pd},
                           {"pi_or_pd", summary.pct_union}};
      return doc.dump(2) + "\n";
    }
    case ReportFormat::csv: {
      std::string out =
          "n_samples,n_failed,tau,pi_events,pi_min,pi_max,pi_mean,"
          "pd_events,pd_min,pd_max,pd_mean,pct_pi,pct_pd,pct_pi_or_pd\n";
      out += std::to_string(summary.n_samples) + "," +
             std::to_string(summary.n_failed) + "," + fixed(summary.tau, 6) +
             "," + std::to_string(summary.pi_stats.events) + "," +
             fixed(summary.pi_stats.min, 6) + "," +
             fixed(summary.pi_stats.max, 6) + "," +
             fixed(summary.pi_stats.mean, 6) + "," +
             std::to_string(summary.pd_stats.events) + "," + fixed(pd_min, 6) +
             "," + fixed(pd_max, 6) + "," + fixed(pd_mean, 6) + "," +
             fixed(summary.pct_pi, 6) + "," + fixed(summary.pct_pd, 6) + "," +
             fixed(summary.pct_union, 6) + "\n";
      return out;
    }
    case ReportFormat::markdown: {
      std::string out;
      out +=
          "| Samples | Failed | PI min | PI max | PI mean | PD min | PD max "
          "| PD mean | PI % | PD % | PI ∪ PD % |\n";
      out +=
          "|---|---|---|---|---|---|---|---|---|---|---|\n";
      out += "| " + std::to_string(summary.n_samples) + " | " +
             std::to_string(summary.n_failed) + " | " +
             fixed(summary.pi_stats.min, 2) + " | " +
             fixed(summary.pi_stats.max, 2) + " | " +
             fixed(summary.pi_stats.mean, 2) + " | " + fixed(pd_min, 2) +
             " | " + fixed(pd_max, 2) + " | " + fixed(pd_mean, 2) + " | " +
             fixed(summary.pct_pi, 2) + " | " + fixed(summary.pct_pd, 2) +
             " | " + fixed(summary.pct_union, 2) + " |\n";
      return out;
    }
  }
  throw ConfigError("unhandled report format");
}

std::string render_max_changes_csv(const MaxChangeDistribution& distribution) {
  std::string out = "source_id,mpi,mpd\n";
  for (const MaxChangeRow& row : distribution.rows) {
    out += row.source_id + "," + fixed(row.mpi, 6) + "," + fixed(row.mpd, 6) +
           "\n";
  }
  return out;
}

std::string render_top_tokens(const TopDistractors& tops, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: {
      nlohmann::ordered_json doc;
      doc["k"] = tops.k;
      doc["total_occurrences"] = tops.total_occurrences;
      auto categories = nlohmann::ordered_json::array();
      for (TokenCategory category : category_order()) {
        auto entries = tops.for_category(category);
        if (entries.empty()) continue;
        nlohmann::ordered_json group;
        group["category"] = std::string(to_string(category));
        auto tokens = nlohmann::ordered_json::array();
        for (const TokenCount& entry : entries) {
          tokens.push_back({{"text", entry.text}, {"count", entry.count}});
        }
        group["tokens"] = std::move(tokens);
        categories.push_back(std::move(group));
      }
      doc["categories"] = std::move(categories);
      return doc.dump(2) + "\n";
    }
    case ReportFormat::csv: {
      std::string out = "category,token,count\n";
      for (TokenCategory category : category_order()) {
        for (const TokenCount& entry : tops.for_category(category)) {
          std::string text = entry.text;
          bool quote = text.find_first_of(",\"\n") != std::string::npos;
          if (quote) {
            std::string escaped = "\"";
            for (char c : text) {
              if (c == '"') escaped += "\"\"";
              else escaped.push_back(c);
            }
            escaped += "\"";
            text = std::move(escaped);
          }
          out += std::string(to_string(category)) + "," + text + "," +
                 std::to_string(entry.count) + "\n";
        }
      }
      return out;
    }
    case ReportFormat::markdown: {
      std::string out = "| Category | Tokens |\n|---|---|\n";
      for (TokenCategory category : category_order()) {
        auto entries = tops.for_category(category);
        if (entries.empty()) continue;
        std::string cell;
        for (const TokenCount& entry : entries) {
          if (!cell.empty()) cell += ", ";
          cell += "`" + entry.text + "` (" + std::to_string(entry.count) + ")";
        }
        out += "| " + std::string(to_string(category)) + " | " + cell + " |\n";
      }
      return out;
    }
  }
  throw ConfigError("unhandled report format");
}

std::map<std::string, std::string> emit(const CorpusSummary& summary,
                                        const MaxChangeDistribution& distribution,
                                        const TopDistractors& tops,
                                        ReportFormat format) {
  const char* ext = format == ReportFormat::json  ? "json"
                    : format == ReportFormat::csv ? "csv"
                                                  : "md";
  std::map<std::string, std::string> documents;
  documents["summary." + std::string(ext)] = render_summary(summary, format);
  documents["top_tokens." + std::string(ext)] =
      render_top_tokens(tops, format);
  documents["max_changes.csv"] = render_max_changes_csv(distribution);
  return documents;
}

void write_reports(const std::filesystem::path& dir,
                   const CorpusSummary& summary,
                   const MaxChangeDistribution& distribution,
                   const TopDistractors& tops, const std::string& formats) {
  std::vector<ReportFormat> selected;
  if (formats == "all" || formats.empty()) {
    selected = {ReportFormat::json, ReportFormat::csv, ReportFormat::markdown};
  } else {
    selected = {report_format_from_string(formats)};
  }
  std::filesystem::create_directories(dir);
  for (ReportFormat format : selected) {
    for (const auto& [name, bytes] : emit(summary, distribution, tops, format)) {
      std::ofstream out(dir / name, std::ios::binary);
      out << bytes;
    }
  }
}

}  // namespace dredge
