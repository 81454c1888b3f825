#include "dredge/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_set>

#include "dredge/errors.hpp"

#include <nlohmann/json.hpp>

namespace dredge {

namespace {

std::string_view extension_for(Language language) {
  switch (language) {
    case Language::c: return ".c";
    case Language::java: return ".java";
    case Language::python: return ".py";
  }
  return "";
}

// Unbiased bounded draw; mt19937_64 output is pinned by the standard, so
// a fixed seed selects the same subset on every platform.
std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
  std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % static_cast<std::uint64_t>(n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

void ingest_directory(const RunConfig& config, IngestResult& result) {
  std::string_view ext = extension_for(config.language);
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(config.corpus)) {
    if (!entry.is_regular_file() || entry.path().extension() != ext) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) {
      result.failures.push_back("unreadable file: " + entry.path().string());
      continue;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    CorpusSample sample;
    sample.source_id =
        entry.path().lexically_relative(config.corpus).generic_string();
    sample.code = buffer.str();
    result.samples.push_back(std::move(sample));
  }
}

void ingest_jsonl(const RunConfig& config, IngestResult& result) {
  std::ifstream in(config.corpus, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open corpus file: " + config.corpus.string());
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      result.failures.push_back("line " + std::to_string(line_no) +
                                ": not valid JSON");
      continue;
    }
    if (!doc.is_object() || !doc.contains("id") || !doc.contains("code") ||
        !doc.at("code").is_string()) {
      result.failures.push_back("line " + std::to_string(line_no) +
                                ": expected {\"id\", \"code\"}");
      continue;
    }
    CorpusSample sample;
    if (doc.at("id").is_string()) {
      sample.source_id = doc.at("id").get<std::string>();
    } else {
      sample.source_id = doc.at("id").dump();
    }
    if (sample.source_id.empty()) {
      result.failures.push_back("line " + std::to_string(line_no) +
                                ": empty id");
      continue;
    }
    sample.code = doc.at("code").get<std::string>();
    if (doc.contains("label")) {
      const auto& label = doc.at("label");
      sample.expected_label =
          label.is_string() ? label.get<std::string>() : label.dump();
    }
    result.samples.push_back(std::move(sample));
  }
}

}  // namespace

IngestResult ingest(const RunConfig& config) {
  if (!std::filesystem::exists(config.corpus)) {
    throw ConfigError("corpus path does not exist: " + config.corpus.string());
  }
  IngestResult result;
  if (std::filesystem::is_directory(config.corpus)) {
    ingest_directory(config, result);
  } else {
    ingest_jsonl(config, result);
  }

  std::sort(result.samples.begin(), result.samples.end(),
            [](const CorpusSample& a, const CorpusSample& b) {
              return a.source_id < b.source_id;
            });
  std::unordered_set<std::string> seen;
  std::vector<CorpusSample> unique;
  unique.reserve(result.samples.size());
  for (CorpusSample& sample : result.samples) {
    if (!seen.insert(sample.source_id).second) {
      result.failures.push_back("duplicate source_id: " + sample.source_id);
      continue;
    }
    unique.push_back(std::move(sample));
  }
  result.samples = std::move(unique);

  if (config.sample_count > 0 &&
      config.sample_count < result.samples.size()) {
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(result.samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = 0; i < config.sample_count; ++i) {
      std::size_t j = i + bounded(rng, order.size() - i);
      std::swap(order[i], order[j]);
    }
    order.resize(config.sample_count);
    std::sort(order.begin(), order.end());
    std::vector<CorpusSample> chosen;
    chosen.reserve(order.size());
    for (std::size_t idx : order) {
      chosen.push_back(std::move(result.samples[idx]));
    }
    result.samples = std::move(chosen);
  }
  return result;
}

}  // namespace dredge
