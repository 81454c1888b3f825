// Shared test utilities. The oracle here is deliberately independent of
// the engine: scores go through tanh instead of the engine's logistic
// call, and subset search enumerates token masks by brute force.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dredge/ddmin.hpp"
#include "dredge/token.hpp"

namespace dredge::testing {

inline std::filesystem::path make_temp_dir(const std::string& tag) {
  std::string tmpl =
      (std::filesystem::temp_directory_path() / ("dredge-" + tag + "-XXXXXX"))
          .string();
  if (!mkdtemp(tmpl.data())) {
    throw std::runtime_error("mkdtemp failed for " + tmpl);
  }
  return std::filesystem::path(tmpl);
}

inline Program make_program(const std::vector<std::string>& texts,
                            Language lang = Language::c,
                            std::string source_id = "test") {
  Program program;
  program.language = lang;
  program.source_id = std::move(source_id);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    Token token;
    token.text = texts[i];
    token.category = categorize(texts[i], lang);
    token.index = i;
    token.line = 1;
    program.tokens.push_back(std::move(token));
  }
  return program;
}

// sigma(z) via the tanh identity; same function, different code path.
inline double oracle_sigma(double z) { return 0.5 * (1.0 + std::tanh(z / 2.0)); }

inline double oracle_logit(const std::map<std::string, double>& weights,
                           double bias, const std::vector<std::string>& texts) {
  double z = bias;
  for (const std::string& text : texts) {
    auto it = weights.find(text);
    if (it != weights.end()) z += it->second;
  }
  return z;
}

inline std::string oracle_label(const std::map<std::string, double>& weights,
                                double bias,
                                const std::vector<std::string>& texts) {
  return oracle_sigma(oracle_logit(weights, bias, texts)) > 0.5 ? "1" : "0";
}

inline std::vector<std::string> texts_of(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& token : tokens) out.push_back(token.text);
  return out;
}

// All non-empty subsets (as bitmasks) whose oracle label matches `label`,
// for programs of at most ~20 tokens.
inline std::vector<std::uint32_t> label_preserving_masks(
    const std::map<std::string, double>& weights, double bias,
    const std::vector<std::string>& texts, const std::string& label) {
  std::vector<std::uint32_t> masks;
  std::uint32_t full = (1u << texts.size()) - 1;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    std::vector<std::string> subset;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (mask & (1u << i)) subset.push_back(texts[i]);
    }
    if (oracle_label(weights, bias, subset) == label) masks.push_back(mask);
  }
  return masks;
}

inline int popcount(std::uint32_t mask) {
  int n = 0;
  while (mask) {
    n += mask & 1;
    mask >>= 1;
  }
  return n;
}

// A mask is 1-minimal iff clearing any single bit breaks the label (or
// empties the program).
inline bool mask_is_one_minimal(const std::map<std::string, double>& weights,
                                double bias,
                                const std::vector<std::string>& texts,
                                std::uint32_t mask, const std::string& label) {
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (!(mask & (1u << i))) continue;
    std::uint32_t smaller = mask & ~(1u << i);
    if (smaller == 0) continue;
    std::vector<std::string> subset;
    for (std::size_t j = 0; j < texts.size(); ++j) {
      if (smaller & (1u << j)) subset.push_back(texts[j]);
    }
    if (oracle_label(weights, bias, subset) == label) return false;
  }
  return true;
}

// Builds a complete trace with a prescribed score sequence; used to test
// the analysis formulas in isolation.
inline ReductionTrace trace_with_scores(double original_score,
                                        const std::vector<double>& step_scores,
                                        const std::string& label = "1") {
  std::vector<std::string> texts;
  for (std::size_t i = 0; i < step_scores.size() + 1; ++i) {
    texts.push_back("t" + std::to_string(i));
  }
  ReductionTrace trace;
  trace.source_id = "synthetic";
  trace.original_program = make_program(texts);
  trace.original_prediction = {label, original_score};
  std::vector<std::size_t> surviving(texts.size());
  for (std::size_t i = 0; i < surviving.size(); ++i) surviving[i] = i;
  for (std::size_t i = 0; i < step_scores.size(); ++i) {
    ReductionStep step;
    step.step_index = i + 1;
    step.removed_tokens = {trace.original_program.tokens[surviving.back()]};
    surviving.pop_back();
    step.surviving_token_indices = surviving;
    step.prediction = {label, step_scores[i]};
    step.granularity = 2;
    step.queries_spent = 1;
    trace.steps.push_back(std::move(step));
  }
  trace.total_queries = step_scores.size();
  trace.status = TraceStatus::complete;
  trace.final_is_one_minimal = true;
  return trace;
}

}  // namespace dredge::testing
