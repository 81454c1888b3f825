#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dredge/model.hpp"
#include "dredge/token.hpp"

namespace dredge {

/// One accepted reduction: the delta that was deleted, what survived, and
/// the model's answer on the surviving program.
struct ReductionStep {
  std::size_t step_index = 0;  // 1-based
  std::vector<Token> removed_tokens;
  std::vector<std::size_t> surviving_token_indices;  // original, ascending
  Prediction prediction;
  std::size_t granularity = 0;      // chunk count when this delta was found
  std::uint64_t queries_spent = 0;  // candidate evaluations since last step
};

enum class TraceStatus { complete, budget_exhausted, adapter_failed };

std::string_view to_string(TraceStatus status);
TraceStatus trace_status_from_string(std::string_view name);

struct ReductionTrace {
  std::string source_id;
  Program original_program;
  Prediction original_prediction;
  std::vector<ReductionStep> steps;
  bool final_is_one_minimal = false;
  std::uint64_t total_queries = 0;   // candidate evaluations
  std::uint64_t distinct_queries = 0;  // programs actually sent to the model
  TraceStatus status = TraceStatus::complete;

  /// Tokens surviving after the last accepted step (the whole program if
  /// nothing was removed).
  std::vector<Token> final_tokens() const;
  Program final_program() const;
};

/// Classic ddmin over the program's token sequence, with "candidate keeps
/// the original predicted label" as the preservation predicate.
///
/// Starts at granularity 2 and tests every delta subset, then every
/// complement, in left-to-right order; the first label-preserving
/// candidate is accepted (subset -> granularity resets to 2, complement
/// -> max(g-1, 2)); otherwise granularity doubles, capped at the current
/// length; terminates when granularity reached the length and nothing was
/// accepted. The empty program is never a candidate.
///
/// Scores are recorded for every accepted step regardless of how small
/// the change is; thresholding happens later, in the analysis pass.
///
/// `budget` caps model evaluations for this sample (including the initial
/// query); on exhaustion the partial trace is flagged, not discarded.
/// Throws on an empty program; adapter/protocol failures mid-run yield
/// status adapter_failed, but a failure on the initial query propagates.
ReductionTrace reduce(const Program& program, Model& model,
                      QueryCache* cache = nullptr,
                      std::optional<std::uint64_t> budget = std::nullopt);

/// True iff deleting any single remaining token from the trace's final
/// program either changes the predicted label or would leave the program
/// empty. Pure check; requires a complete trace.
bool verify_one_minimal(const ReductionTrace& trace, Model& model,
                        QueryCache* cache = nullptr);

}  // namespace dredge
