#include "dredge/ddmin.hpp"

#include <algorithm>
#include <cassert>

#include "dredge/errors.hpp"

namespace dredge {

namespace {

// Positions are indices into the original token vector.
using Positions = std::vector<std::size_t>;

Program subprogram(const Program& original, const Positions& positions) {
  Program candidate;
  candidate.language = original.language;
  candidate.source_id = original.source_id;
  candidate.tokens.reserve(positions.size());
  for (std::size_t pos : positions) {
    candidate.tokens.push_back(original.tokens[pos]);
  }
  return candidate;
}

// Splits positions into n contiguous chunks of near-equal size; every
// chunk is non-empty for n <= positions.size().
std::vector<Positions> split_chunks(const Positions& positions,
                                    std::size_t n) {
  std::vector<Positions> chunks;
  chunks.reserve(n);
  std::size_t len = positions.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i * len / n;
    std::size_t hi = (i + 1) * len / n;
    chunks.emplace_back(positions.begin() + static_cast<std::ptrdiff_t>(lo),
                        positions.begin() + static_cast<std::ptrdiff_t>(hi));
  }
  return chunks;
}

Positions complement_of(const Positions& positions, const Positions& chunk) {
  Positions out;
  out.reserve(positions.size() - chunk.size());
  auto it = chunk.begin();
  for (std::size_t pos : positions) {
    if (it != chunk.end() && *it == pos) {
      ++it;
      continue;
    }
    out.push_back(pos);
  }
  return out;
}

struct BudgetTracker {
  std::optional<std::uint64_t> budget;
  std::uint64_t used = 0;

  bool exhausted() const { return budget && *budget > 0 && used >= *budget; }
  void charge() { ++used; }
};

}  // namespace

std::string_view to_string(TraceStatus status) {
  switch (status) {
    case TraceStatus::complete: return "complete";
    case TraceStatus::budget_exhausted: return "budget-exhausted";
    case TraceStatus::adapter_failed: return "adapter-failed";
  }
  return "?";
}

TraceStatus trace_status_from_string(std::string_view name) {
  if (name == "complete") return TraceStatus::complete;
  if (name == "budget-exhausted") return TraceStatus::budget_exhausted;
  if (name == "adapter-failed") return TraceStatus::adapter_failed;
  throw ConfigError("unknown trace status: '" + std::string(name) + "'");
}

std::vector<Token> ReductionTrace::final_tokens() const {
  if (steps.empty()) return original_program.tokens;
  std::vector<Token> tokens;
  tokens.reserve(steps.back().surviving_token_indices.size());
  for (std::size_t pos : steps.back().surviving_token_indices) {
    tokens.push_back(original_program.tokens[pos]);
  }
  return tokens;
}

Program ReductionTrace::final_program() const {
  Program program;
  program.language = original_program.language;
  program.source_id = original_program.source_id;
  program.tokens = final_tokens();
  return program;
}

ReductionTrace reduce(const Program& program, Model& model, QueryCache* cache,
                      std::optional<std::uint64_t> budget) {
  if (program.tokens.empty()) {
    throw ConfigError("cannot reduce an empty program (source '" +
                      program.source_id + "')");
  }

  ReductionTrace trace;
  trace.source_id = program.source_id;
  trace.original_program = program;

  BudgetTracker tracker{budget};

  // The initial query counts against the budget but not total_queries,
  // which tracks candidate evaluations only.
  tracker.charge();
  trace.original_prediction = query(model, program, cache);
  const std::string& goal_label = trace.original_prediction.label;

  // Candidates are strict subsequences, so none can collide with the
  // original program's cache entry; misses from here on are exactly the
  // distinct candidate programs the model sees.
  std::uint64_t cache_misses_before = cache ? cache->misses() : 0;

  Positions current(program.tokens.size());
  for (std::size_t i = 0; i < current.size(); ++i) current[i] = i;

  std::uint64_t queries_since_step = 0;
  std::size_t granularity = 2;

  auto finish = [&](TraceStatus status) {
    trace.status = status;
    trace.final_is_one_minimal = status == TraceStatus::complete;
    trace.distinct_queries = cache ? cache->misses() - cache_misses_before
                                   : trace.total_queries;
    return trace;
  };

  // Evaluates one candidate; returns its prediction, or nullopt when the
  // label was not preserved. Budget exhaustion / adapter death unwind via
  // exceptions caught in the main loop.
  struct BudgetExhausted {};
  auto evaluate = [&](const Positions& candidate)
      -> std::optional<Prediction> {
    if (tracker.exhausted()) throw BudgetExhausted{};
    tracker.charge();
    ++trace.total_queries;
    ++queries_since_step;
    Prediction prediction = query(model, subprogram(program, candidate), cache);
    if (prediction.label == goal_label) return prediction;
    return std::nullopt;
  };

  auto accept = [&](Positions&& survivors, const Prediction& prediction,
                    std::size_t chunk_count) {
    ReductionStep step;
    step.step_index = trace.steps.size() + 1;
    step.prediction = prediction;
    step.granularity = chunk_count;
    step.queries_spent = queries_since_step;
    step.surviving_token_indices = survivors;
    Positions removed = complement_of(current, survivors);
    step.removed_tokens.reserve(removed.size());
    for (std::size_t pos : removed) {
      step.removed_tokens.push_back(program.tokens[pos]);
    }
    trace.steps.push_back(std::move(step));
    current = std::move(survivors);
    queries_since_step = 0;
  };

  try {
    while (current.size() >= 2) {
      granularity = std::min(granularity, current.size());
      std::vector<Positions> chunks = split_chunks(current, granularity);
      bool accepted = false;

      // Reduce to subset: keep a single delta, drop everything else.
      for (std::size_t i = 0; i < chunks.size() && !accepted; ++i) {
        if (chunks[i].size() == current.size()) continue;
        if (auto prediction = evaluate(chunks[i])) {
          accept(std::move(chunks[i]), *prediction, granularity);
          granularity = 2;
          accepted = true;
        }
      }
      if (accepted) continue;

      // Reduce to complement: drop a single delta.
      for (std::size_t i = 0; i < chunks.size() && !accepted; ++i) {
        Positions candidate = complement_of(current, chunks[i]);
        if (candidate.empty()) continue;
        if (auto prediction = evaluate(candidate)) {
          std::size_t chunk_count = granularity;
          accept(std::move(candidate), *prediction, chunk_count);
          granularity = std::max<std::size_t>(chunk_count - 1, 2);
          accepted = true;
        }
      }
      if (accepted) continue;

      if (granularity < current.size()) {
        granularity = std::min(current.size(), granularity * 2);
        continue;
      }
      break;  // finest granularity, nothing removable: 1-minimal
    }
  } catch (const BudgetExhausted&) {
    return finish(TraceStatus::budget_exhausted);
  } catch (const AdapterError&) {
    return finish(TraceStatus::adapter_failed);
  } catch (const ProtocolError&) {
    return finish(TraceStatus::adapter_failed);
  }
  return finish(TraceStatus::complete);
}

bool verify_one_minimal(const ReductionTrace& trace, Model& model,
                        QueryCache* cache) {
  if (trace.status != TraceStatus::complete) {
    throw ConfigError("verify_one_minimal requires a complete trace");
  }
  Program final = trace.final_program();
  if (final.tokens.size() <= 1) return true;
  for (std::size_t skip = 0; skip < final.tokens.size(); ++skip) {
    Program candidate;
    candidate.language = final.language;
    candidate.source_id = final.source_id;
    candidate.tokens.reserve(final.tokens.size() - 1);
    for (std::size_t i = 0; i < final.tokens.size(); ++i) {
      if (i != skip) candidate.tokens.push_back(final.tokens[i]);
    }
    Prediction prediction = query(model, candidate, cache);
    if (prediction.label == trace.original_prediction.label) return false;
  }
  return true;
}

}  // namespace dredge
