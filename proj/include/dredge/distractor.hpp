#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dredge/ddmin.hpp"
#include "dredge/token.hpp"

namespace dredge {

enum class Direction { increase, decrease, flat };

std::string_view to_string(Direction direction);

/// Significance cutoff for a step's score change. Defaults to 0.1: a
/// change of at least ten points of probability counts.
struct Threshold {
  double tau = 0.1;

  Threshold() = default;
  explicit Threshold(double tau);
};

/// Signed score movement of one accepted reduction step:
/// delta = s_i - s_{i-1}, with s_0 the original program's score.
struct StepDelta {
  std::size_t step_index = 0;
  double delta = 0.0;
  double magnitude = 0.0;
  bool significant = false;
  Direction direction = Direction::flat;
};

/// One significant confidence change, attributed jointly to the tokens
/// removed at that step.
struct DistractorRecord {
  std::string source_id;
  std::size_t step_index = 0;
  std::vector<Token> tokens;
  Direction direction = Direction::flat;
  double magnitude = 0.0;
};

/// Per-sample aggregates over all accepted steps (flat ones included).
struct SampleStats {
  std::string source_id;
  std::size_t n_steps = 0;
  double avg_change = 0.0;     // (1/n) * sum |delta_i|
  double max_change = 0.0;     // max |delta_i|
  double max_increase = 0.0;   // MPI: largest positive delta, 0 if none
  double max_decrease = 0.0;   // MPD: largest drop, as a magnitude
  bool has_pi = false;         // any significant increase
  bool has_pd = false;         // any significant decrease
  double end_to_end_delta = 0.0;  // signed s_final - s_0
};

struct AnalysisResult {
  std::vector<StepDelta> deltas;
  std::vector<DistractorRecord> records;
  SampleStats stats;
};

/// Pure post-processing of a trace: per-step deltas, distractor records
/// for the significant ones, and the sample's aggregate statistics.
AnalysisResult analyze(const ReductionTrace& trace, Threshold threshold);

}  // namespace dredge
