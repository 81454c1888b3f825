#include "dredge/distractor.hpp"

#include <algorithm>
#include <cmath>

#include "dredge/errors.hpp"

namespace dredge {

std::string_view to_string(Direction direction) {
  switch (direction) {
    case Direction::increase: return "increase";
    case Direction::decrease: return "decrease";
    case Direction::flat: return "flat";
  }
  return "?";
}

Threshold::Threshold(double tau) : tau(tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw ConfigError("threshold tau must lie in (0,1), got " +
                      std::to_string(tau));
  }
}

AnalysisResult analyze(const ReductionTrace& trace, Threshold threshold) {
  AnalysisResult result;
  result.stats.source_id = trace.source_id;
  result.stats.n_steps = trace.steps.size();

  double previous_score = trace.original_prediction.score;
  double sum_magnitude = 0.0;

  for (const ReductionStep& step : trace.steps) {
    StepDelta delta;
    delta.step_index = step.step_index;
    delta.delta = step.prediction.score - previous_score;
    delta.magnitude = std::fabs(delta.delta);
    delta.significant = delta.magnitude >= threshold.tau;
    delta.direction = delta.delta > 0.0  ? Direction::increase
                      : delta.delta < 0.0 ? Direction::decrease
                                          : Direction::flat;
    previous_score = step.prediction.score;

    sum_magnitude += delta.magnitude;
    result.stats.max_change = std::max(result.stats.max_change, delta.magnitude);
    if (delta.delta > 0.0) {
      result.stats.max_increase = std::max(result.stats.max_increase, delta.delta);
    } else if (delta.delta < 0.0) {
      result.stats.max_decrease =
          std::max(result.stats.max_decrease, delta.magnitude);
    }
    if (delta.significant) {
      if (delta.direction == Direction::increase) result.stats.has_pi = true;
      if (delta.direction == Direction::decrease) result.stats.has_pd = true;

      DistractorRecord record;
      record.source_id = trace.source_id;
      record.step_index = step.step_index;
      record.tokens = step.removed_tokens;
      record.direction = delta.direction;
      record.magnitude = delta.magnitude;
      result.records.push_back(std::move(record));
    }
    result.deltas.push_back(delta);
  }

  if (!trace.steps.empty()) {
    result.stats.avg_change =
        sum_magnitude / static_cast<double>(trace.steps.size());
    result.stats.end_to_end_delta =
        trace.steps.back().prediction.score - trace.original_prediction.score;
  }
  return result;
}

}  // namespace dredge
