#include "dredge/ddmin.hpp"

#include <random>

#include <doctest.h>

#include "dredge/errors.hpp"
#include "helpers.hpp"

using namespace dredge;
using namespace dredge::testing;

TEST_CASE("ddmin keeps the only weighted token") {
  std::map<std::string, double> weights{{"a", 3.0}};
  auto model = make_linear_bag(weights, -1.0);
  QueryCache cache;
  Program program = make_program({"a", "b", "c"});
  ReductionTrace trace = reduce(program, *model, &cache);

  CHECK(trace.status == TraceStatus::complete);
  CHECK(trace.final_is_one_minimal);
  CHECK(texts_of(trace.final_tokens()) == std::vector<std::string>{"a"});
  CHECK(trace.original_prediction.label == "1");
  CHECK(trace.original_prediction.score ==
        doctest::Approx(0.8807970779778823).epsilon(1e-12));
  for (const ReductionStep& step : trace.steps) {
    CHECK(step.prediction.label == "1");
    CHECK(step.prediction.score ==
          doctest::Approx(0.8807970779778823).epsilon(1e-12));
  }

  // Brute-force oracle: [a] must be the unique smallest label-preserving
  // subset, and the engine's final program must be 1-minimal.
  auto masks = label_preserving_masks(weights, -1.0, {"a", "b", "c"}, "1");
  std::uint32_t smallest = 0;
  int smallest_size = 99;
  int smallest_count = 0;
  for (std::uint32_t mask : masks) {
    int size = popcount(mask);
    if (size < smallest_size) {
      smallest_size = size;
      smallest = mask;
      smallest_count = 1;
    } else if (size == smallest_size) {
      ++smallest_count;
    }
  }
  CHECK(smallest_size == 1);
  CHECK(smallest_count == 1);
  CHECK(smallest == 0b001u);  // bit 0 = token "a"
  CHECK(verify_one_minimal(trace, *model, &cache));
}

TEST_CASE("single-token programs cannot shrink") {
  auto model = make_linear_bag({{"a", 1.0}}, 0.0);
  ReductionTrace trace = reduce(make_program({"a"}), *model);
  CHECK(trace.steps.empty());
  CHECK(trace.status == TraceStatus::complete);
  CHECK(trace.final_is_one_minimal);
  CHECK(trace.total_queries == 0);
  CHECK(verify_one_minimal(trace, *model));
}

TEST_CASE("keyword-rule program reduces to a single keyword") {
  auto model = make_keyword_rule({"if"});
  QueryCache cache;
  ReductionTrace trace =
      reduce(make_program({"if", "x", "if"}), *model, &cache);
  CHECK(trace.status == TraceStatus::complete);
  auto final_texts = texts_of(trace.final_tokens());
  CHECK(final_texts == std::vector<std::string>{"if"});
  CHECK(verify_one_minimal(trace, *model, &cache));
}

TEST_CASE("empty programs are rejected up front") {
  auto model = make_linear_bag({}, 0.0);
  CHECK_THROWS_AS(reduce(make_program({}), *model), ConfigError);
}

TEST_CASE("budget exhaustion flags the partial trace") {
  auto model = make_linear_bag({{"a", 3.0}}, -1.0);
  Program program =
      make_program({"a", "b", "c", "d", "e", "f", "g", "h"});
  ReductionTrace trace = reduce(program, *model, nullptr, 2);
  CHECK(trace.status == TraceStatus::budget_exhausted);
  CHECK_FALSE(trace.final_is_one_minimal);
  CHECK(trace.total_queries <= 1);  // 1 original + at most 1 candidate
}

namespace {

struct DyingModel final : Model {
  int calls_before_death;
  explicit DyingModel(int calls) : calls_before_death(calls) {}
  Prediction predict(const Program&) override {
    if (calls_before_death-- <= 0) throw AdapterError("gone");
    return {"1", 0.9};
  }
  std::string_view kind() const override { return "test"; }
};

}  // namespace

TEST_CASE("adapter death mid-run flags the trace; on the initial query it throws") {
  DyingModel dying{1};  // answers the initial query, dies on the first candidate
  ReductionTrace trace = reduce(make_program({"a", "b", "c"}), dying);
  CHECK(trace.status == TraceStatus::adapter_failed);
  CHECK_FALSE(trace.final_is_one_minimal);

  DyingModel dead{0};
  CHECK_THROWS_AS(reduce(make_program({"a", "b"}), dead), AdapterError);
}

TEST_CASE("verify_one_minimal rejects a padded final program") {
  auto model = make_linear_bag({{"a", 3.0}}, -1.0);
  // Fake a "complete" trace that never removed the zero-weight token b.
  ReductionTrace trace;
  trace.source_id = "padded";
  trace.original_program = make_program({"a", "b"});
  trace.original_prediction = {"1", 0.8807970779778823};
  trace.status = TraceStatus::complete;
  trace.final_is_one_minimal = true;
  CHECK_FALSE(verify_one_minimal(trace, *model));
}

TEST_CASE("ddmin invariants hold over randomized linear-bag runs") {
  std::mt19937_64 rng(20240601);
  const std::vector<std::string> vocab = {"if", "x", "y", "0", ";",
                                          "(",  ")", "z", "w"};
  for (int round = 0; round < 120; ++round) {
    std::map<std::string, double> weights;
    for (const std::string& word : vocab) {
      if (rng() % 2) {
        weights[word] =
            (static_cast<double>(rng() % 2000) - 1000.0) / 400.0;
      }
    }
    double bias = (static_cast<double>(rng() % 2000) - 1000.0) / 500.0;
    std::size_t len = 2 + rng() % 9;
    std::vector<std::string> texts;
    for (std::size_t i = 0; i < len; ++i) {
      texts.push_back(vocab[rng() % vocab.size()]);
    }

    auto model = make_linear_bag(weights, bias);
    QueryCache cache;
    Program program = make_program(texts);
    ReductionTrace trace = reduce(program, *model, &cache);
    REQUIRE(trace.status == TraceStatus::complete);

    // Label preservation and monotone shrinkage.
    std::size_t previous_size = program.tokens.size();
    for (const ReductionStep& step : trace.steps) {
      CHECK(step.prediction.label == trace.original_prediction.label);
      CHECK(step.surviving_token_indices.size() < previous_size);
      CHECK(step.removed_tokens.size() ==
            previous_size - step.surviving_token_indices.size());
      previous_size = step.surviving_token_indices.size();
      //

      // Survivors must be an ascending subsequence of the original.
      for (std::size_t i = 1; i < step.surviving_token_indices.size(); ++i) {
        CHECK(step.surviving_token_indices[i - 1] <
              step.surviving_token_indices[i]);
      }
    }

    // 1-minimality, against the engine and the brute-force oracle.
    CHECK(verify_one_minimal(trace, *model, &cache));
    std::uint32_t final_mask = 0;
    if (trace.steps.empty()) {
      final_mask = (1u << len) - 1;
    } else {
      for (std::size_t pos : trace.steps.back().surviving_token_indices) {
        final_mask |= 1u << pos;
      }
    }
    CHECK(mask_is_one_minimal(weights, bias, texts, final_mask,
                              trace.original_prediction.label));

    // Determinism: an identical run yields an identical trace.
    QueryCache fresh;
    ReductionTrace again = reduce(program, *model, &fresh);
    REQUIRE(again.steps.size() == trace.steps.size());
    CHECK(again.total_queries == trace.total_queries);
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
      CHECK(again.steps[i].surviving_token_indices ==
            trace.steps[i].surviving_token_indices);
      CHECK(again.steps[i].prediction == trace.steps[i].prediction);
      CHECK(again.steps[i].granularity == trace.steps[i].granularity);
    }

    // Query accounting.
    CHECK(trace.distinct_queries <= trace.total_queries);
    std::uint64_t spent = 0;
    for (const ReductionStep& step : trace.steps) spent += step.queries_spent;
    CHECK(spent <= trace.total_queries);
  }
}
