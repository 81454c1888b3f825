#include "dredge/distractor.hpp"

#include <random>

#include <doctest.h>

#include "dredge/errors.hpp"
#include "helpers.hpp"

using namespace dredge;
using namespace dredge::testing;

TEST_CASE("step deltas, records and stats for a hand-built sequence") {
  ReductionTrace trace = trace_with_scores(0.90, {0.75, 0.80});
  AnalysisResult result = analyze(trace, Threshold(0.1));

  REQUIRE(result.deltas.size() == 2);
  CHECK(result.deltas[0].delta == doctest::Approx(-0.15).epsilon(1e-12));
  CHECK(result.deltas[0].significant);
  CHECK(result.deltas[0].direction == Direction::decrease);
  CHECK(result.deltas[1].delta == doctest::Approx(0.05).epsilon(1e-12));
  CHECK_FALSE(result.deltas[1].significant);
  CHECK(result.deltas[1].direction == Direction::increase);

  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].step_index == 1);
  CHECK(result.records[0].direction == Direction::decrease);
  CHECK(result.records[0].magnitude == doctest::Approx(0.15).epsilon(1e-12));
  CHECK_FALSE(result.records[0].tokens.empty());

  const SampleStats& stats = result.stats;
  CHECK(stats.n_steps == 2);
  CHECK(stats.avg_change == doctest::Approx(0.10).epsilon(1e-12));
  CHECK(stats.max_change == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(stats.max_increase == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(stats.max_decrease == doctest::Approx(0.15).epsilon(1e-12));
  CHECK_FALSE(stats.has_pi);
  CHECK(stats.has_pd);
  CHECK(stats.end_to_end_delta == doctest::Approx(-0.10).epsilon(1e-12));
}

TEST_CASE("flat score sequences produce no records") {
  ReductionTrace trace = trace_with_scores(0.8, {0.8, 0.8});
  AnalysisResult result = analyze(trace, Threshold(0.1));
  CHECK(result.records.empty());
  CHECK(result.stats.avg_change == 0.0);
  CHECK(result.stats.max_change == 0.0);
  CHECK_FALSE(result.stats.has_pi);
  CHECK_FALSE(result.stats.has_pd);
}

TEST_CASE("empty traces analyze to zeros") {
  ReductionTrace trace = trace_with_scores(0.6, {});
  AnalysisResult result = analyze(trace, Threshold(0.1));
  CHECK(result.deltas.empty());
  CHECK(result.records.empty());
  CHECK(result.stats.n_steps == 0);
  CHECK(result.stats.avg_change == 0.0);
  CHECK(result.stats.max_change == 0.0);
  CHECK(result.stats.end_to_end_delta == 0.0);
}

TEST_CASE("a 0.1 drop from removing a weighted token becomes a record") {
  // weights {d:0.6, k:2.0}, bias -1: removing d moves sigma(1.6) to
  // sigma(1.0), a 0.1010 drop, while the label stays "1".
  auto model = make_linear_bag({{"d", 0.6}, {"k", 2.0}}, -1.0);
  QueryCache cache;
  ReductionTrace trace = reduce(make_program({"d", "k"}), *model, &cache);
  REQUIRE(trace.status == TraceStatus::complete);
  CHECK(trace.original_prediction.score ==
        doctest::Approx(0.8320183851339245).epsilon(1e-12));

  AnalysisResult result = analyze(trace, Threshold(0.1));
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].direction == Direction::decrease);
  CHECK(result.records[0].magnitude ==
        doctest::Approx(0.10095980650391956).epsilon(1e-9));
  REQUIRE(result.records[0].tokens.size() == 1);
  CHECK(result.records[0].tokens[0].text == "d");
}

TEST_CASE("threshold outside (0,1) is rejected") {
  CHECK_THROWS_AS(Threshold(0.0), ConfigError);
  CHECK_THROWS_AS(Threshold(1.0), ConfigError);
  CHECK_THROWS_AS(Threshold(-0.2), ConfigError);
  CHECK(Threshold(0.1).tau == 0.1);
  CHECK(Threshold().tau == 0.1);
}

TEST_CASE("signed deltas telescope to the end-to-end change") {
  std::mt19937_64 rng(4242);
  for (int round = 0; round < 200; ++round) {
    double original = static_cast<double>(rng() % 1000) / 1000.0;
    std::vector<double> scores;
    std::size_t steps = rng() % 8;
    for (std::size_t i = 0; i < steps; ++i) {
      scores.push_back(static_cast<double>(rng() % 1000) / 1000.0);
    }
    ReductionTrace trace = trace_with_scores(original, scores);
    AnalysisResult result = analyze(trace, Threshold(0.1));
    double telescoped = 0.0;
    for (const StepDelta& delta : result.deltas) telescoped += delta.delta;
    CHECK(telescoped ==
          doctest::Approx(result.stats.end_to_end_delta).epsilon(1e-12));
    CHECK(result.stats.max_change >= result.stats.avg_change);
    CHECK(result.stats.max_change ==
          doctest::Approx(std::max(result.stats.max_increase,
                                   result.stats.max_decrease)));
  }
}

TEST_CASE("raising tau never adds records") {
  std::mt19937_64 rng(777);
  for (int round = 0; round < 100; ++round) {
    double original = static_cast<double>(rng() % 1000) / 1000.0;
    std::vector<double> scores;
    std::size_t steps = 1 + rng() % 6;
    for (std::size_t i = 0; i < steps; ++i) {
      scores.push_back(static_cast<double>(rng() % 1000) / 1000.0);
    }
    ReductionTrace trace = trace_with_scores(original, scores);
    std::size_t previous = SIZE_MAX;
    for (double tau : {0.05, 0.1, 0.2, 0.4, 0.8}) {
      std::size_t count = analyze(trace, Threshold(tau)).records.size();
      CHECK(count <= previous);
      previous = count;
    }
  }
}

TEST_CASE("analyze is a pure function of the trace") {
  ReductionTrace trace = trace_with_scores(0.9, {0.6, 0.7, 0.2});
  AnalysisResult a = analyze(trace, Threshold(0.1));
  AnalysisResult b = analyze(trace, Threshold(0.1));
  REQUIRE(a.deltas.size() == b.deltas.size());
  for (std::size_t i = 0; i < a.deltas.size(); ++i) {
    CHECK(a.deltas[i].delta == b.deltas[i].delta);
    CHECK(a.deltas[i].significant == b.deltas[i].significant);
  }
  CHECK(a.records.size() == b.records.size());
  CHECK(a.stats.avg_change == b.stats.avg_change);
}
