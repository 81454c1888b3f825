#include "dredge/report.hpp"

#include <random>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "dredge/errors.hpp"
#include "helpers.hpp"

using namespace dredge;
using namespace dredge::testing;

namespace {

SampleStats stats_with(const std::string& id, bool pi, bool pd) {
  SampleStats stats;
  stats.source_id = id;
  stats.has_pi = pi;
  stats.has_pd = pd;
  return stats;
}

DistractorRecord record_of(const std::string& id, Direction direction,
                           double magnitude,
                           const std::vector<std::string>& tokens) {
  DistractorRecord record;
  record.source_id = id;
  record.step_index = 1;
  record.direction = direction;
  record.magnitude = magnitude;
  for (const std::string& text : tokens) {
    Token token;
    token.text = text;
    token.category = categorize(text, Language::c);
    record.tokens.push_back(std::move(token));
  }
  return record;
}

}  // namespace

TEST_CASE("one significant increase across two samples") {
  std::vector<SampleStats> stats = {stats_with("a", true, false),
                                    stats_with("b", false, false)};
  std::vector<DistractorRecord> records = {
      record_of("a", Direction::increase, 0.3, {"if"})};
  CorpusSummary summary = summarize(stats, records, Threshold(0.1));
  CHECK(summary.pi_stats.events == 1);
  CHECK(summary.pi_stats.min == 0.3);
  CHECK(summary.pi_stats.max == 0.3);
  CHECK(summary.pi_stats.mean == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(summary.pd_stats.events == 0);
  CHECK(summary.pct_pi == 50.0);
  CHECK(summary.pct_pd == 0.0);
  CHECK(summary.pct_union == 50.0);
  CHECK(summary.n_samples == 2);
}

TEST_CASE("summarize refuses an empty corpus") {
  CHECK_THROWS_AS(summarize({}, {}, Threshold(0.1)), EmptyCorpusError);
}

TEST_CASE("pool and union bounds hold on random corpora") {
  std::mt19937_64 rng(31337);
  for (int round = 0; round < 60; ++round) {
    double tau = 0.1;
    std::vector<SampleStats> stats;
    std::vector<DistractorRecord> records;
    std::size_t n = 1 + rng() % 20;
    for (std::size_t i = 0; i < n; ++i) {
      std::string id = "s" + std::to_string(i);
      bool pi = rng() % 3 == 0;
      bool pd = rng() % 3 == 0;
      stats.push_back(stats_with(id, pi, pd));
      if (pi) {
        records.push_back(record_of(
            id, Direction::increase,
            tau + static_cast<double>(rng() % 500) / 1000.0, {"if"}));
      }
      if (pd) {
        records.push_back(record_of(
            id, Direction::decrease,
            tau + static_cast<double>(rng() % 500) / 1000.0, {"x"}));
      }
    }
    CorpusSummary summary = summarize(stats, records, Threshold(tau));
    if (summary.pi_stats.events > 0) {
      CHECK(summary.pi_stats.min >= tau);
      CHECK(summary.pi_stats.min <= summary.pi_stats.mean);
      CHECK(summary.pi_stats.mean <= summary.pi_stats.max);
      CHECK(summary.pi_stats.max <= 1.0);
    }
    CHECK(std::max(summary.pct_pi, summary.pct_pd) <= summary.pct_union);
    CHECK(summary.pct_union <=
          std::min(100.0, summary.pct_pi + summary.pct_pd) + 1e-9);
  }
}

TEST_CASE("top distractors rank by count with lexeme tie-break") {
  std::vector<DistractorRecord> records = {
      record_of("a", Direction::increase, 0.2, {"if", "x"}),
      record_of("b", Direction::decrease, 0.3, {"if", ";"}),
      record_of("c", Direction::decrease, 0.4, {"if", ";"}),
  };
  TopDistractors tops = top_distractors(records, Language::c);
  REQUIRE(tops.ranked.size() == 3);
  CHECK(tops.ranked[0].text == "if");
  CHECK(tops.ranked[0].count == 3);
  CHECK(tops.ranked[0].category == TokenCategory::control_flow);
  CHECK(tops.ranked[1].text == ";");
  CHECK(tops.ranked[1].count == 2);
  CHECK(tops.ranked[1].category == TokenCategory::others);
  CHECK(tops.ranked[2].text == "x");
  CHECK(tops.ranked[2].count == 1);
  CHECK(tops.ranked[2].category == TokenCategory::identifiers);
  CHECK(tops.total_occurrences == 6);

  auto control_flow = tops.for_category(TokenCategory::control_flow);
  REQUIRE(control_flow.size() == 1);
  CHECK(control_flow[0].text == "if");
}

TEST_CASE("top distractors conserve counts before truncation") {
  std::mt19937_64 rng(555);
  std::vector<DistractorRecord> records;
  std::uint64_t multiplicities = 0;
  const std::vector<std::string> vocab = {"if", "x", ";", "0", "while"};
  for (int i = 0; i < 40; ++i) {
    std::vector<std::string> tokens;
    std::size_t len = 1 + rng() % 4;
    for (std::size_t j = 0; j < len; ++j) {
      tokens.push_back(vocab[rng() % vocab.size()]);
    }
    multiplicities += tokens.size();
    records.push_back(record_of("s" + std::to_string(i),
                                Direction::increase, 0.2, tokens));
  }
  TopDistractors tops = top_distractors(records, Language::c, 10000);
  std::uint64_t ranked_total = 0;
  for (const TokenCount& entry : tops.ranked) ranked_total += entry.count;
  CHECK(ranked_total == multiplicities);
  CHECK(tops.total_occurrences == multiplicities);

  TopDistractors cut = top_distractors(records, Language::c, 2);
  CHECK(cut.ranked.size() == 2);
  CHECK(cut.total_occurrences == multiplicities);
}

TEST_CASE("empty records produce an empty ranking") {
  TopDistractors tops = top_distractors({}, Language::c);
  CHECK(tops.ranked.empty());
  CHECK(tops.total_occurrences == 0);
}

TEST_CASE("max change distribution projects and orders samples") {
  SampleStats a;
  a.source_id = "b-sample";
  a.max_increase = 0.05;
  a.max_decrease = 0.15;
  SampleStats b;
  b.source_id = "a-sample";
  b.max_increase = 0.0;
  b.max_decrease = 0.0;
  MaxChangeDistribution distribution = max_change_distribution({a, b});
  REQUIRE(distribution.rows.size() == 2);
  CHECK(distribution.rows[0].source_id == "a-sample");
  CHECK(distribution.rows[1].source_id == "b-sample");
  CHECK(distribution.rows[1].mpi == 0.05);
  CHECK(distribution.rows[1].mpd == 0.15);
  CHECK(distribution.sorted_mpd == std::vector<double>{0.0, 0.15});
}

TEST_CASE("emitted documents are deterministic and well-formed when empty") {
  CorpusSummary zero;
  MaxChangeDistribution no_rows;
  TopDistractors no_tokens;
  for (ReportFormat format :
       {ReportFormat::json, ReportFormat::csv, ReportFormat::markdown}) {
    auto first = emit(zero, no_rows, no_tokens, format);
    auto second = emit(zero, no_rows, no_tokens, format);
    CHECK(first == second);
    CHECK(first.count("max_changes.csv") == 1);
  }
  auto docs = emit(zero, no_rows, no_tokens, ReportFormat::json);
  auto parsed = nlohmann::json::parse(docs.at("summary.json"));
  CHECK(parsed.at("n_samples") == 0);
  CHECK(parsed.at("probability_increase").at("events") == 0);
  CHECK(parsed.at("probability_increase").at("mean") == 0.0);
  CHECK(docs.at("max_changes.csv") == "source_id,mpi,mpd\n");
}

TEST_CASE("markdown tables use the documented headers") {
  CorpusSummary zero;
  std::string md = render_summary(zero, ReportFormat::markdown);
  CHECK(md.rfind("| Samples | Failed | PI min | PI max | PI mean | PD min | "
                 "PD max | PD mean | PI % | PD % | PI ∪ PD % |\n",
                 0) == 0);
  TopDistractors tops = top_distractors(
      {record_of("a", Direction::increase, 0.2, {"if"})}, Language::c);
  std::string table = render_top_tokens(tops, ReportFormat::markdown);
  CHECK(table.rfind("| Category | Tokens |\n", 0) == 0);
  CHECK(table.find("| control-flow | `if` (1) |") != std::string::npos);
}

TEST_CASE("pd statistics are reported negative") {
  std::vector<SampleStats> stats = {stats_with("a", false, true)};
  std::vector<DistractorRecord> records = {
      record_of("a", Direction::decrease, 0.19, {"x"})};
  CorpusSummary summary = summarize(stats, records, Threshold(0.1));
  std::string json_text = render_summary(summary, ReportFormat::json);
  auto parsed = nlohmann::json::parse(json_text);
  CHECK(parsed.at("probability_decrease").at("mean").get<double>() ==
        doctest::Approx(-0.19).epsilon(1e-12));
  CHECK(parsed.at("probability_decrease").at("min").get<double>() ==
        doctest::Approx(-0.19).epsilon(1e-12));
}
