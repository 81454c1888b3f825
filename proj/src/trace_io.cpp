#include "dredge/trace_io.hpp"

#include <algorithm>
#include <fstream>

#include "dredge/errors.hpp"

#include <nlohmann/json.hpp>

namespace dredge {

namespace {

nlohmann::ordered_json token_to_json(const Token& token) {
  return {{"index", token.index},
          {"text", token.text},
          {"category", std::string(to_string(token.category))},
          {"line", token.line}};
}

Token token_from_json(const nlohmann::json& doc) {
  Token token;
  token.index = doc.at("index").get<std::size_t>();
  token.text = doc.at("text").get<std::string>();
  token.category = token_category_from_string(
      doc.at("category").get<std::string>());
  token.line = doc.at("line").get<std::size_t>();
  return token;
}

}  // namespace

nlohmann::ordered_json trace_to_json(const ReductionTrace& trace) {
  nlohmann::ordered_json doc;
  doc["source_id"] = trace.source_id;
  doc["language"] = std::string(to_string(trace.original_program.language));
  doc["status"] = std::string(to_string(trace.status));
  doc["original"] = {
      {"label", trace.original_prediction.label},
      {"score", trace.original_prediction.score},
  };
  auto tokens = nlohmann::ordered_json::array();
  for (const Token& token : trace.original_program.tokens) {
    tokens.push_back(token_to_json(token));
  }
  doc["original"]["tokens"] = std::move(tokens);

  auto steps = nlohmann::ordered_json::array();
  for (const ReductionStep& step : trace.steps) {
    nlohmann::ordered_json step_doc;
    step_doc["step"] = step.step_index;
    step_doc["granularity"] = step.granularity;
    step_doc["queries_spent"] = step.queries_spent;
    auto removed = nlohmann::ordered_json::array();
    for (const Token& token : step.removed_tokens) {
      removed.push_back(token_to_json(token));
    }
    step_doc["removed"] = std::move(removed);
    step_doc["surviving"] = step.surviving_token_indices;
    step_doc["label"] = step.prediction.label;
    step_doc["score"] = step.prediction.score;
    steps.push_back(std::move(step_doc));
  }
  doc["steps"] = std::move(steps);
  doc["final_is_one_minimal"] = trace.final_is_one_minimal;
  doc["total_queries"] = trace.total_queries;
  doc["distinct_queries"] = trace.distinct_queries;
  return doc;
}

ReductionTrace trace_from_json(const nlohmann::json& doc) {
  ReductionTrace trace;
  trace.source_id = doc.at("source_id").get<std::string>();
  trace.original_program.language =
      language_from_string(doc.at("language").get<std::string>());
  trace.original_program.source_id = trace.source_id;
  trace.status = trace_status_from_string(doc.at("status").get<std::string>());
  trace.original_prediction.label =
      doc.at("original").at("label").get<std::string>();
  trace.original_prediction.score =
      doc.at("original").at("score").get<double>();
  for (const auto& token_doc : doc.at("original").at("tokens")) {
    trace.original_program.tokens.push_back(token_from_json(token_doc));
  }
  for (const auto& step_doc : doc.at("steps")) {
    ReductionStep step;
    step.step_index = step_doc.at("step").get<std::size_t>();
    step.granularity = step_doc.at("granularity").get<std::size_t>();
    step.queries_spent = step_doc.at("queries_spent").get<std::uint64_t>();
    for (const auto& token_doc : step_doc.at("removed")) {
      step.removed_tokens.push_back(token_from_json(token_doc));
    }
    step.surviving_token_indices =
        step_doc.at("surviving").get<std::vector<std::size_t>>();
    step.prediction.label = step_doc.at("label").get<std::string>();
    step.prediction.score = step_doc.at("score").get<double>();
    trace.steps.push_back(std::move(step));
  }
  trace.final_is_one_minimal = doc.at("final_is_one_minimal").get<bool>();
  trace.total_queries = doc.at("total_queries").get<std::uint64_t>();
  trace.distinct_queries = doc.value("distinct_queries", std::uint64_t{0});
  return trace;
}

void write_trace(const std::filesystem::path& path,
                 const ReductionTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot write trace file: " + path.string());
  }
  out << trace_to_json(trace).dump(2) << "\n";
}

ReductionTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot read trace file: " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed trace " + path.string() + ": " + e.what());
  }
  return trace_from_json(doc);
}

std::vector<ReductionTrace> read_trace_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("trace directory does not exist: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<ReductionTrace> traces;
  traces.reserve(files.size());
  for (const auto& file : files) {
    traces.push_back(read_trace(file));
  }
  std::sort(traces.begin(), traces.end(),
            [](const ReductionTrace& a, const ReductionTrace& b) {
              return a.source_id < b.source_id;
            });
  return traces;
}

}  // namespace dredge
