// Reference adapter for the line-delimited JSON protocol, used by the
// test suite and as a starting point for real adapter authors. Reads one
// request object per stdin line and answers one {"label","score"} line.
//
// Behavior flags:
//   --label L        fixed label (default "1")
//   --score S        fixed score (default 0.84)
//   --keyword K      label "1" iff K occurs in tokens, else "0";
//                    score = logistic(#occurrences of K)
//   --bad-score      always answer score 1.2 (protocol violation)
//   --crash-on TOK   exit(3) without answering when TOK occurs in tokens

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

int main(int argc, char** argv) {
  std::string label = "1";
  double score = 0.84;
  std::string keyword;
  std::string crash_on;
  bool bad_score = false;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "stub_adapter: missing value for " << arg << "\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--label") label = next();
    else if (arg == "--score") score = std::stod(next());
    else if (arg == "--keyword") keyword = next();
    else if (arg == "--crash-on") crash_on = next();
    else if (arg == "--bad-score") bad_score = true;
    else {
      std::cerr << "stub_adapter: unknown flag " << arg << "\n";
      return 2;
    }
  }

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    nlohmann::json request;
    try {
      request = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      std::cerr << "stub_adapter: bad request line\n";
      return 2;
    }
    std::vector<std::string> tokens;
    for (const auto& tok : request.value("tokens", nlohmann::json::array())) {
      tokens.push_back(tok.get<std::string>());
    }
    if (!crash_on.empty()) {
      for (const std::string& tok : tokens) {
        if (tok == crash_on) return 3;
      }
    }
    nlohmann::json response;
    if (bad_score) {
      response["label"] = label;
      response["score"] = 1.2;
    } else if (!keyword.empty()) {
      std::size_t hits = 0;
      for (const std::string& tok : tokens) {
        if (tok == keyword) ++hits;
      }
      response["label"] = hits > 0 ? "1" : "0";
      response["score"] = 1.0 / (1.0 + std::exp(-static_cast<double>(hits)));
    } else {
      response["label"] = label;
      response["score"] = score;
    }
    std::cout << response.dump() << "\n" << std::flush;
  }
  return 0;
}
