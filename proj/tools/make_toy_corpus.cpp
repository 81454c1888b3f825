// Deterministic generator for the bundled toy corpus: small C-like
// functions as JSONL plus a matching linear-bag model config. Regenerate
// with the committed defaults to reproduce data/toy_corpus.jsonl and
// data/toy_model.json byte for byte.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace {

std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
  std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % static_cast<std::uint64_t>(n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

const std::vector<std::string> kIdentifiers = {"x", "y", "n",   "buf",
                                               "i", "j", "len", "tmp"};
const std::vector<std::string> kNumbers = {"0", "1", "2", "7", "42", "100"};

std::string pick(std::mt19937_64& rng, const std::vector<std::string>& pool) {
  return pool[bounded(rng, pool.size())];
}

std::string make_statement(std::mt19937_64& rng) {
  switch (bounded(rng, 8)) {
    case 0: return "int " + pick(rng, kIdentifiers) + " = " +
                   pick(rng, kNumbers) + " ;";
    case 1: return "char " + pick(rng, kIdentifiers) + " ;";
    case 2: return pick(rng, kIdentifiers) + " = " + pick(rng, kIdentifiers) +
                   " + " + pick(rng, kNumbers) + " ;";
    case 3: return "if ( " + pick(rng, kIdentifiers) + " < " +
                   pick(rng, kNumbers) + " ) { " + pick(rng, kIdentifiers) +
                   " = " + pick(rng, kNumbers) + " ; }";
    case 4: return "while ( " + pick(rng, kIdentifiers) + " < " +
                   pick(rng, kNumbers) + " ) { " + pick(rng, kIdentifiers) +
                   " ++ ; }";
    case 5: return pick(rng, kIdentifiers) + " = rand ( ) ;";
    case 6: return "for ( i = 0 ; i < " + pick(rng, kNumbers) +
                   " ; i ++ ) { " + pick(rng, kIdentifiers) + " = " +
                   pick(rng, kIdentifiers) + " ; }";
    default: return "return " + pick(rng, kIdentifiers) + " ;";
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t count = 1000;
  std::uint64_t seed = 20240611;
  std::string corpus_path = "toy_corpus.jsonl";
  std::string model_path = "toy_model.json";
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "make_toy_corpus: missing value for " << arg << "\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--samples") count = std::stoul(next());
    else if (arg == "--seed") seed = std::stoull(next());
    else if (arg == "--out") corpus_path = next();
    else if (arg == "--model-out") model_path = next();
    else {
      std::cerr << "make_toy_corpus: unknown flag " << arg << "\n";
      return 2;
    }
  }

  std::mt19937_64 rng(seed);
  std::ofstream corpus(corpus_path, std::ios::binary);
  if (!corpus) {
    std::cerr << "make_toy_corpus: cannot write " << corpus_path << "\n";
    return 2;
  }
  for (std::size_t i = 0; i < count; ++i) {
    std::string code = "void f ( ) {";
    std::size_t statements = 1 + bounded(rng, 5);
    for (std::size_t s = 0; s < statements; ++s) {
      code += " " + make_statement(rng);
    }
    code += " }";
    char id[32];
    std::snprintf(id, sizeof(id), "toy-%04zu", i);
    nlohmann::ordered_json doc;
    doc["id"] = id;
    doc["code"] = code;
    corpus << doc.dump() << "\n";
  }

  // Weights sized so removing a handful of tokens routinely moves the
  // logistic score across the 0.1 significance line.
  nlohmann::ordered_json model;
  model["kind"] = "linear-bag";
  model["bias"] = -0.15;
  model["weights"] = {
      {"if", 0.9},    {"while", 0.7}, {"for", 0.5},   {"return", -0.6},
      {"int", 0.25},  {"char", -0.2}, {"0", 0.3},     {"1", -0.35},
      {"42", 0.15},   {"100", -0.1},  {"x", -0.45},   {"y", 0.4},
      {"n", 0.1},     {"buf", -0.6},  {"len", 0.2},   {"tmp", -0.15},
      {"rand", 1.0},  {"=", 0.2},     {"<", 0.35},    {"++", 0.45},
      {";", 0.12},    {"{", -0.05},   {"}", 0.05},
  };
  std::ofstream model_out(model_path, std::ios::binary);
  if (!model_out) {
    std::cerr << "make_toy_corpus: cannot write " << model_path << "\n";
    return 2;
  }
  model_out << model.dump(2) << "\n";

  std::cerr << "wrote " << count << " samples to " << corpus_path << " and "
            << model_path << "\n";
  return 0;
}
