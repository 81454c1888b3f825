#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dredge/token.hpp"

namespace dredge {

/// Model output: an opaque label plus the model's confidence in it.
struct Prediction {
  std::string label;
  double score = 0.0;

  bool operator==(const Prediction&) const = default;
};

double logistic(double z);

/// Anything that maps a token sequence to a (label, score) pair.
/// Implementations must be deterministic within a run.
class Model {
 public:
  virtual ~Model() = default;
  virtual Prediction predict(const Program& program) = 0;
  virtual std::string_view kind() const = 0;
};

/// Analytic bag-of-tokens model: score = logistic(bias + sum of per-token
/// weights, counted with multiplicity); label "1" iff score > 0.5.
class LinearBagModel final : public Model {
 public:
  LinearBagModel(std::map<std::string, double> weights, double bias);
  Prediction predict(const Program& program) override;
  std::string_view kind() const override { return "linear-bag"; }

  double logit(const Program& program) const;
  const std::map<std::string, double>& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  std::map<std::string, double> weights_;
  double bias_;
};

/// Rule model over a keyword list: label "1" iff any listed keyword occurs;
/// score = logistic(total keyword occurrences), so removing keyword hits
/// lowers the confidence.
class KeywordRuleModel final : public Model {
 public:
  explicit KeywordRuleModel(std::vector<std::string> keywords);
  Prediction predict(const Program& program) override;
  std::string_view kind() const override { return "keyword-rule"; }

 private:
  std::vector<std::string> keywords_;
};

std::unique_ptr<Model> make_linear_bag(std::map<std::string, double> weights,
                                       double bias);
std::unique_ptr<Model> make_keyword_rule(std::vector<std::string> keywords);

/// Memoizes model answers per program fingerprint. Supports concurrent
/// use; correctness never depends on hits.
class QueryCache {
 public:
  std::optional<Prediction> lookup(const Program& program);
  void store(const Program& program, const Prediction& prediction);

  std::uint64_t hits() const;
  std::uint64_t misses() const;

  /// SHA-256 over the language id and the length-prefixed token texts.
  static std::string fingerprint(const Program& program);

 private:
  mutable std::mutex mutex_;
  std::unordered_map<std::string, Prediction> entries_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

/// The engine's single gateway to a model: consults the cache, validates
/// the prediction (label non-empty, score within [0,1] — violations are
/// rejected, never clamped), and memoizes the result.
///
/// Throws ProtocolError on invalid predictions; external models may throw
/// AdapterError.
Prediction query(Model& model, const Program& program,
                 QueryCache* cache = nullptr);

/// Declarative model description; each worker instantiates its own Model
/// from it so external adapter processes are never shared.
struct ModelSpec {
  std::string kind;  // "linear-bag" | "keyword-rule" | "external"
  std::map<std::string, double> weights;
  double bias = 0.0;
  std::vector<std::string> keywords;
  std::vector<std::string> command;
  int timeout_ms = 30000;
  std::optional<std::uint64_t> query_budget;

  std::unique_ptr<Model> instantiate() const;

  static ModelSpec linear_bag(std::map<std::string, double> weights,
                              double bias);
  static ModelSpec keyword_rule(std::vector<std::string> keywords);
  static ModelSpec external(std::vector<std::string> command,
                            int timeout_ms = 30000);
  /// Reads the JSON config written next to a corpus (see README).
  static ModelSpec from_json_file(const std::string& path,
                                  std::string_view kind);
};

}  // namespace dredge
