#include "dredge/model.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "dredge/adapter.hpp"
#include "dredge/errors.hpp"

#include <nlohmann/json.hpp>

namespace dredge {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

LinearBagModel::LinearBagModel(std::map<std::string, double> weights,
                               double bias)
    : weights_(std::move(weights)), bias_(bias) {
  if (!std::isfinite(bias_)) {
    throw ConfigError("linear-bag bias must be finite");
  }
  for (const auto& [token, weight] : weights_) {
    if (!std::isfinite(weight)) {
      throw ConfigError("linear-bag weight for '" + token +
                        "' must be finite");
    }
  }
}

double LinearBagModel::logit(const Program& program) const {
  double z = bias_;
  for (const Token& tok : program.tokens) {
    auto it = weights_.find(tok.text);
    if (it != weights_.end()) z += it->second;
  }
  return z;
}

Prediction LinearBagModel::predict(const Program& program) {
  double score = logistic(logit(program));
  return Prediction{score > 0.5 ? "1" : "0", score};
}

KeywordRuleModel::KeywordRuleModel(std::vector<std::string> keywords)
    : keywords_(std::move(keywords)) {
  if (keywords_.empty()) {
    throw ConfigError("keyword-rule model needs a non-empty keyword list");
  }
}

Prediction KeywordRuleModel::predict(const Program& program) {
  std::uint64_t hits = 0;
  for (const Token& tok : program.tokens) {
    for (const std::string& kw : keywords_) {
      if (tok.text == kw) {
        ++hits;
        break;
      }
    }
  }
  double score = logistic(static_cast<double>(hits));
  return Prediction{hits > 0 ? "1" : "0", score};
}

std::unique_ptr<Model> make_linear_bag(std::map<std::string, double> weights,
                                       double bias) {
  return std::make_unique<LinearBagModel>(std::move(weights), bias);
}

std::unique_ptr<Model> make_keyword_rule(std::vector<std::string> keywords) {
  return std::make_unique<KeywordRuleModel>(std::move(keywords));
}

std::string QueryCache::fingerprint(const Program& program) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::string_view lang = to_string(program.language);
  EVP_DigestUpdate(ctx, lang.data(), lang.size());
  for (const Token& tok : program.tokens) {
    std::uint64_t len = tok.text.size();
    unsigned char prefix[8];
    for (int i = 0; i < 8; ++i) {
      prefix[i] = static_cast<unsigned char>((len >> (8 * i)) & 0xff);
    }
    EVP_DigestUpdate(ctx, prefix, sizeof(prefix));
    EVP_DigestUpdate(ctx, tok.text.data(), tok.text.size());
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  EVP_DigestFinal_ex(ctx, digest, &digest_len);
  EVP_MD_CTX_free(ctx);
  return std::string(reinterpret_cast<char*>(digest), digest_len);
}

std::optional<Prediction> QueryCache::lookup(const Program& program) {
  std::string key = fingerprint(program);
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second;
}

void QueryCache::store(const Program& program, const Prediction& prediction) {
  std::string key = fingerprint(program);
  std::lock_guard lock(mutex_);
  entries_.emplace(std::move(key), prediction);
}

std::uint64_t QueryCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::uint64_t QueryCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

Prediction query(Model& model, const Program& program, QueryCache* cache) {
  if (cache) {
    if (auto hit = cache->lookup(program)) return *hit;
  }
  Prediction prediction = model.predict(program);
  if (prediction.label.empty()) {
    throw ProtocolError("model returned an empty label");
  }
  if (!std::isfinite(prediction.score) || prediction.score < 0.0 ||
      prediction.score > 1.0) {
    throw ProtocolError("model score " + std::to_string(prediction.score) +
                        " outside [0,1]");
  }
  if (cache) cache->store(program, prediction);
  return prediction;
}

std::unique_ptr<Model> ModelSpec::instantiate() const {
  if (kind == "linear-bag") return make_linear_bag(weights, bias);
  if (kind == "keyword-rule") return make_keyword_rule(keywords);
  if (kind == "external") {
    return std::make_unique<ExternalModel>(
        command, std::chrono::milliseconds(timeout_ms));
  }
  throw ConfigError("unknown model kind: '" + kind + "'");
}

ModelSpec ModelSpec::linear_bag(std::map<std::string, double> weights,
                                double bias) {
  ModelSpec spec;
  spec.kind = "linear-bag";
  spec.weights = std::move(weights);
  spec.bias = bias;
  return spec;
}

ModelSpec ModelSpec::keyword_rule(std::vector<std::string> keywords) {
  ModelSpec spec;
  spec.kind = "keyword-rule";
  spec.keywords = std::move(keywords);
  return spec;
}

ModelSpec ModelSpec::external(std::vector<std::string> command,
                              int timeout_ms) {
  ModelSpec spec;
  spec.kind = "external";
  spec.command = std::move(command);
  spec.timeout_ms = timeout_ms;
  return spec;
}

ModelSpec ModelSpec::from_json_file(const std::string& path,
                                    std::string_view kind) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model config: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed model config " + path + ": " + e.what());
  }
  std::string resolved(kind);
  if (resolved.empty() && doc.contains("kind")) {
    resolved = doc.at("kind").get<std::string>();
  }
  std::optional<std::uint64_t> budget;
  if (doc.contains("query_budget")) {
    budget = doc.at("query_budget").get<std::uint64_t>();
  }
  if (resolved == "linear-bag") {
    std::map<std::string, double> weights;
    if (doc.contains("weights")) {
      for (const auto& [token, value] : doc.at("weights").items()) {
        if (!value.is_number()) {
          throw ConfigError("weight for '" + token + "' is not a number");
        }
        weights[token] = value.get<double>();
      }
    }
    double bias = doc.value("bias", 0.0);
    ModelSpec spec = linear_bag(std::move(weights), bias);
    spec.query_budget = budget;
    return spec;
  }
  if (resolved == "keyword-rule") {
    std::vector<std::string> keywords;
    for (const auto& kw : doc.value("keywords", nlohmann::json::array())) {
      keywords.push_back(kw.get<std::string>());
    }
    ModelSpec spec = keyword_rule(std::move(keywords));
    spec.query_budget = budget;
    return spec;
  }
  throw ConfigError("model config " + path + " has unsupported kind '" +
                    resolved + "'");
}

}  // namespace dredge
