// Copyright 2026 The Pagewise Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pagewise/config.hpp"

#include <cmath>

#include "pagewise/error.hpp"

namespace pagewise {
namespace {

[[noreturn]] void bad_option(std::string_view name, const std::string& why) {
  throw Error(ErrorCode::kUsage, std::string(name) + ": " + why);
}

std::size_t as_count(std::string_view name, const nlohmann::json& v) {
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_number_integer()) {
    if (v.get<long long>() < 0) bad_option(name, "must be >= 0");
    return v.get<std::size_t>();
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0 && std::floor(d) == d) return static_cast<std::size_t>(d);
  }
  bad_option(name, "expected a non-negative integer, got " + v.dump());
}

double as_real(std::string_view name, const nlohmann::json& v) {
  if (!v.is_number()) bad_option(name, "expected a number, got " + v.dump());
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad_option(name, "must be finite");
  return d;
}

bool as_flag(std::string_view name, const nlohmann::json& v) {
  if (!v.is_boolean()) bad_option(name, "expected true/false, got " + v.dump());
  return v.get<bool>();
}

std::string as_text(std::string_view name, const nlohmann::json& v) {
  if (!v.is_string()) bad_option(name, "expected a string, got " + v.dump());
  return v.get<std::string>();
}

}  // namespace

const char* tokenizer_name(TokenizerMode mode) {
  return mode == TokenizerMode::kWord ? "word" : "pretokenized";
}

const char* score_mode_name(ScoreMode mode) {
  switch (mode) {
    case ScoreMode::kMixed: return "mixed";
    case ScoreMode::kSemanticOnly: return "semantic_only";
    case ScoreMode::kLexicalOnly: return "lexical_only";
  }
  return "mixed";
}

SelectionPolicy parse_selection_policy(std::string_view text) {
  if (text == "full") return SelectionPolicy::kFull;
  if (text == "anchor_only") return SelectionPolicy::kAnchorOnly;
  if (text == "flow_only") return SelectionPolicy::kFlowOnly;
  if (text == "flash_only") return SelectionPolicy::kFlashOnly;
  bad_option("selection_policy", "unknown policy '" + std::string(text) + "'");
}

ScoreMode parse_score_mode(std::string_view text) {
  if (text == "mixed") return ScoreMode::kMixed;
  if (text == "semantic_only") return ScoreMode::kSemanticOnly;
  if (text == "lexical_only") return ScoreMode::kLexicalOnly;
  bad_option("score_mode", "unknown mode '" + std::string(text) + "'");
}

TokenizerMode parse_tokenizer(std::string_view text) {
  if (text == "word") return TokenizerMode::kWord;
  if (text == "pretokenized") return TokenizerMode::kPretokenized;
  bad_option("tokenizer", "unknown tokenizer '" + std::string(text) + "'");
}

double CompressionConfig::effective_gamma() const {
  if (disable_max_pool) return 1.0;
  if (disable_mean_pool) return 0.0;
  return gamma;
}

double CompressionConfig::effective_lambda() const {
  switch (score_mode) {
    case ScoreMode::kSemanticOnly: return 1.0;
    case ScoreMode::kLexicalOnly: return 0.0;
    case ScoreMode::kMixed: break;
  }
  return lambda;
}

const std::vector<std::string>& option_names() {
  static const std::vector<std::string> names = {
      "budget",           "page_size",         "gamma",
      "lambda",           "k_anc",             "w_flow",
      "implicit_query_window", "dense_threshold", "epsilon",
      "beta",             "embedding",         "tokenizer",
      "disable_max_pool", "disable_mean_pool", "disable_itf",
      "disable_smoothing", "selection_policy", "score_mode"};
  return names;
}

void set_option(CompressionConfig& c, std::string_view name,
                const nlohmann::json& v) {
  if (name == "budget") {
    c.budget = as_count(name, v);
  } else if (name == "page_size") {
    c.page_size = as_count(name, v);
  } else if (name == "gamma") {
    c.gamma = as_real(name, v);
  } else if (name == "lambda") {
    c.lambda = as_real(name, v);
  } else if (name == "k_anc") {
    c.k_anc = as_count(name, v);
  } else if (name == "w_flow") {
    c.w_flow = as_count(name, v);
  } else if (name == "implicit_query_window") {
    c.implicit_query_window = as_count(name, v);
  } else if (name == "dense_threshold") {
    c.dense_threshold = as_count(name, v);
  } else if (name == "epsilon") {
    c.epsilon = as_real(name, v);
  } else if (name == "beta") {
    c.beta = as_real(name, v);
  } else if (name == "embedding") {
    c.embedding = as_text(name, v);
  } else if (name == "tokenizer") {
    c.tokenizer = parse_tokenizer(as_text(name, v));
  } else if (name == "disable_max_pool") {
    c.disable_max_pool = as_flag(name, v);
  } else if (name == "disable_mean_pool") {
    c.disable_mean_pool = as_flag(name, v);
  } else if (name == "disable_itf") {
    c.disable_itf = as_flag(name, v);
  } else if (name == "disable_smoothing") {
    c.disable_smoothing = as_flag(name, v);
  } else if (name == "selection_policy") {
    c.selection_policy = parse_selection_policy(as_text(name, v));
  } else if (name == "score_mode") {
    c.score_mode = parse_score_mode(as_text(name, v));
  } else {
    bad_option(name, "unknown option");
  }
}

void apply_options(CompressionConfig& config, const nlohmann::json& object) {
  if (!object.is_object()) {
    throw Error(ErrorCode::kUsage, "config: expected a JSON object");
  }
  for (const auto& [key, value] : object.items()) set_option(config, key, value);
}

void validate(const CompressionConfig& c) {
  if (c.budget < 1) bad_option("budget", "must be >= 1");
  if (c.page_size < 1) bad_option("page_size", "must be >= 1");
  if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) bad_option("gamma", "must lie in [0, 1]");
  if (!(c.lambda >= 0.0 && c.lambda <= 1.0)) bad_option("lambda", "must lie in [0, 1]");
  if (c.implicit_query_window < 1) bad_option("implicit_query_window", "must be >= 1");
  if (!(c.epsilon > 0.0)) bad_option("epsilon", "must be > 0");
  if (!(c.beta < 0.0)) bad_option("beta", "must be < 0");
  if (c.embedding.empty()) bad_option("embedding", "must not be empty");
  if (c.disable_max_pool && c.disable_mean_pool) {
    bad_option("disable_mean_pool", "cannot disable both pooling paths");
  }
}

nlohmann::json to_json(const CompressionConfig& c) {
  return {
      {"budget", c.budget},
      {"page_size", c.page_size},
      {"gamma", c.gamma},
      {"lambda", c.lambda},
      {"k_anc", c.k_anc},
      {"w_flow", c.w_flow},
      {"implicit_query_window", c.implicit_query_window},
      {"dense_threshold", c.dense_threshold},
      {"epsilon", c.epsilon},
      {"beta", c.beta},
      {"embedding", c.embedding},
      {"tokenizer", tokenizer_name(c.tokenizer)},
      {"disable_max_pool", c.disable_max_pool},
      {"disable_mean_pool", c.disable_mean_pool},
      {"disable_itf", c.disable_itf},
      {"disable_smoothing", c.disable_smoothing},
      {"selection_policy", policy_name(c.selection_policy)},
      {"score_mode", score_mode_name(c.score_mode)},
  };
}

}  // namespace pagewise
