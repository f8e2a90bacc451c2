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

#ifndef PAGEWISE_CONFIG_HPP_
#define PAGEWISE_CONFIG_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pagewise/encoder.hpp"
#include "pagewise/planner.hpp"
#include "pagewise/segmenter.hpp"

namespace pagewise {

enum class TokenizerMode { kWord, kPretokenized };
enum class ScoreMode { kMixed, kSemanticOnly, kLexicalOnly };

const char* tokenizer_name(TokenizerMode mode);
const char* score_mode_name(ScoreMode mode);

struct CompressionConfig {
  std::size_t budget = 2000;
  std::size_t page_size = kDefaultPageSize;
  double gamma = kDefaultGamma;
  double lambda = kDefaultLambda;
  std::size_t k_anc = kDefaultAnchorPages;
  std::size_t w_flow = kDefaultFlowWindow;
  std::size_t implicit_query_window = kDefaultImplicitQueryWindow;
  std::size_t dense_threshold = kDefaultDenseThreshold;
  double epsilon = kDefaultEpsilon;
  double beta = kDefaultBeta;
  std::string embedding = "hash:64:0";
  TokenizerMode tokenizer = TokenizerMode::kWord;

  bool disable_max_pool = false;
  bool disable_mean_pool = false;
  bool disable_itf = false;
  bool disable_smoothing = false;
  SelectionPolicy selection_policy = SelectionPolicy::kFull;
  ScoreMode score_mode = ScoreMode::kMixed;

  /// Fusion weight after the pooling switches are applied.
  double effective_gamma() const;
  /// Mixing weight after the score-mode switch is applied.
  double effective_lambda() const;
};

/// Field names accepted by set_option, in declaration order.
const std::vector<std::string>& option_names();

/// Sets one field by name (underscore spelling, e.g. "k_anc"). Accepts the
/// JSON type natural to the field; enums take their string spelling. Throws
/// kUsage naming the field for unknown names, wrong types or bad values.
void set_option(CompressionConfig& config, std::string_view name,
                const nlohmann::json& value);

/// Applies every key of a JSON object via set_option.
void apply_options(CompressionConfig& config, const nlohmann::json& object);

/// Throws kUsage naming the first invalid field.
void validate(const CompressionConfig& config);

SelectionPolicy parse_selection_policy(std::string_view text);
ScoreMode parse_score_mode(std::string_view text);
TokenizerMode parse_tokenizer(std::string_view text);

nlohmann::json to_json(const CompressionConfig& config);

}  // namespace pagewise

#endif  // PAGEWISE_CONFIG_HPP_
