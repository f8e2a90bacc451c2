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

#ifndef PAGEWISE_PIPELINE_HPP_
#define PAGEWISE_PIPELINE_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pagewise/config.hpp"
#include "pagewise/embedding.hpp"
#include "pagewise/planner.hpp"
#include "pagewise/segmenter.hpp"
#include "pagewise/text.hpp"

namespace pagewise {

/// A context to compress. Without a query, the tail of the context is
/// resolved as an implicit query.
struct Document {
  std::string id;
  std::string text;
  TokenStream tokens;
  std::optional<std::string> query_text;
  std::optional<TokenStream> query_tokens;
};

/// Tokenizes with the built-in word tokenizer. An empty query counts as absent.
Document make_document(std::string id, std::string text,
                       std::optional<std::string> query = std::nullopt);

struct CompressionResult {
  std::string compressed;
  std::size_t token_count = 0;
  double ratio = 0.0;
  std::vector<Span> spans;

  std::size_t context_tokens = 0;
  std::size_t query_tokens = 0;
  bool explicit_query = false;

  // Diagnostics.
  ScoreVector scores;
  PageTable pages;
  SelectionPlan plan;
};

/// Full pipeline: boundaries, query split, pagination, ITF, pooling, scoring,
/// page selection, smoothing, budget enforcement, rendering.
CompressionResult compress(const Document& doc, const CompressionConfig& config,
                           const EmbeddingProvider& provider);

}  // namespace pagewise

#endif  // PAGEWISE_PIPELINE_HPP_
