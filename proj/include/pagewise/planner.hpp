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

#ifndef PAGEWISE_PLANNER_HPP_
#define PAGEWISE_PLANNER_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pagewise/encoder.hpp"
#include "pagewise/segmenter.hpp"
#include "pagewise/text.hpp"

namespace pagewise {

inline constexpr double kDefaultLambda = 0.7;
inline constexpr std::size_t kDefaultAnchorPages = 4;
inline constexpr std::size_t kDefaultFlowWindow = 4;

struct ScoreVector {
  std::vector<double> raw_sem;
  std::vector<double> raw_lex;
  std::vector<double> norm_sem;
  std::vector<double> norm_lex;
  std::vector<double> mixed;
};

/// s_sem(i) = sum_k weight_k * cos(row_i, q_k); cos is 0 when either norm is
/// below 1e-12.
std::vector<double> semantic_scores(const PageMatrix& pages, const QueryRepr& query);

/// s_lex(i) = sum over token occurrences on page i of [id in query] * itf(id).
std::vector<double> lexical_scores(const PageTable& table,
                                   std::span<const TokenId> context_ids,
                                   const QueryRepr& query, const ItfTable& itf);

/// Min-max each branch over pages (a constant branch becomes all zeros), then
/// mixed = lambda * sem + (1 - lambda) * lex.
ScoreVector normalize_and_mix(std::vector<double> raw_sem,
                              std::vector<double> raw_lex, double lambda);

/// Min-max to [0, 1]; constant or empty input maps to zeros.
std::vector<double> min_max(std::span<const double> values);

/// Page holding the last context token before the query. For an explicit
/// query that is the last page.
std::size_t locate_query_anchor(const PageTable& table, const QuerySplit& split);

enum class Origin { kAnchor, kFlow, kFlash };
const char* origin_name(Origin origin);

enum class SelectionPolicy { kFull, kAnchorOnly, kFlowOnly, kFlashOnly };
const char* policy_name(SelectionPolicy policy);

struct Span {
  std::size_t a = 0;
  std::size_t b = 0;  // inclusive
  Origin origin = Origin::kFlash;
  double score = 0.0;

  std::size_t length() const noexcept { return b - a + 1; }
};

struct SpanSet {
  std::vector<Span> spans;

  std::size_t token_count() const;
};

struct SelectionParams {
  std::size_t k_anc = kDefaultAnchorPages;
  std::size_t w_flow = kDefaultFlowWindow;
  std::size_t budget = 2000;
  SelectionPolicy policy = SelectionPolicy::kFull;
  bool smoothing = true;
};

struct SelectionPlan {
  std::vector<std::size_t> anchors;
  std::vector<std::size_t> flow;
  std::vector<std::size_t> flash;  // admission order: descending mixed score
  std::size_t p_qry = 0;
};

/// Anchors are pages [0, min(k_anc, p_qry + 1)), flow is
/// [max(0, p_qry - w_flow), p_qry] minus anchors. Flash visits the remaining
/// pages <= p_qry by descending mixed score (ties to the lower page) and admits
/// a page iff the smoothed, merged footprint of the plan stays within budget.
/// Pages that would overflow are skipped, not terminal.
SelectionPlan select_pages(const ScoreVector& scores, std::size_t p_qry,
                           const SelectionParams& params, const PageTable& table,
                           std::span<const std::size_t> sentence_boundaries);

/// Moves a left to just after the previous sentence boundary and b right to
/// the next boundary at or after it. `boundaries` must contain the last token.
Span extend_to_sentences(Span span, std::span<const std::size_t> boundaries);

/// Sorts by start and merges overlapping or adjacent spans. A merged span keeps
/// the highest score and the strongest origin (anchor > flow > flash).
SpanSet merge_spans(std::vector<Span> spans);

/// One span per selected page, extended to sentence boundaries when
/// `smoothing` is set, then merged.
SpanSet smooth_spans(const SelectionPlan& plan, const PageTable& table,
                     std::span<const std::size_t> sentence_boundaries,
                     std::span<const double> page_scores, bool smoothing = true);

/// Drops whole spans (flash, then flow, then anchors; lowest score first)
/// until the total fits. A lone span that is still too long is cut at the
/// last sentence boundary that fits, or hard-truncated. Throws kConfig if
/// budget < 1.
SpanSet enforce_budget(SpanSet spans, std::size_t budget,
                       std::span<const std::size_t> sentence_boundaries);

struct RenderedContext {
  std::string compressed;
  std::size_t token_count = 0;
  double ratio = 0.0;  // context tokens / retained tokens; 0 if nothing kept
  std::vector<Span> spans;
};

/// Source byte ranges of the spans joined by '\n', then '\n' and the query
/// text. With no spans the output is the query text alone.
RenderedContext render(const SpanSet& spans, const TokenStream& context,
                       std::string_view text, std::string_view query_text);

}  // namespace pagewise

#endif  // PAGEWISE_PLANNER_HPP_
