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

#include "pagewise/planner.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <numeric>

#include "pagewise/error.hpp"

namespace pagewise {
namespace {

constexpr double kMinNorm = 1e-12;

int priority(Origin origin) {
  switch (origin) {
    case Origin::kAnchor: return 2;
    case Origin::kFlow: return 1;
    case Origin::kFlash: return 0;
  }
  return 0;
}

// Union of token intervals, tracked incrementally for flash admission.
class Footprint {
 public:
  std::size_t total() const noexcept { return total_; }

  std::size_t added_by(std::size_t a, std::size_t b) const {
    std::size_t covered = 0;
    auto it = intervals_.upper_bound(b);
    while (it != intervals_.begin()) {
      --it;
      if (it->second < a) break;
      covered += std::min(b, it->second) - std::max(a, it->first) + 1;
    }
    return (b - a + 1) - covered;
  }

  void add(std::size_t a, std::size_t b) {
    total_ += added_by(a, b);
    auto it = intervals_.upper_bound(b);
    while (it != intervals_.begin()) {
      auto prev = std::prev(it);
      if (prev->second < a) break;
      a = std::min(a, prev->first);
      b = std::max(b, prev->second);
      it = intervals_.erase(prev);
    }
    intervals_.emplace(a, b);
  }

 private:
  std::map<std::size_t, std::size_t> intervals_;
  std::size_t total_ = 0;
};

}  // namespace

const char* origin_name(Origin origin) {
  switch (origin) {
    case Origin::kAnchor: return "anchor";
    case Origin::kFlow: return "flow";
    case Origin::kFlash: return "flash";
  }
  return "flash";
}

const char* policy_name(SelectionPolicy policy) {
  switch (policy) {
    case SelectionPolicy::kFull: return "full";
    case SelectionPolicy::kAnchorOnly: return "anchor_only";
    case SelectionPolicy::kFlowOnly: return "flow_only";
    case SelectionPolicy::kFlashOnly: return "flash_only";
  }
  return "full";
}

std::size_t SpanSet::token_count() const {
  std::size_t total = 0;
  for (const Span& s : spans) total += s.length();
  return total;
}

std::vector<double> semantic_scores(const PageMatrix& pages, const QueryRepr& query) {
  if (!query.vectors.empty() && query.dim != pages.dim) {
    throw Error(ErrorCode::kContract, "page and query dimensions differ");
  }
  const std::size_t dim = pages.dim;
  std::vector<double> query_norms;
  query_norms.reserve(query.vectors.size());
  for (const auto& q : query.vectors) {
    query_norms.push_back(std::sqrt(std::inner_product(q.begin(), q.end(), q.begin(), 0.0)));
  }

  std::vector<double> out(pages.n_pages, 0.0);
  for (std::size_t i = 0; i < pages.n_pages; ++i) {
    const auto row = pages.row(i);
    const double row_norm =
        std::sqrt(std::inner_product(row.begin(), row.end(), row.begin(), 0.0));
    if (row_norm < kMinNorm) continue;
    double score = 0.0;
    for (std::size_t k = 0; k < query.vectors.size(); ++k) {
      if (query_norms[k] < kMinNorm) continue;
      const double dot = std::inner_product(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(dim),
                                            query.vectors[k].begin(), 0.0);
      score += query.weights[k] * dot / (row_norm * query_norms[k]);
    }
    out[i] = score;
  }
  return out;
}

std::vector<double> lexical_scores(const PageTable& table,
                                   std::span<const TokenId> context_ids,
                                   const QueryRepr& query, const ItfTable& itf) {
  std::vector<double> out(table.n_pages(), 0.0);
  for (std::size_t p = 0; p < table.n_pages(); ++p) {
    double score = 0.0;
    for (const std::int64_t slot : table.row(p)) {
      if (slot == kPad) continue;
      const TokenId id = context_ids[static_cast<std::size_t>(slot)];
      if (query.has_token(id)) score += itf.weight(id);
    }
    out[p] = score;
  }
  return out;
}

std::vector<double> min_max(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (values[i] - *lo) / range;
  }
  return out;
}

ScoreVector normalize_and_mix(std::vector<double> raw_sem,
                              std::vector<double> raw_lex, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) {
    throw Error(ErrorCode::kConfig, "lambda must lie in [0, 1]");
  }
  if (raw_sem.size() != raw_lex.size()) {
    throw Error(ErrorCode::kContract, "semantic and lexical score lengths differ");
  }
  ScoreVector out;
  out.norm_sem = min_max(raw_sem);
  out.norm_lex = min_max(raw_lex);
  out.mixed.resize(raw_sem.size());
  for (std::size_t i = 0; i < out.mixed.size(); ++i) {
    out.mixed[i] = lambda * out.norm_sem[i] + (1.0 - lambda) * out.norm_lex[i];
  }
  out.raw_sem = std::move(raw_sem);
  out.raw_lex = std::move(raw_lex);
  return out;
}

std::size_t locate_query_anchor(const PageTable& table, const QuerySplit& split) {
  if (table.n_pages() == 0) return 0;
  if (split.explicit_query || split.query_start == 0 ||
      split.query_start > table.n_tokens()) {
    return table.n_pages() - 1;
  }
  return table.page_of_token(split.query_start - 1);
}

Span extend_to_sentences(Span span, std::span<const std::size_t> boundaries) {
  // Previous boundary strictly before a.
  auto lo = std::lower_bound(boundaries.begin(), boundaries.end(), span.a);
  span.a = lo == boundaries.begin() ? 0 : *std::prev(lo) + 1;
  auto hi = std::lower_bound(boundaries.begin(), boundaries.end(), span.b);
  if (hi != boundaries.end()) span.b = *hi;
  return span;
}

SpanSet merge_spans(std::vector<Span> spans) {
  std::sort(spans.begin(), spans.end(), [](const Span& x, const Span& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  SpanSet out;
  for (const Span& s : spans) {
    if (!out.spans.empty() && s.a <= out.spans.back().b + 1) {
      Span& last = out.spans.back();
      last.b = std::max(last.b, s.b);
      last.score = std::max(last.score, s.score);
      if (priority(s.origin) > priority(last.origin)) last.origin = s.origin;
      continue;
    }
    out.spans.push_back(s);
  }
  return out;
}

namespace {

Span page_span(const PageTable& table, std::size_t page, Origin origin,
               std::span<const double> scores,
               std::span<const std::size_t> boundaries, bool smoothing) {
  Span s{table.first_token(page), table.last_token(page), origin,
         page < scores.size() ? scores[page] : 0.0};
  return smoothing ? extend_to_sentences(s, boundaries) : s;
}

}  // namespace

SelectionPlan select_pages(const ScoreVector& scores, std::size_t p_qry,
                           const SelectionParams& params, const PageTable& table,
                           std::span<const std::size_t> sentence_boundaries) {
  if (params.budget < 1) throw Error(ErrorCode::kConfig, "budget must be >= 1");
  SelectionPlan plan;
  plan.p_qry = p_qry;
  const std::size_t n = table.n_pages();
  if (n == 0) return plan;
  if (p_qry >= n) throw Error(ErrorCode::kIndex, "query anchor outside page table");

  const bool use_anchor = params.policy == SelectionPolicy::kFull ||
                          params.policy == SelectionPolicy::kAnchorOnly;
  const bool use_flow = params.policy == SelectionPolicy::kFull ||
                        params.policy == SelectionPolicy::kFlowOnly;
  const bool use_flash = params.policy == SelectionPolicy::kFull ||
                         params.policy == SelectionPolicy::kFlashOnly;

  std::vector<bool> taken(p_qry + 1, false);
  Footprint footprint;
  const auto take = [&](std::size_t page, Origin origin) {
    taken[page] = true;
    const Span s = page_span(table, page, origin, scores.mixed,
                             sentence_boundaries, params.smoothing);
    footprint.add(s.a, s.b);
  };

  if (use_anchor) {
    const std::size_t end = std::min(params.k_anc, p_qry + 1);
    for (std::size_t p = 0; p < end; ++p) {
      plan.anchors.push_back(p);
      take(p, Origin::kAnchor);
    }
  }
  if (use_flow) {
    const std::size_t start = p_qry > params.w_flow ? p_qry - params.w_flow : 0;
    for (std::size_t p = start; p <= p_qry; ++p) {
      if (taken[p]) continue;
      plan.flow.push_back(p);
      take(p, Origin::kFlow);
    }
  }
  if (!use_flash) return plan;

  std::vector<std::size_t> candidates;
  for (std::size_t p = 0; p <= p_qry; ++p) {
    if (!taken[p]) candidates.push_back(p);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t x, std::size_t y) {
                     return scores.mixed[x] > scores.mixed[y];
                   });
  for (const std::size_t p : candidates) {
    const Span s = page_span(table, p, Origin::kFlash, scores.mixed,
                             sentence_boundaries, params.smoothing);
    if (footprint.total() + footprint.added_by(s.a, s.b) > params.budget) continue;
    footprint.add(s.a, s.b);
    plan.flash.push_back(p);
  }
  return plan;
}

SpanSet smooth_spans(const SelectionPlan& plan, const PageTable& table,
                     std::span<const std::size_t> sentence_boundaries,
                     std::span<const double> page_scores, bool smoothing) {
  std::vector<Span> spans;
  spans.reserve(plan.anchors.size() + plan.flow.size() + plan.flash.size());
  for (const std::size_t p : plan.anchors) {
    spans.push_back(page_span(table, p, Origin::kAnchor, page_scores,
                              sentence_boundaries, smoothing));
  }
  for (const std::size_t p : plan.flow) {
    spans.push_back(page_span(table, p, Origin::kFlow, page_scores,
                              sentence_boundaries, smoothing));
  }
  for (const std::size_t p : plan.flash) {
    spans.push_back(page_span(table, p, Origin::kFlash, page_scores,
                              sentence_boundaries, smoothing));
  }
  return merge_spans(std::move(spans));
}

SpanSet enforce_budget(SpanSet spans, std::size_t budget,
                       std::span<const std::size_t> sentence_boundaries) {
  if (budget < 1) throw Error(ErrorCode::kConfig, "budget must be >= 1");
  std::size_t total = spans.token_count();
  if (total <= budget) return spans;

  // Drop order: weakest origin first, then lowest score, then later position.
  std::vector<std::size_t> order(spans.spans.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const Span& sx = spans.spans[x];
    const Span& sy = spans.spans[y];
    if (priority(sx.origin) != priority(sy.origin)) {
      return priority(sx.origin) < priority(sy.origin);
    }
    if (sx.score != sy.score) return sx.score < sy.score;
    return x > y;
  });
  std::vector<bool> dropped(spans.spans.size(), false);
  std::size_t remaining = spans.spans.size();
  for (const std::size_t idx : order) {
    if (total <= budget || remaining == 1) break;
    dropped[idx] = true;
    total -= spans.spans[idx].length();
    --remaining;
  }
  SpanSet out;
  for (std::size_t i = 0; i < spans.spans.size(); ++i) {
    if (!dropped[i]) out.spans.push_back(spans.spans[i]);
  }
  if (total <= budget) return out;

  Span& last = out.spans.front();
  const std::size_t limit = last.a + budget - 1;
  auto it = std::upper_bound(sentence_boundaries.begin(), sentence_boundaries.end(), limit);
  if (it != sentence_boundaries.begin() && *std::prev(it) >= last.a) {
    last.b = *std::prev(it);
  } else {
    last.b = limit;
  }
  return out;
}

RenderedContext render(const SpanSet& spans, const TokenStream& context,
                       std::string_view text, std::string_view query_text) {
  RenderedContext out;
  out.spans = spans.spans;
  for (const Span& s : spans.spans) {
    if (s.b >= context.size() || s.a > s.b) {
      throw Error(ErrorCode::kIndex, "span outside context");
    }
    const std::size_t begin = context.offsets[s.a].start;
    const std::size_t end = context.offsets[s.b].end;
    if (!out.compressed.empty() || out.token_count > 0) out.compressed += '\n';
    out.compressed.append(text.substr(begin, end - begin));
    out.token_count += s.length();
  }
  if (!query_text.empty()) {
    if (out.token_count > 0) out.compressed += '\n';
    out.compressed.append(query_text);
  }
  out.ratio = out.token_count > 0 ? static_cast<double>(context.size()) /
                                        static_cast<double>(out.token_count)
                                  : 0.0;
  return out;
}

}  // namespace pagewise
