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

#include "pagewise/pipeline.hpp"

#include "pagewise/encoder.hpp"
#include "pagewise/error.hpp"

namespace pagewise {

Document make_document(std::string id, std::string text,
                       std::optional<std::string> query) {
  Document doc;
  doc.id = std::move(id);
  doc.text = std::move(text);
  doc.tokens = tokenize(doc.text);
  if (query && !query->empty()) {
    TokenStream q = tokenize(*query);
    if (!q.empty()) {
      doc.query_tokens = std::move(q);
      doc.query_text = std::move(query);
    }
  }
  return doc;
}

CompressionResult compress(const Document& doc, const CompressionConfig& config,
                           const EmbeddingProvider& provider) {
  validate(config);
  const std::string_view text = doc.text;
  const TokenStream& stream = doc.tokens;
  const BoundarySet boundaries = detect_boundaries(stream, text);

  CompressionResult result;
  QuerySplit split;
  TokenStream query;
  std::string_view query_text;
  const bool explicit_query =
      doc.query_tokens.has_value() && !doc.query_tokens->empty();
  if (explicit_query) {
    split = {stream.size(), stream.size(), true};
    query = *doc.query_tokens;
    query_text = *doc.query_text;
  } else {
    if (stream.empty()) return result;
    split = resolve_implicit_query(stream, boundaries, config.implicit_query_window);
    query = stream.suffix(split.query_start);
    query_text = text.substr(stream.offsets[split.query_start].start);
  }
  result.explicit_query = explicit_query;
  result.query_tokens = query.size();

  const std::size_t context_len = split.context_length();
  result.context_tokens = context_len;
  const TokenStream context = stream.prefix(context_len);
  if (context_len == 0) {
    const RenderedContext rendered = render({}, context, text, query_text);
    result.compressed = rendered.compressed;
    return result;
  }

  const auto segment_cuts = clip_boundaries(boundaries.segment_boundaries, context_len);
  const auto sentence_cuts = clip_boundaries(boundaries.sentence_boundaries, context_len);
  const auto segments = segment(context_len, segment_cuts);
  result.pages = paginate(segments, config.page_size);

  const ItfTable itf = config.disable_itf ? ItfTable::uniform(context.ids, query.ids)
                                          : ItfTable::compute(context.ids, query.ids);
  const FeatureMatrix features = embed(provider, context);
  const PageMatrix pages =
      encode_pages(features, result.pages, context.ids, itf,
                   {config.effective_gamma(), config.epsilon, config.beta});
  const QueryRepr query_repr =
      encode_query(provider, query, itf, config.dense_threshold, config.epsilon);

  result.scores = normalize_and_mix(semantic_scores(pages, query_repr),
                                    lexical_scores(result.pages, context.ids, query_repr, itf),
                                    config.effective_lambda());

  const std::size_t p_qry = locate_query_anchor(result.pages, split);
  SelectionParams params;
  params.k_anc = config.k_anc;
  params.w_flow = config.w_flow;
  params.budget = config.budget;
  params.policy = config.selection_policy;
  params.smoothing = !config.disable_smoothing;
  result.plan = select_pages(result.scores, p_qry, params, result.pages, sentence_cuts);

  SpanSet spans = smooth_spans(result.plan, result.pages, sentence_cuts,
                               result.scores.mixed, params.smoothing);
  spans = enforce_budget(std::move(spans), config.budget, sentence_cuts);

  RenderedContext rendered = render(spans, context, text, query_text);
  result.compressed = std::move(rendered.compressed);
  result.token_count = rendered.token_count;
  result.ratio = rendered.ratio;
  result.spans = std::move(rendered.spans);
  return result;
}

}  // namespace pagewise
