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

#include "pagewise/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pagewise/error.hpp"

namespace pagewise {
namespace {

void count_into(std::unordered_map<TokenId, ItfTable::Entry>& entries,
                std::span<const TokenId> ids) {
  for (const TokenId id : ids) ++entries[id].tf;
}

}  // namespace

ItfTable ItfTable::compute(std::span<const TokenId> context,
                           std::span<const TokenId> query) {
  if (context.empty() && query.empty()) {
    throw Error(ErrorCode::kConfig, "ITF needs at least one token");
  }
  ItfTable table;
  table.context_length_ = context.size();
  table.query_length_ = query.size();
  count_into(table.entries_, context);
  count_into(table.entries_, query);

  const double total = static_cast<double>(context.size() + query.size());
  const auto raw = [total](std::size_t tf) {
    return std::log(1.0 + total / (1.0 + static_cast<double>(tf)));
  };

  // raw is decreasing in tf, so the extremes come from the extreme counts.
  std::size_t min_tf = std::numeric_limits<std::size_t>::max();
  std::size_t max_tf = 0;
  for (const auto& [id, entry] : table.entries_) {
    min_tf = std::min(min_tf, entry.tf);
    max_tf = std::max(max_tf, entry.tf);
  }
  const double hi = raw(min_tf);
  const double lo = raw(max_tf);
  const double range = hi - lo;
  for (auto& [id, entry] : table.entries_) {
    entry.weight = range > 0.0 ? (raw(entry.tf) - lo) / range : 1.0;
  }
  return table;
}

ItfTable ItfTable::uniform(std::span<const TokenId> context,
                           std::span<const TokenId> query) {
  ItfTable table;
  table.context_length_ = context.size();
  table.query_length_ = query.size();
  count_into(table.entries_, context);
  count_into(table.entries_, query);
  for (auto& [id, entry] : table.entries_) entry.weight = 1.0;
  return table;
}

ItfTable ItfTable::from_weights(const std::unordered_map<TokenId, double>& weights) {
  ItfTable table;
  for (const auto& [id, w] : weights) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw Error(ErrorCode::kConfig, "ITF weight for id " + std::to_string(id) +
                                          " outside [0, 1]");
    }
    table.entries_[id].weight = w;
  }
  return table;
}

double ItfTable::weight(TokenId id) const {
  const auto it = entries_.find(id);
  return it == entries_.end() ? 0.0 : it->second.weight;
}

std::size_t ItfTable::tf(TokenId id) const {
  const auto it = entries_.find(id);
  return it == entries_.end() ? 0 : it->second.tf;
}

PageMatrix encode_pages(const FeatureMatrix& features, const PageTable& table,
                        std::span<const TokenId> context_ids,
                        const ItfTable& itf, const PoolingParams& params) {
  if (features.rows != context_ids.size() || table.n_tokens() != features.rows) {
    throw Error(ErrorCode::kContract,
                "feature rows (" + std::to_string(features.rows) +
                    ") do not match context length (" +
                    std::to_string(context_ids.size()) + ")");
  }
  if (params.gamma < 0.0 || params.gamma > 1.0) {
    throw Error(ErrorCode::kConfig, "gamma must lie in [0, 1]");
  }
  if (!(params.epsilon > 0.0)) {
    throw Error(ErrorCode::kConfig, "epsilon must be > 0");
  }

  const std::size_t dim = features.cols;
  PageMatrix out;
  out.n_pages = table.n_pages();
  out.dim = dim;
  out.rows.assign(out.n_pages * dim, 0.0);
  out.mean.assign(out.n_pages * dim, 0.0);
  out.max.assign(out.n_pages * dim, 0.0);

  std::vector<double> weights(context_ids.size());
  for (std::size_t t = 0; t < context_ids.size(); ++t) {
    weights[t] = itf.weight(context_ids[t]);
  }

  for (std::size_t p = 0; p < out.n_pages; ++p) {
    double* mu = out.mean.data() + p * dim;
    double* mx = out.max.data() + p * dim;
    std::fill(mx, mx + dim, -std::numeric_limits<double>::infinity());
    double weight_sum = 0.0;
    bool has_pad = false;
    for (const std::int64_t slot : table.row(p)) {
      if (slot == kPad) {
        has_pad = true;
        continue;
      }
      const auto t = static_cast<std::size_t>(slot);
      const auto x = features.row(t);
      const double w = weights[t];
      weight_sum += w;
      for (std::size_t k = 0; k < dim; ++k) {
        const double v = x[k];
        mu[k] += w * v;
        mx[k] = std::max(mx[k], v);
      }
    }
    // Pads contribute nothing to the mean and beta to the max.
    if (has_pad) {
      for (std::size_t k = 0; k < dim; ++k) mx[k] = std::max(mx[k], params.beta);
    }
    const double denom = weight_sum + params.epsilon;
    double* row = out.rows.data() + p * dim;
    for (std::size_t k = 0; k < dim; ++k) {
      mu[k] /= denom;
      row[k] = params.gamma * mu[k] + (1.0 - params.gamma) * mx[k];
    }
  }
  return out;
}

bool QueryRepr::has_token(TokenId id) const {
  return std::binary_search(token_set.begin(), token_set.end(), id);
}

QueryRepr encode_query(const EmbeddingProvider& provider, const TokenStream& query,
                       const ItfTable& itf, std::size_t dense_threshold,
                       double epsilon) {
  if (query.empty()) {
    throw Error(ErrorCode::kContract, "query is empty");
  }
  QueryRepr out;
  out.dim = provider.dim();
  out.token_set.assign(query.ids.begin(), query.ids.end());
  std::sort(out.token_set.begin(), out.token_set.end());
  out.token_set.erase(std::unique(out.token_set.begin(), out.token_set.end()),
                      out.token_set.end());

  std::vector<float> buffer(out.dim);
  if (query.size() < dense_threshold) {
    out.mode = QueryMode::kDense;
    std::vector<double> acc(out.dim, 0.0);
    double weight_sum = 0.0;
    for (const TokenId id : query.ids) {
      provider.lookup(id, buffer);
      const double w = itf.weight(id);
      weight_sum += w;
      for (std::size_t k = 0; k < out.dim; ++k) acc[k] += w * buffer[k];
    }
    for (double& v : acc) v /= weight_sum + epsilon;
    out.vectors.push_back(std::move(acc));
    out.weights.push_back(1.0);
    return out;
  }

  out.mode = QueryMode::kMulti;
  out.vectors.reserve(query.size());
  out.weights.reserve(query.size());
  for (const TokenId id : query.ids) {
    provider.lookup(id, buffer);
    out.vectors.emplace_back(buffer.begin(), buffer.end());
    out.weights.push_back(itf.weight(id));
  }
  return out;
}

}  // namespace pagewise
