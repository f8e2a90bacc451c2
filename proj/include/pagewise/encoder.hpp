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

#ifndef PAGEWISE_ENCODER_HPP_
#define PAGEWISE_ENCODER_HPP_

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include "pagewise/embedding.hpp"
#include "pagewise/segmenter.hpp"
#include "pagewise/text.hpp"

namespace pagewise {

inline constexpr double kDefaultGamma = 0.7;
inline constexpr double kDefaultEpsilon = 1e-8;
inline constexpr double kDefaultBeta = -1e9;
inline constexpr std::size_t kDefaultDenseThreshold = 4;

/// In-context inverse term frequency. For every distinct token t of
/// context ++ query:
///   raw(t)    = log(1 + (L_c + L_q) / (1 + tf(t)))
///   weight(t) = min-max of raw over distinct tokens, or 1.0 when all raw
///               values coincide.
class ItfTable {
 public:
  struct Entry {
    std::size_t tf = 0;
    double weight = 0.0;
  };

  ItfTable() = default;

  /// Throws kConfig when both streams are empty.
  static ItfTable compute(std::span<const TokenId> context,
                          std::span<const TokenId> query);
  /// Every token weighted 1.0 (ITF switched off).
  static ItfTable uniform(std::span<const TokenId> context,
                          std::span<const TokenId> query);

  /// Explicit weights in [0, 1] (tf left at 0). Throws kConfig otherwise.
  static ItfTable from_weights(const std::unordered_map<TokenId, double>& weights);

  /// 0.0 for ids never seen.
  double weight(TokenId id) const;
  std::size_t tf(TokenId id) const;
  bool contains(TokenId id) const { return entries_.contains(id); }
  std::size_t distinct() const noexcept { return entries_.size(); }
  std::size_t context_length() const noexcept { return context_length_; }
  std::size_t query_length() const noexcept { return query_length_; }
  const std::unordered_map<TokenId, Entry>& entries() const noexcept {
    return entries_;
  }

 private:
  std::unordered_map<TokenId, Entry> entries_;
  std::size_t context_length_ = 0;
  std::size_t query_length_ = 0;
};

struct PoolingParams {
  double gamma = kDefaultGamma;
  double epsilon = kDefaultEpsilon;
  double beta = kDefaultBeta;
};

/// Page representations plus the two pooled components they were fused from.
struct PageMatrix {
  std::size_t n_pages = 0;
  std::size_t dim = 0;
  std::vector<double> rows;  // n_pages x dim
  std::vector<double> mean;  // ITF-weighted average path
  std::vector<double> max;   // masked max path

  std::span<const double> row(std::size_t i) const {
    return {rows.data() + i * dim, dim};
  }
  std::span<const double> mean_row(std::size_t i) const {
    return {mean.data() + i * dim, dim};
  }
  std::span<const double> max_row(std::size_t i) const {
    return {max.data() + i * dim, dim};
  }
};

/// Dual-path pooling over each page of `table`:
///   mu_i = sum_j w_ij x_ij / (sum_j w_ij + epsilon)
///   m_i  = max_j (x_ij on filled slots, beta on pads)
///   row  = gamma * mu_i + (1 - gamma) * m_i
/// where x_ij = features row of the token at P_ij and w_ij its ITF weight.
PageMatrix encode_pages(const FeatureMatrix& features, const PageTable& table,
                        std::span<const TokenId> context_ids,
                        const ItfTable& itf, const PoolingParams& params);

enum class QueryMode { kDense, kMulti };

struct QueryRepr {
  QueryMode mode = QueryMode::kDense;
  std::size_t dim = 0;
  std::vector<std::vector<double>> vectors;
  std::vector<double> weights;
  std::vector<TokenId> token_set;  // sorted, unique

  bool has_token(TokenId id) const;
};

/// Short queries (fewer than `dense_threshold` tokens) collapse to one
/// ITF-weighted mean vector with weight 1.0; longer ones keep one vector per
/// token, weighted by its ITF score. Throws kContract on an empty query.
QueryRepr encode_query(const EmbeddingProvider& provider, const TokenStream& query,
                       const ItfTable& itf, std::size_t dense_threshold,
                       double epsilon = kDefaultEpsilon);

}  // namespace pagewise

#endif  // PAGEWISE_ENCODER_HPP_
