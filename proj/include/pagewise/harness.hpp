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

#ifndef PAGEWISE_HARNESS_HPP_
#define PAGEWISE_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pagewise/config.hpp"
#include "pagewise/embedding.hpp"
#include "pagewise/planner.hpp"
#include "pagewise/text.hpp"

namespace pagewise {

enum class HaystackKind { kSingle, kMulti, kFreq };

const char* haystack_kind_name(HaystackKind kind);
HaystackKind parse_haystack_kind(std::string_view text);

struct HaystackOptions {
  std::uint64_t seed = 1;
  std::size_t length = 16384;  // target context tokens
  std::size_t needles = 1;
  HaystackKind kind = HaystackKind::kSingle;
  /// Relative position in [0, 1] of the first needle; seeded when unset.
  std::optional<double> depth;
};

struct HaystackCase {
  std::string id;
  std::string context;
  std::string query;
  std::vector<TokenRange> gold_spans;  // context token intervals, in needle order
  std::vector<std::string> answers;
  std::size_t needles = 0;
  HaystackKind kind = HaystackKind::kSingle;
};

inline constexpr std::size_t kMinHaystackLength = 256;

/// Deterministic needle-in-a-haystack case. Filler is drawn from a fixed pool
/// of 64 sentence templates with seeded noun substitution, laid out as
/// paragraphs under a heading. Needles are key/value sentences with unique
/// 8-character alphanumeric keys; the query asks for their values. kFreq
/// repeats one rare codeword sentence 4 * needles times and asks for it.
/// Throws kGeneration when the request cannot be met.
HaystackCase gen_haystack(const HaystackOptions& options);

/// `count` cases with seeds base.seed, base.seed + 1, ... Single-needle cases
/// without an explicit depth get stratified depths (i + 0.5) / count.
std::vector<HaystackCase> gen_suite(const HaystackOptions& base, std::size_t count);

nlohmann::json to_json(const HaystackCase& c);

/// Fraction of gold intervals fully covered by the union of `spans`.
double needle_recall(std::span<const Span> spans, std::span<const TokenRange> gold);

/// A named config delta applied on top of a base configuration.
struct Variant {
  std::string name;
  std::function<void(CompressionConfig&)> apply;
};

/// Switches: full, anchor_only, flow_only, flash_only, semantic_only,
/// lexical_only, no_max_pool, no_mean_pool, no_smooth, no_itf, page32, page128,
/// and key=value for page_size, lambda, gamma, k_anc, w_flow, budget.
/// Throws kConfig for anything else.
Variant parse_variant(std::string_view spec);

struct AblationRow {
  std::string variant;
  double mean_recall = 0.0;
  std::size_t cases = 0;
};

/// One row per variant (a single "base" row when `variants` is empty). Cases
/// may run concurrently; aggregation is in case order.
std::vector<AblationRow> ablation_run(const CompressionConfig& base,
                                      std::span<const Variant> variants,
                                      std::span<const HaystackCase> cases,
                                      const EmbeddingProvider& provider,
                                      std::size_t jobs = 1);

/// Mean recall of one configuration over `cases`.
double mean_recall(const CompressionConfig& config,
                   std::span<const HaystackCase> cases,
                   const EmbeddingProvider& provider, std::size_t jobs = 1);

void write_ablation_csv(std::ostream& out, std::span<const AblationRow> rows);

struct BenchRow {
  std::size_t context_len = 0;
  double wall_time = 0.0;  // median seconds
  std::size_t token_count_out = 0;
  double ratio = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares y = slope * x + intercept. Empty when fewer than two distinct x.
std::optional<LinearFit> fit_line(std::span<const double> xs, std::span<const double> ys);

struct BenchReport {
  std::vector<BenchRow> rows;
  std::optional<LinearFit> fit;  // time (s) against context tokens
};

/// Median wall time of tokenize + compress per length; generation is untimed.
/// Throws kConfig if repeats < 3 or lengths are not ascending.
BenchReport latency_bench(std::span<const std::size_t> lengths, std::size_t repeats,
                          const CompressionConfig& config,
                          const EmbeddingProvider& provider, std::uint64_t seed = 1);

void write_bench_csv(std::ostream& out, const BenchReport& report);

}  // namespace pagewise

#endif  // PAGEWISE_HARNESS_HPP_
