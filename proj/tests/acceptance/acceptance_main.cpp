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

// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pagewise/encoder.hpp"
#include "pagewise/harness.hpp"
#include "pagewise/pipeline.hpp"
#include "pagewise/planner.hpp"
#include "test_util.hpp"

namespace pagewise {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

CompressionConfig recall_config() {
  CompressionConfig c;
  c.budget = 3000;
  c.embedding = "hash:64:0";
  return c;
}

const std::vector<HaystackCase>& single_suite() {
  static const std::vector<HaystackCase> suite = [] {
    HaystackOptions opts;
    opts.seed = 1;
    opts.length = 16384;
    return gen_suite(opts, 200);
  }();
  return suite;
}

Outcome single_needle_recall() {
  const auto start = Clock::now();
  const auto& suite = single_suite();
  const HashEmbedding provider(64, 0);
  const double recall = mean_recall(recall_config(), suite, provider, 1);
  const double elapsed = seconds_since(start);
  return {recall >= 0.99 && elapsed < 60.0,
          fmt("mean recall %.4f (>= 0.99) over %zu cases in %.2f s (< 60 s)", recall,
              suite.size(), elapsed)};
}

Outcome multi_needle_recall() {
  HaystackOptions opts;
  opts.seed = 1;
  opts.length = 16384;
  opts.needles = 4;
  opts.kind = HaystackKind::kMulti;
  const auto suite = gen_suite(opts, 200);
  const HashEmbedding provider(64, 0);
  const double recall = mean_recall(recall_config(), suite, provider, 1);
  return {recall >= 0.95, fmt("mean recall %.4f (>= 0.95) over %zu cases, K=4", recall,
                              suite.size())};
}

Outcome ablation_ordering() {
  const std::vector<Variant> variants{parse_variant("full"), parse_variant("flash_only"),
                                      parse_variant("flow_only"), parse_variant("anchor_only")};
  const HashEmbedding provider(64, 0);
  const auto rows = ablation_run(recall_config(), variants, single_suite(), provider, 1);
  const double full = rows[0].mean_recall, flash = rows[1].mean_recall;
  const double flow = rows[2].mean_recall, anchor = rows[3].mean_recall;
  const bool ordered = full >= flash && flash >= flow && flow >= anchor;
  return {ordered && full - anchor >= 0.3,
          fmt("full %.4f >= flash_only %.4f >= flow_only %.4f >= anchor_only %.4f; "
              "gap %.4f (>= 0.3)",
              full, flash, flow, anchor, full - anchor)};
}

Outcome pooling_oracle() {
  testing::Gen gen(4);
  double worst = 0.0;
  for (int instance = 0; instance < 100; ++instance) {
    const std::size_t capacity = gen.between(1, 64);
    const std::size_t dim = gen.between(1, 64);
    std::size_t total = gen.between(1, 32 * capacity);
    PageTable table = paginate(gen.segments(total, capacity + 5), capacity);
    while (table.n_pages() > 32) {
      total = total / 2 + 1;
      table = paginate(gen.segments(total, capacity + 5), capacity);
    }
    const FeatureMatrix h = testing::random_features(gen, table.n_tokens(), dim);
    std::vector<TokenId> ids(table.n_tokens());
    for (auto& id : ids) id = static_cast<TokenId>(gen.below(12));
    const std::vector<TokenId> query{static_cast<TokenId>(gen.below(12))};
    const ItfTable itf = ItfTable::compute(ids, query);
    std::vector<double> w(ids.size());
    for (std::size_t l = 0; l < ids.size(); ++l) w[l] = itf.weight(ids[l]);
    const double gamma = gen.unit();
    const PageMatrix fast = encode_pages(h, table, ids, itf, {gamma, 1e-8, -1e9});
    const auto naive = testing::naive_pooling(h, table, w, gamma, 1e-8, -1e9);
    for (std::size_t i = 0; i < table.n_pages(); ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        worst = std::max(worst, std::abs(fast.row(i)[k] - naive.rows[i][k]));
      }
    }
  }
  return {worst <= 1e-6, fmt("max |fast - naive| = %.3g over 100 instances (<= 1e-6)", worst)};
}

Outcome itf_properties() {
  testing::Gen gen(5);
  std::size_t violations = 0;
  for (int stream = 0; stream < 1000; ++stream) {
    const std::size_t vocab = gen.between(1, 40);
    std::vector<TokenId> ctx(gen.between(0, 300)), query(gen.between(1, 20));
    for (auto& id : ctx) id = static_cast<TokenId>(gen.below(vocab));
    for (auto& id : query) id = static_cast<TokenId>(gen.below(vocab));
    const ItfTable itf = ItfTable::compute(ctx, query);
    std::map<std::size_t, std::pair<double, double>> by_tf;  // tf -> (min, max) weight
    for (const auto& [id, e] : itf.entries()) {
      if (!(e.weight >= 0.0 && e.weight <= 1.0)) ++violations;
      auto [it, fresh] = by_tf.try_emplace(e.tf, e.weight, e.weight);
      it->second.first = std::min(it->second.first, e.weight);
      it->second.second = std::max(it->second.second, e.weight);
    }
    double floor = 2.0;  // weights must not increase with tf
    for (const auto& [tf, range] : by_tf) {
      if (range.second > floor + 1e-12) ++violations;
      floor = range.first;
    }
  }
  // Hand checks, independent of the implementation:
  // [a a a b]: tf 3 and 1 -> a at the minimum, b at the maximum.
  // [a a a b c c]: raw = log(1 + 6 / (1 + tf)), c = (log 3 - log 2.5) / (log 4 - log 2.5).
  constexpr TokenId a = 1, b = 2, c = 3;
  const ItfTable ab = ItfTable::compute(std::vector<TokenId>{a, a, a}, std::vector<TokenId>{b});
  const ItfTable abc =
      ItfTable::compute(std::vector<TokenId>{a, a, a, b, c}, std::vector<TokenId>{c});
  const double want_c = (std::log(3.0) - std::log(2.5)) / (std::log(4.0) - std::log(2.5));
  const double hand = std::max({std::abs(ab.weight(a) - 0.0), std::abs(ab.weight(b) - 1.0),
                                std::abs(abc.weight(a) - 0.0), std::abs(abc.weight(b) - 1.0),
                                std::abs(abc.weight(c) - want_c)});
  return {violations == 0 && hand <= 1e-9,
          fmt("%zu range/monotonicity violations over 1000 streams; hand check error %.3g "
              "(<= 1e-9)",
              violations, hand)};
}

Outcome structural_invariants() {
  testing::Gen gen(6);
  const HashEmbedding provider(64, 0);
  std::size_t failures = 0, implicit = 0;
  std::string first;
  for (int trial = 0; trial < 1000; ++trial) {
    std::optional<std::string> query;
    if (gen.coin(0.4)) query = gen.document(gen.between(1, 16));
    const Document doc =
        make_document("doc" + std::to_string(trial), gen.document(gen.between(0, 2500)), query);
    CompressionConfig config;
    config.budget = gen.between(1, 800);
    config.page_size = gen.between(4, 128);
    config.k_anc = gen.below(6);
    config.w_flow = gen.below(6);
    const CompressionResult r = compress(doc, config, provider);
    std::string why = testing::structure_violation(doc, r, config.budget);
    if (why.empty() && !r.explicit_query) {
      ++implicit;
      for (const Span& s : r.spans) {
        if (s.b >= r.context_tokens) why = "span reaches into the implicit query";
      }
      for (const std::size_t p : r.plan.flash) {
        if (p > r.plan.p_qry) why = "flash page after the query page";
      }
    }
    if (why.empty() && compress(doc, config, provider).compressed != r.compressed) {
      why = "rerun differs";
    }
    if (!why.empty()) {
      if (failures++ == 0) first = "doc" + std::to_string(trial) + ": " + why;
    }
  }
  return {failures == 0, fmt("%zu/1000 documents violate (%zu implicit-query)%s%s", failures,
                             implicit, failures ? "; first: " : "", first.c_str())};
}

Outcome latency_linearity() {
  const std::vector<std::size_t> lengths{8192, 16384, 32768, 65536, 131072};
  const BenchReport report = latency_bench(lengths, 3, CompressionConfig{}, HashEmbedding(64, 0));
  const double r2 = report.fit ? report.fit->r2 : 0.0;
  const double longest = report.rows.back().wall_time;
  std::string times;
  for (const BenchRow& row : report.rows) times += fmt(" %zu:%.3fs", row.context_len, row.wall_time);
  return {r2 >= 0.95 && longest <= 10.0,
          fmt("R^2 %.4f (>= 0.95), 128k median %.3f s (<= 10 s);%s", r2, longest,
              times.c_str())};
}

Outcome smoothing_fixed_point() {
  testing::Gen gen(8);
  std::size_t failures = 0;
  const auto aligned_start = [](const std::vector<std::size_t>& b, std::size_t a) {
    return a == 0 || std::binary_search(b.begin(), b.end(), a - 1);
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t length = gen.between(1, 400);
    std::vector<std::size_t> bounds;
    for (std::size_t t = 0; t + 1 < length; ++t) {
      if (gen.coin(0.08)) bounds.push_back(t);
    }
    bounds.push_back(length - 1);
    std::vector<Span> smoothed;
    bool ok = true;
    for (std::size_t i = gen.between(1, 10); i > 0; --i) {
      const std::size_t a = gen.below(length);
      const Span s{a, std::min(length - 1, a + gen.below(40)), Origin::kFlash, gen.unit()};
      const Span e = extend_to_sentences(s, bounds);
      const bool a_fixed = aligned_start(bounds, s.a);
      const bool b_fixed = std::binary_search(bounds.begin(), bounds.end(), s.b);
      ok = ok && (a_fixed ? e.a == s.a : e.a < s.a) && (b_fixed ? e.b == s.b : e.b > s.b);
      ok = ok && aligned_start(bounds, e.a) &&
           std::binary_search(bounds.begin(), bounds.end(), e.b);
      const Span again = extend_to_sentences(e, bounds);
      ok = ok && again.a == e.a && again.b == e.b;
      smoothed.push_back(e);
    }
    const SpanSet merged = merge_spans(smoothed);
    for (std::size_t i = 1; i < merged.spans.size(); ++i) {
      ok = ok && merged.spans[i].a > merged.spans[i - 1].b;
    }
    if (!ok) ++failures;
  }
  return {failures == 0, fmt("%zu/1000 span sets violate", failures)};
}

}  // namespace
}  // namespace pagewise

int main() {
  using pagewise::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 single-needle recall", pagewise::single_needle_recall},
      {"2 multi-needle recall", pagewise::multi_needle_recall},
      {"3 ablation ordering", pagewise::ablation_ordering},
      {"4 pooling oracle", pagewise::pooling_oracle},
      {"5 ITF properties", pagewise::itf_properties},
      {"6 structural invariants", pagewise::structural_invariants},
      {"7 latency linearity", pagewise::latency_linearity},
      {"8 smoothing fixed point", pagewise::smoothing_fixed_point},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
