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

#include "pagewise/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>

#include "pagewise/error.hpp"
#include "pagewise/parallel.hpp"
#include "pagewise/pipeline.hpp"

namespace pagewise {
namespace {

// Filler never uses the words the generated queries are built from, so the
// needles are the only lexical match besides "the".
constexpr std::array<std::string_view, 64> kTemplates = {
    "The {0} drifted slowly past the quiet {1}.",
    "A tired {0} rested near the old {1} at dusk.",
    "Nobody expected the {0} to return before winter.",
    "Every morning the {0} waited beside the {1}.",
    "Rain fell steadily over the {0} through the night.",
    "Children laughed as the {0} rolled toward the {1}.",
    "The {0} had been painted green many years ago.",
    "Somewhere beyond the {1}, a {0} hummed softly.",
    "Travelers sometimes paused to admire the {0}.",
    "The {0} leaned against the {1} wall.",
    "By noon the {0} had vanished into the fog.",
    "An old map showed the {0} next to a narrow {1}.",
    "She carried the {0} across the frozen {1}.",
    "He mended the {0} with string and patience.",
    "Nothing about the {0} seemed unusual that day.",
    "The wind pushed the {0} toward the distant {1}.",
    "Later that evening the {0} glowed in the lamplight.",
    "A small crowd gathered around the {0}.",
    "The {0} creaked whenever the {1} shifted.",
    "Few people remembered who built the {0}.",
    "The {0} stood silent while snow covered the {1}.",
    "Someone left a note under the {0} yesterday.",
    "During the festival the {0} looked brighter than usual.",
    "The {0} echoed with footsteps from the {1}.",
    "Moss slowly climbed the side facing the {1}.",
    "The {0} sat unused through the long summer.",
    "A gentle breeze carried dust from the {0}.",
    "They measured the {0} twice before moving it.",
    "At sunrise the {0} cast a long shadow on the {1}.",
    "The {0} needed repairs after the storm.",
    "Birds nested quietly above the {0}.",
    "The {1} could be seen from the top floor.",
    "A stranger asked about the {0} near the {1}.",
    "The {0} smelled faintly like cedar smoke.",
    "Everyone agreed the {0} belonged near the {1}.",
    "The {0} wobbled but did not fall.",
    "Old letters described the {0} in great detail.",
    "By autumn the {0} had turned a pale yellow.",
    "The {0} rattled as carts rolled toward the {1}.",
    "Workers stacked crates beside the {0}.",
    "The {0} reflected clouds drifting over the {1}.",
    "Nobody could explain why the {0} moved.",
    "A faint melody drifted from the {0}.",
    "The {0} survived three harsh winters.",
    "Lanterns lit the path from the {0} to the {1}.",
    "The {0} became a favorite meeting spot.",
    "Tiny footprints led away from the {0}.",
    "The {0} was rebuilt with stones from the {1}.",
    "Sunlight warmed the {0} through the afternoon.",
    "A heavy door guarded the {0}.",
    "The {0} seemed smaller after the rain.",
    "Visitors photographed the {0} from the {1}.",
    "The {0} hid behind tall grass near the {1}.",
    "Night insects buzzed around the {0}.",
    "The {0} rang once when the clock struck nine.",
    "Dust settled gently on the {0}.",
    "The {0} pointed north toward the {1}.",
    "Each spring the {0} received fresh paint.",
    "The {0} waited patiently through the quiet hours.",
    "A careful hand polished the {0} until it shone.",
    "The {0} swayed whenever trains passed the {1}.",
    "Nobody dared to open the {0} after dark.",
    "The {0} kept its shape despite the heat.",
    "Soft voices drifted across the {1} toward the {0}.",
};

constexpr std::array<std::string_view, 32> kNouns = {
    "river",  "lantern", "orchard", "harbor",  "meadow",   "violin",  "compass",
    "glacier", "teapot", "canyon",  "workshop", "bicycle", "library", "garden",
    "market", "tower",   "bridge",  "forest",  "village",  "engine",  "painter",
    "sailor", "farmer",  "merchant", "student", "baker",   "falcon",  "pebble",
    "blanket", "mirror", "ladder",  "window"};

constexpr std::string_view kAlnum =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

std::string fill_template(std::string_view tmpl, Rng& rng) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{' && i + 2 < tmpl.size() && tmpl[i + 2] == '}') {
      out += kNouns[rng.below(kNouns.size())];
      i += 2;
    } else {
      out += tmpl[i];
    }
  }
  return out;
}

// Mixed case with at least one digit, so it never collides with filler words.
std::string random_key(Rng& rng) {
  std::string key(8, ' ');
  for (char& c : key) c = kAlnum[rng.below(kAlnum.size())];
  key[rng.below(8)] = static_cast<char>('0' + rng.below(10));
  return key;
}

std::string random_digits(Rng& rng, std::size_t n) {
  std::string out(n, '0');
  out[0] = static_cast<char>('1' + rng.below(9));
  for (std::size_t i = 1; i < n; ++i) out[i] = static_cast<char>('0' + rng.below(10));
  return out;
}

std::string join_keys(const std::vector<std::string>& keys) {
  std::string out;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i > 0) out += i + 1 == keys.size() ? " and " : ", ";
    out += keys[i];
  }
  return out;
}

struct Sentence {
  std::string text;
  std::size_t paragraph = 0;
  std::optional<std::size_t> needle;  // index into the needle list
};

}  // namespace

const char* haystack_kind_name(HaystackKind kind) {
  switch (kind) {
    case HaystackKind::kSingle: return "single";
    case HaystackKind::kMulti: return "multi";
    case HaystackKind::kFreq: return "freq";
  }
  return "single";
}

HaystackKind parse_haystack_kind(std::string_view text) {
  if (text == "single") return HaystackKind::kSingle;
  if (text == "multi") return HaystackKind::kMulti;
  if (text == "freq") return HaystackKind::kFreq;
  throw Error(ErrorCode::kUsage, "kind: expected single|multi|freq, got '" +
                                     std::string(text) + "'");
}

HaystackCase gen_haystack(const HaystackOptions& options) {
  if (options.length < kMinHaystackLength) {
    throw Error(ErrorCode::kGeneration,
                "haystack length must be >= " + std::to_string(kMinHaystackLength));
  }
  if (options.needles < 1) {
    throw Error(ErrorCode::kGeneration, "haystack needs at least one needle");
  }
  if (options.depth && !(*options.depth >= 0.0 && *options.depth <= 1.0)) {
    throw Error(ErrorCode::kGeneration, "needle depth must lie in [0, 1]");
  }
  Rng rng(options.seed);

  HaystackCase out;
  out.kind = options.kind;
  out.needles = options.needles;
  out.id = std::string("haystack-") + haystack_kind_name(options.kind) + "-" +
           std::to_string(options.seed);

  std::vector<std::string> needle_text;
  if (options.kind == HaystackKind::kFreq) {
    std::string word(8, 'a');
    for (char& c : word) c = static_cast<char>('a' + rng.below(26));
    word[rng.below(8)] = static_cast<char>('0' + rng.below(10));
    for (std::size_t i = 0; i < 4 * options.needles; ++i) {
      needle_text.push_back("The codeword " + word + " echoed through the hall again.");
    }
    out.answers.push_back(word);
    out.query = "Which codeword appears most often?";
  } else {
    std::vector<std::string> keys;
    while (keys.size() < options.needles) {
      std::string key = random_key(rng);
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    for (const std::string& key : keys) {
      std::string value = random_digits(rng, 8);
      needle_text.push_back("The secret value of key " + key + " is " + value + ".");
      out.answers.push_back(std::move(value));
    }
    out.query = keys.size() == 1
                    ? "What is the secret value of key " + keys[0] + "?"
                    : "What are the secret values of keys " + join_keys(keys) + "?";
  }

  const std::string heading = "# Field notes volume " + std::to_string(1 + rng.below(999));
  std::size_t reserved = tokenize(heading).size();
  for (const std::string& n : needle_text) reserved += tokenize(n).size();
  if (reserved * 2 > options.length) {
    throw Error(ErrorCode::kGeneration,
                std::to_string(needle_text.size()) + " needles do not fit in " +
                    std::to_string(options.length) + " tokens");
  }

  std::vector<Sentence> sentences;
  std::size_t filler_tokens = 0;
  std::size_t paragraph = 0;
  while (filler_tokens + reserved < options.length) {
    const std::size_t count = 3 + rng.below(5);
    for (std::size_t i = 0; i < count && filler_tokens + reserved < options.length; ++i) {
      std::string s = fill_template(kTemplates[rng.below(kTemplates.size())], rng);
      filler_tokens += tokenize(s).size();
      sentences.push_back({std::move(s), paragraph, std::nullopt});
    }
    ++paragraph;
  }

  // Needle slots: index into the filler sequence before which a needle goes.
  const std::size_t filler_count = sentences.size();
  std::vector<std::pair<std::size_t, std::size_t>> slots;  // (slot, needle)
  for (std::size_t k = 0; k < needle_text.size(); ++k) {
    double depth = rng.unit();
    if (options.depth) {
      depth = *options.depth +
              static_cast<double>(k) / static_cast<double>(needle_text.size());
      if (depth > 1.0) depth -= 1.0;
    }
    const auto slot = std::min(filler_count,
                               static_cast<std::size_t>(std::floor(
                                   depth * static_cast<double>(filler_count + 1))));
    slots.emplace_back(slot, k);
  }
  std::sort(slots.begin(), slots.end());
  std::vector<Sentence> merged;
  merged.reserve(filler_count + slots.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i <= filler_count; ++i) {
    while (next < slots.size() && slots[next].first == i) {
      const std::size_t para =
          i < filler_count ? sentences[i].paragraph : (filler_count ? sentences.back().paragraph : 0);
      merged.push_back({needle_text[slots[next].second], para, slots[next].second});
      ++next;
    }
    if (i < filler_count) merged.push_back(std::move(sentences[i]));
  }

  std::string text = heading + "\n";
  // Gold spans follow needle order, so gold_spans[k] pairs with answers[k].
  std::vector<ByteSpan> needle_bytes(needle_text.size());
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (i > 0) text += merged[i].paragraph == merged[i - 1].paragraph ? " " : "\n";
    if (merged[i].needle) {
      needle_bytes[*merged[i].needle] = {text.size(), text.size() + merged[i].text.size()};
    }
    text += merged[i].text;
  }
  text += "\n";

  const TokenStream tokens = tokenize(text);
  for (const ByteSpan& b : needle_bytes) {
    const auto first = std::lower_bound(
        tokens.offsets.begin(), tokens.offsets.end(), b.start,
        [](const ByteSpan& s, std::size_t pos) { return s.start < pos; });
    const auto last = std::upper_bound(
        tokens.offsets.begin(), tokens.offsets.end(), b.end,
        [](std::size_t pos, const ByteSpan& s) { return pos < s.end; });
    out.gold_spans.push_back(
        {static_cast<std::size_t>(first - tokens.offsets.begin()),
         static_cast<std::size_t>(last - tokens.offsets.begin()) - 1});
  }
  out.context = std::move(text);
  return out;
}

nlohmann::json to_json(const HaystackCase& c) {
  nlohmann::json gold = nlohmann::json::array();
  for (const TokenRange& r : c.gold_spans) gold.push_back({r.first, r.last});
  return {{"id", c.id},
          {"context", c.context},
          {"query", c.query},
          {"kind", haystack_kind_name(c.kind)},
          {"needles", c.needles},
          {"answers", c.answers},
          {"gold_spans", gold}};
}

std::vector<HaystackCase> gen_suite(const HaystackOptions& base, std::size_t count) {
  std::vector<HaystackCase> cases;
  cases.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    HaystackOptions opts = base;
    opts.seed = base.seed + i;
    if (!base.depth && base.kind == HaystackKind::kSingle) {
      opts.depth = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
    }
    cases.push_back(gen_haystack(opts));
  }
  return cases;
}

double needle_recall(std::span<const Span> spans, std::span<const TokenRange> gold) {
  if (gold.empty()) return 0.0;
  std::vector<Span> merged(spans.begin(), spans.end());
  const SpanSet cover = merge_spans(std::move(merged));
  std::size_t hit = 0;
  for (const TokenRange& g : gold) {
    const bool covered = std::any_of(cover.spans.begin(), cover.spans.end(),
                                     [&](const Span& s) { return s.a <= g.first && g.last <= s.b; });
    if (covered) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(gold.size());
}

Variant parse_variant(std::string_view spec) {
  const std::string name(spec);
  const auto make = [&](std::function<void(CompressionConfig&)> fn) {
    return Variant{name, std::move(fn)};
  };
  if (spec == "full" || spec == "base") {
    return make([](CompressionConfig& c) { c.selection_policy = SelectionPolicy::kFull; });
  }
  if (spec == "anchor_only" || spec == "flow_only" || spec == "flash_only") {
    const SelectionPolicy p = parse_selection_policy(spec);
    return make([p](CompressionConfig& c) { c.selection_policy = p; });
  }
  if (spec == "semantic_only" || spec == "lexical_only") {
    const ScoreMode m = parse_score_mode(spec);
    return make([m](CompressionConfig& c) { c.score_mode = m; });
  }
  if (spec == "no_max_pool") return make([](CompressionConfig& c) { c.disable_max_pool = true; });
  if (spec == "no_mean_pool") return make([](CompressionConfig& c) { c.disable_mean_pool = true; });
  if (spec == "no_smooth") return make([](CompressionConfig& c) { c.disable_smoothing = true; });
  if (spec == "no_itf") return make([](CompressionConfig& c) { c.disable_itf = true; });
  if (spec == "page32") return make([](CompressionConfig& c) { c.page_size = 32; });
  if (spec == "page128") return make([](CompressionConfig& c) { c.page_size = 128; });

  const auto eq = spec.find('=');
  if (eq != std::string_view::npos) {
    const std::string key(spec.substr(0, eq));
    static const std::array<std::string_view, 6> kKeys = {
        "page_size", "lambda", "gamma", "k_anc", "w_flow", "budget"};
    if (std::find(kKeys.begin(), kKeys.end(), key) != kKeys.end()) {
      nlohmann::json value;
      try {
        value = nlohmann::json::parse(spec.substr(eq + 1));
      } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::kConfig, "variant '" + name + "': bad value");
      }
      CompressionConfig probe;
      try {
        set_option(probe, key, value);
        validate(probe);
      } catch (const Error& e) {
        throw Error(ErrorCode::kConfig, "variant '" + name + "': " + e.what());
      }
      return make([key, value](CompressionConfig& c) { set_option(c, key, value); });
    }
  }
  throw Error(ErrorCode::kConfig, "unknown ablation switch '" + name + "'");
}

double mean_recall(const CompressionConfig& config, std::span<const HaystackCase> cases,
                   const EmbeddingProvider& provider, std::size_t jobs) {
  if (cases.empty()) return 0.0;
  std::vector<double> recall(cases.size(), 0.0);
  parallel_for(cases.size(), jobs, [&](std::size_t i) {
    const HaystackCase& c = cases[i];
    const Document doc = make_document(c.id, c.context, c.query);
    const CompressionResult r = compress(doc, config, provider);
    recall[i] = needle_recall(r.spans, c.gold_spans);
  });
  double sum = 0.0;
  for (const double r : recall) sum += r;
  return sum / static_cast<double>(cases.size());
}

std::vector<AblationRow> ablation_run(const CompressionConfig& base,
                                      std::span<const Variant> variants,
                                      std::span<const HaystackCase> cases,
                                      const EmbeddingProvider& provider,
                                      std::size_t jobs) {
  std::vector<AblationRow> rows;
  if (variants.empty()) {
    rows.push_back({"base", mean_recall(base, cases, provider, jobs), cases.size()});
    return rows;
  }
  for (const Variant& v : variants) {
    CompressionConfig config = base;
    v.apply(config);
    validate(config);
    rows.push_back({v.name, mean_recall(config, cases, provider, jobs), cases.size()});
  }
  return rows;
}

void write_ablation_csv(std::ostream& out, std::span<const AblationRow> rows) {
  out << "variant,mean_recall,cases\n";
  for (const AblationRow& r : rows) {
    out << r.variant << ',' << std::fixed << std::setprecision(4) << r.mean_recall
        << std::defaultfloat << ',' << r.cases << '\n';
  }
}

std::optional<LinearFit> fit_line(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = std::min(xs.size(), ys.size());
  if (n < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) mx += xs[i], my += ys[i];
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) return std::nullopt;
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

BenchReport latency_bench(std::span<const std::size_t> lengths, std::size_t repeats,
                          const CompressionConfig& config,
                          const EmbeddingProvider& provider, std::uint64_t seed) {
  if (repeats < 3) throw Error(ErrorCode::kConfig, "repeats must be >= 3");
  if (!std::is_sorted(lengths.begin(), lengths.end())) {
    throw Error(ErrorCode::kConfig, "bench lengths must be ascending");
  }
  using Clock = std::chrono::steady_clock;
  BenchReport report;
  std::vector<double> xs, ys;
  for (const std::size_t length : lengths) {
    HaystackOptions opts;
    opts.seed = seed;
    opts.length = length;
    const HaystackCase c = gen_haystack(opts);

    std::vector<double> times;
    BenchRow row;
    row.context_len = length;
    for (std::size_t r = 0; r < repeats; ++r) {
      const auto start = Clock::now();
      const Document doc = make_document(c.id, c.context, c.query);
      const CompressionResult result = compress(doc, config, provider);
      const auto stop = Clock::now();
      times.push_back(std::chrono::duration<double>(stop - start).count());
      row.token_count_out = result.token_count;
      row.ratio = result.ratio;
    }
    std::sort(times.begin(), times.end());
    row.wall_time = times.size() % 2 == 1
                        ? times[times.size() / 2]
                        : 0.5 * (times[times.size() / 2 - 1] + times[times.size() / 2]);
    report.rows.push_back(row);
    xs.push_back(static_cast<double>(length));
    ys.push_back(row.wall_time);
  }
  report.fit = fit_line(xs, ys);
  return report;
}

void write_bench_csv(std::ostream& out, const BenchReport& report) {
  out << "context_len,median_s,ratio\n";
  for (const BenchRow& r : report.rows) {
    out << r.context_len << ',' << std::setprecision(6) << r.wall_time << ','
        << std::setprecision(4) << r.ratio << '\n';
  }
  out << std::defaultfloat;
  if (report.fit) {
    out << "# fit slope=" << std::setprecision(6) << report.fit->slope
        << " intercept=" << report.fit->intercept << " r2=" << report.fit->r2 << '\n';
  } else {
    out << "# fit omitted: fewer than two lengths\n";
  }
}

}  // namespace pagewise
