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

#include "pagewise/cli.hpp"

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "pagewise/error.hpp"
#include "pagewise/harness.hpp"
#include "pagewise/parallel.hpp"
#include "pagewise/pipeline.hpp"

namespace pagewise::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kBatchPerJob = 64;

// Collects flag values as option overrides, keyed by CompressionConfig field.
struct ConfigFlags {
  nlohmann::json overrides = nlohmann::json::object();
  std::string config_file;
};

void add_config_flags(CLI::App& app, ConfigFlags& flags) {
  auto& o = flags.overrides;
  const auto count = [&](const char* flag, const char* field, const char* help) {
    app.add_option_function<long long>(
        flag, [&o, field](long long v) { o[field] = v; }, help);
  };
  const auto real = [&](const char* flag, const char* field, const char* help) {
    app.add_option_function<double>(
        flag, [&o, field](double v) { o[field] = v; }, help);
  };
  const auto text = [&](const char* flag, const char* field, const char* help) {
    app.add_option_function<std::string>(
        flag, [&o, field](const std::string& v) { o[field] = v; }, help);
  };
  const auto toggle = [&](const char* flag, const char* field, const char* help) {
    app.add_flag_callback(flag, [&o, field] { o[field] = true; }, help);
  };
  count("--budget", "budget", "Retained context token budget");
  count("--page-size", "page_size", "Page capacity M in tokens");
  real("--gamma", "gamma", "Mean/max pooling fusion weight in [0,1]");
  real("--lambda", "lambda", "Semantic/lexical mixing weight in [0,1]");
  count("--k-anc", "k_anc", "Leading anchor pages");
  count("--w-flow", "w_flow", "Flow window before the query page");
  count("--implicit-query-window", "implicit_query_window",
        "Backward window for implicit queries");
  count("--dense-threshold", "dense_threshold",
        "Queries shorter than this use one pooled vector");
  real("--epsilon", "epsilon", "Mean pooling denominator guard");
  real("--beta", "beta", "Max pooling pad value");
  text("--embedding", "embedding", "hash:<dim>:<seed> or table:<path>");
  text("--tokenizer", "tokenizer", "word or pretokenized");
  text("--selection-policy", "selection_policy",
       "full, anchor_only, flow_only or flash_only");
  text("--score-mode", "score_mode", "mixed, semantic_only or lexical_only");
  toggle("--no-itf", "disable_itf", "Weight every token 1.0");
  toggle("--no-smooth", "disable_smoothing", "Skip sentence smoothing");
  toggle("--no-max-pool", "disable_max_pool", "Mean pooling only");
  toggle("--no-mean-pool", "disable_mean_pool", "Max pooling only");
  app.add_option("--config", flags.config_file, "JSON file of option overrides");
}

CompressionConfig resolve_config(const ConfigFlags& flags) {
  CompressionConfig config;
  if (!flags.config_file.empty()) {
    std::ifstream in(flags.config_file);
    if (!in) throw Error(ErrorCode::kIo, "cannot open config " + flags.config_file);
    nlohmann::json file;
    try {
      file = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kUsage, "config: " + std::string(e.what()));
    }
    apply_options(config, file);
  }
  apply_options(config, flags.overrides);
  validate(config);
  return config;
}

std::vector<ByteSpan> parse_offsets(const nlohmann::json& v) {
  if (!v.is_array()) throw Error(ErrorCode::kInputFormat, "offsets must be an array");
  std::vector<ByteSpan> out;
  out.reserve(v.size());
  for (const auto& pair : v) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() ||
        !pair[1].is_number_unsigned()) {
      throw Error(ErrorCode::kInputFormat, "offsets entries must be [start, end]");
    }
    out.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
  }
  return out;
}

std::vector<TokenId> parse_ids(const nlohmann::json& v) {
  if (!v.is_array()) throw Error(ErrorCode::kInputFormat, "ids must be an array");
  std::vector<TokenId> out;
  out.reserve(v.size());
  for (const auto& id : v) {
    if (!id.is_number_integer()) {
      throw Error(ErrorCode::kInputFormat, "ids must be integers");
    }
    out.push_back(id.get<TokenId>());
  }
  return out;
}

const std::string& require_string(const nlohmann::json& rec, const char* key) {
  const auto it = rec.find(key);
  if (it == rec.end() || !it->is_string()) {
    throw Error(ErrorCode::kInputFormat, std::string("missing string field '") + key + "'");
  }
  return it->get_ref<const std::string&>();
}

std::pair<std::string, TokenStream> parse_pretokenized(const nlohmann::json& rec) {
  std::string text = require_string(rec, "text");
  if (!rec.contains("ids") || !rec.contains("offsets")) {
    throw Error(ErrorCode::kInputFormat, "pre-tokenized record needs ids and offsets");
  }
  TokenStream tokens =
      from_pretokenized(text, parse_ids(rec["ids"]), parse_offsets(rec["offsets"]));
  return {std::move(text), std::move(tokens)};
}

Document parse_document(const nlohmann::json& rec, TokenizerMode mode) {
  if (mode == TokenizerMode::kWord) {
    std::optional<std::string> query;
    if (const auto it = rec.find("query"); it != rec.end() && !it->is_null()) {
      if (!it->is_string()) throw Error(ErrorCode::kInputFormat, "query must be a string");
      query = it->get<std::string>();
    }
    return make_document(require_string(rec, "id"), require_string(rec, "context"),
                         std::move(query));
  }
  Document doc;
  doc.id = require_string(rec, "id");
  std::tie(doc.text, doc.tokens) = parse_pretokenized(rec);
  if (const auto it = rec.find("query"); it != rec.end() && !it->is_null()) {
    if (!it->is_object()) {
      throw Error(ErrorCode::kInputFormat,
                  "pre-tokenized query must be an object with text, ids, offsets");
    }
    auto [qtext, qtokens] = parse_pretokenized(*it);
    if (!qtokens.empty()) {
      doc.query_text = std::move(qtext);
      doc.query_tokens = std::move(qtokens);
    }
  }
  return doc;
}

ordered_json result_record(const std::string& id, const CompressionResult& r,
                           bool emit_scores) {
  ordered_json spans = ordered_json::array();
  for (const Span& s : r.spans) {
    spans.push_back(ordered_json{{"a", s.a},
                                 {"b", s.b},
                                 {"origin", origin_name(s.origin)},
                                 {"score", s.score}});
  }
  ordered_json out{{"id", id},
                   {"compressed", r.compressed},
                   {"token_count", r.token_count},
                   {"ratio", r.ratio},
                   {"spans", std::move(spans)}};
  if (emit_scores) {
    out["scores"] = ordered_json{{"sem", r.scores.norm_sem},
                                 {"lex", r.scores.norm_lex},
                                 {"mixed", r.scores.mixed}};
  }
  return out;
}

std::string page_rows(const PageTable& table) {
  std::string out;
  for (std::size_t p = 0; p < table.n_pages(); ++p) {
    ordered_json row{{"page", p},
                     {"tokens", {table.first_token(p), table.last_token(p)}},
                     {"pad", table.pad_count(p)}};
    out += row.dump();
    out += '\n';
  }
  return out;
}

std::vector<std::size_t> parse_lengths(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kUsage, "lengths: invalid entry '" + item + "'");
    }
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

CompressionConfig parse_config(const std::vector<std::string>& args,
                               const std::optional<std::filesystem::path>& config_file) {
  CLI::App app{"pagewise config"};
  ConfigFlags flags;
  add_config_flags(app, flags);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorCode::kUsage, e.what());
  }
  if (config_file && flags.config_file.empty()) flags.config_file = config_file->string();
  return resolve_config(flags);
}

ordered_json process_record(const std::string& line, std::size_t line_no,
                            const CompressionConfig& config,
                            const EmbeddingProvider& provider,
                            const RunOptions& options, std::string* debug_pages) {
  std::string id = "#" + std::to_string(line_no);
  try {
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInputFormat, std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object()) throw Error(ErrorCode::kInputFormat, "record must be an object");
    if (const auto it = rec.find("id"); it != rec.end() && it->is_string()) {
      id = it->get<std::string>();
    }
    const Document doc = parse_document(rec, config.tokenizer);
    const CompressionResult result = compress(doc, config, provider);
    if (debug_pages) *debug_pages = page_rows(result.pages);
    return result_record(doc.id, result, options.emit_scores);
  } catch (const Error& e) {
    return ordered_json{{"id", id}, {"error", e.what()}};
  } catch (const std::exception& e) {
    return ordered_json{{"id", id}, {"error", e.what()}};
  }
}

int run_compress(const CompressionConfig& config, const RunOptions& options,
                 std::istream& in, std::ostream& out, std::ostream& err) {
  const auto provider = make_provider(config.embedding);

  if (options.format == OutputFormat::kText) {
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::kIo, "failed reading input");
    if (config.tokenizer != TokenizerMode::kWord) {
      throw Error(ErrorCode::kUsage, "text format requires the word tokenizer");
    }
    const Document doc = make_document("text", text, options.query);
    const CompressionResult result = compress(doc, config, *provider);
    if (options.debug_pages) err << page_rows(result.pages);
    out << result.compressed;
    out.flush();
    return out ? 0 : 1;
  }

  const std::size_t jobs = resolve_jobs(options.jobs);
  const std::size_t batch_size = kBatchPerJob * jobs;
  std::size_t line_no = 0;
  std::vector<std::pair<std::size_t, std::string>> batch;
  std::vector<std::string> rendered;
  std::vector<std::string> pages;

  const auto flush = [&] {
    rendered.assign(batch.size(), {});
    pages.assign(batch.size(), {});
    parallel_for(batch.size(), jobs, [&](std::size_t i) {
      rendered[i] = process_record(batch[i].second, batch[i].first, config, *provider,
                                   options, options.debug_pages ? &pages[i] : nullptr)
                        .dump();
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (options.debug_pages) err << pages[i];
      out << rendered[i] << '\n';
    }
    batch.clear();
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    batch.emplace_back(line_no, std::move(line));
    if (batch.size() >= batch_size) flush();
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "failed reading input");
  flush();
  out.flush();
  return out ? 0 : 1;
}

int run_main(int argc, const char* const* argv, std::istream& in, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"pagewise: query-aware page selection for long-context prompts"};
  app.require_subcommand(1);

  ConfigFlags compress_flags, bench_flags, ablate_flags;
  RunOptions run;
  std::string format = "jsonl";
  std::string input_path, output_path, query;
  auto* compress_cmd = app.add_subcommand("compress", "Compress JSONL records or raw text");
  add_config_flags(*compress_cmd, compress_flags);
  compress_cmd->add_option("--jobs", run.jobs, "Worker threads (0: all cores)");
  compress_cmd->add_flag("--emit-scores", run.emit_scores, "Attach page scores");
  compress_cmd->add_flag("--debug-pages", run.debug_pages,
                         "Dump page table rows to stderr");
  compress_cmd->add_option("--format", format, "jsonl or text")
      ->check(CLI::IsMember({"jsonl", "text"}));
  compress_cmd->add_option("--input,-i", input_path, "Input file (default stdin)");
  compress_cmd->add_option("--output,-o", output_path, "Output file (default stdout)");
  compress_cmd->add_option("--query", query, "Explicit query for --format text");

  std::string lengths = "8192,16384,32768,65536,131072";
  std::size_t repeats = 5;
  std::uint64_t seed = 1;
  auto* bench_cmd = app.add_subcommand("bench", "Latency against context length");
  add_config_flags(*bench_cmd, bench_flags);
  bench_cmd->add_option("--lengths", lengths, "Comma-separated token lengths");
  bench_cmd->add_option("--repeats", repeats, "Runs per length (>= 3)");
  bench_cmd->add_option("--seed", seed, "Generator seed");

  std::string variants = "full,flash_only,flow_only,anchor_only";
  std::size_t cases = 200, length = 16384, needles = 1, ablate_jobs = 0;
  std::string kind = "single";
  auto* ablate_cmd = app.add_subcommand("ablate", "Mean needle recall per variant");
  add_config_flags(*ablate_cmd, ablate_flags);
  ablate_cmd->add_option("--variants", variants, "Comma-separated switches");
  ablate_cmd->add_option("--cases", cases, "Generated cases");
  ablate_cmd->add_option("--length", length, "Context tokens per case");
  ablate_cmd->add_option("--needles", needles, "Needles per case");
  ablate_cmd->add_option("--kind", kind, "single, multi or freq");
  ablate_cmd->add_option("--seed", seed, "First case seed");
  ablate_cmd->add_option("--jobs", ablate_jobs, "Worker threads (0: all cores)");

  std::size_t gen_count = 1;
  std::optional<double> depth;
  auto* gen_cmd = app.add_subcommand("gen", "Emit synthetic haystack cases as JSONL");
  gen_cmd->add_option("--seed", seed, "First case seed");
  gen_cmd->add_option("--length", length, "Context tokens per case");
  gen_cmd->add_option("--needles", needles, "Needles per case");
  gen_cmd->add_option("--kind", kind, "single, multi or freq");
  gen_cmd->add_option("--count", gen_count, "Number of cases");
  gen_cmd->add_option("--depth", depth, "Relative needle position in [0,1]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*compress_cmd) {
      run.format = format == "text" ? OutputFormat::kText : OutputFormat::kJsonl;
      if (!query.empty()) run.query = query;
      const CompressionConfig config = resolve_config(compress_flags);
      std::ifstream file_in;
      std::ofstream file_out;
      std::istream* src = &in;
      std::ostream* dst = &out;
      if (!input_path.empty()) {
        file_in.open(input_path, std::ios::binary);
        if (!file_in) throw Error(ErrorCode::kIo, "cannot open input " + input_path);
        src = &file_in;
      }
      if (!output_path.empty()) {
        file_out.open(output_path, std::ios::binary | std::ios::trunc);
        if (!file_out) throw Error(ErrorCode::kIo, "cannot open output " + output_path);
        dst = &file_out;
      }
      return run_compress(config, run, *src, *dst, err);
    }
    if (*bench_cmd) {
      const CompressionConfig config = resolve_config(bench_flags);
      const auto provider = make_provider(config.embedding);
      const auto lens = parse_lengths(lengths);
      if (repeats < 3) throw Error(ErrorCode::kUsage, "repeats: must be >= 3");
      if (lens.empty() || !std::is_sorted(lens.begin(), lens.end())) {
        throw Error(ErrorCode::kUsage, "lengths: must be a non-empty ascending list");
      }
      write_bench_csv(out, latency_bench(lens, repeats, config, *provider, seed));
      return 0;
    }
    if (*ablate_cmd) {
      const CompressionConfig config = resolve_config(ablate_flags);
      const auto provider = make_provider(config.embedding);
      std::vector<Variant> vs;
      for (const std::string& name : split_list(variants)) {
        try {
          vs.push_back(parse_variant(name));
        } catch (const Error& e) {
          throw Error(ErrorCode::kUsage, e.what());
        }
      }
      HaystackOptions opts;
      opts.seed = seed;
      opts.length = length;
      opts.needles = needles;
      opts.kind = parse_haystack_kind(kind);
      const auto suite = gen_suite(opts, cases);
      write_ablation_csv(out, ablation_run(config, vs, suite, *provider, ablate_jobs));
      return 0;
    }
    if (*gen_cmd) {
      HaystackOptions opts;
      opts.seed = seed;
      opts.length = length;
      opts.needles = needles;
      opts.kind = parse_haystack_kind(kind);
      opts.depth = depth;
      for (const HaystackCase& c : gen_suite(opts, gen_count)) {
        out << to_json(c).dump() << '\n';
      }
      return 0;
    }
  } catch (const Error& e) {
    err << error_code_name(e.code()) << " error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace pagewise::cli
