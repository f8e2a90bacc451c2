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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pagewise/error.hpp"
#include "pagewise/harness.hpp"
#include "pagewise/pipeline.hpp"

namespace pagewise::cli {
namespace {

using nlohmann::json;

class TempFile {
 public:
  explicit TempFile(const std::string& content) {
    path_ = std::filesystem::temp_directory_path() /
            ("pagewise_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + std::to_string(counter_++) + ".json");
    std::ofstream(path_) << content;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

ErrorCode code_of(const std::function<void()>& fn, std::string* what = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (what) *what = e.what();
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kContract;
}

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "pagewise");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run_main(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str(), err.str()};
}

std::vector<json> lines_of(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(json::parse(line));
  return out;
}

TEST(ParseConfig, Defaults) {
  const CompressionConfig c = parse_config({});
  EXPECT_EQ(c.page_size, 64u);
  EXPECT_EQ(c.gamma, 0.7);
  EXPECT_EQ(c.lambda, 0.7);
  EXPECT_EQ(c.k_anc, 4u);
  EXPECT_EQ(c.w_flow, 4u);
  EXPECT_EQ(c.budget, 2000u);
  EXPECT_EQ(c.embedding, "hash:64:0");
  EXPECT_EQ(c.selection_policy, SelectionPolicy::kFull);
}

TEST(ParseConfig, RangeErrorNamesField) {
  std::string what;
  EXPECT_EQ(code_of([] { parse_config({"--gamma", "1.5"}); }, &what), ErrorCode::kUsage);
  EXPECT_NE(what.find("gamma"), std::string::npos);
  EXPECT_EQ(code_of([] { parse_config({"--k-anc", "-1"}); }, &what), ErrorCode::kUsage);
  EXPECT_NE(what.find("k_anc"), std::string::npos);
  EXPECT_EQ(code_of([] { parse_config({"--budget", "0"}); }), ErrorCode::kUsage);
  EXPECT_EQ(code_of([] { parse_config({"--selection-policy", "random"}); }), ErrorCode::kUsage);
}

TEST(ParseConfig, UnknownFlag) {
  EXPECT_EQ(code_of([] { parse_config({"--bogus", "1"}); }), ErrorCode::kUsage);
  EXPECT_EQ(code_of([] { parse_config({"--budget", "many"}); }), ErrorCode::kUsage);
}

TEST(ParseConfig, SwitchesRecorded) {
  const CompressionConfig c =
      parse_config({"--selection-policy", "flash_only", "--score-mode", "lexical_only",
                    "--no-itf", "--no-smooth", "--page-size", "128", "--lambda", "0.2"});
  EXPECT_EQ(c.selection_policy, SelectionPolicy::kFlashOnly);
  EXPECT_EQ(c.score_mode, ScoreMode::kLexicalOnly);
  EXPECT_TRUE(c.disable_itf);
  EXPECT_TRUE(c.disable_smoothing);
  EXPECT_EQ(c.page_size, 128u);
  EXPECT_EQ(c.lambda, 0.2);
  EXPECT_EQ(c.effective_lambda(), 0.0);
}

TEST(ParseConfig, FlagsOverrideFile) {
  const TempFile file(R"({"budget": 500, "lambda": 0.2, "selection_policy": "flow_only"})");
  const CompressionConfig c = parse_config({"--budget", "700"}, file.path());
  EXPECT_EQ(c.budget, 700u);
  EXPECT_EQ(c.lambda, 0.2);
  EXPECT_EQ(c.selection_policy, SelectionPolicy::kFlowOnly);
  const CompressionConfig via_flag = parse_config({"--config", file.path().string()});
  EXPECT_EQ(via_flag.budget, 500u);
}

TEST(ParseConfig, BadFile) {
  const TempFile typo(R"({"gama": 0.5})");
  std::string what;
  EXPECT_EQ(code_of([&] { parse_config({}, typo.path()); }, &what), ErrorCode::kUsage);
  EXPECT_NE(what.find("gama"), std::string::npos);
  const TempFile broken("{budget");
  EXPECT_EQ(code_of([&] { parse_config({}, broken.path()); }), ErrorCode::kUsage);
  EXPECT_EQ(code_of([] { parse_config({}, "/nonexistent/pagewise.json"); }), ErrorCode::kIo);
}

TEST(Options, UnderscoreNamesMirrorFlags) {
  CompressionConfig c;
  apply_options(c, json{{"budget", 2000}, {"page_size", 32}, {"w_flow", 2},
                        {"disable_smoothing", true}, {"score_mode", "semantic_only"}});
  EXPECT_EQ(c.page_size, 32u);
  EXPECT_EQ(c.w_flow, 2u);
  EXPECT_TRUE(c.disable_smoothing);
  EXPECT_EQ(c.score_mode, ScoreMode::kSemanticOnly);
  std::string what;
  EXPECT_EQ(code_of([&] { set_option(c, "gamma", 1.5); validate(c); }, &what),
            ErrorCode::kUsage);
  EXPECT_TRUE(what.starts_with("gamma:"));
  EXPECT_EQ(code_of([&] { set_option(c, "budget", "big"); }), ErrorCode::kUsage);
  EXPECT_EQ(code_of([&] { set_option(c, "nonsense", 1); }), ErrorCode::kUsage);
  for (const std::string& name : option_names()) {
    EXPECT_TRUE(to_json(CompressionConfig{}).contains(name)) << name;
  }
}

TEST(Options, LibraryMatchesCliRecord) {
  const HaystackCase c = gen_haystack({.seed = 3, .length = 2048, .depth = std::nullopt});
  CompressionConfig config;
  apply_options(config, json{{"budget", 300}, {"page_size", 32}});
  const HashEmbedding provider;
  const CompressionResult lib = compress(make_document(c.id, c.context, c.query), config, provider);
  const json rec{{"id", c.id}, {"context", c.context}, {"query", c.query}};
  const auto out = process_record(rec.dump(), 1, parse_config({"--budget", "300", "--page-size", "32"}),
                                  provider, {});
  EXPECT_EQ(out["compressed"], lib.compressed);
  EXPECT_EQ(out["token_count"], lib.token_count);
  EXPECT_EQ(out["spans"].size(), lib.spans.size());
}

TEST(ProcessRecord, ShortContextIsIdentity) {
  const HashEmbedding provider;
  const auto out = process_record(R"({"id":"x","context":"The sky is blue."})", 1,
                                  CompressionConfig{}, provider, {});
  EXPECT_EQ(out["compressed"], "The sky is blue.");
}

TEST(ProcessRecord, OutputFieldOrder) {
  const HashEmbedding provider;
  RunOptions options;
  options.emit_scores = true;
  std::string ctx;
  for (int i = 0; i < 30; ++i) ctx += "Line " + std::to_string(i) + " of the log.\n";
  const json rec{{"id", "r1"}, {"context", ctx}, {"query", "Which line is 12?"}};
  CompressionConfig config;
  config.budget = 40;
  config.page_size = 16;
  const auto out = process_record(rec.dump(), 1, config, provider, options);
  std::vector<std::string> keys;
  for (const auto& [k, v] : out.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"id", "compressed", "token_count", "ratio", "spans",
                                            "scores"}));
  const std::size_t pages = out["scores"]["mixed"].size();
  EXPECT_GT(pages, 1u);
  EXPECT_EQ(out["scores"]["sem"].size(), pages);
  EXPECT_EQ(out["scores"]["lex"].size(), pages);
  ASSERT_FALSE(out["spans"].empty());
  const auto& span = out["spans"][0];
  EXPECT_TRUE(span.contains("a") && span.contains("b") && span.contains("origin") &&
              span.contains("score"));
  EXPECT_LE(out["token_count"].get<std::size_t>(), 40u);
}

TEST(ProcessRecord, ErrorsBecomeRecords) {
  const HashEmbedding provider;
  const CompressionConfig config;
  auto out = process_record("{not json", 3, config, provider, {});
  EXPECT_EQ(out["id"], "#3");
  EXPECT_TRUE(out.contains("error"));
  EXPECT_FALSE(out.contains("compressed"));
  out = process_record(R"({"id":"k","query":"q"})", 4, config, provider, {});
  EXPECT_EQ(out["id"], "k");
  EXPECT_NE(out["error"].get<std::string>().find("context"), std::string::npos);
  out = process_record("[1,2]", 5, config, provider, {});
  EXPECT_EQ(out["id"], "#5");
  out = process_record("{\"id\":\"u\",\"context\":\"bad \xff\"}", 6, config, provider, {});
  EXPECT_EQ(out["id"], "#6");
  EXPECT_TRUE(out.contains("error"));
  out = process_record("{\"id\":\"v\",\"context\":\"ok\"}", 7, config, provider, {});
  EXPECT_FALSE(out.contains("error"));
}

TEST(ProcessRecord, Pretokenized) {
  const HashEmbedding provider;
  CompressionConfig config;
  config.tokenizer = TokenizerMode::kPretokenized;
  const json rec{{"id", "p"},
                 {"text", "aa bb. cc"},
                 {"ids", {5, 6, 7, 8}},
                 {"offsets", {{0, 2}, {3, 5}, {5, 6}, {7, 9}}},
                 {"query", {{"text", "cc?"}, {"ids", {8, 9}}, {"offsets", {{0, 2}, {2, 3}}}}}};
  const auto out = process_record(rec.dump(), 1, config, provider, {});
  ASSERT_FALSE(out.contains("error")) << out.dump();
  EXPECT_EQ(out["compressed"], "aa bb. cc\ncc?");
  EXPECT_EQ(out["token_count"], 4);

  json bad = rec;
  bad["ids"] = {5, 6, 7};
  EXPECT_TRUE(process_record(bad.dump(), 2, config, provider, {}).contains("error"));
  bad = rec;
  bad["query"] = "cc?";
  EXPECT_TRUE(process_record(bad.dump(), 3, config, provider, {}).contains("error"));
}

TEST(RunCompress, PreservesOrderAcrossWorkers) {
  std::string input;
  for (int i = 0; i < 300; ++i) {
    const std::string ctx = "Entry " + std::to_string(i) + " says hello. Another line here.\n";
    input += json{{"id", "doc" + std::to_string(i)}, {"context", ctx}}.dump() + "\n";
    if (i % 50 == 0) input += "\n";
  }
  RunOptions options;
  options.jobs = 4;
  std::istringstream in(input);
  std::ostringstream out, err;
  EXPECT_EQ(run_compress(CompressionConfig{}, options, in, out, err), 0);
  const auto records = lines_of(out.str());
  ASSERT_EQ(records.size(), 300u);
  for (int i = 0; i < 300; ++i) EXPECT_EQ(records[i]["id"], "doc" + std::to_string(i));

  options.jobs = 1;
  std::istringstream in2(input);
  std::ostringstream out2;
  run_compress(CompressionConfig{}, options, in2, out2, err);
  EXPECT_EQ(out.str(), out2.str());
}

TEST(RunCompress, ContinuesPastBadRecords) {
  const std::string input = R"({"id":"a","context":"One. Two."})"
                            "\n{broken\n"
                            R"({"id":"c","context":"Three. Four."})"
                            "\n";
  std::istringstream in(input);
  std::ostringstream out, err;
  EXPECT_EQ(run_compress(CompressionConfig{}, {}, in, out, err), 0);
  const auto records = lines_of(out.str());
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0]["id"], "a");
  EXPECT_EQ(records[1]["id"], "#2");
  EXPECT_TRUE(records[1].contains("error"));
  EXPECT_EQ(records[2]["id"], "c");
}

TEST(RunCompress, TextMode) {
  std::string text;
  for (int i = 0; i < 200; ++i) text += "Paragraph " + std::to_string(i) + " is filler.\n";
  RunOptions options;
  options.format = OutputFormat::kText;
  options.query = "Where is paragraph 150?";
  CompressionConfig config;
  config.budget = 100;
  std::istringstream in(text);
  std::ostringstream out, err;
  EXPECT_EQ(run_compress(config, options, in, out, err), 0);
  EXPECT_TRUE(out.str().ends_with("\nWhere is paragraph 150?"));
  EXPECT_LT(out.str().size(), text.size());
  EXPECT_EQ(out.str().find('{'), std::string::npos);
}

TEST(RunCompress, DebugPagesToStderr) {
  RunOptions options;
  options.debug_pages = true;
  CompressionConfig config;
  config.page_size = 4;
  std::istringstream in(R"({"id":"a","context":"a b c.\nd e f g h.\ni j","query":"x"})");
  std::ostringstream out, err;
  run_compress(config, options, in, out, err);
  EXPECT_EQ(err.str(),
            "{\"page\":0,\"tokens\":[0,3],\"pad\":0}\n"
            "{\"page\":1,\"tokens\":[4,7],\"pad\":0}\n"
            "{\"page\":2,\"tokens\":[8,9],\"pad\":2}\n"
            "{\"page\":3,\"tokens\":[10,11],\"pad\":2}\n");
}

TEST(RunMain, ExitCodes) {
  EXPECT_EQ(run({"compress", "--gamma", "1.5"}).code, 2);
  EXPECT_EQ(run({"compress", "--frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"compress", "--input", "/nonexistent/in.jsonl"}).code, 1);
  EXPECT_EQ(run({"compress", "--embedding", "table:/nonexistent/t.bin"}).code, 1);
  EXPECT_EQ(run({"gen", "--length", "10"}).code, 3);
  EXPECT_EQ(run({"ablate", "--variants", "turbo", "--cases", "1", "--length", "512"}).code, 2);
  EXPECT_EQ(run({"bench", "--repeats", "2"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(RunMain, CompressFromStdin) {
  const RunResult r = run({"compress", "--budget", "50"},
                    R"({"id":"a","context":"One two three. Four five six."})");
  EXPECT_EQ(r.code, 0);
  const auto records = lines_of(r.out);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0]["id"], "a");
}

TEST(RunMain, GenAblateBench) {
  const RunResult gen = run({"gen", "--count", "2", "--length", "512", "--seed", "4"});
  EXPECT_EQ(gen.code, 0);
  const auto cases = lines_of(gen.out);
  ASSERT_EQ(cases.size(), 2u);
  EXPECT_EQ(cases[1]["id"], "haystack-single-5");
  EXPECT_TRUE(cases[0].contains("gold_spans"));

  const RunResult ablate = run({"ablate", "--cases", "2", "--length", "512", "--variants",
                          "full,anchor_only", "--budget", "100"});
  EXPECT_EQ(ablate.code, 0);
  EXPECT_TRUE(ablate.out.starts_with("variant,mean_recall,cases\nfull,"));
  EXPECT_NE(ablate.out.find("\nanchor_only,"), std::string::npos);

  const RunResult bench = run({"bench", "--lengths", "512,1024", "--repeats", "3"});
  EXPECT_EQ(bench.code, 0);
  EXPECT_TRUE(bench.out.starts_with("context_len,median_s,ratio\n512,"));
  EXPECT_NE(bench.out.find("# fit slope="), std::string::npos);
}

}  // namespace
}  // namespace pagewise::cli
