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

#ifndef PAGEWISE_CLI_HPP_
#define PAGEWISE_CLI_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pagewise/config.hpp"
#include "pagewise/embedding.hpp"

namespace pagewise::cli {

enum class OutputFormat { kJsonl, kText };

struct RunOptions {
  std::size_t jobs = 0;  // 0: hardware concurrency
  bool emit_scores = false;
  bool debug_pages = false;
  OutputFormat format = OutputFormat::kJsonl;
  std::optional<std::string> query;  // text mode only
};

/// Defaults, then the JSON config file (if any), then `args` (flags only, no
/// program name). Throws Error(kUsage) naming the offending field or flag.
CompressionConfig parse_config(const std::vector<std::string>& args,
                               const std::optional<std::filesystem::path>& config_file =
                                   std::nullopt);

/// Compresses one JSONL input record. Never throws: failures become
/// {"id", "error"} objects.
nlohmann::ordered_json process_record(const std::string& line, std::size_t line_no,
                                      const CompressionConfig& config,
                                      const EmbeddingProvider& provider,
                                      const RunOptions& options,
                                      std::string* debug_pages = nullptr);

/// Reads JSONL records (or one raw document in text mode) from `in` and
/// writes one result per record to `out`, in input order.
int run_compress(const CompressionConfig& config, const RunOptions& options,
                 std::istream& in, std::ostream& out, std::ostream& err);

/// Entry point behind the `pagewise` binary. Returns the process exit code:
/// 0 success, 1 I/O, 2 usage, 3 data format.
int run_main(int argc, const char* const* argv, std::istream& in, std::ostream& out,
             std::ostream& err);

}  // namespace pagewise::cli

#endif  // PAGEWISE_CLI_HPP_
