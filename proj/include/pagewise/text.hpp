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

#ifndef PAGEWISE_TEXT_HPP_
#define PAGEWISE_TEXT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace pagewise {

using TokenId = std::int64_t;

/// Half-open byte range [start, end) into a source text.
struct ByteSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

/// Token ids paired with byte offsets into the text they were cut from.
///
/// Offsets are strictly increasing and non-overlapping, so any ascending run of
/// tokens maps back to one contiguous byte range of the source.
struct TokenStream {
  std::vector<TokenId> ids;
  std::vector<ByteSpan> offsets;
  std::size_t source_len = 0;

  std::size_t size() const noexcept { return ids.size(); }
  bool empty() const noexcept { return ids.empty(); }

  std::string_view surface(std::string_view text, std::size_t index) const {
    const ByteSpan& span = offsets[index];
    return text.substr(span.start, span.end - span.start);
  }

  /// First `count` tokens, offsets still relative to the same source.
  TokenStream prefix(std::size_t count) const;
  /// Tokens [first, size()), offsets still relative to the same source.
  TokenStream suffix(std::size_t first) const;
};

/// Stable id for a surface form. Shared by every stream the word tokenizer
/// produces, so a context and a separately tokenized query agree on ids.
TokenId surface_id(std::string_view surface) noexcept;

/// Unicode word/punctuation tokenizer. Runs of letters and digits form one
/// token, every punctuation mark and every CJK ideograph or kana is its own
/// token, whitespace is never tokenized. Throws kInputFormat on invalid UTF-8.
TokenStream tokenize(std::string_view text);

/// Wraps externally produced ids/offsets after validating them against `text`.
TokenStream from_pretokenized(std::string_view text, std::vector<TokenId> ids,
                              std::vector<ByteSpan> offsets);

struct BoundarySet {
  std::vector<std::size_t> segment_boundaries;
  std::vector<std::size_t> sentence_boundaries;
};

/// Segment boundary: a token followed by a newline, or followed by a heading
/// marker ('#' at line start). Sentence boundary: a token whose surface ends in
/// one of . ! ? ; 。 ！ ？, or that is followed by a newline. The last token is
/// always a boundary of both kinds.
BoundarySet detect_boundaries(const TokenStream& stream, std::string_view text);

/// Sorted boundaries restricted to [0, length - 1] with length - 1 forced in.
std::vector<std::size_t> clip_boundaries(std::span<const std::size_t> boundaries,
                                         std::size_t length);

struct TokenRange {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive

  std::size_t length() const noexcept { return last - first + 1; }
  friend bool operator==(const TokenRange&, const TokenRange&) = default;
};

struct QuerySplit {
  /// Number of leading context tokens; the context is [0, query_start - 1].
  std::size_t query_start = 0;
  std::size_t total = 0;
  bool explicit_query = false;

  std::size_t context_length() const noexcept { return query_start; }
  TokenRange query_range() const noexcept { return {query_start, total - 1}; }
};

inline constexpr std::size_t kDefaultImplicitQueryWindow = 64;

/// Treats the tail of `stream` as the query, snapped back to the nearest
/// segment boundary within `window` tokens of the end.
QuerySplit resolve_implicit_query(const TokenStream& stream,
                                  const BoundarySet& boundaries,
                                  std::size_t window);

}  // namespace pagewise

#endif  // PAGEWISE_TEXT_HPP_
