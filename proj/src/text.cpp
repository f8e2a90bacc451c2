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

#include "pagewise/text.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "pagewise/error.hpp"

namespace pagewise {
namespace {

enum class CharClass { kSpace, kWord, kPunct, kIdeograph };

struct Decoded {
  char32_t cp;
  std::size_t width;
};

Decoded decode_utf8(std::string_view text, std::size_t pos) {
  const auto byte = [&](std::size_t i) {
    return static_cast<unsigned char>(text[i]);
  };
  const unsigned char lead = byte(pos);
  if (lead < 0x80) return {lead, 1};

  std::size_t width = 0;
  char32_t cp = 0;
  char32_t min_cp = 0;
  if ((lead & 0xE0) == 0xC0) {
    width = 2, cp = lead & 0x1F, min_cp = 0x80;
  } else if ((lead & 0xF0) == 0xE0) {
    width = 3, cp = lead & 0x0F, min_cp = 0x800;
  } else if ((lead & 0xF8) == 0xF0) {
    width = 4, cp = lead & 0x07, min_cp = 0x10000;
  }
  if (width == 0 || pos + width > text.size()) {
    throw Error(ErrorCode::kInputFormat,
                "invalid UTF-8 at byte " + std::to_string(pos));
  }
  for (std::size_t i = 1; i < width; ++i) {
    const unsigned char cont = byte(pos + i);
    if ((cont & 0xC0) != 0x80) {
      throw Error(ErrorCode::kInputFormat,
                  "invalid UTF-8 at byte " + std::to_string(pos + i));
    }
    cp = (cp << 6) | (cont & 0x3F);
  }
  if (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    throw Error(ErrorCode::kInputFormat,
                "invalid UTF-8 at byte " + std::to_string(pos));
  }
  return {cp, width};
}

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

CharClass classify(char32_t cp) {
  if (cp < 0x80) {
    if (cp == ' ' || in(cp, 0x09, 0x0D)) return CharClass::kSpace;
    if (in(cp, '0', '9') || in(cp, 'a', 'z') || in(cp, 'A', 'Z')) {
      return CharClass::kWord;
    }
    if (cp < 0x20 || cp == 0x7F) return CharClass::kSpace;
    return CharClass::kPunct;
  }
  if (cp == 0x85 || cp == 0xA0 || cp == 0x1680 || in(cp, 0x2000, 0x200A) ||
      cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
      cp == 0x3000 || cp == 0xFEFF) {
    return CharClass::kSpace;
  }
  if (in(cp, 0xA1, 0xBF) || cp == 0xD7 || cp == 0xF7 || in(cp, 0x2010, 0x2027) ||
      in(cp, 0x2030, 0x205E) || in(cp, 0x3001, 0x303F) ||
      in(cp, 0xFF01, 0xFF0F) || in(cp, 0xFF1A, 0xFF20) ||
      in(cp, 0xFF3B, 0xFF40) || in(cp, 0xFF5B, 0xFF65)) {
    return CharClass::kPunct;
  }
  if (in(cp, 0x3040, 0x30FF) || in(cp, 0x3400, 0x4DBF) ||
      in(cp, 0x4E00, 0x9FFF) || in(cp, 0xF900, 0xFAFF) ||
      in(cp, 0x20000, 0x2FA1F)) {
    return CharClass::kIdeograph;
  }
  return CharClass::kWord;
}

constexpr std::array<std::string_view, 7> kSentenceTerminators = {
    ".", "!", "?", ";", "\xE3\x80\x82" /* 。 */, "\xEF\xBC\x81" /* ！ */,
    "\xEF\xBC\x9F" /* ？ */};

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view trim_right(std::string_view s) {
  while (!s.empty() && is_blank(s.back())) s.remove_suffix(1);
  return s;
}

bool ends_with_terminator(std::string_view surface) {
  const std::string_view trimmed = trim_right(surface);
  return std::any_of(kSentenceTerminators.begin(), kSentenceTerminators.end(),
                     [&](std::string_view t) { return trimmed.ends_with(t); });
}

// True when a newline sits in the token's trailing whitespace or in the gap
// before the next token.
bool newline_after(std::string_view surface, std::string_view gap) {
  const std::string_view trimmed = trim_right(surface);
  const std::string_view tail = surface.substr(trimmed.size());
  return tail.find('\n') != std::string_view::npos ||
         gap.find('\n') != std::string_view::npos;
}

// '#' as the first visible character of a line.
bool starts_heading(std::string_view text, ByteSpan span) {
  std::size_t pos = span.start;
  while (pos < span.end && is_blank(text[pos]) && text[pos] != '\n') ++pos;
  while (pos < span.end && text[pos] == '\n') ++pos;
  while (pos < span.end && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  if (pos >= span.end || text[pos] != '#') return false;
  std::size_t back = pos;
  while (back > 0) {
    const char c = text[back - 1];
    if (c == '\n') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
    --back;
  }
  return true;
}

}  // namespace

TokenStream TokenStream::prefix(std::size_t count) const {
  count = std::min(count, size());
  TokenStream out;
  out.ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(count));
  out.offsets.assign(offsets.begin(),
                     offsets.begin() + static_cast<std::ptrdiff_t>(count));
  out.source_len = source_len;
  return out;
}

TokenStream TokenStream::suffix(std::size_t first) const {
  first = std::min(first, size());
  TokenStream out;
  out.ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(first), ids.end());
  out.offsets.assign(offsets.begin() + static_cast<std::ptrdiff_t>(first),
                     offsets.end());
  out.source_len = source_len;
  return out;
}

TokenId surface_id(std::string_view surface) noexcept {
  // FNV-1a, top bit cleared so ids stay non-negative.
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : surface) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return static_cast<TokenId>(hash & 0x7FFFFFFFFFFFFFFFULL);
}

TokenStream tokenize(std::string_view text) {
  TokenStream out;
  out.source_len = text.size();
  std::size_t pos = 0;
  std::size_t word_start = std::string_view::npos;

  const auto emit = [&](std::size_t start, std::size_t end) {
    out.ids.push_back(surface_id(text.substr(start, end - start)));
    out.offsets.push_back({start, end});
  };
  const auto flush_word = [&](std::size_t end) {
    if (word_start != std::string_view::npos) {
      emit(word_start, end);
      word_start = std::string_view::npos;
    }
  };

  while (pos < text.size()) {
    const Decoded d = decode_utf8(text, pos);
    switch (classify(d.cp)) {
      case CharClass::kSpace:
        flush_word(pos);
        break;
      case CharClass::kWord:
        if (word_start == std::string_view::npos) word_start = pos;
        break;
      case CharClass::kPunct:
      case CharClass::kIdeograph:
        flush_word(pos);
        emit(pos, pos + d.width);
        break;
    }
    pos += d.width;
  }
  flush_word(pos);
  return out;
}

TokenStream from_pretokenized(std::string_view text, std::vector<TokenId> ids,
                              std::vector<ByteSpan> offsets) {
  if (ids.size() != offsets.size()) {
    throw Error(ErrorCode::kInputFormat,
                "ids/offsets length mismatch: " + std::to_string(ids.size()) +
                    " vs " + std::to_string(offsets.size()));
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0) {
      throw Error(ErrorCode::kInputFormat,
                  "negative token id at position " + std::to_string(i));
    }
    const ByteSpan& span = offsets[i];
    if (span.start >= span.end || span.end > text.size()) {
      throw Error(ErrorCode::kInputFormat,
                  "invalid offset at position " + std::to_string(i));
    }
    if (i > 0 && span.start < offsets[i - 1].end) {
      throw Error(ErrorCode::kInputFormat,
                  "overlapping offsets at position " + std::to_string(i));
    }
  }
  TokenStream out;
  out.ids = std::move(ids);
  out.offsets = std::move(offsets);
  out.source_len = text.size();
  return out;
}

BoundarySet detect_boundaries(const TokenStream& stream, std::string_view text) {
  BoundarySet out;
  const std::size_t count = stream.size();
  for (std::size_t i = 0; i < count; ++i) {
    const std::string_view surface = stream.surface(text, i);
    const std::size_t gap_end =
        i + 1 < count ? stream.offsets[i + 1].start : text.size();
    const std::size_t gap_start = stream.offsets[i].end;
    const std::string_view gap = text.substr(gap_start, gap_end - gap_start);

    const bool is_last = i + 1 == count;
    const bool newline = newline_after(surface, gap);
    const bool heading = !is_last && starts_heading(text, stream.offsets[i + 1]);
    if (newline || heading || is_last) out.segment_boundaries.push_back(i);
    if (newline || is_last || ends_with_terminator(surface)) {
      out.sentence_boundaries.push_back(i);
    }
  }
  return out;
}

std::vector<std::size_t> clip_boundaries(std::span<const std::size_t> boundaries,
                                         std::size_t length) {
  std::vector<std::size_t> out;
  if (length == 0) return out;
  for (const std::size_t b : boundaries) {
    if (b >= length - 1) break;
    out.push_back(b);
  }
  out.push_back(length - 1);
  return out;
}

QuerySplit resolve_implicit_query(const TokenStream& stream,
                                  const BoundarySet& boundaries,
                                  std::size_t window) {
  if (window < 1) {
    throw Error(ErrorCode::kConfig, "implicit_query_window must be >= 1");
  }
  if (stream.empty()) {
    throw Error(ErrorCode::kContract, "cannot resolve a query in an empty stream");
  }
  const std::size_t length = stream.size();
  const std::size_t last = length - 1;
  QuerySplit split;
  split.total = length;
  split.explicit_query = false;
  split.query_start = length > window ? length - window : 0;

  const auto& segs = boundaries.segment_boundaries;
  // Largest boundary strictly before the final token.
  auto it = std::lower_bound(segs.begin(), segs.end(), last);
  if (it != segs.begin()) {
    const std::size_t b = *std::prev(it);
    if (last - b <= window) split.query_start = b + 1;
  }
  return split;
}

}  // namespace pagewise
