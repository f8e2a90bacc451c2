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

#include "pagewise/segmenter.hpp"

#include <algorithm>
#include <string>

#include "pagewise/error.hpp"

namespace pagewise {

PageTable::PageTable(std::size_t capacity, std::vector<std::int64_t> index)
    : capacity_(capacity), index_(std::move(index)) {
  if (capacity_ == 0 || index_.size() % capacity_ != 0) {
    throw Error(ErrorCode::kConfig, "page index size is not a multiple of capacity");
  }
  const std::size_t pages = index_.size() / capacity_;
  first_.reserve(pages);
  last_.reserve(pages);
  filled_.reserve(pages);
  for (std::size_t p = 0; p < pages; ++p) {
    std::size_t filled = 0;
    std::int64_t lo = -1;
    std::int64_t hi = -1;
    for (const std::int64_t t : row(p)) {
      if (t == kPad) continue;
      if (lo < 0) lo = t;
      hi = t;
      ++filled;
    }
    if (filled == 0) {
      throw Error(ErrorCode::kConfig, "page " + std::to_string(p) + " is empty");
    }
    first_.push_back(static_cast<std::size_t>(lo));
    last_.push_back(static_cast<std::size_t>(hi));
    filled_.push_back(filled);
    n_tokens_ += filled;
  }
}

std::size_t PageTable::page_of_token(std::size_t token) const {
  if (token >= n_tokens_) {
    throw Error(ErrorCode::kIndex, "token " + std::to_string(token) +
                                       " outside context of " +
                                       std::to_string(n_tokens_) + " tokens");
  }
  auto it = std::upper_bound(first_.begin(), first_.end(), token);
  return static_cast<std::size_t>(std::distance(first_.begin(), it)) - 1;
}

std::vector<Segment> segment(std::size_t context_length,
                             std::span<const std::size_t> segment_boundaries) {
  std::vector<Segment> out;
  if (context_length == 0) return out;
  std::size_t start = 0;
  for (const std::size_t b : segment_boundaries) {
    if (b >= context_length - 1) break;
    if (b < start) continue;
    out.push_back({start, b});
    start = b + 1;
  }
  out.push_back({start, context_length - 1});
  return out;
}

PageTable paginate(std::span<const Segment> segments, std::size_t capacity) {
  if (capacity < 1) {
    throw Error(ErrorCode::kConfig, "page_size must be >= 1");
  }
  std::vector<std::int64_t> index;
  std::size_t used = capacity;  // forces the first segment onto a new page

  const auto open_page = [&] {
    index.resize(index.size() + capacity, kPad);
    used = 0;
  };
  const auto place = [&](std::size_t first, std::size_t last) {
    std::int64_t* row = index.data() + index.size() - capacity;
    for (std::size_t t = first; t <= last; ++t) {
      row[used++] = static_cast<std::int64_t>(t);
    }
  };

  for (const Segment& seg : segments) {
    const std::size_t len = seg.length();
    if (len <= capacity) {
      if (used + len > capacity) open_page();
      place(seg.first, seg.last);
      continue;
    }
    for (std::size_t chunk = seg.first; chunk <= seg.last; chunk += capacity) {
      open_page();
      place(chunk, std::min(seg.last, chunk + capacity - 1));
    }
    used = capacity;  // no co-packing after a split
  }
  if (index.empty()) return {};
  return PageTable(capacity, std::move(index));
}

}  // namespace pagewise
