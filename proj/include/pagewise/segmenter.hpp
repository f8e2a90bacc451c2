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

#ifndef PAGEWISE_SEGMENTER_HPP_
#define PAGEWISE_SEGMENTER_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pagewise/text.hpp"

namespace pagewise {

/// Inclusive token interval between two natural delimiters.
using Segment = TokenRange;

inline constexpr std::size_t kDefaultPageSize = 64;
inline constexpr std::int64_t kPad = -1;

/// N x M page index tensor. Row i lists the context token indices on page i,
/// padded with kPad. Pages cover [0, L_c - 1] in order, each token once.
class PageTable {
 public:
  PageTable() = default;
  PageTable(std::size_t capacity, std::vector<std::int64_t> index);

  std::size_t n_pages() const noexcept { return first_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t n_tokens() const noexcept { return n_tokens_; }

  std::span<const std::int64_t> row(std::size_t page) const {
    return {index_.data() + page * capacity_, capacity_};
  }
  std::span<const std::int64_t> index() const noexcept { return index_; }

  std::size_t first_token(std::size_t page) const { return first_[page]; }
  std::size_t last_token(std::size_t page) const { return last_[page]; }
  std::size_t filled(std::size_t page) const { return filled_[page]; }
  std::size_t pad_count(std::size_t page) const {
    return capacity_ - filled_[page];
  }

  /// Page whose [first_token, last_token] contains `token`. kIndex if out of range.
  std::size_t page_of_token(std::size_t token) const;

 private:
  std::size_t capacity_ = 0;
  std::size_t n_tokens_ = 0;
  std::vector<std::int64_t> index_;
  std::vector<std::size_t> first_;
  std::vector<std::size_t> last_;
  std::vector<std::size_t> filled_;
};

/// Cuts [0, context_length - 1] after each segment boundary.
std::vector<Segment> segment(std::size_t context_length,
                             std::span<const std::size_t> segment_boundaries);

/// Greedy left-to-right packing. A segment that fits the current page's
/// remaining capacity joins it; otherwise it opens a new page. Segments longer
/// than `capacity` start on a fresh page and are cut into capacity-sized chunks;
/// packing resumes on a fresh page after the last chunk.
PageTable paginate(std::span<const Segment> segments, std::size_t capacity);

}  // namespace pagewise

#endif  // PAGEWISE_SEGMENTER_HPP_
