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

#ifndef PAGEWISE_EMBEDDING_HPP_
#define PAGEWISE_EMBEDDING_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "pagewise/text.hpp"

namespace pagewise {

/// Row-major float matrix; one row per token.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  std::span<float> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const float> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
};

/// Token id -> R^d. Implementations are immutable after construction and
/// safe to share across threads.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dim() const noexcept = 0;
  /// Writes the embedding of `id` into `out` (size dim()).
  virtual void lookup(TokenId id, std::span<float> out) const = 0;

  std::vector<float> lookup(TokenId id) const {
    std::vector<float> v(dim());
    lookup(id, v);
    return v;
  }
};

inline constexpr std::size_t kDefaultHashDim = 64;

std::uint64_t splitmix64(std::uint64_t z) noexcept;

/// Feature-hash embeddings. Component j of id's vector is
///   base = splitmix64(seed ^ splitmix64(id))
///   u    = splitmix64(base + j) >> 11          (53 random bits)
///   x_j  = float(2 * u * 2^-53 - 1)            (in [-1, 1))
/// Never fails; every id has a vector.
class HashEmbedding final : public EmbeddingProvider {
 public:
  explicit HashEmbedding(std::size_t dim = kDefaultHashDim, std::uint64_t seed = 0);

  std::size_t dim() const noexcept override { return dim_; }
  using EmbeddingProvider::lookup;
  void lookup(TokenId id, std::span<float> out) const override;
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

/// Dense vocab_size x dim table, typically an exported LLM input embedding.
class TableEmbedding final : public EmbeddingProvider {
 public:
  TableEmbedding(std::size_t vocab_size, std::size_t dim, std::vector<float> data);

  std::size_t dim() const noexcept override { return dim_; }
  std::size_t vocab_size() const noexcept { return vocab_size_; }
  using EmbeddingProvider::lookup;
  void lookup(TokenId id, std::span<float> out) const override;
  std::span<const float> row(std::size_t id) const {
    return {data_.data() + id * dim_, dim_};
  }

 private:
  std::size_t vocab_size_;
  std::size_t dim_;
  std::vector<float> data_;
};

// Embedding table file: "PGEMB1\0\0", u32 vocab_size, u32 dim, then
// vocab_size * dim little-endian float32, row-major.
inline constexpr std::string_view kTableMagic{"PGEMB1\0\0", 8};

/// Throws kFormat on bad magic or truncation, kIo if the file cannot be read.
std::shared_ptr<const TableEmbedding> load_embedding_table(
    const std::filesystem::path& path);

void write_embedding_table(const std::filesystem::path& path,
                           std::size_t vocab_size, std::size_t dim,
                           std::span<const float> data);

/// "hash:<dim>:<seed>" or "table:<path>". Throws kUsage on malformed specs.
std::shared_ptr<const EmbeddingProvider> make_provider(std::string_view spec);

/// Row l is provider.lookup(stream.ids[l]).
FeatureMatrix embed(const EmbeddingProvider& provider, const TokenStream& stream);

}  // namespace pagewise

#endif  // PAGEWISE_EMBEDDING_HPP_
