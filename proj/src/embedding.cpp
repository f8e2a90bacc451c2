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

#include "pagewise/embedding.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "pagewise/error.hpp"

namespace pagewise {
namespace {

std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF),
                         static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF),
                         static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes, 4);
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kUsage, "embedding: invalid " + std::string(what) +
                                       " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

HashEmbedding::HashEmbedding(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
  if (dim_ == 0) throw Error(ErrorCode::kConfig, "embedding dim must be >= 1");
}

void HashEmbedding::lookup(TokenId id, std::span<float> out) const {
  const std::uint64_t base =
      splitmix64(seed_ ^ splitmix64(static_cast<std::uint64_t>(id)));
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  for (std::size_t j = 0; j < dim_; ++j) {
    const std::uint64_t bits = splitmix64(base + j) >> 11;
    out[j] = static_cast<float>(2.0 * static_cast<double>(bits) * kScale - 1.0);
  }
}

TableEmbedding::TableEmbedding(std::size_t vocab_size, std::size_t dim,
                               std::vector<float> data)
    : vocab_size_(vocab_size), dim_(dim), data_(std::move(data)) {
  if (dim_ == 0) throw Error(ErrorCode::kFormat, "embedding table dim is 0");
  if (data_.size() != vocab_size_ * dim_) {
    throw Error(ErrorCode::kFormat, "embedding table data size mismatch");
  }
}

void TableEmbedding::lookup(TokenId id, std::span<float> out) const {
  if (id < 0 || static_cast<std::uint64_t>(id) >= vocab_size_) {
    throw Error(ErrorCode::kOutOfVocabulary,
                "token id " + std::to_string(id) + " outside vocabulary of " +
                    std::to_string(vocab_size_));
  }
  const auto src = row(static_cast<std::size_t>(id));
  std::copy(src.begin(), src.end(), out.begin());
}

std::shared_ptr<const TableEmbedding> load_embedding_table(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open embedding table " + path.string());
  }
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  constexpr std::size_t kHeader = 16;
  if (bytes.size() < kHeader) {
    throw Error(ErrorCode::kFormat, "embedding table truncated at byte " +
                                        std::to_string(bytes.size()) +
                                        " (header needs 16)");
  }
  if (std::memcmp(bytes.data(), kTableMagic.data(), kTableMagic.size()) != 0) {
    throw Error(ErrorCode::kFormat, "embedding table has bad magic at byte 0");
  }
  const std::size_t vocab = read_u32_le(bytes.data() + 8);
  const std::size_t dim = read_u32_le(bytes.data() + 12);
  if (dim == 0) {
    throw Error(ErrorCode::kFormat, "embedding table dim is 0 at byte 12");
  }
  const std::size_t expected = kHeader + vocab * dim * sizeof(float);
  if (bytes.size() < expected) {
    throw Error(ErrorCode::kFormat,
                "embedding table truncated at byte " + std::to_string(bytes.size()) +
                    " (expected " + std::to_string(expected) + ")");
  }
  std::vector<float> data(vocab * dim);
  const unsigned char* src = bytes.data() + kHeader;
  for (std::size_t i = 0; i < data.size(); ++i, src += 4) {
    data[i] = std::bit_cast<float>(read_u32_le(src));
  }
  return std::make_shared<const TableEmbedding>(vocab, dim, std::move(data));
}

void write_embedding_table(const std::filesystem::path& path,
                           std::size_t vocab_size, std::size_t dim,
                           std::span<const float> data) {
  if (data.size() != vocab_size * dim) {
    throw Error(ErrorCode::kContract, "embedding table data size mismatch");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(kTableMagic.data(), static_cast<std::streamsize>(kTableMagic.size()));
  write_u32_le(out, static_cast<std::uint32_t>(vocab_size));
  write_u32_le(out, static_cast<std::uint32_t>(dim));
  for (const float f : data) write_u32_le(out, std::bit_cast<std::uint32_t>(f));
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

std::shared_ptr<const EmbeddingProvider> make_provider(std::string_view spec) {
  if (spec.starts_with("table:")) {
    return load_embedding_table(std::filesystem::path(std::string(spec.substr(6))));
  }
  if (spec.starts_with("hash")) {
    std::size_t dim = kDefaultHashDim;
    std::uint64_t seed = 0;
    std::string_view rest = spec.substr(4);
    if (!rest.empty()) {
      if (rest.front() != ':') {
        throw Error(ErrorCode::kUsage, "embedding: expected hash:<dim>:<seed>");
      }
      rest.remove_prefix(1);
      const auto colon = rest.find(':');
      dim = parse_number<std::size_t>(rest.substr(0, colon), "dim");
      if (colon != std::string_view::npos) {
        seed = parse_number<std::uint64_t>(rest.substr(colon + 1), "seed");
      }
    }
    if (dim == 0) throw Error(ErrorCode::kUsage, "embedding: dim must be >= 1");
    return std::make_shared<const HashEmbedding>(dim, seed);
  }
  throw Error(ErrorCode::kUsage,
              "embedding: expected hash:<dim>:<seed> or table:<path>, got '" +
                  std::string(spec) + "'");
}

FeatureMatrix embed(const EmbeddingProvider& provider, const TokenStream& stream) {
  FeatureMatrix h(stream.size(), provider.dim());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    provider.lookup(stream.ids[i], h.row(i));
  }
  return h;
}

}  // namespace pagewise
