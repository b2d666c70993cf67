// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rpdnn/ingest.hpp"
#include "rpdnn/text.hpp"

namespace rpdnn {

/// Precomputed per-tweet content vectors, e.g. averaged language-model word
/// vectors produced upstream.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> entries;

  const std::vector<double>* find(const std::string& tweet_id) const;
};

/// Text format: "dim N" header, then "tweet_id v1 ... vN" per line.
EmbeddingTable load_table(std::istream& in, std::size_t expected_dim);
EmbeddingTable load_table(const std::filesystem::path& path, std::size_t expected_dim);
void save_table(std::ostream& out, const EmbeddingTable& table);

struct HashEmbedderConfig {
  std::size_t dim = 32;
  std::uint64_t seed = 0;
};

/// Mean of per-token pseudo-random N(0,1) vectors keyed on (seed, token),
/// L2-normalized. Empty input gives the zero vector. Tokens are summed in
/// sorted order, so any permutation of the input yields identical bits.
std::vector<double> hash_embed(const TokenizedText& text, const HashEmbedderConfig& cfg);

/// Table lookup first, then the hash embedder over the preprocessed text.
std::vector<double> lookup_or_embed(const Tweet& tweet, const EmbeddingTable* table,
                                    const HashEmbedderConfig* cfg);

/// Bundles the two providers with a fixed output dimension.
class EmbeddingProvider {
 public:
  EmbeddingProvider(std::optional<EmbeddingTable> table, std::optional<HashEmbedderConfig> hash);

  static EmbeddingProvider hashing(std::size_t dim, std::uint64_t seed);

  std::size_t dim() const { return dim_; }
  std::vector<double> operator()(const Tweet& tweet) const;

 private:
  std::optional<EmbeddingTable> table_;
  std::optional<HashEmbedderConfig> hash_;
  std::size_t dim_ = 0;
};

}  // namespace rpdnn
