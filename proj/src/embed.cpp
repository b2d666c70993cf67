// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/embed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "rpdnn/errors.hpp"
#include "rpdnn/rng.hpp"

namespace rpdnn {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool parse_double(std::string_view s, double& out) {
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

}  // namespace

const std::vector<double>* EmbeddingTable::find(const std::string& tweet_id) const {
  const auto it = entries.find(tweet_id);
  return it == entries.end() ? nullptr : &it->second;
}

EmbeddingTable load_table(std::istream& in, std::size_t expected_dim) {
  EmbeddingTable table;
  std::string line;
  if (!std::getline(in, line)) throw DataError("embedding table: missing \"dim N\" header");
  {
    std::istringstream hs(line);
    std::string kw;
    long long dim = -1;
    if (!(hs >> kw >> dim) || kw != "dim" || dim < 1) {
      throw DataError("embedding table: line 1: expected \"dim N\"");
    }
    table.dim = static_cast<std::size_t>(dim);
  }
  if (expected_dim != 0 && table.dim != expected_dim) {
    throw DataError("embedding table: line 1: dim " + std::to_string(table.dim) +
                    " but expected " + std::to_string(expected_dim));
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(' ') == std::string::npos) continue;
    std::istringstream ls(line);
    std::string id;
    ls >> id;
    std::vector<double> values;
    values.reserve(table.dim);
    std::string tok;
    while (ls >> tok) {
      double v;
      if (!parse_double(tok, v)) {
        throw DataError("embedding table: line " + std::to_string(line_no) +
                        ": bad value '" + tok + "'");
      }
      values.push_back(v);
    }
    if (values.size() != table.dim) {
      throw DataError("embedding table: line " + std::to_string(line_no) + ": " +
                      std::to_string(values.size()) + " values, expected " +
                      std::to_string(table.dim));
    }
    if (!table.entries.emplace(id, std::move(values)).second) {
      throw DataError("embedding table: line " + std::to_string(line_no) +
                      ": duplicate tweet id " + id);
    }
  }
  return table;
}

EmbeddingTable load_table(const std::filesystem::path& path, std::size_t expected_dim) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding table " + path.string());
  return load_table(in, expected_dim);
}

void save_table(std::ostream& out, const EmbeddingTable& table) {
  std::vector<const std::string*> ids;
  for (const auto& [id, _] : table.entries) ids.push_back(&id);
  std::sort(ids.begin(), ids.end(), [](auto* a, auto* b) { return *a < *b; });
  out << "dim " << table.dim << '\n';
  char buf[32];
  for (const auto* id : ids) {
    out << *id;
    for (double v : table.entries.at(*id)) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

std::vector<double> hash_embed(const TokenizedText& text, const HashEmbedderConfig& cfg) {
  if (cfg.dim == 0) throw ConfigError("hash embedder: dim must be >= 1");
  std::vector<double> out(cfg.dim, 0.0);
  if (text.tokens.empty()) return out;

  std::vector<std::string> sorted = text.tokens;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& tok : sorted) {
    std::mt19937_64 gen(derive_seed(cfg.seed, fnv1a(tok)));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& x : out) x += normal(gen);
  }
  const auto count = static_cast<double>(sorted.size());
  double norm2 = 0.0;
  for (auto& x : out) {
    x /= count;
    norm2 += x * x;
  }
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : out) x *= inv;
  }
  return out;
}

std::vector<double> lookup_or_embed(const Tweet& tweet, const EmbeddingTable* table,
                                    const HashEmbedderConfig* cfg) {
  if (table == nullptr && cfg == nullptr) {
    throw ConfigError("tweet " + tweet.tweet_id + ": no embedding provider configured");
  }
  if (table) {
    if (const auto* v = table->find(tweet.tweet_id)) return *v;
    if (!cfg) throw DataError("tweet " + tweet.tweet_id + ": not in embedding table");
  }
  return hash_embed(preprocess_text(tweet.text), *cfg);
}

EmbeddingProvider::EmbeddingProvider(std::optional<EmbeddingTable> table,
                                     std::optional<HashEmbedderConfig> hash)
    : table_(std::move(table)), hash_(hash) {
  if (!table_ && !hash_) throw ConfigError("embedding provider: no table and no hash embedder");
  if (table_ && hash_ && table_->dim != hash_->dim) {
    throw ConfigError("embedding provider: table dim " + std::to_string(table_->dim) +
                      " differs from hash dim " + std::to_string(hash_->dim));
  }
  dim_ = table_ ? table_->dim : hash_->dim;
}

EmbeddingProvider EmbeddingProvider::hashing(std::size_t dim, std::uint64_t seed) {
  return EmbeddingProvider(std::nullopt, HashEmbedderConfig{dim, seed});
}

std::vector<double> EmbeddingProvider::operator()(const Tweet& tweet) const {
  return lookup_or_embed(tweet, table_ ? &*table_ : nullptr, hash_ ? &*hash_ : nullptr);
}

}  // namespace rpdnn
