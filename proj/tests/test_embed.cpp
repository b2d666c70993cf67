#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "rpdnn/embed.hpp"
#include "rpdnn/errors.hpp"

using namespace rpdnn;

namespace {

double norm(const std::vector<double>& v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

Tweet tweet_with(const std::string& id, const std::string& text) {
  Tweet t;
  t.tweet_id = id;
  t.text = text;
  return t;
}

}  // namespace

TEST_CASE("hash embedder is unit norm and deterministic") {
  const HashEmbedderConfig cfg{16, 5};
  const auto a = hash_embed(preprocess_text("police confirm shooting"), cfg);
  CHECK(a.size() == 16);
  CHECK(norm(a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hash_embed(preprocess_text("police confirm shooting"), cfg) == a);
  CHECK(hash_embed(preprocess_text("police confirm shooting"), HashEmbedderConfig{16, 6}) != a);
}

TEST_CASE("token order does not change a single bit") {
  const HashEmbedderConfig cfg{32, 1};
  CHECK(hash_embed(preprocess_text("a b c d e"), cfg) ==
        hash_embed(preprocess_text("e d c b a"), cfg));
}

TEST_CASE("empty text embeds to zero") {
  const auto v = hash_embed(preprocess_text("@x http://y"), HashEmbedderConfig{8, 0});
  CHECK(v == std::vector<double>(8, 0.0));
}

TEST_CASE("table format round-trip and lookup order") {
  std::istringstream in("dim 3\nb 0.5 -1 2\na 1e-3 0 4.25\n");
  const EmbeddingTable t = load_table(in, 3);
  REQUIRE(t.find("a"));
  CHECK(*t.find("a") == std::vector<double>{1e-3, 0.0, 4.25});
  CHECK(t.find("zzz") == nullptr);
  std::ostringstream out;
  save_table(out, t);
  CHECK(out.str() == "dim 3\na 0.001 0 4.25\nb 0.5 -1 2\n");
  std::istringstream again(out.str());
  CHECK(load_table(again, 3).entries == t.entries);
}

TEST_CASE("table errors") {
  std::istringstream wrong_dim("dim 4\na 1 2 3 4\n");
  CHECK_THROWS_AS(load_table(wrong_dim, 3), DataError);
  std::istringstream short_row("dim 2\na 1\n");
  try {
    load_table(short_row, 2);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream dup("dim 1\na 1\na 2\n");
  CHECK_THROWS_AS(load_table(dup, 1), DataError);
  std::istringstream no_header("a 1 2\n");
  CHECK_THROWS_AS(load_table(no_header, 2), DataError);
}

TEST_CASE("provider prefers the table and falls back to hashing") {
  EmbeddingTable t;
  t.dim = 2;
  t.entries["known"] = {3.0, 4.0};
  const EmbeddingProvider table_only(t, std::nullopt);
  CHECK(table_only(tweet_with("known", "x")) == std::vector<double>{3.0, 4.0});
  CHECK_THROWS_AS(table_only(tweet_with("other", "x")), DataError);

  const EmbeddingProvider both(t, HashEmbedderConfig{2, 9});
  CHECK(both(tweet_with("known", "x")) == std::vector<double>{3.0, 4.0});
  CHECK(both(tweet_with("other", "some words")) ==
        hash_embed(preprocess_text("some words"), HashEmbedderConfig{2, 9}));
  CHECK_THROWS_AS(EmbeddingProvider(t, HashEmbedderConfig{3, 0}), ConfigError);
}
