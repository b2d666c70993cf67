#include "doctest.h"
#include "rpdnn/text.hpp"

using namespace rpdnn;
using V = std::vector<std::string>;

TEST_CASE("lowercase, mentions and urls") {
  const auto t = preprocess_text("BREAKING: @BBCNews reports http://t.co/abc shooting in Paris!!");
  CHECK(t.tokens == V{"breaking", "reports", "shooting", "in", "paris"});
}

TEST_CASE("diacritics are folded") {
  CHECK(preprocess_text("Café NAÏVE résumé").tokens == V{"cafe", "naive", "resume"});
  // Compatibility decomposition maps the ligature to plain letters.
  CHECK(preprocess_text("ﬁnal").tokens == V{"final"});
}

TEST_CASE("punctuation trimmed at token ends only") {
  CHECK(preprocess_text("\"what?!\" isn't (really) -- ok...").tokens ==
        V{"what", "isn't", "really", "ok"});
}

TEST_CASE("empty and all-noise input") {
  CHECK(preprocess_text("").tokens.empty());
  CHECK(preprocess_text("  @a @b https://x.y  !!! ").tokens.empty());
}

TEST_CASE("original length counts code points") {
  CHECK(preprocess_text("héllo").original_length == 5);
  CHECK(codepoint_length("日本語") == 3);
  CHECK(codepoint_length("") == 0);
}

TEST_CASE("whitespace split and join") {
  CHECK(split_whitespace("  a\tb\n c  ") == V{"a", "b", "c"});
  CHECK(join_tokens({"a", "b"}) == "a b");
  CHECK(join_tokens({}) == "");
}

TEST_CASE("invalid utf-8 does not throw") {
  const std::string bad = std::string("ok ") + char(0xff) + " fine";
  const auto t = preprocess_text(bad);
  CHECK(t.tokens.front() == "ok");
  CHECK(t.tokens.back() == "fine");
}
