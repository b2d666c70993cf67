#include <set>
#include <sstream>

#include "doctest.h"
#include "rpdnn/errors.hpp"
#include "rpdnn/synth.hpp"
#include "rpdnn/text.hpp"

using namespace rpdnn;

namespace {

std::vector<std::vector<std::string>> reply_tokens(const std::vector<Thread>& threads) {
  std::vector<std::vector<std::string>> out;
  for (const auto& th : threads) {
    for (const auto& r : th.replies) out.push_back(preprocess_text(r.text).tokens);
  }
  return out;
}

std::set<std::string> vocabulary(const std::vector<Thread>& threads, int label) {
  std::set<std::string> out;
  for (const auto& th : threads) {
    if (th.label != label) continue;
    for (const auto& r : th.replies) {
      for (auto& t : preprocess_text(r.text).tokens) out.insert(t);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("balanced labels, events and passing the candidate filter") {
  for (Signal s : {Signal::cc, Signal::cm, Signal::sc, Signal::mixed}) {
    const auto threads = synth_corpus(64, s, 7);
    REQUIRE(threads.size() == 64);
    std::size_t rumors = 0;
    std::set<std::string> events, ids;
    for (const auto& th : threads) {
      rumors += th.label == 1;
      events.insert(th.event);
      ids.insert(th.id());
      CHECK(th.replies.size() >= 6);
      CHECK(th.replies.size() <= 20);
      for (const auto& r : th.replies) {
        CHECK(r.timestamp >= th.source.timestamp);
        CHECK(r.in_reply_to == th.id());
        ids.insert(r.tweet_id);
      }
    }
    CHECK(rumors == 32);
    CHECK(events.size() == 4);
    CHECK(filter_candidates(threads).size() == 64);
    std::size_t total = 64;
    for (const auto& th : threads) total += th.replies.size();
    CHECK(ids.size() == total);
    CHECK(threads.front().label == 1);
  }
}

TEST_CASE("same seed, same corpus") {
  CHECK(synth_corpus(20, Signal::mixed, 3) == synth_corpus(20, Signal::mixed, 3));
  CHECK(synth_corpus(20, Signal::mixed, 3) != synth_corpus(20, Signal::mixed, 4));
}

TEST_CASE("metadata and source signals leave the reply text alone") {
  const auto cm = synth_corpus(64, Signal::cm, 9);
  const auto sc = synth_corpus(64, Signal::sc, 9);
  CHECK(reply_tokens(cm) == reply_tokens(sc));
  CHECK(vocabulary(sc, 1) == vocabulary(sc, 0));
  const auto cc = synth_corpus(64, Signal::cc, 9);
  CHECK(vocabulary(cc, 1) != vocabulary(cc, 0));
}

TEST_CASE("survives serialization") {
  const auto threads = synth_corpus(6, Signal::mixed, 1);
  std::ostringstream out;
  write_corpus(out, threads);
  std::istringstream in(out.str());
  CHECK(parse_corpus(in) == threads);
}

TEST_CASE("signal names") {
  for (Signal s : {Signal::cc, Signal::cm, Signal::sc, Signal::mixed}) {
    CHECK(parse_signal(signal_name(s)) == s);
  }
  CHECK_THROWS_AS(parse_signal("none"), ConfigError);
}
