// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/synth.hpp"

#include <array>
#include <cstdio>
#include <string>

#include "rpdnn/errors.hpp"
#include "rpdnn/rng.hpp"

namespace rpdnn {
namespace {

constexpr std::array<std::string_view, 40> kShared = {
    "the",    "people", "city",   "today",  "police", "news",   "report", "said",
    "street", "where",  "video",  "after",  "over",   "more",   "just",   "here",
    "think",  "going",  "time",   "world",  "know",   "still",  "right",  "again",
    "night",  "look",   "first",  "group",  "saw",    "told",   "down",   "live",
    "near",   "back",   "watch",  "story",  "update", "scene",  "crowd",  "call",
};
constexpr std::array<std::string_view, 8> kRumorWords = {
    "fake", "hoax", "unverified", "doubt", "really", "rumour", "lies", "source",
};
constexpr std::array<std::string_view, 8> kPlainWords = {
    "confirmed", "thanks", "official", "sad", "prayers", "statement", "safe", "indeed",
};
constexpr std::array<std::string_view, 3> kRumorMarkers = {"breaking", "unconfirmed", "reportedly"};
constexpr std::array<std::string_view, 3> kPlainMarkers = {"announced", "officially", "today's"};

// 2016-01-01T00:00:00Z
constexpr std::int64_t kEpoch = 1451606400000LL;

std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng.next() % n); }

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(hi - lo + 1));
}

UserProfile make_user(Rng& rng, const std::string& id, std::int64_t at, bool low_rep) {
  UserProfile u;
  u.user_id = id;
  u.screen_name = "user" + id;
  u.display_name = "User " + id;
  const std::int64_t days = low_rep ? uniform_int(rng, 2, 60) : uniform_int(rng, 400, 3000);
  u.account_created_at.millis = at - days * kMillisPerDay;
  if (low_rep) {
    u.posts_count = uniform_int(rng, 5, 300);
    u.listed_count = uniform_int(rng, 0, 2);
    u.followers = uniform_int(rng, 1, 80);
    u.followings = uniform_int(rng, 100, 2000);
    u.favourites_count = uniform_int(rng, 0, 50);
    u.verified = false;
  } else {
    u.posts_count = uniform_int(rng, 2000, 60000);
    u.listed_count = uniform_int(rng, 20, 900);
    u.followers = uniform_int(rng, 2000, 90000);
    u.followings = uniform_int(rng, 50, 800);
    u.favourites_count = uniform_int(rng, 500, 20000);
    u.verified = rng.uniform() < 0.3;
  }
  u.geo_enabled = rng.uniform() < 0.4;
  u.has_profile_background_image = rng.uniform() < 0.5;
  if (rng.uniform() < 0.8) u.description_text = "writes about news and life";
  return u;
}

std::string shared_sentence(Rng& rng, std::size_t words) {
  std::string s;
  for (std::size_t w = 0; w < words; ++w) {
    if (w) s += ' ';
    s += kShared[pick(rng, kShared.size())];
  }
  return s;
}

}  // namespace

std::string_view signal_name(Signal s) {
  switch (s) {
    case Signal::cc: return "cc";
    case Signal::cm: return "cm";
    case Signal::sc: return "sc";
    case Signal::mixed: return "mixed";
  }
  return "?";
}

Signal parse_signal(std::string_view name) {
  for (Signal s : {Signal::cc, Signal::cm, Signal::sc, Signal::mixed}) {
    if (signal_name(s) == name) return s;
  }
  throw ConfigError("unknown signal '" + std::string(name) + "' (expected cc, cm, sc or mixed)");
}

std::vector<Thread> synth_corpus(std::size_t n, Signal signal, std::uint64_t seed,
                                 const SynthOptions& opts) {
  if (opts.n_events == 0) throw ConfigError("synth: n_events must be >= 1");
  if (opts.min_replies < 5 || opts.max_replies < opts.min_replies) {
    throw ConfigError("synth: need 5 <= min_replies <= max_replies");
  }
  const bool sig_cc = signal == Signal::cc || signal == Signal::mixed;
  const bool sig_cm = signal == Signal::cm || signal == Signal::mixed;
  const bool sig_sc = signal == Signal::sc || signal == Signal::mixed;

  std::vector<Thread> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Separate streams keep text, metadata and structure independent, so a
    // signal in one stream cannot leak into the draws of another.
    Rng text_rng(derive_seed(seed, 3 * i));
    Rng meta_rng(derive_seed(seed, 3 * i + 1));
    Rng shape_rng(derive_seed(seed, 3 * i + 2));
    const bool rumor = i % 2 == 0;
    const auto n_replies = static_cast<std::size_t>(
        uniform_int(shape_rng, static_cast<std::int64_t>(opts.min_replies),
                    static_cast<std::int64_t>(opts.max_replies)));

    char id_buf[32];
    std::snprintf(id_buf, sizeof id_buf, "t%06zu", i);
    const std::string tid = id_buf;
    char ev_buf[32];
    std::snprintf(ev_buf, sizeof ev_buf, "event%02zu", (i / 2) % opts.n_events + 1);

    Thread th;
    th.label = rumor ? 1 : 0;
    th.event = ev_buf;
    const std::int64_t t0 = kEpoch + static_cast<std::int64_t>(i) * 3600000LL;

    Tweet& src = th.source;
    src.tweet_id = tid;
    src.timestamp.millis = t0;
    src.text = shared_sentence(text_rng, 8);
    if (sig_sc) {
      const auto& markers = rumor ? kRumorMarkers : kPlainMarkers;
      src.text = std::string(markers[pick(shape_rng, markers.size())]) + " " + src.text + " " +
                 std::string(markers[pick(shape_rng, markers.size())]);
    }
    src.author = make_user(meta_rng, "9" + tid.substr(1), t0, false);
    src.retweet_count = uniform_int(meta_rng, 0, 500);
    src.favorite_count = uniform_int(meta_rng, 0, 500);

    std::int64_t at = t0;
    for (std::size_t r = 0; r < n_replies; ++r) {
      Tweet rep;
      char rid[48];
      std::snprintf(rid, sizeof rid, "%sr%03zu", tid.c_str(), r);
      rep.tweet_id = rid;
      rep.in_reply_to = tid;

      // Gaps stay well inside the 7-day window even at max_replies.
      const bool fast = sig_cm ? rumor : meta_rng.uniform() < 0.5;
      const double gap_min = fast ? uniform(meta_rng, 0.5, 20.0) : uniform(meta_rng, 60.0, 400.0);
      at += static_cast<std::int64_t>(gap_min * static_cast<double>(kMillisPerMinute));
      rep.timestamp.millis = at;

      const bool low_rep = sig_cm ? rumor : meta_rng.uniform() < 0.5;
      rep.author = make_user(meta_rng, std::to_string(100000 + i * 100 + r), at, low_rep);
      rep.retweet_count = uniform_int(meta_rng, 0, 20);
      rep.favorite_count = uniform_int(meta_rng, 0, 40);
      if (meta_rng.uniform() < 0.2) rep.urls.push_back("http://example.com/" + std::string(rid));

      std::string text = "@" + src.author.screen_name + " " + shared_sentence(text_rng, 6);
      if (sig_cc) {
        const auto& vocab = rumor ? kRumorWords : kPlainWords;
        for (int k = 0; k < 3; ++k) text += " " + std::string(vocab[pick(text_rng, vocab.size())]);
      }
      const double q_rate = sig_cm ? (rumor ? 0.85 : 0.05) : 0.3;
      if (meta_rng.uniform() < q_rate) text += "?";
      rep.text = std::move(text);
      th.replies.push_back(std::move(rep));
    }
    out.push_back(std::move(th));
  }
  return out;
}

}  // namespace rpdnn
