// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rpdnn/timeutil.hpp"

namespace rpdnn {

struct UserProfile {
  std::string user_id;
  std::string screen_name;  // empty when the corpus does not carry one
  std::string display_name;
  std::string description_text;
  std::int64_t posts_count = 0;
  std::int64_t listed_count = 0;
  std::int64_t followers = 0;
  std::int64_t followings = 0;
  std::int64_t favourites_count = 0;
  Timestamp account_created_at;
  bool verified = false;
  bool geo_enabled = false;
  bool has_profile_background_image = false;

  bool has_description() const { return !description_text.empty(); }

  friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

struct Tweet {
  std::string tweet_id;
  std::string text;
  Timestamp timestamp;
  UserProfile author;
  std::int64_t retweet_count = 0;
  std::int64_t favorite_count = 0;
  std::vector<std::string> urls;
  bool has_native_media = false;
  std::optional<std::string> in_reply_to;

  friend bool operator==(const Tweet&, const Tweet&) = default;
};

/// A source tweet plus its replies in ascending (timestamp, tweet_id) order.
struct Thread {
  Tweet source;
  std::vector<Tweet> replies;
  int label = 0;  // 1 = rumor
  std::string event;

  const std::string& id() const { return source.tweet_id; }

  friend bool operator==(const Thread&, const Thread&) = default;
};

struct ParseReport {
  /// Non-fatal anomalies, e.g. an account created after one of its tweets.
  std::vector<std::string> warnings;
};

/// Parses one JSONL line. `line_no` only feeds error messages.
Thread parse_thread_line(const std::string& line, std::size_t line_no,
                         ParseReport* report = nullptr);

std::vector<Thread> parse_corpus(std::istream& in, ParseReport* report = nullptr);
std::vector<Thread> parse_corpus(const std::filesystem::path& path,
                                 ParseReport* report = nullptr);

/// Single-line JSON for one thread (no trailing newline).
std::string serialize_thread(const Thread& thread);
void write_corpus(std::ostream& out, const std::vector<Thread>& threads);
void write_corpus(const std::filesystem::path& path, const std::vector<Thread>& threads);

struct CandidateFilter {
  std::size_t min_tokens = 4;
  std::size_t min_context = 5;
  int max_age_days = 7;
};

/// Cuts replies posted more than `max_age_days` after the source, then keeps
/// threads whose preprocessed source has at least `min_tokens` tokens and at
/// least `min_context` remaining replies. Input order is preserved.
std::vector<Thread> filter_candidates(std::vector<Thread> threads,
                                      const CandidateFilter& filter = {});

void sort_replies(Thread& thread);

}  // namespace rpdnn
