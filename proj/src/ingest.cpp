// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "json.hpp"
#include "rpdnn/errors.hpp"
#include "rpdnn/text.hpp"

namespace rpdnn {
namespace {

using nlohmann::json;

struct Context {
  std::size_t line_no;
  std::string tweet_id;  // empty while the id itself is being read

  [[noreturn]] void fail(const std::string& msg) const {
    std::string full = "line " + std::to_string(line_no) + ": " + msg;
    if (!tweet_id.empty()) full += " (tweet " + tweet_id + ")";
    throw DataError(full);
  }
};

const json& require(const json& obj, const char* field, const Context& ctx) {
  const auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) ctx.fail(std::string("missing field ") + field);
  return *it;
}

std::string get_string(const json& obj, const char* field, const Context& ctx,
                       bool required) {
  const auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) {
    if (required) ctx.fail(std::string("missing field ") + field);
    return {};
  }
  if (it->is_string()) return it->get<std::string>();
  // Numeric ids are common in Twitter dumps.
  if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  ctx.fail(std::string("field ") + field + " must be a string");
}

std::int64_t get_count(const json& obj, const char* field, const Context& ctx) {
  const auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return 0;
  if (!it->is_number_integer()) ctx.fail(std::string("field ") + field + " must be an integer");
  const auto v = it->get<std::int64_t>();
  if (v < 0) ctx.fail(std::string("field ") + field + " must be non-negative");
  return v;
}

bool get_bool(const json& obj, const char* field, const Context& ctx) {
  const auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return false;
  if (!it->is_boolean()) ctx.fail(std::string("field ") + field + " must be a boolean");
  return it->get<bool>();
}

Timestamp get_time(const json& obj, const char* field, const Context& ctx) {
  const std::string s = get_string(obj, field, ctx, true);
  const auto ts = parse_rfc3339(s);
  if (!ts) ctx.fail(std::string("field ") + field + " is not an RFC 3339 timestamp: " + s);
  return *ts;
}

UserProfile parse_user(const json& j, const Context& ctx) {
  if (!j.is_object()) ctx.fail("field user must be an object");
  UserProfile u;
  u.user_id = get_string(j, "id", ctx, true);
  u.screen_name = get_string(j, "screen_name", ctx, false);
  u.display_name = get_string(j, "name", ctx, false);
  u.description_text = get_string(j, "description", ctx, false);
  u.posts_count = get_count(j, "posts_count", ctx);
  u.listed_count = get_count(j, "listed_count", ctx);
  u.followers = get_count(j, "followers", ctx);
  u.followings = get_count(j, "followings", ctx);
  u.favourites_count = get_count(j, "favourites_count", ctx);
  u.account_created_at = get_time(j, "created_at", ctx);
  u.verified = get_bool(j, "verified", ctx);
  u.geo_enabled = get_bool(j, "geo_enabled", ctx);
  u.has_profile_background_image = get_bool(j, "has_profile_background_image", ctx);
  return u;
}

Tweet parse_tweet(const json& j, Context ctx, ParseReport* report) {
  if (!j.is_object()) ctx.fail("tweet must be an object");
  Tweet t;
  t.tweet_id = get_string(j, "id", ctx, true);
  ctx.tweet_id = t.tweet_id;
  t.text = get_string(j, "text", ctx, true);
  t.timestamp = get_time(j, "created_at", ctx);
  t.retweet_count = get_count(j, "retweet_count", ctx);
  t.favorite_count = get_count(j, "favorite_count", ctx);
  if (const auto it = j.find("urls"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) ctx.fail("field urls must be an array");
    for (const auto& u : *it) {
      if (!u.is_string()) ctx.fail("field urls must contain strings");
      t.urls.push_back(u.get<std::string>());
    }
  }
  t.has_native_media = get_bool(j, "has_native_media", ctx);
  if (const auto it = j.find("in_reply_to"); it != j.end() && !it->is_null()) {
    t.in_reply_to = get_string(j, "in_reply_to", ctx, false);
  }
  t.author = parse_user(require(j, "user", ctx), ctx);
  if (report && t.author.account_created_at > t.timestamp) {
    report->warnings.push_back("line " + std::to_string(ctx.line_no) + ": tweet " + t.tweet_id +
                               " predates its author's account");
  }
  return t;
}

json user_json(const UserProfile& u) {
  json j = {{"id", u.user_id},
            {"posts_count", u.posts_count},
            {"listed_count", u.listed_count},
            {"followers", u.followers},
            {"followings", u.followings},
            {"favourites_count", u.favourites_count},
            {"created_at", format_rfc3339(u.account_created_at)},
            {"verified", u.verified},
            {"geo_enabled", u.geo_enabled},
            {"has_profile_background_image", u.has_profile_background_image},
            {"description", u.description_text},
            {"name", u.display_name}};
  if (!u.screen_name.empty()) j["screen_name"] = u.screen_name;
  return j;
}

json tweet_json(const Tweet& t) {
  json j = {{"id", t.tweet_id},
            {"text", t.text},
            {"created_at", format_rfc3339(t.timestamp)},
            {"retweet_count", t.retweet_count},
            {"favorite_count", t.favorite_count},
            {"urls", t.urls},
            {"has_native_media", t.has_native_media},
            {"user", user_json(t.author)}};
  if (t.in_reply_to) j["in_reply_to"] = *t.in_reply_to;
  return j;
}

}  // namespace

void sort_replies(Thread& thread) {
  std::stable_sort(thread.replies.begin(), thread.replies.end(),
                   [](const Tweet& a, const Tweet& b) {
                     if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                     return a.tweet_id < b.tweet_id;
                   });
}

Thread parse_thread_line(const std::string& line, std::size_t line_no, ParseReport* report) {
  Context ctx{line_no, {}};
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    ctx.fail(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) ctx.fail("thread must be a JSON object");

  Thread th;
  th.source = parse_tweet(require(j, "source", ctx), ctx, report);
  ctx.tweet_id = th.source.tweet_id;

  const json& label = require(j, "label", ctx);
  if (!label.is_number_integer() || (label.get<int>() != 0 && label.get<int>() != 1)) {
    ctx.fail("field label must be 0 or 1");
  }
  th.label = label.get<int>();
  th.event = get_string(j, "event", ctx, true);

  const json& replies = require(j, "replies", ctx);
  if (!replies.is_array()) ctx.fail("field replies must be an array");
  std::set<std::string> seen{th.source.tweet_id};
  for (const auto& r : replies) {
    Tweet t = parse_tweet(r, Context{line_no, {}}, report);
    if (!seen.insert(t.tweet_id).second) ctx.fail("duplicate tweet id " + t.tweet_id);
    if (t.timestamp < th.source.timestamp) {
      Context{line_no, t.tweet_id}.fail("reply precedes its source tweet");
    }
    th.replies.push_back(std::move(t));
  }
  sort_replies(th);
  return th;
}

std::vector<Thread> parse_corpus(std::istream& in, ParseReport* report) {
  std::vector<Thread> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_thread_line(line, line_no, report));
  }
  return out;
}

std::vector<Thread> parse_corpus(const std::filesystem::path& path, ParseReport* report) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus " + path.string());
  return parse_corpus(in, report);
}

std::string serialize_thread(const Thread& thread) {
  json j;
  j["source"] = tweet_json(thread.source);
  j["replies"] = json::array();
  for (const auto& r : thread.replies) j["replies"].push_back(tweet_json(r));
  j["label"] = thread.label;
  j["event"] = thread.event;
  return j.dump();
}

void write_corpus(std::ostream& out, const std::vector<Thread>& threads) {
  for (const auto& t : threads) out << serialize_thread(t) << '\n';
}

void write_corpus(const std::filesystem::path& path, const std::vector<Thread>& threads) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_corpus(out, threads);
}

std::vector<Thread> filter_candidates(std::vector<Thread> threads,
                                      const CandidateFilter& filter) {
  std::vector<Thread> kept;
  const std::int64_t window = static_cast<std::int64_t>(filter.max_age_days) * kMillisPerDay;
  for (auto& th : threads) {
    const Timestamp cutoff{th.source.timestamp.millis + window};
    std::erase_if(th.replies, [&](const Tweet& r) { return r.timestamp > cutoff; });
    if (th.replies.size() < filter.min_context) continue;
    if (preprocess_text(th.source.text).tokens.size() < filter.min_tokens) continue;
    kept.push_back(std::move(th));
  }
  return kept;
}

}  // namespace rpdnn
