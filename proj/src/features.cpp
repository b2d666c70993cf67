// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rpdnn/errors.hpp"
#include "rpdnn/text.hpp"

namespace rpdnn {
namespace {

double to_double(std::int64_t v) { return static_cast<double>(v); }

std::string ascii_lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Handle of the source author for reply word counting. Falls back to the
// user id when the corpus carries no screen name.
std::string source_handle(const UserProfile& author) {
  return ascii_lower("@" + (author.screen_name.empty() ? author.user_id : author.screen_name));
}

std::string trim_trailing_punct(std::string token) {
  while (!token.empty()) {
    const auto c = static_cast<unsigned char>(token.back());
    if (c >= 0x80 || std::isalnum(c) || c == '_') break;
    token.pop_back();
  }
  return token;
}

}  // namespace

std::size_t feature_index(std::string_view name) {
  const auto it = std::find(kFeatureNames.begin(), kFeatureNames.end(), name);
  return static_cast<std::size_t>(it - kFeatureNames.begin());
}

MetadataVector extract_features(const Tweet& reply, const Tweet& source) {
  if (reply.author.user_id.empty()) {
    throw DataError("tweet " + reply.tweet_id + ": missing user profile");
  }
  if (source.author.user_id.empty()) {
    throw DataError("tweet " + source.tweet_id + ": missing user profile");
  }
  const UserProfile& user = reply.author;
  MetadataVector v;
  v.tweet_id = reply.tweet_id;
  auto set = [&v](Feature f, double x) { v.values[static_cast<std::size_t>(f)] = x; };

  const std::int64_t age_ms = reply.timestamp.millis - user.account_created_at.millis;
  const double age_days = std::max(
      1.0, std::floor(static_cast<double>(age_ms) / static_cast<double>(kMillisPerDay)));

  const double followers = to_double(user.followers);
  const double followings = to_double(user.followings);

  set(Feature::posts_count, to_double(user.posts_count));
  set(Feature::listed_count, to_double(user.listed_count));
  set(Feature::followers, followers);
  set(Feature::followings, followings);
  set(Feature::follow_ratio, followers / (followings + 1.0));
  set(Feature::follow_ratio_v2, followers / (followings + followers + 1.0));
  set(Feature::user_favourites, to_double(user.favourites_count));
  set(Feature::account_age, age_days);
  set(Feature::is_verified, user.verified ? 1.0 : 0.0);
  set(Feature::engagement, to_double(user.posts_count) / (age_days + 1.0));
  set(Feature::following_rate, followings / (age_days + 1.0));
  set(Feature::favourites_rate, to_double(user.favourites_count) / (age_days + 1.0));
  set(Feature::geo_enabled, user.geo_enabled ? 1.0 : 0.0);
  set(Feature::description_length,
      static_cast<double>(split_whitespace(user.description_text).size()));
  set(Feature::profile_name_length, static_cast<double>(codepoint_length(user.display_name)));
  set(Feature::is_source_user, user.user_id == source.author.user_id ? 1.0 : 0.0);

  set(Feature::retweet_count, to_double(reply.retweet_count));
  set(Feature::favorite_count, to_double(reply.favorite_count));
  set(Feature::has_question, reply.text.find('?') != std::string::npos ? 1.0 : 0.0);
  set(Feature::is_duplicate,
      preprocess_text(reply.text).tokens == preprocess_text(source.text).tokens ? 1.0 : 0.0);
  set(Feature::has_image, user.has_profile_background_image ? 1.0 : 0.0);
  set(Feature::has_url, reply.urls.empty() ? 0.0 : 1.0);
  set(Feature::url_count, static_cast<double>(reply.urls.size()));
  set(Feature::has_native_media, reply.has_native_media ? 1.0 : 0.0);

  const std::string handle = source_handle(source.author);
  std::size_t words = 0;
  for (const auto& w : split_whitespace(reply.text)) {
    if (trim_trailing_punct(ascii_lower(w)) != handle) ++words;
  }
  set(Feature::content_length, static_cast<double>(words));
  set(Feature::response_time_decay,
      static_cast<double>(reply.timestamp.millis - source.timestamp.millis) /
          static_cast<double>(kMillisPerMinute));
  set(Feature::has_profile_description, user.has_description() ? 1.0 : 0.0);

  for (std::size_t i = 0; i < kMetaDim; ++i) {
    if (!std::isfinite(v.values[i])) {
      throw DataError("tweet " + reply.tweet_id + ": non-finite feature " +
                      std::string(kFeatureNames[i]));
    }
  }
  return v;
}

FeatureStats compute_stats(std::span<const MetadataVector> vectors) {
  if (vectors.empty()) throw DataError("compute_stats: no feature vectors");
  FeatureStats stats;
  stats.n = vectors.size();
  const auto n = static_cast<double>(vectors.size());
  for (std::size_t f = 0; f < kMetaDim; ++f) {
    FeatureStat& s = stats.features[f];
    s.min = s.max = vectors.front().values[f];
    double sum = 0.0;
    for (const auto& v : vectors) {
      sum += v.values[f];
      s.min = std::min(s.min, v.values[f]);
      s.max = std::max(s.max, v.values[f]);
    }
    if (s.min == s.max) {
      s.mean = s.min;
      s.std = 0.0;
      continue;
    }
    s.mean = std::clamp(sum / n, s.min, s.max);
    double sq = 0.0;
    for (const auto& v : vectors) {
      const double d = v.values[f] - s.mean;
      sq += d * d;
    }
    s.std = std::sqrt(sq / n);
  }
  return stats;
}

FeatureStats compute_thread_stats(std::span<const Thread> threads) {
  std::vector<MetadataVector> vectors;
  for (const auto& th : threads) {
    for (const auto& r : th.replies) vectors.push_back(extract_features(r, th.source));
  }
  return compute_stats(vectors);
}

MetadataVector normalize(const MetadataVector& v, const FeatureStats& stats) {
  MetadataVector out;
  out.tweet_id = v.tweet_id;
  for (std::size_t f = 0; f < kMetaDim; ++f) {
    const FeatureStat& s = stats.features[f];
    out.values[f] = s.std > 0.0 ? (v.values[f] - s.mean) / s.std : 0.0;
  }
  return out;
}

std::string stats_to_json(const FeatureStats& stats) {
  nlohmann::ordered_json j;
  j["n"] = stats.n;
  j["features"] = nlohmann::ordered_json::array();
  for (std::size_t f = 0; f < kMetaDim; ++f) {
    const auto& s = stats.features[f];
    nlohmann::ordered_json row;
    row["name"] = std::string(kFeatureNames[f]);
    row["mean"] = s.mean;
    row["std"] = s.std;
    row["min"] = s.min;
    row["max"] = s.max;
    j["features"].push_back(row);
  }
  return j.dump(2) + "\n";
}

FeatureStats stats_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("stats file: malformed JSON: ") + e.what());
  }
  FeatureStats stats;
  try {
    stats.n = j.at("n").get<std::size_t>();
    const auto& rows = j.at("features");
    if (!rows.is_array() || rows.size() != kMetaDim) {
      throw DataError("stats file: expected exactly 27 features");
    }
    std::array<bool, kMetaDim> seen{};
    for (const auto& row : rows) {
      const auto name = row.at("name").get<std::string>();
      const std::size_t idx = feature_index(name);
      if (idx == kMetaDim) throw DataError("stats file: unknown feature " + name);
      if (seen[idx]) throw DataError("stats file: duplicate feature " + name);
      seen[idx] = true;
      FeatureStat& s = stats.features[idx];
      s.mean = row.at("mean").get<double>();
      s.std = row.at("std").get<double>();
      s.min = row.at("min").get<double>();
      s.max = row.at("max").get<double>();
      if (!(s.std >= 0.0) || !(s.min <= s.mean && s.mean <= s.max)) {
        throw DataError("stats file: inconsistent statistics for " + name);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("stats file: ") + e.what());
  }
  return stats;
}

void save_stats(const std::filesystem::path& path, const FeatureStats& stats) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << stats_to_json(stats);
}

FeatureStats load_stats(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open stats file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return stats_from_json(ss.str());
}

}  // namespace rpdnn
