// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpdnn/ingest.hpp"

namespace rpdnn {

inline constexpr std::size_t kMetaDim = 27;

/// Fixed feature order: 16 user-level features, then 11 tweet-level ones.
/// Stats files and metadata matrices both use this indexing.
inline constexpr std::array<std::string_view, kMetaDim> kFeatureNames = {
    "posts_count",       "listed_count",        "followers",           "followings",
    "follow_ratio",      "follow_ratio_v2",     "user_favourites",     "account_age",
    "is_verified",       "engagement",          "following_rate",      "favourites_rate",
    "geo_enabled",       "description_length",  "profile_name_length", "is_source_user",
    "retweet_count",     "favorite_count",      "has_question",        "is_duplicate",
    "has_image",         "has_url",             "url_count",           "has_native_media",
    "content_length",    "response_time_decay", "has_profile_description",
};

enum class Feature : std::size_t {
  posts_count, listed_count, followers, followings, follow_ratio, follow_ratio_v2,
  user_favourites, account_age, is_verified, engagement, following_rate, favourites_rate,
  geo_enabled, description_length, profile_name_length, is_source_user, retweet_count,
  favorite_count, has_question, is_duplicate, has_image, has_url, url_count,
  has_native_media, content_length, response_time_decay, has_profile_description,
};

/// Index of a feature name, or kMetaDim when unknown.
std::size_t feature_index(std::string_view name);

struct MetadataVector {
  std::array<double, kMetaDim> values{};
  std::string tweet_id;

  double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
};

/// The 27 context-metadata features of `reply` within the thread of `source`.
MetadataVector extract_features(const Tweet& reply, const Tweet& source);

struct FeatureStat {
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const FeatureStat&, const FeatureStat&) = default;
};

struct FeatureStats {
  std::array<FeatureStat, kMetaDim> features{};
  std::size_t n = 0;

  friend bool operator==(const FeatureStats&, const FeatureStats&) = default;
};

/// Population mean/std plus range per feature. Throws DataError when empty.
FeatureStats compute_stats(std::span<const MetadataVector> vectors);

/// Stats over every reply of the given threads.
FeatureStats compute_thread_stats(std::span<const Thread> threads);

/// z-score per feature; features with zero std map to 0.
MetadataVector normalize(const MetadataVector& v, const FeatureStats& stats);

std::string stats_to_json(const FeatureStats& stats);
FeatureStats stats_from_json(std::string_view text);
void save_stats(const std::filesystem::path& path, const FeatureStats& stats);
FeatureStats load_stats(const std::filesystem::path& path);

}  // namespace rpdnn
