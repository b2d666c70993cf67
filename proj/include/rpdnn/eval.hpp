// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpdnn/ingest.hpp"

namespace rpdnn {

// ---- metrics (positive class = rumor = 1) ----

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

Confusion confusion(std::span<const int> preds, std::span<const int> golds);

struct MetricsRow {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

/// P = 0 when nothing is predicted positive, R = 0 without positives, F1 = 0
/// when P + R = 0. Throws DataError on length mismatch or empty input.
MetricsRow metrics(std::span<const int> preds, std::span<const int> golds);
MetricsRow metrics(const Confusion& c);

/// Unweighted per-metric mean. Throws DataError when empty.
MetricsRow aggregate(std::span<const MetricsRow> rows);

struct FoldMetrics {
  std::string name;  // test event for LOO-CV, "fold-i" for k-fold
  MetricsRow row;
};

struct MetricsReport {
  std::vector<FoldMetrics> folds;
  MetricsRow mean;
};

MetricsReport make_report(std::vector<FoldMetrics> folds);
/// {"folds":[{"name","precision","recall","f1","accuracy"}...],"mean":{...}}
std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(std::string_view text);

// ---- fold planning ----

enum class Scheme { loocv, kfold };
std::string_view scheme_name(Scheme s);
Scheme parse_scheme(std::string_view name);

struct Fold {
  std::optional<std::string> test_event;
  std::vector<std::string> train, holdout, test;  // thread ids
};

struct FoldPlan {
  Scheme scheme = Scheme::kfold;
  std::uint64_t seed = 0;
  std::vector<Fold> folds;
};

/// Downsamples the majority class to the minority count (seeded, without
/// replacement), then shuffles the union.
std::vector<Thread> balance(std::vector<Thread> threads, std::uint64_t seed);

/// One fold per test event. The other events are pooled, balanced and split
/// into train/holdout with `holdout_ratio` of the pool going to holdout.
FoldPlan plan_loocv(std::span<const Thread> threads, std::span<const std::string> test_events,
                    std::uint64_t seed, double holdout_ratio = 0.1);

/// Per-class seeded shuffle, round-robin over k folds. Fold i tests, fold
/// (i+1) mod k is holdout, the rest trains. Throws ConfigError for k < 2.
FoldPlan plan_stratified_kfold(std::span<const Thread> threads, std::size_t k,
                               std::uint64_t seed);

std::string plan_to_json(const FoldPlan& plan);
FoldPlan plan_from_json(std::string_view text);

/// Distinct events in first-appearance order.
std::vector<std::string> events_of(std::span<const Thread> threads);

/// Threads whose ids are listed, in list order. Throws DataError on an unknown id.
std::vector<Thread> select(std::span<const Thread> threads, std::span<const std::string> ids);

}  // namespace rpdnn
