// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpdnn/eval.hpp"
#include "rpdnn/model.hpp"

namespace rpdnn {

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;      // mean training-mode loss over the epoch's batches
  double train_acc = 0.0; // inference pass over the full train set
  double holdout_acc = 0.0;
  double holdout_f1 = 0.0;
  friend bool operator==(const EpochLog&, const EpochLog&) = default;
};

enum class Selection { final_epoch, best_holdout_f1 };

struct TrainOptions {
  Selection selection = Selection::final_epoch;
  /// Stop once train accuracy reaches this value.
  std::optional<double> stop_at_train_acc;
};

struct TrainResult {
  RpdnnModel model;
  std::vector<EpochLog> log;
  std::size_t selected_epoch = 0;  // 0 = initialization
};

/// Seed streams derived from cfg.seed: 1 = init, 2 = shuffling, 3 = dropout.
/// Throws DataError on an empty train set.
TrainResult train(std::span<const EncodedExample> train_set,
                  std::span<const EncodedExample> holdout, const ModelConfig& cfg,
                  const TrainOptions& opts = {});

struct Prediction {
  std::vector<int> labels;
  ForwardTrace trace;
};

/// Argmax of the inference-mode softmax.
Prediction predict(RpdnnModel& model, std::span<const EncodedExample> examples);

std::vector<int> gold_labels(std::span<const EncodedExample> examples);

/// "epoch,loss,train_acc,holdout_acc" header plus one row per epoch.
void write_epoch_csv(std::ostream& out, std::span<const EpochLog> log);
void write_epoch_csv(const std::filesystem::path& path, std::span<const EpochLog> log);

}  // namespace rpdnn
