// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/train.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <ostream>

#include "rpdnn/errors.hpp"
#include "rpdnn/nn/optim.hpp"

namespace rpdnn {
namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::uint64_t kDropoutStream = 3;

// Predictions are made in chunks so ForwardTrace buffers stay small.
MetricsRow evaluate(RpdnnModel& model, std::span<const EncodedExample> set) {
  std::vector<int> preds;
  preds.reserve(set.size());
  constexpr std::size_t kChunk = 64;
  for (std::size_t i = 0; i < set.size(); i += kChunk) {
    const auto part = set.subspan(i, std::min(kChunk, set.size() - i));
    const Prediction p = predict(model, part);
    preds.insert(preds.end(), p.labels.begin(), p.labels.end());
  }
  return metrics(preds, gold_labels(set));
}

std::vector<nn::Tensor> snapshot(RpdnnModel& model) {
  std::vector<nn::Tensor> out;
  for (const auto& p : model.parameters()) out.push_back(*p.value);
  return out;
}

void restore(RpdnnModel& model, const std::vector<nn::Tensor>& values) {
  const auto params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) *params[i].value = values[i];
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::vector<int> gold_labels(std::span<const EncodedExample> examples) {
  std::vector<int> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(ex.label);
  return out;
}

Prediction predict(RpdnnModel& model, std::span<const EncodedExample> examples) {
  Prediction p;
  if (examples.empty()) return p;
  p.trace = model.forward(examples, false);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    p.labels.push_back(p.trace.probs(i, 1) > p.trace.probs(i, 0) ? 1 : 0);
  }
  return p;
}

TrainResult train(std::span<const EncodedExample> train_set,
                  std::span<const EncodedExample> holdout, const ModelConfig& cfg,
                  const TrainOptions& opts) {
  if (train_set.empty()) throw DataError("train: empty train set");
  TrainResult result{RpdnnModel(cfg), {}, 0};
  RpdnnModel& model = result.model;
  Rng init_rng(derive_seed(cfg.seed, kInitStream));
  Rng shuffle_rng(derive_seed(cfg.seed, kShuffleStream));
  Rng dropout_rng(derive_seed(cfg.seed, kDropoutStream));
  model.init(init_rng);

  nn::AdaGrad opt({cfg.lr, cfg.weight_decay, cfg.adagrad_eps});
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::optional<std::vector<nn::Tensor>> best;
  double best_f1 = -1.0;
  std::vector<const EncodedExample*> batch;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t end = std::min(order.size(), start + cfg.batch);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(&train_set[order[i]]);
      const double loss = model.loss_and_grad(std::span<const EncodedExample* const>(batch),
                                              true, &dropout_rng);
      loss_sum += loss * static_cast<double>(batch.size());
      opt.step(model.parameters());
    }
    EpochLog row;
    row.epoch = epoch;
    row.loss = loss_sum / static_cast<double>(order.size());
    row.train_acc = evaluate(model, train_set).accuracy;
    if (!holdout.empty()) {
      const MetricsRow m = evaluate(model, holdout);
      row.holdout_acc = m.accuracy;
      row.holdout_f1 = m.f1;
    }
    result.log.push_back(row);

    if (opts.selection == Selection::best_holdout_f1 && !holdout.empty() &&
        row.holdout_f1 > best_f1) {
      best_f1 = row.holdout_f1;
      best = snapshot(model);
      result.selected_epoch = epoch;
    } else if (opts.selection == Selection::final_epoch) {
      result.selected_epoch = epoch;
    }
    if (opts.stop_at_train_acc && row.train_acc >= *opts.stop_at_train_acc) break;
  }
  if (opts.selection == Selection::best_holdout_f1) {
    if (best) {
      restore(model, *best);
    } else {
      result.selected_epoch = result.log.empty() ? 0 : result.log.back().epoch;
    }
  }
  return result;
}

void write_epoch_csv(std::ostream& out, std::span<const EpochLog> log) {
  out << "epoch,loss,train_acc,holdout_acc\n";
  for (const auto& r : log) {
    out << r.epoch << ',' << fmt(r.loss) << ',' << fmt(r.train_acc) << ',' << fmt(r.holdout_acc)
        << '\n';
  }
}

void write_epoch_csv(const std::filesystem::path& path, std::span<const EpochLog> log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_epoch_csv(out, log);
}

}  // namespace rpdnn
