#include <sstream>

#include "doctest.h"
#include "rpdnn/errors.hpp"
#include "rpdnn/synth.hpp"
#include "rpdnn/train.hpp"

using namespace rpdnn;

namespace {

ModelConfig small(std::size_t epochs) {
  ModelConfig c = ModelConfig::desk();
  c.embed_dim = 8;
  c.context_len = 6;
  c.batch = 8;
  c.epochs = epochs;
  c.seed = 21;
  return c;
}

std::vector<EncodedExample> corpus(std::size_t n, std::uint64_t seed, const ModelConfig& c) {
  const auto threads = synth_corpus(n, Signal::mixed, seed);
  return encode_all(threads, compute_thread_stats(threads), EmbeddingProvider::hashing(8, 0), c);
}

std::vector<nn::Tensor> values(RpdnnModel& m) {
  std::vector<nn::Tensor> out;
  for (auto& p : m.parameters()) out.push_back(*p.value);
  return out;
}

}  // namespace

TEST_CASE("zero epochs returns the initialization") {
  const ModelConfig c = small(0);
  const auto ex = corpus(16, 1, c);
  TrainResult r = train(ex, {}, c);
  CHECK(r.log.empty());
  CHECK(r.selected_epoch == 0);
  RpdnnModel ref(c);
  Rng rng(derive_seed(c.seed, 1));
  ref.init(rng);
  CHECK(values(r.model) == values(ref));
}

TEST_CASE("same seed, same run") {
  const ModelConfig c = small(3);
  const auto ex = corpus(24, 2, c);
  const auto ho = corpus(8, 3, c);
  TrainResult a = train(ex, ho, c);
  TrainResult b = train(ex, ho, c);
  CHECK(a.log == b.log);
  CHECK(values(a.model) == values(b.model));
  ModelConfig other = c;
  other.seed = 22;
  TrainResult d = train(ex, ho, other);
  CHECK(values(d.model) != values(a.model));
}

TEST_CASE("training lowers the loss on a learnable corpus") {
  const ModelConfig c = small(8);
  const auto ex = corpus(32, 4, c);
  TrainResult r = train(ex, {}, c);
  REQUIRE(r.log.size() == 8);
  CHECK(r.log.back().loss < r.log.front().loss);
  CHECK(r.log.back().train_acc >= 0.9);
  CHECK(r.selected_epoch == 8);
}

TEST_CASE("early stop on train accuracy") {
  const ModelConfig c = small(50);
  const auto ex = corpus(32, 4, c);
  TrainOptions opts;
  opts.stop_at_train_acc = 1.0;
  TrainResult r = train(ex, {}, c, opts);
  CHECK(r.log.size() < 50);
  CHECK(r.log.back().train_acc == 1.0);
}

TEST_CASE("best holdout F1 selection restores that epoch") {
  const ModelConfig c = small(6);
  const auto ex = corpus(24, 5, c);
  const auto ho = corpus(12, 6, c);
  TrainOptions opts;
  opts.selection = Selection::best_holdout_f1;
  TrainResult r = train(ex, ho, c, opts);
  REQUIRE(r.selected_epoch >= 1);
  double best = -1.0;
  std::size_t arg = 0;
  for (const auto& row : r.log) {
    if (row.holdout_f1 > best) {
      best = row.holdout_f1;
      arg = row.epoch;
    }
  }
  CHECK(r.selected_epoch == arg);
  const Prediction p = predict(r.model, ho);
  CHECK(metrics(p.labels, gold_labels(ho)).f1 == best);
}

TEST_CASE("empty train set is a data error") {
  CHECK_THROWS_AS(train({}, {}, small(1)), DataError);
}

TEST_CASE("epoch csv") {
  std::ostringstream out;
  const EpochLog rows[] = {{1, 0.5, 0.75, 0.25, 0.0}, {2, 0.125, 1.0, 0.5, 0.5}};
  write_epoch_csv(out, rows);
  CHECK(out.str() == "epoch,loss,train_acc,holdout_acc\n1,0.5,0.75,0.25\n2,0.125,1,0.5\n");
}
