#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "rpdnn/errors.hpp"
#include "rpdnn/eval.hpp"
#include "rpdnn/rng.hpp"

using namespace rpdnn;

namespace {

Thread thread(std::string id, int label, std::string event) {
  Thread t;
  t.source.tweet_id = std::move(id);
  t.label = label;
  t.event = std::move(event);
  return t;
}

std::vector<Thread> pool(std::size_t pos, std::size_t neg, std::size_t events) {
  std::vector<Thread> out;
  for (std::size_t i = 0; i < pos + neg; ++i) {
    out.push_back(thread("id" + std::to_string(i), i < pos ? 1 : 0,
                         "e" + std::to_string(i % events)));
  }
  return out;
}

std::size_t count_label(std::span<const Thread> all, const std::vector<std::string>& ids, int y) {
  std::map<std::string, int> label;
  for (const auto& t : all) label[t.id()] = t.label;
  return static_cast<std::size_t>(
      std::count_if(ids.begin(), ids.end(), [&](const auto& id) { return label[id] == y; }));
}

}  // namespace

TEST_CASE("worked confusion example") {
  const int preds[] = {1, 1, 1, 0, 0};
  const int golds[] = {1, 1, 0, 1, 0};
  const Confusion c = confusion(preds, golds);
  CHECK(c.tp == 2);
  CHECK(c.fp == 1);
  CHECK(c.fn == 1);
  CHECK(c.tn == 1);
  const MetricsRow m = metrics(preds, golds);
  CHECK(m.precision == doctest::Approx(2.0 / 3.0));
  CHECK(m.recall == doctest::Approx(2.0 / 3.0));
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(m.accuracy == doctest::Approx(0.6));
}

TEST_CASE("metrics agree with a brute-force oracle on random vectors") {
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.next() % 20;
    std::vector<int> p(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<int>(rng.next() % 2);
      g[i] = static_cast<int>(rng.next() % 2);
    }
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      tp += p[i] && g[i];
      fp += p[i] && !g[i];
      fn += !p[i] && g[i];
      tn += !p[i] && !g[i];
    }
    const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    const MetricsRow m = metrics(p, g);
    CHECK(std::abs(m.precision - prec) < 1e-12);
    CHECK(std::abs(m.recall - rec) < 1e-12);
    CHECK(std::abs(m.f1 - f1) < 1e-12);
    CHECK(std::abs(m.accuracy - (tp + tn) / static_cast<double>(n)) < 1e-12);
  }
}

TEST_CASE("zero conventions and input errors") {
  const int zeros[] = {0, 0};
  const int ones[] = {1, 1};
  const MetricsRow none = metrics(zeros, ones);
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);
  const MetricsRow neg = metrics(ones, zeros);
  CHECK(neg.recall == 0.0);
  CHECK(neg.f1 == 0.0);
  const int one[] = {1};
  CHECK_THROWS_AS(metrics(one, zeros), DataError);
  CHECK_THROWS_AS(metrics(std::span<const int>{}, std::span<const int>{}), DataError);
}

TEST_CASE("aggregate is the unweighted mean") {
  const MetricsRow r{0.5, 0.25, 0.125, 1.0};
  const MetricsRow same[] = {r, r, r};
  CHECK(aggregate(same) == r);
  const MetricsRow two[] = {{1, 0, 0, 0}, {0, 1, 1, 0.5}};
  CHECK(aggregate(two) == MetricsRow{0.5, 0.5, 0.5, 0.25});
  CHECK_THROWS_AS(aggregate(std::span<const MetricsRow>{}), DataError);
}

TEST_CASE("harmonic mean of a reported precision/recall pair") {
  const double p = 0.648, r = 0.834;
  const Confusion c{648 * 834, 352 * 834, 648 * 166, 0};
  const MetricsRow m = metrics(c);
  CHECK(m.precision == doctest::Approx(p));
  CHECK(m.recall == doctest::Approx(r));
  CHECK(m.f1 == doctest::Approx(2 * p * r / (p + r)));
  CHECK(std::abs(m.f1 - 0.727) < 0.005);
}

TEST_CASE("report json round trip") {
  const MetricsReport rep = make_report({{"fold-0", {0.5, 1, 0.6666, 0.75}},
                                         {"fold-1", {0.1, 0.2, 0.3, 0.4}}});
  CHECK(rep.mean.precision == doctest::Approx(0.3));
  const MetricsReport back = report_from_json(report_to_json(rep));
  REQUIRE(back.folds.size() == 2);
  CHECK(back.folds[1].name == "fold-1");
  CHECK(back.folds[0].row == rep.folds[0].row);
  CHECK(back.mean == rep.mean);
}

TEST_CASE("balance downsamples the majority class") {
  const auto all = pool(6, 4, 2);
  const auto b = balance(all, 3);
  CHECK(b.size() == 8);
  CHECK(std::count_if(b.begin(), b.end(), [](const Thread& t) { return t.label == 1; }) == 4);
  std::set<std::string> ids;
  for (const auto& t : b) ids.insert(t.id());
  CHECK(ids.size() == 8);
  CHECK(balance(all, 3) == b);
}

TEST_CASE("leave-one-event-out plan") {
  const auto all = pool(60, 60, 12);
  const auto events = events_of(all);
  REQUIRE(events.size() == 12);
  const FoldPlan plan = plan_loocv(all, events, 9);
  REQUIRE(plan.folds.size() == 12);
  std::map<std::string, std::string> event_of;
  for (const auto& t : all) event_of[t.id()] = t.event;
  for (const auto& f : plan.folds) {
    REQUIRE(f.test_event);
    for (const auto& id : f.test) CHECK(event_of[id] == *f.test_event);
    for (const auto* part : {&f.train, &f.holdout}) {
      for (const auto& id : *part) CHECK(event_of[id] != *f.test_event);
    }
    CHECK(f.test.size() == 10);
    CHECK(f.train.size() + f.holdout.size() == 110);
    CHECK(f.holdout.size() == 11);
    std::set<std::string> seen(f.train.begin(), f.train.end());
    for (const auto& id : f.holdout) CHECK(seen.insert(id).second);
  }
  const std::string missing[] = {"nope"};
  CHECK_THROWS_AS(plan_loocv(all, missing, 9), DataError);
}

TEST_CASE("holdout ratio gives an exact 9:1 split of 100") {
  auto all = pool(50, 50, 1);
  all.push_back(thread("x", 1, "other"));
  const std::string test[] = {"other"};
  const FoldPlan plan = plan_loocv(all, test, 2, 0.1);
  CHECK(plan.folds[0].train.size() == 90);
  CHECK(plan.folds[0].holdout.size() == 10);
}

TEST_CASE("stratified k-fold") {
  const auto small = pool(6, 4, 1);
  const FoldPlan p5 = plan_stratified_kfold(small, 5, 1);
  REQUIRE(p5.folds.size() == 5);
  for (const auto& f : p5.folds) {
    CHECK(f.test.size() == 2);
    const auto pos = count_label(small, f.test, 1);
    CHECK((pos == 1 || pos == 2));
  }
  CHECK_THROWS_AS(plan_stratified_kfold(small, 1, 1), ConfigError);
  CHECK_THROWS_AS(plan_stratified_kfold(pool(2, 1, 1), 5, 1), DataError);

  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t pos = 5 + rng.next() % 40, neg = 5 + rng.next() % 40;
    const std::size_t k = 2 + rng.next() % 4;
    const auto all = pool(pos, neg, 3);
    const FoldPlan plan = plan_stratified_kfold(all, k, trial);
    std::multiset<std::string> tested;
    for (std::size_t i = 0; i < k; ++i) {
      const Fold& f = plan.folds[i];
      tested.insert(f.test.begin(), f.test.end());
      CHECK(f.holdout == plan.folds[(i + 1) % k].test);
      CHECK(f.train.size() + f.holdout.size() + f.test.size() == all.size());
      for (int y : {0, 1}) {
        const std::size_t total = y ? pos : neg;
        const double c = static_cast<double>(count_label(all, f.test, y));
        CHECK(std::abs(c - static_cast<double>(total) / static_cast<double>(k)) < 1.0);
      }
    }
    CHECK(tested.size() == all.size());
    CHECK(std::set<std::string>(tested.begin(), tested.end()).size() == all.size());
  }
}

TEST_CASE("plan json round trip") {
  const auto all = pool(10, 10, 4);
  for (const FoldPlan& plan : {plan_stratified_kfold(all, 3, 5), plan_loocv(all, events_of(all), 5)}) {
    const FoldPlan back = plan_from_json(plan_to_json(plan));
    CHECK(back.scheme == plan.scheme);
    CHECK(back.seed == plan.seed);
    REQUIRE(back.folds.size() == plan.folds.size());
    for (std::size_t i = 0; i < plan.folds.size(); ++i) {
      CHECK(back.folds[i].test_event == plan.folds[i].test_event);
      CHECK(back.folds[i].train == plan.folds[i].train);
      CHECK(back.folds[i].holdout == plan.folds[i].holdout);
      CHECK(back.folds[i].test == plan.folds[i].test);
    }
  }
}

TEST_CASE("select and events_of") {
  const auto all = pool(3, 3, 2);
  CHECK(events_of(all) == std::vector<std::string>{"e0", "e1"});
  const std::string ids[] = {"id4", "id0"};
  const auto s = select(all, ids);
  REQUIRE(s.size() == 2);
  CHECK(s[0].id() == "id4");
  const std::string bad[] = {"zz"};
  CHECK_THROWS_AS(select(all, bad), DataError);
  CHECK(parse_scheme(scheme_name(Scheme::loocv)) == Scheme::loocv);
  CHECK_THROWS_AS(parse_scheme("holdout"), ConfigError);
}
