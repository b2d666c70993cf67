// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include "json.hpp"
#include <set>
#include <unordered_map>

#include "rpdnn/errors.hpp"
#include "rpdnn/rng.hpp"

namespace rpdnn {

using json = nlohmann::ordered_json;

Confusion confusion(std::span<const int> preds, std::span<const int> golds) {
  if (preds.size() != golds.size()) {
    throw DataError("metrics: " + std::to_string(preds.size()) + " predictions for " +
                    std::to_string(golds.size()) + " labels");
  }
  Confusion c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] == 1, g = golds[i] == 1;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

MetricsRow metrics(const Confusion& c) {
  const double n = static_cast<double>(c.tp + c.fp + c.fn + c.tn);
  if (n == 0) throw DataError("metrics: no predictions");
  MetricsRow r;
  r.precision = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  r.recall = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  r.f1 = r.precision + r.recall == 0.0
             ? 0.0
             : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  r.accuracy = static_cast<double>(c.tp + c.tn) / n;
  return r;
}

MetricsRow metrics(std::span<const int> preds, std::span<const int> golds) {
  return metrics(confusion(preds, golds));
}

MetricsRow aggregate(std::span<const MetricsRow> rows) {
  if (rows.empty()) throw DataError("aggregate: no rows");
  MetricsRow m;
  for (const auto& r : rows) {
    m.precision += r.precision;
    m.recall += r.recall;
    m.f1 += r.f1;
    m.accuracy += r.accuracy;
  }
  const double n = static_cast<double>(rows.size());
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  m.accuracy /= n;
  return m;
}

MetricsReport make_report(std::vector<FoldMetrics> folds) {
  MetricsReport rep;
  std::vector<MetricsRow> rows;
  for (const auto& f : folds) rows.push_back(f.row);
  rep.mean = aggregate(rows);
  rep.folds = std::move(folds);
  return rep;
}

namespace {

json row_json(const std::string* name, const MetricsRow& r) {
  json j;
  if (name) j["name"] = *name;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["accuracy"] = r.accuracy;
  return j;
}

MetricsRow row_from(const json& j) {
  return {j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>(),
          j.at("accuracy").get<double>()};
}

}  // namespace

std::string report_to_json(const MetricsReport& report) {
  json j;
  j["folds"] = json::array();
  for (const auto& f : report.folds) j["folds"].push_back(row_json(&f.name, f.row));
  j["mean"] = row_json(nullptr, report.mean);
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    MetricsReport rep;
    for (const auto& f : j.at("folds")) {
      rep.folds.push_back({f.at("name").get<std::string>(), row_from(f)});
    }
    rep.mean = row_from(j.at("mean"));
    return rep;
  } catch (const json::exception& e) {
    throw DataError(std::string("metrics report: ") + e.what());
  }
}

std::string_view scheme_name(Scheme s) { return s == Scheme::loocv ? "loocv" : "kfold"; }

Scheme parse_scheme(std::string_view name) {
  if (name == "loocv") return Scheme::loocv;
  if (name == "kfold") return Scheme::kfold;
  throw ConfigError("unknown scheme '" + std::string(name) + "' (expected loocv or kfold)");
}

std::vector<Thread> balance(std::vector<Thread> threads, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Thread> pos, neg;
  for (auto& t : threads) (t.label == 1 ? pos : neg).push_back(std::move(t));
  const std::size_t keep = std::min(pos.size(), neg.size());
  // A partial Fisher-Yates picks `keep` items uniformly without replacement.
  auto take = [&](std::vector<Thread>& v) {
    shuffle(std::span<Thread>(v), rng);
    v.resize(keep);
  };
  take(pos);
  take(neg);
  std::vector<Thread> out;
  out.reserve(2 * keep);
  for (auto& t : pos) out.push_back(std::move(t));
  for (auto& t : neg) out.push_back(std::move(t));
  shuffle(std::span<Thread>(out), rng);
  return out;
}

std::vector<std::string> events_of(std::span<const Thread> threads) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& t : threads) {
    if (seen.insert(t.event).second) out.push_back(t.event);
  }
  return out;
}

FoldPlan plan_loocv(std::span<const Thread> threads, std::span<const std::string> test_events,
                    std::uint64_t seed, double holdout_ratio) {
  if (!(holdout_ratio >= 0.0 && holdout_ratio < 1.0)) {
    throw ConfigError("loocv: holdout ratio must be in [0, 1)");
  }
  const auto events = events_of(threads);
  FoldPlan plan;
  plan.scheme = Scheme::loocv;
  plan.seed = seed;
  for (std::size_t f = 0; f < test_events.size(); ++f) {
    const std::string& ev = test_events[f];
    if (std::find(events.begin(), events.end(), ev) == events.end()) {
      throw DataError("loocv: test event '" + ev + "' not in corpus");
    }
    Fold fold;
    fold.test_event = ev;
    std::vector<Thread> pool;
    for (const auto& t : threads) {
      if (t.event == ev) fold.test.push_back(t.id());
      else pool.push_back(t);
    }
    pool = balance(std::move(pool), derive_seed(seed, 100 + f));
    const auto n_holdout =
        static_cast<std::size_t>(std::llround(holdout_ratio * static_cast<double>(pool.size())));
    for (std::size_t i = 0; i < pool.size(); ++i) {
      (i < pool.size() - n_holdout ? fold.train : fold.holdout).push_back(pool[i].id());
    }
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

FoldPlan plan_stratified_kfold(std::span<const Thread> threads, std::size_t k,
                               std::uint64_t seed) {
  if (k < 2) throw ConfigError("kfold: k must be >= 2, got " + std::to_string(k));
  if (threads.size() < k) {
    throw DataError("kfold: " + std::to_string(threads.size()) + " threads for " +
                    std::to_string(k) + " folds");
  }
  Rng rng(seed);
  std::vector<std::vector<std::string>> buckets(k);
  std::size_t next = 0;
  for (int label : {1, 0}) {
    std::vector<std::string> ids;
    for (const auto& t : threads) {
      if (t.label == label) ids.push_back(t.id());
    }
    shuffle(std::span<std::string>(ids), rng);
    for (auto& id : ids) {
      buckets[next].push_back(std::move(id));
      next = (next + 1) % k;
    }
  }
  FoldPlan plan;
  plan.scheme = Scheme::kfold;
  plan.seed = seed;
  for (std::size_t i = 0; i < k; ++i) {
    Fold fold;
    fold.test = buckets[i];
    fold.holdout = buckets[(i + 1) % k];
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i || j == (i + 1) % k) continue;
      fold.train.insert(fold.train.end(), buckets[j].begin(), buckets[j].end());
    }
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

std::string plan_to_json(const FoldPlan& plan) {
  json j;
  j["scheme"] = scheme_name(plan.scheme);
  j["seed"] = plan.seed;
  j["folds"] = json::array();
  for (const auto& f : plan.folds) {
    json jf;
    if (f.test_event) jf["test_event"] = *f.test_event;
    jf["train"] = f.train;
    jf["holdout"] = f.holdout;
    jf["test"] = f.test;
    j["folds"].push_back(std::move(jf));
  }
  return j.dump(2) + "\n";
}

FoldPlan plan_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    FoldPlan plan;
    plan.scheme = parse_scheme(j.at("scheme").get<std::string>());
    plan.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& jf : j.at("folds")) {
      Fold f;
      if (jf.contains("test_event")) f.test_event = jf["test_event"].get<std::string>();
      f.train = jf.at("train").get<std::vector<std::string>>();
      f.holdout = jf.at("holdout").get<std::vector<std::string>>();
      f.test = jf.at("test").get<std::vector<std::string>>();
      plan.folds.push_back(std::move(f));
    }
    return plan;
  } catch (const json::exception& e) {
    throw DataError(std::string("fold plan: ") + e.what());
  }
}

std::vector<Thread> select(std::span<const Thread> threads, std::span<const std::string> ids) {
  std::unordered_map<std::string, const Thread*> by_id;
  for (const auto& t : threads) by_id.emplace(t.id(), &t);
  std::vector<Thread> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("unknown thread id '" + id + "'");
    out.push_back(*it->second);
  }
  return out;
}

}  // namespace rpdnn
