// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "rpdnn/cli/commands.hpp"
#include "rpdnn/errors.hpp"
#include "rpdnn/gradsuite.hpp"
#include "rpdnn/nn/attention.hpp"
#include "rpdnn/synth.hpp"
#include "rpdnn/train.hpp"

using namespace rpdnn;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void scramble(std::span<double> v, Rng& rng) {
  for (auto& x : v) x = rng.normal(0.0, 3.0);
}

RpdnnModel seeded_model(const ModelConfig& cfg, std::uint64_t seed) {
  RpdnnModel m(cfg);
  Rng rng(seed);
  m.init(rng);
  Rng brng(seed + 1);
  for (auto& p : m.parameters()) {
    if (p.value->rank() == 1) {
      for (auto& v : p.value->values()) v += brng.normal(0.0, 0.1);
    }
  }
  return m;
}

ModelConfig desk_variant(Variant v, std::uint64_t seed) {
  ModelConfig c = ModelConfig::desk();
  c.ablation = ablation_for(v);
  c.seed = seed;
  return c;
}

struct Split {
  std::vector<Thread> train, holdout;
};

Split split(std::vector<Thread> threads, double holdout_ratio, std::uint64_t seed) {
  Rng rng(seed);
  shuffle(std::span<Thread>(threads), rng);
  const auto n_holdout = static_cast<std::size_t>(
      std::llround(holdout_ratio * static_cast<double>(threads.size())));
  Split s;
  s.holdout.assign(threads.end() - static_cast<std::ptrdiff_t>(n_holdout), threads.end());
  threads.resize(threads.size() - n_holdout);
  s.train = std::move(threads);
  return s;
}

// ---- 1 ----
Outcome gradient_suite() {
  const auto t0 = Clock::now();
  const auto cases = run_grad_suite();
  const double secs = seconds_since(t0);
  double worst = 0.0;
  std::string worst_name, failed;
  for (const auto& c : cases) {
    if (c.max_rel_error > worst) {
      worst = c.max_rel_error;
      worst_name = c.name;
    }
    if (!c.pass) failed += " " + c.name;
  }
  const bool ok = failed.empty() && secs < 120.0;
  return {ok, fmt("%zu cases, max rel err %.2e (%s), %.2f s%s%s", cases.size(), worst,
                  worst_name.c_str(), secs, failed.empty() ? "" : ", failed:", failed.c_str())};
}

// ---- 2 ----
Outcome masking() {
  Rng rng(2);
  double worst_sum = 0.0;
  bool padded_zero = true;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t b = 1 + rng.next() % 6, t = 1 + rng.next() % 12;
    std::vector<std::size_t> lengths(b);
    for (auto& l : lengths) l = 1 + rng.next() % t;
    const nn::Mask mask = nn::Mask::from_lengths(lengths, t);
    nn::Tensor scores({b, t});
    for (auto& s : scores.values()) s = rng.normal(0.0, 5.0);
    const nn::Tensor p = nn::masked_softmax(scores, mask);
    for (std::size_t i = 0; i < b; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < t; ++j) {
        if (!mask(i, j) && p(i, j) != 0.0) padded_zero = false;
        sum += p(i, j);
      }
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
  }

  const auto threads = synth_corpus(16, Signal::mixed, 2);
  const FeatureStats stats = compute_thread_stats(threads);
  std::size_t identical = 0;
  for (Variant v : kAllVariants) {
    const ModelConfig cfg = desk_variant(v, 3);  // T=16 with 6..20 replies: mixed padding
    RpdnnModel m = seeded_model(cfg, 5);
    auto ex = encode_all(threads, stats, EmbeddingProvider::hashing(cfg.embed_dim, 0), cfg);
    const ForwardTrace base = m.forward(ex, false);
    for (auto& e : ex) {
      for (std::size_t t = e.length(); t < e.time(); ++t) {
        scramble(e.cc.row(t), rng);
        scramble(e.cm.row(t), rng);
      }
    }
    const ForwardTrace tr = m.forward(ex, false);
    bool same = tr.logits == base.logits;
    for (const nn::Tensor* att : {&tr.att_cc, &tr.att_cm, &tr.att_joint}) {
      for (std::size_t i = 0; i < ex.size() && !att->empty(); ++i) {
        double sum = 0.0;
        for (std::size_t t = 0; t < ex[i].time(); ++t) {
          if (t >= ex[i].length() && (*att)(i, t) != 0.0) padded_zero = false;
          sum += (*att)(i, t);
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
      }
    }
    identical += same;
  }
  const bool ok = worst_sum < 1e-12 && padded_zero && identical == kAllVariants.size();
  return {ok, fmt("max |sum-1| %.1e, padded weights zero: %s, logits identical in %zu/8 variants",
                  worst_sum, padded_zero ? "yes" : "no", identical)};
}

// ---- 3 ----
Outcome ablation_opacity() {
  const auto threads = synth_corpus(16, Signal::mixed, 3);
  const FeatureStats stats = compute_thread_stats(threads);
  Rng rng(3);
  std::size_t ok_count = 0;
  std::string failed;
  for (Variant v : kAllVariants) {
    const ModelConfig cfg = desk_variant(v, 4);
    const Ablation a = cfg.ablation;
    RpdnnModel m = seeded_model(cfg, 6);
    auto ex = encode_all(threads, stats, EmbeddingProvider::hashing(cfg.embed_dim, 0), cfg);
    const nn::Tensor base = m.forward(ex, false).logits;
    for (auto& e : ex) {
      if (!a.use_source) scramble(e.sc, rng);
      if (!a.use_cc) scramble(e.cc.values(), rng);
      if (!a.use_cm) scramble(e.cm.values(), rng);
    }
    if (m.forward(ex, false).logits == base) {
      ++ok_count;
    } else {
      failed += " " + std::string(variant_name(v));
    }
  }
  return {ok_count == 8, fmt("logits identical in %zu/8 variants%s", ok_count, failed.c_str())};
}

// ---- 4 ----
Outcome overfit() {
  const auto t0 = Clock::now();
  const auto threads = synth_corpus(64, Signal::mixed, 7);
  ModelConfig cfg = ModelConfig::desk();
  cfg.seed = 7;
  cfg.epochs = 200;
  const auto ex = encode_all(threads, compute_thread_stats(threads),
                             EmbeddingProvider::hashing(cfg.embed_dim, 0), cfg);
  TrainOptions opts;
  opts.stop_at_train_acc = 0.95;
  const TrainResult r = train(ex, {}, cfg, opts);
  const double secs = seconds_since(t0);
  const double acc = r.log.empty() ? 0.0 : r.log.back().train_acc;
  const bool ok = acc >= 0.95 && secs < 300.0;
  return {ok, fmt("train acc %.3f at epoch %zu of 200, %.2f s", acc, r.log.size(), secs)};
}

// ---- 5 ----
double branch_holdout_acc(Signal signal, Variant v, std::uint64_t seed) {
  const Split s = split(synth_corpus(400, signal, seed), 0.2, seed + 1);
  ModelConfig cfg = desk_variant(v, seed);
  cfg.epochs = 15;
  const FeatureStats stats = compute_thread_stats(s.train);
  const auto provider = EmbeddingProvider::hashing(cfg.embed_dim, 0);
  const auto tr = encode_all(s.train, stats, provider, cfg);
  const auto ho = encode_all(s.holdout, stats, provider, cfg);
  TrainResult r = train(tr, ho, cfg);
  return r.log.back().holdout_acc;
}

Outcome branch_learning() {
  const auto t0 = Clock::now();
  const double cm = branch_holdout_acc(Signal::cm, Variant::cm_only, 11);
  const double cc = branch_holdout_acc(Signal::cc, Variant::cc_only, 11);
  return {cm >= 0.9 && cc >= 0.9,
          fmt("cm corpus/RPDNN-SC-CC holdout acc %.3f, cc corpus/RPDNN-SC-CM holdout acc %.3f, %.1f s",
              cm, cc, seconds_since(t0))};
}

// ---- 6 ----
Outcome metrics_oracle() {
  Rng rng(6);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.next() % 20;
    std::vector<int> p(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<int>(rng.next() % 2);
      g[i] = static_cast<int>(rng.next() % 2);
    }
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (p[i] == 1 && g[i] == 1) ++tp;
      else if (p[i] == 1) ++fp;
      else if (g[i] == 1) ++fn;
      else ++tn;
    }
    const double prec = tp + fp ? double(tp) / double(tp + fp) : 0.0;
    const double rec = tp + fn ? double(tp) / double(tp + fn) : 0.0;
    const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    const MetricsRow m = metrics(p, g);
    const Confusion c = confusion(p, g);
    const bool same = c.tp == tp && c.fp == fp && c.fn == fn && c.tn == tn &&
                      m.precision == prec && m.recall == rec && m.f1 == f1 &&
                      m.accuracy == double(tp + tn) / double(n);
    mismatches += !same;
  }
  const double P = 0.648, R = 0.834;
  const double hm = 2 * P * R / (P + R);
  const bool ok = mismatches == 0 && std::abs(hm - 0.729) < 0.0005 && std::abs(hm - 0.727) < 0.005;
  return {ok, fmt("%zu/1000 mismatches, hm(%.3f, %.3f) = %.4f vs reported 0.727", mismatches, P, R, hm)};
}

// ---- 7 ----
Outcome normalization() {
  double worst_mean = 0.0, worst_std = 0.0;
  std::size_t sets = 0;
  for (Signal sig : {Signal::cc, Signal::cm, Signal::sc, Signal::mixed}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      const Split s = split(synth_corpus(120, sig, seed), 0.1, seed);
      const FeatureStats stats = compute_thread_stats(s.train);
      std::array<double, kMetaDim> sum{}, sq{};
      std::size_t n = 0;
      std::vector<MetadataVector> normed;
      for (const auto& th : s.train) {
        for (const auto& r : th.replies) {
          normed.push_back(normalize(extract_features(r, th.source), stats));
          ++n;
        }
      }
      for (const auto& v : normed) {
        for (std::size_t f = 0; f < kMetaDim; ++f) sum[f] += v.values[f];
      }
      for (std::size_t f = 0; f < kMetaDim; ++f) {
        if (stats.features[f].std == 0.0) continue;
        const double mean = sum[f] / double(n);
        for (const auto& v : normed) sq[f] += (v.values[f] - mean) * (v.values[f] - mean);
        worst_mean = std::max(worst_mean, std::abs(mean));
        worst_std = std::max(worst_std, std::abs(std::sqrt(sq[f] / double(n)) - 1.0));
      }
      ++sets;
    }
  }
  const fs::path fixture = fs::path(RPDNN_TEST_DATA) / "appendix_stats.json";
  const FeatureStats appendix = load_stats(fixture);
  const std::string dumped = stats_to_json(appendix);
  const bool round_trip = stats_from_json(dumped) == appendix && stats_to_json(stats_from_json(dumped)) == dumped;
  const bool ok = worst_mean < 1e-9 && worst_std < 1e-6 && round_trip;
  return {ok, fmt("%zu training sets, max |mean| %.1e, max |std-1| %.1e, appendix fixture round trip: %s",
                  sets, worst_mean, worst_std, round_trip ? "lossless" : "lossy")};
}

// ---- 8 ----
Outcome cv_harness() {
  SynthOptions opts;
  opts.n_events = 12;
  const auto threads = synth_corpus(240, Signal::mixed, 8, opts);
  std::map<std::string, std::string> event_of;
  for (const auto& t : threads) event_of[t.id()] = t.event;
  const auto events = events_of(threads);
  const FoldPlan loo = plan_loocv(threads, events, 8);
  std::size_t leaks = 0;
  for (const auto& f : loo.folds) {
    for (const auto* part : {&f.train, &f.holdout}) {
      for (const auto& id : *part) leaks += event_of[id] == *f.test_event;
    }
    for (const auto& id : f.test) leaks += event_of[id] != *f.test_event;
  }

  std::map<std::string, int> label_of;
  for (const auto& t : threads) label_of[t.id()] = t.label;
  const FoldPlan kf = plan_stratified_kfold(threads, 5, 8);
  std::size_t spread = 0;
  for (int y : {0, 1}) {
    std::size_t lo = SIZE_MAX, hi = 0;
    for (const auto& f : kf.folds) {
      const auto c = static_cast<std::size_t>(std::count_if(
          f.test.begin(), f.test.end(), [&](const auto& id) { return label_of[id] == y; }));
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    spread = std::max(spread, hi - lo);
  }

  // 100 pooled training threads split 9:1.
  std::vector<Thread> pool;
  for (std::size_t i = 0; i < 100; ++i) {
    Thread t;
    t.source.tweet_id = "p" + std::to_string(i);
    t.label = static_cast<int>(i % 2);
    t.event = "pool";
    pool.push_back(t);
  }
  Thread held;
  held.source.tweet_id = "q";
  held.event = "held";
  pool.push_back(held);
  const std::string held_out[] = {"held"};
  const Fold f = plan_loocv(pool, held_out, 8, 0.1).folds.at(0);
  const bool ratio = f.train.size() == 90 && f.holdout.size() == 10;

  const bool ok = leaks == 0 && loo.folds.size() == 12 && spread <= 1 && ratio;
  return {ok, fmt("%zu LOO-CV folds, %zu event leaks; 5-fold per-class spread %zu; 9:1 split %zu/%zu",
                  loo.folds.size(), leaks, spread, f.train.size(), f.holdout.size())};
}

// ---- 9 ----
Outcome determinism() {
  std::random_device rd;
  const fs::path root = fs::temp_directory_path() / ("rpdnn_accept_" + std::to_string(rd()));
  fs::create_directories(root);
  write_corpus(root / "corpus.jsonl", synth_corpus(60, Signal::mixed, 9));
  RunConfig cfg;
  cfg.corpus = root / "corpus.jsonl";
  cfg.seed = 9;
  cfg.k = 5;
  cfg.model.epochs = 3;
  std::ostringstream log;
  for (const char* run : {"a", "b"}) {
    cfg.out_dir = root / run;
    cli::cmd_cv(cfg, log);
  }
  std::size_t files = 0, differing = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    const auto name = e.path().filename();
    const auto ext = name.extension();
    if (ext != ".ckpt" && name != "metrics.json") continue;
    ++files;
    const fs::path other = root / "b" / name;
    differing += !fs::exists(other) || slurp(e.path()) != slurp(other);
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  return {differing == 0 && files == 6,
          fmt("%zu files compared (metrics.json + 5 checkpoints), %zu differ", files, differing)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"gradient suite", gradient_suite},   {"masking", masking},
      {"ablation opacity", ablation_opacity}, {"overfit", overfit},
      {"branch learning", branch_learning}, {"metrics oracle", metrics_oracle},
      {"normalization", normalization},     {"cv harness", cv_harness},
      {"determinism", determinism},
  };
  int failures = 0;
  int i = 0;
  for (const auto& [name, run] : criteria) {
    ++i;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i << " (" << name << "): " << o.detail
              << std::endl;
  }
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
