// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "rpdnn/errors.hpp"
#include "rpdnn/features.hpp"
#include "rpdnn/gradsuite.hpp"
#include "rpdnn/model.hpp"
#include "rpdnn/nn/checkpoint.hpp"
#include "rpdnn/train.hpp"

namespace rpdnn::cli {
namespace {

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Thread> load_threads(const fs::path& corpus, std::ostream& log) {
  ParseReport report;
  auto threads = filter_candidates(parse_corpus(corpus, &report));
  for (const auto& w : report.warnings) log << "warning: " << w << '\n';
  return threads;
}

FeatureStats stats_for(const RunConfig& cfg, std::span<const Thread> train_threads) {
  if (!cfg.stats.empty()) return load_stats(cfg.stats);
  return compute_thread_stats(train_threads);
}

std::string fold_tag(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fold%02zu", i);
  return buf;
}

struct FoldRun {
  FoldMetrics metrics;
  std::vector<EpochLog> log;
  std::vector<nn::NamedTensor> params;
};

FoldRun run_fold(std::span<const Thread> threads, const Fold& fold, std::size_t index,
                 const RunConfig& cfg, const EmbeddingProvider& provider) {
  const auto train_threads = select(threads, fold.train);
  const auto holdout_threads = select(threads, fold.holdout);
  const auto test_threads = select(threads, fold.test);
  if (test_threads.empty()) throw DataError(fold_tag(index) + ": empty test set");
  const FeatureStats stats = stats_for(cfg, train_threads);

  ModelConfig mc = cfg.model;
  mc.seed = derive_seed(require_seed(cfg), 1000 + index);
  const auto train_set = encode_all(train_threads, stats, provider, mc);
  const auto holdout_set = encode_all(holdout_threads, stats, provider, mc);
  const auto test_set = encode_all(test_threads, stats, provider, mc);

  TrainOptions opts;
  opts.selection = cfg.selection;
  TrainResult tr = train(train_set, holdout_set, mc, opts);
  const Prediction pred = predict(tr.model, test_set);

  FoldRun run;
  run.metrics.name = fold.test_event ? *fold.test_event : fold_tag(index);
  run.metrics.row = metrics(pred.labels, gold_labels(test_set));
  run.log = std::move(tr.log);
  for (const auto& p : tr.model.parameters()) run.params.push_back({p.name, *p.value});
  return run;
}

void save_named(const fs::path& path, std::vector<nn::NamedTensor>& tensors) {
  std::vector<nn::ParamRef> refs;
  for (auto& t : tensors) refs.push_back({t.name, &t.value, nullptr});
  nn::save_checkpoint(path, refs);
}

}  // namespace

std::vector<EventSummary> summarize(std::span<const Thread> threads) {
  std::vector<EventSummary> rows;
  for (const auto& ev : events_of(threads)) {
    EventSummary s;
    s.event = ev;
    std::vector<std::size_t> counts;
    double tdiff = 0.0;
    for (const auto& t : threads) {
      if (t.event != ev) continue;
      (t.label == 1 ? s.rumors : s.non_rumors)++;
      counts.push_back(t.replies.size());
      if (!t.replies.empty()) {
        tdiff += static_cast<double>(t.replies.back().timestamp.millis - t.source.timestamp.millis) /
                 static_cast<double>(kMillisPerMinute);
      }
    }
    std::sort(counts.begin(), counts.end());
    for (auto c : counts) s.total_replies += c;
    const double n = static_cast<double>(counts.size());
    s.avg_replies = static_cast<double>(s.total_replies) / n;
    s.min_replies = counts.front();
    s.max_replies = counts.back();
    const std::size_t mid = counts.size() / 2;
    s.median_replies = counts.size() % 2 == 1
                           ? static_cast<double>(counts[mid])
                           : 0.5 * static_cast<double>(counts[mid - 1] + counts[mid]);
    s.avg_tdiff_minutes = tdiff / n;
    rows.push_back(std::move(s));
  }
  return rows;
}

void write_summary_csv(std::ostream& out, std::span<const EventSummary> rows) {
  out << "event,rumors,non_rumors,total_replies,avg_replies,min_replies,max_replies,"
         "median_replies,avg_tdiff_min\n";
  for (const auto& r : rows) {
    out << r.event << ',' << r.rumors << ',' << r.non_rumors << ',' << r.total_replies << ','
        << fixed(r.avg_replies, 2) << ',' << r.min_replies << ',' << r.max_replies << ','
        << fixed(r.median_replies, 1) << ',' << fixed(r.avg_tdiff_minutes, 2) << '\n';
  }
}

int cmd_ingest(const fs::path& corpus, const fs::path& out, const fs::path& summary,
               std::ostream& log) {
  ParseReport report;
  auto all = parse_corpus(corpus, &report);
  for (const auto& w : report.warnings) log << "warning: " << w << '\n';
  const std::size_t n_in = all.size();
  const auto kept = filter_candidates(std::move(all));
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_corpus(out, kept);
  std::ostringstream csv;
  write_summary_csv(csv, summarize(kept));
  write_text(summary, csv.str());
  log << "ingest: kept " << kept.size() << " of " << n_in << " threads\n";
  return 0;
}

int cmd_stats(const fs::path& corpus, const fs::path& out, std::ostream& log) {
  const auto threads = load_threads(corpus, log);
  const FeatureStats stats = compute_thread_stats(threads);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_stats(out, stats);
  log << "stats: " << stats.n << " replies from " << threads.size() << " threads\n";
  return 0;
}

int cmd_train(const RunConfig& cfg, std::ostream& log) {
  check_run_config(cfg, true);
  const auto threads = load_threads(cfg.corpus, log);
  if (threads.empty()) throw DataError("train: corpus has no usable threads");
  const std::uint64_t seed = require_seed(cfg);

  std::vector<Thread> pool = threads;
  Rng split_rng(derive_seed(seed, 4));
  shuffle(std::span<Thread>(pool), split_rng);
  const auto n_holdout = static_cast<std::size_t>(
      std::llround(cfg.holdout_ratio * static_cast<double>(pool.size())));
  const std::vector<Thread> holdout(pool.end() - static_cast<std::ptrdiff_t>(n_holdout), pool.end());
  pool.resize(pool.size() - n_holdout);

  const FeatureStats stats = stats_for(cfg, pool);
  const EmbeddingProvider provider = make_provider(cfg);
  ModelConfig mc = cfg.model;
  mc.seed = seed;
  const auto train_set = encode_all(pool, stats, provider, mc);
  const auto holdout_set = encode_all(holdout, stats, provider, mc);
  TrainOptions opts;
  opts.selection = cfg.selection;
  TrainResult tr = train(train_set, holdout_set, mc, opts);

  fs::create_directories(cfg.out_dir);
  nn::save_checkpoint(cfg.out_dir / "model.ckpt", tr.model.parameters());
  write_text(cfg.out_dir / "model.json", model_config_to_json(mc));
  save_stats(cfg.out_dir / "stats.json", stats);
  write_epoch_csv(cfg.out_dir / "epochs.csv", tr.log);
  if (!tr.log.empty()) {
    const auto& last = tr.log.back();
    log << "train: " << tr.log.size() << " epochs, loss " << fixed(last.loss)
        << ", train acc " << fixed(last.train_acc) << ", holdout acc "
        << fixed(last.holdout_acc) << '\n';
  }
  return 0;
}

MetricsReport run_plan(std::span<const Thread> threads, const FoldPlan& plan,
                       const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  const EmbeddingProvider provider = make_provider(cfg);
  const std::size_t n = plan.folds.size();
  std::vector<FoldRun> runs(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        runs[i] = run_fold(threads, plan.folds[i], i, cfg, provider);
        std::lock_guard lock(log_mu);
        log << "  " << runs[i].metrics.name << ": f1 " << fixed(runs[i].metrics.row.f1)
            << " acc " << fixed(runs[i].metrics.row.accuracy) << '\n';
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::min(std::max<std::size_t>(cfg.jobs, 1), n);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  fs::create_directories(out_dir);
  std::vector<FoldMetrics> rows;
  for (std::size_t i = 0; i < n; ++i) {
    save_named(out_dir / (fold_tag(i) + ".ckpt"), runs[i].params);
    write_epoch_csv(out_dir / (fold_tag(i) + "_epochs.csv"), runs[i].log);
    rows.push_back(runs[i].metrics);
  }
  MetricsReport report = make_report(std::move(rows));
  write_text(out_dir / "plan.json", plan_to_json(plan));
  write_text(out_dir / "metrics.json", report_to_json(report));
  return report;
}

namespace {

FoldPlan make_plan(std::span<const Thread> threads, const RunConfig& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  if (cfg.scheme == Scheme::kfold) return plan_stratified_kfold(threads, cfg.k, seed);
  std::vector<std::string> events = cfg.test_events;
  if (events.empty()) events = events_of(threads);
  return plan_loocv(threads, events, seed, cfg.holdout_ratio);
}

}  // namespace

int cmd_cv(const RunConfig& cfg, std::ostream& log) {
  check_run_config(cfg, true);
  const auto threads = load_threads(cfg.corpus, log);
  const FoldPlan plan = make_plan(threads, cfg);
  log << scheme_name(plan.scheme) << ": " << plan.folds.size() << " folds, variant "
      << (variant_of(cfg.model.ablation) ? variant_name(*variant_of(cfg.model.ablation))
                                          : std::string_view("custom"))
      << '\n';
  const MetricsReport rep = run_plan(threads, plan, cfg, cfg.out_dir, log);
  log << "mean: P " << fixed(rep.mean.precision) << " R " << fixed(rep.mean.recall) << " F1 "
      << fixed(rep.mean.f1) << " Acc " << fixed(rep.mean.accuracy) << '\n';
  return 0;
}

int cmd_loocv(RunConfig cfg, std::ostream& log) {
  cfg.scheme = Scheme::loocv;
  return cmd_cv(cfg, log);
}

int cmd_ablate(const RunConfig& cfg, std::ostream& log) {
  check_run_config(cfg, true);
  const auto threads = load_threads(cfg.corpus, log);
  const FoldPlan plan = make_plan(threads, cfg);
  std::ostringstream table;
  table << "variant,precision,recall,f1,accuracy\n";
  for (Variant v : kAllVariants) {
    RunConfig vc = cfg;
    vc.model.ablation = ablation_for(v);
    log << variant_name(v) << '\n';
    const MetricsReport rep = run_plan(threads, plan, vc, cfg.out_dir / variant_name(v), log);
    table << variant_name(v) << ',' << num(rep.mean.precision) << ',' << num(rep.mean.recall)
          << ',' << num(rep.mean.f1) << ',' << num(rep.mean.accuracy) << '\n';
  }
  write_text(cfg.out_dir / "ablation.csv", table.str());
  log << table.str();
  return 0;
}

int cmd_export_attention(const fs::path& model_dir, const fs::path& corpus, const fs::path& out,
                         std::ostream& log, std::uint64_t hash_seed) {
  const ModelConfig mc = model_config_from_json(read_text(model_dir / "model.json"));
  const FeatureStats stats = load_stats(model_dir / "stats.json");
  RpdnnModel model(mc);
  nn::restore(model.parameters(), nn::load_checkpoint(model_dir / "model.ckpt"));
  const auto threads = load_threads(corpus, log);
  const auto provider = EmbeddingProvider::hashing(mc.embed_dim, hash_seed);

  std::ostringstream csv;
  csv << "example_id,layer,t,weight\n";
  for (const auto& th : threads) {
    const EncodedExample ex = encode(th, stats, provider, mc);
    const ForwardTrace tr = model.forward(std::span<const EncodedExample>(&ex, 1), false);
    const std::pair<const char*, const nn::Tensor*> layers[] = {
        {"cc", &tr.att_cc}, {"cm", &tr.att_cm}, {"joint", &tr.att_joint}};
    for (const auto& [name, w] : layers) {
      if (w->empty()) continue;
      for (std::size_t t = 0; t < w->dim(1); ++t) {
        csv << ex.thread_id << ',' << name << ',' << t << ',' << num((*w)(0, t)) << '\n';
      }
    }
  }
  write_text(out, csv.str());
  log << "export-attention: " << threads.size() << " examples\n";
  return 0;
}

int cmd_gradcheck(std::ostream& log) {
  bool ok = true;
  for (const auto& c : run_grad_suite()) {
    log << (c.pass ? "PASS " : "FAIL ") << c.name << " max_rel_err=" << c.max_rel_error
        << " checked=" << c.checked << " worst=" << c.worst_tensor << " (" << c.worst_analytic
        << " vs " << c.worst_numeric << ")\n";
    ok = ok && c.pass;
  }
  return ok ? 0 : 3;
}

int cmd_synth(std::size_t n, Signal signal, std::uint64_t seed, std::size_t n_events,
              const fs::path& out, std::ostream& log) {
  SynthOptions opts;
  opts.n_events = n_events;
  const auto threads = synth_corpus(n, signal, seed, opts);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_corpus(out, threads);
  log << "synth: " << threads.size() << " threads (" << signal_name(signal) << ")\n";
  return 0;
}

}  // namespace rpdnn::cli
