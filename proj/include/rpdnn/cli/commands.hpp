// SPDX-License-Identifier: Apache-2.0
#pragma once

// Subcommand bodies. Each returns a process exit code and throws the
// error types in errors.hpp for the caller to map.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rpdnn/config.hpp"
#include "rpdnn/eval.hpp"
#include "rpdnn/ingest.hpp"
#include "rpdnn/synth.hpp"

namespace rpdnn::cli {

namespace fs = std::filesystem;

struct EventSummary {
  std::string event;
  std::size_t rumors = 0;
  std::size_t non_rumors = 0;
  std::size_t total_replies = 0;
  double avg_replies = 0.0;
  std::size_t min_replies = 0;
  std::size_t max_replies = 0;
  double median_replies = 0.0;
  double avg_tdiff_minutes = 0.0;  // source to last reply, averaged over threads
};

/// One row per event in first-appearance order.
std::vector<EventSummary> summarize(std::span<const Thread> threads);
void write_summary_csv(std::ostream& out, std::span<const EventSummary> rows);

/// Writes `out` (filtered JSONL) and `summary` (CSV).
int cmd_ingest(const fs::path& corpus, const fs::path& out, const fs::path& summary,
               std::ostream& log);
int cmd_stats(const fs::path& corpus, const fs::path& out, std::ostream& log);

/// Seeded train/holdout split. Writes model.ckpt, model.json, stats.json and
/// epochs.csv into cfg.out_dir.
int cmd_train(const RunConfig& cfg, std::ostream& log);

/// Folds per cfg.scheme. Writes plan.json, metrics.json and per-fold
/// checkpoints and epoch logs into cfg.out_dir.
int cmd_cv(const RunConfig& cfg, std::ostream& log);
int cmd_loocv(RunConfig cfg, std::ostream& log);

/// All eight variants over one plan; writes ablation.csv plus one
/// subdirectory per variant.
int cmd_ablate(const RunConfig& cfg, std::ostream& log);

/// CSV example_id,layer,t,weight for the cc, cm and joint attention layers
/// of the model saved in `model_dir` by cmd_train.
int cmd_export_attention(const fs::path& model_dir, const fs::path& corpus, const fs::path& out,
                         std::ostream& log, std::uint64_t hash_seed = 0);

/// Returns 0 when every case passes, 3 otherwise.
int cmd_gradcheck(std::ostream& log);

int cmd_synth(std::size_t n, Signal signal, std::uint64_t seed, std::size_t n_events,
              const fs::path& out, std::ostream& log);

/// Runs one variant over a plan; the building block of cv and ablate.
MetricsReport run_plan(std::span<const Thread> threads, const FoldPlan& plan,
                       const RunConfig& cfg, const fs::path& out_dir, std::ostream& log);

}  // namespace rpdnn::cli
