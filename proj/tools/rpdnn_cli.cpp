// SPDX-License-Identifier: Apache-2.0
// rpdnn: command-line front end for ingest, training, evaluation and export.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rpdnn/cli/commands.hpp"
#include "rpdnn/errors.hpp"

namespace {

using namespace rpdnn;

struct RunFlags {
  std::string corpus, out_dir, stats, embeddings, variant, scheme, selection;
  std::optional<std::size_t> epochs, k;
  std::optional<double> lr;
  std::optional<std::uint64_t> hash_seed;
  std::vector<std::string> test_events;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--corpus", f.corpus, "Filtered thread corpus (JSONL)");
  cmd->add_option("--out-dir", f.out_dir, "Output directory");
  cmd->add_option("--stats", f.stats, "Precomputed feature stats JSON");
  cmd->add_option("--embeddings", f.embeddings, "Embedding table; selects the table provider");
  cmd->add_option("--variant", f.variant, "Model variant, e.g. RPDNN or RPDNN-SC-CM");
  cmd->add_option("--epochs", f.epochs, "Training epochs");
  cmd->add_option("--lr", f.lr, "AdaGrad learning rate");
  cmd->add_option("--hash-seed", f.hash_seed, "Seed of the hash embedder");
  cmd->add_option("--selection", f.selection, "final or best_f1");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig resolve(const std::string& config_path, const std::string& profile,
                  std::optional<std::uint64_t> seed, std::optional<std::size_t> jobs,
                  const RunFlags& f) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  if (!config_path.empty()) {
    try {
      j = nlohmann::ordered_json::parse(slurp(config_path));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(config_path + ": " + e.what());
    }
  }
  if (!profile.empty()) j["profile"] = profile;
  RunConfig cfg = config_from_json(j.dump());
  if (seed) cfg.seed = *seed;
  if (jobs) cfg.jobs = *jobs;
  if (!f.corpus.empty()) cfg.corpus = f.corpus;
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  if (!f.stats.empty()) cfg.stats = f.stats;
  if (!f.embeddings.empty()) {
    cfg.embeddings = f.embeddings;
    cfg.provider = ProviderKind::table;
  }
  if (!f.variant.empty()) {
    const auto v = parse_variant(f.variant);
    if (!v) throw ConfigError("unknown variant '" + f.variant + "'");
    cfg.model.ablation = ablation_for(*v);
  }
  if (f.epochs) cfg.model.epochs = *f.epochs;
  if (f.lr) cfg.model.lr = *f.lr;
  if (f.hash_seed) cfg.hash_seed = *f.hash_seed;
  if (!f.selection.empty()) {
    if (f.selection == "final") cfg.selection = Selection::final_epoch;
    else if (f.selection == "best_f1") cfg.selection = Selection::best_holdout_f1;
    else throw ConfigError("selection must be final or best_f1");
  }
  if (!f.scheme.empty()) cfg.scheme = parse_scheme(f.scheme);
  if (f.k) cfg.k = *f.k;
  if (!f.test_events.empty()) cfg.test_events = f.test_events;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-aware rumor detection: ingest, train, evaluate, export"};
  app.require_subcommand(1);

  std::string config_path, profile;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  app.add_option("--config", config_path, "Run config JSON");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--jobs", jobs, "Folds trained in parallel");
  app.add_option("--profile", profile, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));

  std::string in_path, out_path, summary_path;
  auto* ingest = app.add_subcommand("ingest", "Parse and filter a raw corpus");
  ingest->add_option("--corpus", in_path, "Raw corpus JSONL")->required();
  ingest->add_option("--out", out_path, "Filtered JSONL")->required();
  ingest->add_option("--summary", summary_path, "Per-event summary CSV")->required();

  auto* stats = app.add_subcommand("stats", "Feature statistics over a training corpus");
  stats->add_option("--corpus", in_path, "Corpus JSONL")->required();
  stats->add_option("--out", out_path, "Stats JSON")->required();

  RunFlags flags;
  auto* train = app.add_subcommand("train", "Single train/holdout run");
  add_run_flags(train, flags);
  auto* cv = app.add_subcommand("cv", "Cross-validation (scheme from config)");
  add_run_flags(cv, flags);
  cv->add_option("--scheme", flags.scheme, "kfold or loocv");
  cv->add_option("--k", flags.k, "Number of folds for kfold");
  auto* loocv = app.add_subcommand("loocv", "Leave-one-event-out cross-validation");
  add_run_flags(loocv, flags);
  loocv->add_option("--test-events", flags.test_events, "Events to hold out (default: all)");
  auto* ablate = app.add_subcommand("ablate", "All eight variants over one fold plan");
  add_run_flags(ablate, flags);
  ablate->add_option("--scheme", flags.scheme, "kfold or loocv");
  ablate->add_option("--k", flags.k, "Number of folds for kfold");

  std::string model_dir;
  std::uint64_t export_hash_seed = 0;
  auto* export_att = app.add_subcommand("export-attention", "Attention weights as CSV");
  export_att->add_option("--model-dir", model_dir, "Directory written by train")->required();
  export_att->add_option("--corpus", in_path, "Threads to explain")->required();
  export_att->add_option("--out", out_path, "Output CSV")->required();
  export_att->add_option("--hash-seed", export_hash_seed, "Seed of the hash embedder");

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient suite");

  std::size_t synth_n = 64, synth_events = 4;
  std::string synth_signal = "mixed";
  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus");
  synth->add_option("--n", synth_n, "Number of threads");
  synth->add_option("--signal", synth_signal, "cc, cm, sc or mixed");
  synth->add_option("--events", synth_events, "Number of events");
  synth->add_option("--out", out_path, "Output JSONL")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*ingest) return cli::cmd_ingest(in_path, out_path, summary_path, std::cerr);
    if (*stats) return cli::cmd_stats(in_path, out_path, std::cerr);
    if (*gradcheck) return cli::cmd_gradcheck(std::cout);
    if (*synth) {
      if (!seed) throw ConfigError("synth needs --seed");
      return cli::cmd_synth(synth_n, parse_signal(synth_signal), *seed, synth_events,
                            out_path, std::cerr);
    }
    if (*export_att) {
      return cli::cmd_export_attention(model_dir, in_path, out_path, std::cerr, export_hash_seed);
    }
    const RunConfig cfg = resolve(config_path, profile, seed, jobs, flags);
    if (*train) return cli::cmd_train(cfg, std::cerr);
    if (*cv) return cli::cmd_cv(cfg, std::cerr);
    if (*loocv) return cli::cmd_loocv(cfg, std::cerr);
    if (*ablate) return cli::cmd_ablate(cfg, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
