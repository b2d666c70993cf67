// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rpdnn/embed.hpp"
#include "rpdnn/eval.hpp"
#include "rpdnn/model.hpp"
#include "rpdnn/train.hpp"

namespace rpdnn {

enum class Profile { desk, paper };
Profile parse_profile(std::string_view name);
std::string_view profile_name(Profile p);
ModelConfig profile_config(Profile p);

enum class ProviderKind { hash, table };

struct RunConfig {
  Profile profile = Profile::desk;
  std::filesystem::path corpus;
  std::filesystem::path embeddings;  // required for ProviderKind::table
  std::filesystem::path stats;       // optional precomputed stats
  std::filesystem::path out_dir = "out";
  ProviderKind provider = ProviderKind::hash;
  std::uint64_t hash_seed = 0;
  std::optional<std::uint64_t> seed;
  Scheme scheme = Scheme::kfold;
  std::size_t k = 5;
  std::vector<std::string> test_events;  // empty = every event (LOO-CV)
  double holdout_ratio = 0.1;
  Selection selection = Selection::final_epoch;
  std::size_t jobs = 1;
  ModelConfig model = ModelConfig::desk();
};

/// Reads a config JSON. The "profile" key (default desk) picks the base
/// model settings; keys under "model" override them.
RunConfig config_from_json(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const RunConfig& cfg);

/// Model settings as JSON, the form stored next to checkpoints.
std::string model_config_to_json(const ModelConfig& m);
ModelConfig model_config_from_json(std::string_view text);

/// Seed present and paths referenced by the run exist.
void check_run_config(const RunConfig& cfg, bool needs_corpus);

/// Effective seed; throws ConfigError when none was given.
std::uint64_t require_seed(const RunConfig& cfg);

EmbeddingProvider make_provider(const RunConfig& cfg);

}  // namespace rpdnn
