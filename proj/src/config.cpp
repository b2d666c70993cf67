// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rpdnn/errors.hpp"

namespace rpdnn {

using json = nlohmann::ordered_json;

Profile parse_profile(std::string_view name) {
  if (name == "desk") return Profile::desk;
  if (name == "paper") return Profile::paper;
  throw ConfigError("unknown profile '" + std::string(name) + "' (expected desk or paper)");
}

std::string_view profile_name(Profile p) { return p == Profile::desk ? "desk" : "paper"; }

ModelConfig profile_config(Profile p) {
  return p == Profile::desk ? ModelConfig::desk() : ModelConfig::paper();
}

namespace {

json model_json(const ModelConfig& m) {
  json j;
  j["embed_dim"] = m.embed_dim;
  j["context_len"] = m.context_len;
  j["lstm_layers"] = m.lstm_layers;
  j["hidden_multiplier"] = m.hidden_multiplier;
  j["classifier_hidden"] = m.classifier_hidden;
  j["dropout"] = m.dropout;
  j["lr"] = m.lr;
  j["weight_decay"] = m.weight_decay;
  j["adagrad_eps"] = m.adagrad_eps;
  j["batch"] = m.batch;
  j["epochs"] = m.epochs;
  j["seed"] = m.seed;
  const auto v = variant_of(m.ablation);
  j["variant"] = v ? variant_name(*v) : "custom";
  j["ablation"] = {{"use_source", m.ablation.use_source},
                   {"use_cc", m.ablation.use_cc},
                   {"use_cm", m.ablation.use_cm},
                   {"use_attention", m.ablation.use_attention}};
  return j;
}

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

void apply_model(const json& j, ModelConfig& m) {
  static const char* kKeys[] = {"embed_dim",    "context_len", "lstm_layers", "hidden_multiplier",
                                "classifier_hidden", "dropout", "lr",        "weight_decay",
                                "adagrad_eps",  "batch",       "epochs",      "seed",
                                "variant",      "ablation"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw ConfigError("config: unknown model key '" + key + "'");
    }
  }
  take(j, "embed_dim", m.embed_dim);
  take(j, "context_len", m.context_len);
  take(j, "lstm_layers", m.lstm_layers);
  take(j, "hidden_multiplier", m.hidden_multiplier);
  take(j, "classifier_hidden", m.classifier_hidden);
  take(j, "dropout", m.dropout);
  take(j, "lr", m.lr);
  take(j, "weight_decay", m.weight_decay);
  take(j, "adagrad_eps", m.adagrad_eps);
  take(j, "batch", m.batch);
  take(j, "epochs", m.epochs);
  take(j, "seed", m.seed);
  if (j.contains("variant") && j.at("variant") != "custom") {
    const auto name = j.at("variant").get<std::string>();
    const auto v = parse_variant(name);
    if (!v) throw ConfigError("config: unknown variant '" + name + "'");
    m.ablation = ablation_for(*v);
  }
  if (j.contains("ablation")) {
    const json& a = j.at("ablation");
    take(a, "use_source", m.ablation.use_source);
    take(a, "use_cc", m.ablation.use_cc);
    take(a, "use_cm", m.ablation.use_cm);
    take(a, "use_attention", m.ablation.use_attention);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RunConfig config_from_json(std::string_view text) {
  RunConfig cfg;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    static const char* kKeys[] = {"profile", "corpus",  "embeddings",    "stats",     "out_dir",
                                  "provider", "hash_seed", "seed",       "scheme",    "k",
                                  "test_events", "holdout_ratio", "selection", "jobs", "model"};
    for (const auto& [key, _] : j.items()) {
      if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    }
    if (j.contains("profile")) cfg.profile = parse_profile(j["profile"].get<std::string>());
    cfg.model = profile_config(cfg.profile);
    if (j.contains("corpus")) cfg.corpus = j["corpus"].get<std::string>();
    if (j.contains("embeddings")) cfg.embeddings = j["embeddings"].get<std::string>();
    if (j.contains("stats")) cfg.stats = j["stats"].get<std::string>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("provider")) {
      const auto p = j["provider"].get<std::string>();
      if (p == "hash") cfg.provider = ProviderKind::hash;
      else if (p == "table") cfg.provider = ProviderKind::table;
      else throw ConfigError("config: provider must be hash or table, got '" + p + "'");
    }
    take(j, "hash_seed", cfg.hash_seed);
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("scheme")) cfg.scheme = parse_scheme(j["scheme"].get<std::string>());
    take(j, "k", cfg.k);
    take(j, "test_events", cfg.test_events);
    take(j, "holdout_ratio", cfg.holdout_ratio);
    if (j.contains("selection")) {
      const auto s = j["selection"].get<std::string>();
      if (s == "final") cfg.selection = Selection::final_epoch;
      else if (s == "best_f1") cfg.selection = Selection::best_holdout_f1;
      else throw ConfigError("config: selection must be final or best_f1, got '" + s + "'");
    }
    take(j, "jobs", cfg.jobs);
    if (j.contains("model")) apply_model(j["model"], cfg.model);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) { return config_from_json(read_file(path)); }

std::string config_to_json(const RunConfig& cfg) {
  json j;
  j["profile"] = profile_name(cfg.profile);
  j["corpus"] = cfg.corpus.string();
  j["embeddings"] = cfg.embeddings.string();
  j["stats"] = cfg.stats.string();
  j["out_dir"] = cfg.out_dir.string();
  j["provider"] = cfg.provider == ProviderKind::hash ? "hash" : "table";
  j["hash_seed"] = cfg.hash_seed;
  if (cfg.seed) j["seed"] = *cfg.seed;
  j["scheme"] = scheme_name(cfg.scheme);
  j["k"] = cfg.k;
  j["test_events"] = cfg.test_events;
  j["holdout_ratio"] = cfg.holdout_ratio;
  j["selection"] = cfg.selection == Selection::final_epoch ? "final" : "best_f1";
  j["jobs"] = cfg.jobs;
  j["model"] = model_json(cfg.model);
  return j.dump(2) + "\n";
}

std::string model_config_to_json(const ModelConfig& m) { return model_json(m).dump(2) + "\n"; }

ModelConfig model_config_from_json(std::string_view text) {
  ModelConfig m = ModelConfig::desk();
  try {
    json j = json::parse(text);
    // Stored configs carry both forms; the explicit switches are authoritative.
    j.erase("variant");
    apply_model(j, m);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  m.validate();
  return m;
}

std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.seed) throw ConfigError("a seed is required (config \"seed\" or --seed)");
  return *cfg.seed;
}

void check_run_config(const RunConfig& cfg, bool needs_corpus) {
  require_seed(cfg);
  cfg.model.validate();
  if (needs_corpus) {
    if (cfg.corpus.empty()) throw ConfigError("no corpus given");
    if (!std::filesystem::exists(cfg.corpus)) {
      throw ConfigError("corpus " + cfg.corpus.string() + " does not exist");
    }
  }
  if (cfg.provider == ProviderKind::table) {
    if (cfg.embeddings.empty()) throw ConfigError("provider table needs an embeddings path");
    if (!std::filesystem::exists(cfg.embeddings)) {
      throw ConfigError("embeddings " + cfg.embeddings.string() + " does not exist");
    }
  }
  if (!cfg.stats.empty() && !std::filesystem::exists(cfg.stats)) {
    throw ConfigError("stats " + cfg.stats.string() + " does not exist");
  }
  if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (!(cfg.holdout_ratio >= 0.0 && cfg.holdout_ratio < 1.0)) {
    throw ConfigError("holdout_ratio must be in [0, 1)");
  }
}

EmbeddingProvider make_provider(const RunConfig& cfg) {
  if (cfg.provider == ProviderKind::table) {
    return EmbeddingProvider(load_table(cfg.embeddings, cfg.model.embed_dim), std::nullopt);
  }
  return EmbeddingProvider::hashing(cfg.model.embed_dim, cfg.hash_seed);
}

}  // namespace rpdnn
