// SPDX-License-Identifier: Apache-2.0
#pragma once

// Context-aware rumor classifier over one source tweet and its replies:
//
//   replies' content  -> stacked LSTM -> attention (per branch) --+
//   replies' metadata -> stacked LSTM -> attention (per branch) --+-> concat per step
//        -> joint attention -> sum over time -> layer norm -> [source ; context]
//        -> 3 x (dense, leaky ReLU, dropout) -> dense -> 2 logits
//
// Ablation switches remove input streams or the attention stack.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpdnn/embed.hpp"
#include "rpdnn/features.hpp"
#include "rpdnn/ingest.hpp"
#include "rpdnn/nn/attention.hpp"
#include "rpdnn/nn/layers.hpp"
#include "rpdnn/nn/lstm.hpp"
#include "rpdnn/nn/tensor.hpp"
#include "rpdnn/rng.hpp"

namespace rpdnn {

struct Ablation {
  bool use_source = true;
  bool use_cc = true;
  bool use_cm = true;
  bool use_attention = true;

  bool uses_context() const { return use_cc || use_cm; }
  friend bool operator==(const Ablation&, const Ablation&) = default;
};

enum class Variant {
  full,          // RPDNN
  source_only,   // RPDNN-cxt
  context_only,  // RPDNN-SC
  no_cc,         // RPDNN-CC
  no_cm,         // RPDNN-CM
  no_attention,  // RPDNN-Att
  cm_only,       // RPDNN-SC-CC
  cc_only,       // RPDNN-SC-CM
};

inline constexpr std::array<Variant, 8> kAllVariants = {
    Variant::full,  Variant::source_only,  Variant::context_only, Variant::no_cc,
    Variant::no_cm, Variant::no_attention, Variant::cm_only,      Variant::cc_only,
};

std::string_view variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);
Ablation ablation_for(Variant v);
/// The named variant with exactly these switches, if any.
std::optional<Variant> variant_of(const Ablation& a);

struct ModelConfig {
  std::size_t embed_dim = 1024;
  std::size_t meta_dim = kMetaDim;
  std::size_t context_len = 200;
  std::size_t lstm_layers = 2;
  std::size_t hidden_multiplier = 2;
  /// Widths of the three hidden dense layers; empty selects
  /// {in/2, in/4, in/4} of the classifier input width.
  std::vector<std::size_t> classifier_hidden;
  std::array<double, 3> dropout = {0.2, 0.3, 0.3};
  double lr = 1e-4;
  double weight_decay = 1e-5;
  double adagrad_eps = 1e-8;
  std::size_t batch = 128;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  Ablation ablation;

  /// E=1024, T=200, batch 128, lr 1e-4.
  static ModelConfig paper();
  /// E=32, T=16, batch 16 with a larger learning rate for CPU-scale runs.
  static ModelConfig desk();

  /// Throws ConfigError on invalid values.
  void validate() const;

  std::size_t cc_hidden() const { return hidden_multiplier * embed_dim; }
  std::size_t cm_hidden() const { return hidden_multiplier * meta_dim; }
  std::size_t context_dim() const;
  std::size_t classifier_input_dim() const;
  std::array<std::size_t, 3> classifier_dims() const;
};

/// Model-ready thread: source vector, per-reply matrices, validity mask.
struct EncodedExample {
  std::vector<double> sc;          // E
  nn::Tensor cc;                   // T x E
  nn::Tensor cm;                   // T x meta_dim, normalized
  std::vector<std::uint8_t> mask;  // T, valid prefix
  int label = 0;
  std::string thread_id;
  std::string event;

  std::size_t time() const { return mask.size(); }
  std::size_t length() const;
};

/// Keeps the earliest `cfg.context_len` replies; pads with zero rows.
EncodedExample encode(const Thread& thread, const FeatureStats& stats,
                      const EmbeddingProvider& provider, const ModelConfig& cfg);

std::vector<EncodedExample> encode_all(std::span<const Thread> threads, const FeatureStats& stats,
                                       const EmbeddingProvider& provider, const ModelConfig& cfg);

struct ForwardTrace {
  nn::Tensor logits;     // B x 2
  nn::Tensor probs;      // B x 2
  nn::Tensor att_cc;     // B x T, empty when that attention is disabled
  nn::Tensor att_cm;     // B x T
  nn::Tensor att_joint;  // B x T
};

class RpdnnModel {
 public:
  explicit RpdnnModel(ModelConfig cfg);

  /// He-normal weights, zero biases, unit layer-norm gain.
  void init(Rng& rng);

  /// Dropout is drawn from `dropout_rng` when training; it may be null at inference.
  ForwardTrace forward(std::span<const EncodedExample> batch, bool training,
                       Rng* dropout_rng = nullptr);

  /// Zeroes gradients, then accumulates d(mean loss)/d(theta) over the batch.
  /// Returns the mean cross-entropy.
  double loss_and_grad(std::span<const EncodedExample> batch, bool training,
                       Rng* dropout_rng = nullptr);
  double loss_and_grad(std::span<const EncodedExample* const> batch, bool training,
                       Rng* dropout_rng = nullptr);

  /// Mean cross-entropy at inference (no dropout, no gradients).
  double loss(std::span<const EncodedExample> batch);

  std::vector<nn::ParamRef> parameters();
  void zero_grad();
  const ModelConfig& config() const { return cfg_; }

 private:
  struct StepOutput {
    std::array<double, 2> logits{};
    std::vector<double> att_cc, att_cm, att_joint;
  };

  StepOutput forward_one(const EncodedExample& ex, bool training, Rng* rng);
  void backward_one(std::span<const double> d_logits);

  ModelConfig cfg_;
  std::optional<nn::StackedLstm> cc_lstm_, cm_lstm_;
  std::optional<nn::Attention> att_cc_, att_cm_, att_joint_;
  std::optional<nn::LayerNorm> norm_;
  std::array<nn::Dense, 3> hidden_;
  nn::Dense out_;

  // Per-example caches from the latest forward_one.
  std::size_t time_ = 0;
  std::size_t last_valid_ = 0;
  std::array<nn::Tensor, 3> pre_act_, keep_;
};

}  // namespace rpdnn
