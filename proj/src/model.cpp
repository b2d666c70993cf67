// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/model.hpp"

#include <algorithm>

#include "rpdnn/errors.hpp"
#include "rpdnn/nn/kernels.hpp"

namespace rpdnn {

using nn::Mask;
using nn::Tensor;

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::full: return "RPDNN";
    case Variant::source_only: return "RPDNN-cxt";
    case Variant::context_only: return "RPDNN-SC";
    case Variant::no_cc: return "RPDNN-CC";
    case Variant::no_cm: return "RPDNN-CM";
    case Variant::no_attention: return "RPDNN-Att";
    case Variant::cm_only: return "RPDNN-SC-CC";
    case Variant::cc_only: return "RPDNN-SC-CM";
  }
  return "?";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (Variant v : kAllVariants) {
    if (variant_name(v) == name) return v;
  }
  return std::nullopt;
}

Ablation ablation_for(Variant v) {
  switch (v) {
    case Variant::full: return {};
    case Variant::source_only: return {true, false, false, true};
    case Variant::context_only: return {false, true, true, true};
    case Variant::no_cc: return {true, false, true, true};
    case Variant::no_cm: return {true, true, false, true};
    case Variant::no_attention: return {true, true, true, false};
    case Variant::cm_only: return {false, false, true, true};
    case Variant::cc_only: return {false, true, false, true};
  }
  return {};
}

std::optional<Variant> variant_of(const Ablation& a) {
  for (Variant v : kAllVariants) {
    if (ablation_for(v) == a) return v;
  }
  return std::nullopt;
}

ModelConfig ModelConfig::paper() { return ModelConfig{}; }

ModelConfig ModelConfig::desk() {
  ModelConfig c;
  c.embed_dim = 32;
  c.context_len = 16;
  c.batch = 16;
  c.lr = 1e-2;
  return c;
}

void ModelConfig::validate() const {
  if (!ablation.use_source && !ablation.use_cc && !ablation.use_cm) {
    throw ConfigError("model config: at least one of source/cc/cm must be enabled");
  }
  if (context_len < 1) throw ConfigError("model config: context_len must be >= 1");
  if (embed_dim < 1) throw ConfigError("model config: embed_dim must be >= 1");
  if (meta_dim != kMetaDim) throw ConfigError("model config: meta_dim must be 27");
  if (lstm_layers < 1 || hidden_multiplier < 1) {
    throw ConfigError("model config: lstm_layers and hidden_multiplier must be >= 1");
  }
  if (!classifier_hidden.empty() && classifier_hidden.size() != 3) {
    throw ConfigError("model config: classifier_hidden needs exactly 3 widths");
  }
  for (auto w : classifier_hidden) {
    if (w < 1) throw ConfigError("model config: classifier widths must be >= 1");
  }
  for (double r : dropout) {
    if (r < 0.0 || r >= 1.0) throw ConfigError("model config: dropout rates must be in [0, 1)");
  }
  if (!(lr > 0.0) || weight_decay < 0.0 || adagrad_eps < 0.0) {
    throw ConfigError("model config: lr must be > 0, weight_decay and eps >= 0");
  }
  if (batch < 1) throw ConfigError("model config: batch must be >= 1");
}

std::size_t ModelConfig::context_dim() const {
  return (ablation.use_cc ? cc_hidden() : 0) + (ablation.use_cm ? cm_hidden() : 0);
}

std::size_t ModelConfig::classifier_input_dim() const {
  return (ablation.use_source ? embed_dim : 0) + context_dim();
}

std::array<std::size_t, 3> ModelConfig::classifier_dims() const {
  if (classifier_hidden.size() == 3) {
    return {classifier_hidden[0], classifier_hidden[1], classifier_hidden[2]};
  }
  const std::size_t in = classifier_input_dim();
  const std::size_t half = std::max<std::size_t>(1, in / 2);
  const std::size_t quarter = std::max<std::size_t>(1, in / 4);
  return {half, quarter, quarter};
}

std::size_t EncodedExample::length() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

EncodedExample encode(const Thread& thread, const FeatureStats& stats,
                      const EmbeddingProvider& provider, const ModelConfig& cfg) {
  if (provider.dim() != cfg.embed_dim) {
    throw ConfigError("encode: provider dim " + std::to_string(provider.dim()) +
                      " differs from embed_dim " + std::to_string(cfg.embed_dim));
  }
  const std::size_t time = cfg.context_len;
  EncodedExample ex;
  ex.sc = provider(thread.source);
  ex.cc = Tensor({time, cfg.embed_dim});
  ex.cm = Tensor({time, kMetaDim});
  ex.mask.assign(time, 0);
  ex.label = thread.label;
  ex.thread_id = thread.id();
  ex.event = thread.event;
  const std::size_t n = std::min(time, thread.replies.size());
  for (std::size_t t = 0; t < n; ++t) {
    const Tweet& reply = thread.replies[t];
    const auto v = provider(reply);
    std::copy(v.begin(), v.end(), ex.cc.row(t).begin());
    const auto m = normalize(extract_features(reply, thread.source), stats);
    std::copy(m.values.begin(), m.values.end(), ex.cm.row(t).begin());
    ex.mask[t] = 1;
  }
  return ex;
}

std::vector<EncodedExample> encode_all(std::span<const Thread> threads, const FeatureStats& stats,
                                       const EmbeddingProvider& provider,
                                       const ModelConfig& cfg) {
  std::vector<EncodedExample> out;
  out.reserve(threads.size());
  for (const auto& th : threads) out.push_back(encode(th, stats, provider, cfg));
  return out;
}

RpdnnModel::RpdnnModel(ModelConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const Ablation& a = cfg_.ablation;
  if (a.use_cc) {
    cc_lstm_.emplace("cc_lstm", cfg_.embed_dim, cfg_.cc_hidden(), cfg_.lstm_layers);
    if (a.use_attention) att_cc_.emplace("att_cc", cfg_.cc_hidden());
  }
  if (a.use_cm) {
    cm_lstm_.emplace("cm_lstm", cfg_.meta_dim, cfg_.cm_hidden(), cfg_.lstm_layers);
    if (a.use_attention) att_cm_.emplace("att_cm", cfg_.cm_hidden());
  }
  if (a.uses_context()) {
    if (a.use_attention) att_joint_.emplace("att_joint", cfg_.context_dim());
    norm_.emplace("norm", cfg_.context_dim());
  }
  const auto dims = cfg_.classifier_dims();
  std::size_t in = cfg_.classifier_input_dim();
  for (std::size_t i = 0; i < 3; ++i) {
    hidden_[i] = nn::Dense("fc" + std::to_string(i + 1), in, dims[i]);
    in = dims[i];
  }
  out_ = nn::Dense("out", in, 2);
}

void RpdnnModel::init(Rng& rng) {
  if (cc_lstm_) cc_lstm_->init(rng);
  if (cm_lstm_) cm_lstm_->init(rng);
  if (att_cc_) att_cc_->init(rng);
  if (att_cm_) att_cm_->init(rng);
  if (att_joint_) att_joint_->init(rng);
  for (auto& d : hidden_) d.init(rng);
  out_.init(rng);
}

std::vector<nn::ParamRef> RpdnnModel::parameters() {
  std::vector<nn::ParamRef> out;
  auto append = [&out](std::vector<nn::ParamRef> p) {
    out.insert(out.end(), p.begin(), p.end());
  };
  if (cc_lstm_) append(cc_lstm_->parameters());
  if (cm_lstm_) append(cm_lstm_->parameters());
  if (att_cc_) append(att_cc_->parameters());
  if (att_cm_) append(att_cm_->parameters());
  if (att_joint_) append(att_joint_->parameters());
  if (norm_) append(norm_->parameters());
  for (auto& d : hidden_) append(d.parameters());
  append(out_.parameters());
  return out;
}

void RpdnnModel::zero_grad() {
  for (auto& p : parameters()) p.grad->fill(0.0);
}

namespace {

Tensor as_sequence(const Tensor& rows) {
  // T x D -> 1 x T x D
  return Tensor::from({1, rows.dim(0), rows.dim(1)},
                      std::vector<double>(rows.values().begin(), rows.values().end()));
}

// Joins two 1 x T x Da / 1 x T x Db sequences feature-wise; either may be empty.
Tensor concat_steps(const Tensor* a, const Tensor* b) {
  const Tensor& ref = a ? *a : *b;
  const std::size_t time = ref.dim(1);
  const std::size_t da = a ? a->dim(2) : 0, db = b ? b->dim(2) : 0;
  Tensor out({1, time, da + db});
  for (std::size_t t = 0; t < time; ++t) {
    auto dst = out.row(0, t);
    if (a) std::copy(a->row(0, t).begin(), a->row(0, t).end(), dst.begin());
    if (b) std::copy(b->row(0, t).begin(), b->row(0, t).end(), dst.begin() + da);
  }
  return out;
}

void split_steps(const Tensor& joint, std::size_t da, Tensor* a, Tensor* b) {
  const std::size_t time = joint.dim(1), total = joint.dim(2);
  if (a) *a = Tensor({1, time, da});
  if (b) *b = Tensor({1, time, total - da});
  for (std::size_t t = 0; t < time; ++t) {
    auto src = joint.row(0, t);
    if (a) std::copy(src.begin(), src.begin() + da, a->row(0, t).begin());
    if (b) std::copy(src.begin() + da, src.end(), b->row(0, t).begin());
  }
}

std::vector<double> row_vector(const Tensor& weights) {
  return {weights.values().begin(), weights.values().end()};
}

}  // namespace

RpdnnModel::StepOutput RpdnnModel::forward_one(const EncodedExample& ex, bool training,
                                               Rng* rng) {
  const Ablation& a = cfg_.ablation;
  StepOutput result;
  std::vector<double> rep;
  rep.reserve(cfg_.classifier_input_dim());
  if (a.use_source) {
    if (ex.sc.size() != cfg_.embed_dim) throw_shape("forward", "source vector size");
    rep.insert(rep.end(), ex.sc.begin(), ex.sc.end());
  }

  if (a.uses_context()) {
    time_ = ex.time();
    if (time_ == 0) throw DataError("thread " + ex.thread_id + ": empty context");
    const Mask mask = Mask::from_values(1, time_, ex.mask);
    const std::size_t length = mask.length(0);
    if (length == 0) throw DataError("thread " + ex.thread_id + ": no valid context steps");
    last_valid_ = length - 1;

    Tensor h_cc, h_cm;
    if (a.use_cc) {
      if (ex.cc.rank() != 2 || ex.cc.dim(0) != time_ || ex.cc.dim(1) != cfg_.embed_dim) {
        throw_shape("forward", "cc matrix " + ex.cc.shape_str());
      }
      h_cc = cc_lstm_->forward(as_sequence(ex.cc), mask);
    }
    if (a.use_cm) {
      if (ex.cm.rank() != 2 || ex.cm.dim(0) != time_ || ex.cm.dim(1) != cfg_.meta_dim) {
        throw_shape("forward", "cm matrix " + ex.cm.shape_str());
      }
      h_cm = cm_lstm_->forward(as_sequence(ex.cm), mask);
    }

    Tensor context({1, cfg_.context_dim()});
    if (a.use_attention) {
      Tensor n_cc, n_cm;
      if (a.use_cc) {
        n_cc = att_cc_->forward(h_cc, mask);
        result.att_cc = row_vector(att_cc_->weights());
      }
      if (a.use_cm) {
        n_cm = att_cm_->forward(h_cm, mask);
        result.att_cm = row_vector(att_cm_->weights());
      }
      const Tensor joint = concat_steps(a.use_cc ? &n_cc : nullptr, a.use_cm ? &n_cm : nullptr);
      context = nn::weighted_sum(att_joint_->forward(joint, mask));
      result.att_joint = row_vector(att_joint_->weights());
    } else {
      const Tensor joint = concat_steps(a.use_cc ? &h_cc : nullptr, a.use_cm ? &h_cm : nullptr);
      std::copy(joint.row(0, last_valid_).begin(), joint.row(0, last_valid_).end(),
                context.row(0).begin());
    }
    const Tensor normed = norm_->forward(context);
    rep.insert(rep.end(), normed.values().begin(), normed.values().end());
  }

  const std::size_t width = rep.size();
  Tensor x = Tensor::from({1, width}, std::move(rep));
  for (std::size_t i = 0; i < 3; ++i) {
    pre_act_[i] = hidden_[i].forward(x);
    Rng fallback(0);
    x = nn::dropout(nn::leaky_relu(pre_act_[i]), cfg_.dropout[i], training,
                    rng ? *rng : fallback, &keep_[i]);
  }
  const Tensor logits = out_.forward(x);
  result.logits = {logits[0], logits[1]};
  return result;
}

void RpdnnModel::backward_one(std::span<const double> d_logits) {
  const Ablation& a = cfg_.ablation;
  Tensor d = Tensor::from({1, 2}, {d_logits[0], d_logits[1]});
  d = out_.backward(d);
  for (std::size_t i = 3; i-- > 0;) {
    for (std::size_t j = 0; j < d.size(); ++j) d[j] *= keep_[i][j];
    d = hidden_[i].backward(nn::leaky_relu_backward(pre_act_[i], d));
  }
  if (!a.uses_context()) return;

  const std::size_t offset = a.use_source ? cfg_.embed_dim : 0;
  Tensor d_norm({1, cfg_.context_dim()});
  std::copy(d.values().begin() + static_cast<std::ptrdiff_t>(offset), d.values().end(),
            d_norm.values().begin());
  const Tensor d_context = norm_->backward(d_norm);

  const std::size_t cc_dim = a.use_cc ? cfg_.cc_hidden() : 0;
  Tensor d_h_cc, d_h_cm;
  if (a.use_attention) {
    const Tensor d_joint = att_joint_->backward(nn::weighted_sum_backward(d_context, time_));
    Tensor d_n_cc, d_n_cm;
    split_steps(d_joint, cc_dim, a.use_cc ? &d_n_cc : nullptr, a.use_cm ? &d_n_cm : nullptr);
    if (a.use_cc) d_h_cc = att_cc_->backward(d_n_cc);
    if (a.use_cm) d_h_cm = att_cm_->backward(d_n_cm);
  } else {
    Tensor d_joint({1, time_, cfg_.context_dim()});
    std::copy(d_context.values().begin(), d_context.values().end(),
              d_joint.row(0, last_valid_).begin());
    split_steps(d_joint, cc_dim, a.use_cc ? &d_h_cc : nullptr, a.use_cm ? &d_h_cm : nullptr);
  }
  if (a.use_cc) cc_lstm_->backward(d_h_cc);
  if (a.use_cm) cm_lstm_->backward(d_h_cm);
}

ForwardTrace RpdnnModel::forward(std::span<const EncodedExample> batch, bool training,
                                 Rng* dropout_rng) {
  if (training && dropout_rng == nullptr) {
    throw std::invalid_argument("RpdnnModel::forward: training needs a dropout rng");
  }
  const std::size_t b = batch.size();
  std::size_t max_time = 0;
  for (const auto& ex : batch) max_time = std::max(max_time, ex.time());
  ForwardTrace trace;
  trace.logits = Tensor({b, 2});
  const Ablation& a = cfg_.ablation;
  const bool att = a.uses_context() && a.use_attention;
  if (att && a.use_cc) trace.att_cc = Tensor({b, max_time});
  if (att && a.use_cm) trace.att_cm = Tensor({b, max_time});
  if (att) trace.att_joint = Tensor({b, max_time});

  for (std::size_t i = 0; i < b; ++i) {
    const StepOutput s = forward_one(batch[i], training, dropout_rng);
    trace.logits(i, 0) = s.logits[0];
    trace.logits(i, 1) = s.logits[1];
    for (std::size_t t = 0; t < s.att_cc.size(); ++t) trace.att_cc(i, t) = s.att_cc[t];
    for (std::size_t t = 0; t < s.att_cm.size(); ++t) trace.att_cm(i, t) = s.att_cm[t];
    for (std::size_t t = 0; t < s.att_joint.size(); ++t) trace.att_joint(i, t) = s.att_joint[t];
  }
  nn::check_finite(trace.logits, "logits");
  trace.probs = nn::softmax_rows(trace.logits);
  return trace;
}

double RpdnnModel::loss_and_grad(std::span<const EncodedExample> batch, bool training,
                                 Rng* dropout_rng) {
  std::vector<const EncodedExample*> ptrs;
  ptrs.reserve(batch.size());
  for (const auto& ex : batch) ptrs.push_back(&ex);
  return loss_and_grad(std::span<const EncodedExample* const>(ptrs), training, dropout_rng);
}

double RpdnnModel::loss_and_grad(std::span<const EncodedExample* const> batch, bool training,
                                 Rng* dropout_rng) {
  if (batch.empty()) throw DataError("loss_and_grad: empty batch");
  if (training && dropout_rng == nullptr) {
    throw std::invalid_argument("RpdnnModel::loss_and_grad: training needs a dropout rng");
  }
  zero_grad();
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const EncodedExample* ex : batch) {
    const StepOutput s = forward_one(*ex, training, dropout_rng);
    const Tensor logits = Tensor::from({1, 2}, {s.logits[0], s.logits[1]});
    nn::check_finite(logits, "logits");
    const int label = ex->label;
    const nn::LossAndGrad lg = nn::cross_entropy(logits, std::span<const int>(&label, 1));
    total += lg.loss;
    backward_one(std::array<double, 2>{lg.grad[0] * inv_b, lg.grad[1] * inv_b});
  }
  return total * inv_b;
}

double RpdnnModel::loss(std::span<const EncodedExample> batch) {
  if (batch.empty()) throw DataError("loss: empty batch");
  double total = 0.0;
  for (const auto& ex : batch) {
    const StepOutput s = forward_one(ex, false, nullptr);
    const Tensor logits = Tensor::from({1, 2}, {s.logits[0], s.logits[1]});
    const int label = ex.label;
    total += nn::cross_entropy(logits, std::span<const int>(&label, 1)).loss;
  }
  return total / static_cast<double>(batch.size());
}

}  // namespace rpdnn
