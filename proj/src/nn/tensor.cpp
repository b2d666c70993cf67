// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/nn/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "rpdnn/errors.hpp"

namespace rpdnn::nn {
namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(product(shape_), fill) {}

Tensor Tensor::from(std::vector<std::size_t> shape, std::vector<double> values) {
  if (product(shape) != values.size()) {
    throw_shape("Tensor::from", std::to_string(values.size()) + " values for shape of " +
                                    std::to_string(product(shape)));
  }
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = std::move(values);
  return t;
}

std::span<double> Tensor::row(std::size_t i) {
  const std::size_t w = shape_.back();
  return std::span<double>(data_).subspan(i * w, w);
}
std::span<const double> Tensor::row(std::size_t i) const {
  const std::size_t w = shape_.back();
  return std::span<const double>(data_).subspan(i * w, w);
}
std::span<double> Tensor::row(std::size_t i, std::size_t j) { return row(i * shape_[1] + j); }
std::span<const double> Tensor::row(std::size_t i, std::size_t j) const {
  return row(i * shape_[1] + j);
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string Tensor::shape_str() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

Mask::Mask(std::size_t batch, std::size_t time, bool fill)
    : batch_(batch), time_(time), valid_(batch * time, fill ? 1 : 0) {}

Mask Mask::from_lengths(std::span<const std::size_t> lengths, std::size_t time) {
  Mask m(lengths.size(), time, false);
  for (std::size_t b = 0; b < lengths.size(); ++b) {
    if (lengths[b] > time) throw_shape("Mask::from_lengths", "length exceeds time steps");
    for (std::size_t t = 0; t < lengths[b]; ++t) m.set(b, t, true);
  }
  return m;
}

Mask Mask::from_values(std::size_t batch, std::size_t time, std::vector<std::uint8_t> valid) {
  if (valid.size() != batch * time) throw_shape("Mask::from_values", "value count");
  Mask m;
  m.batch_ = batch;
  m.time_ = time;
  m.valid_ = std::move(valid);
  if (!m.prefix_valid()) throw DataError("mask: valid steps must form a prefix");
  return m;
}

std::size_t Mask::length(std::size_t b) const {
  std::size_t n = 0;
  for (std::size_t t = 0; t < time_; ++t) n += valid_[b * time_ + t] ? 1 : 0;
  return n;
}

bool Mask::prefix_valid() const {
  for (std::size_t b = 0; b < batch_; ++b) {
    bool seen_pad = false;
    for (std::size_t t = 0; t < time_; ++t) {
      if (!(*this)(b, t)) {
        seen_pad = true;
      } else if (seen_pad) {
        return false;
      }
    }
  }
  return true;
}

void check_finite(std::span<const double> values, std::string_view layer) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError("non-finite value in " + std::string(layer));
  }
}

}  // namespace rpdnn::nn
