// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rpdnn::nn {

/// Dense row-major tensor of doubles (rank 1 to 3 in practice).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::initializer_list<std::size_t> shape, double fill = 0.0)
      : Tensor(std::vector<std::size_t>(shape), fill) {}

  static Tensor from(std::vector<std::size_t> shape, std::vector<double> values);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  /// Innermost-dimension slice: row(i) of a matrix, row(b, t) of a rank-3 tensor.
  std::span<double> row(std::size_t i);
  std::span<const double> row(std::size_t i) const;
  std::span<double> row(std::size_t i, std::size_t j);
  std::span<const double> row(std::size_t i, std::size_t j) const;

  void fill(double v);
  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  std::string shape_str() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

/// Validity of each (batch, time) step; valid steps form a prefix per row.
class Mask {
 public:
  Mask() = default;
  Mask(std::size_t batch, std::size_t time, bool fill = true);

  static Mask from_lengths(std::span<const std::size_t> lengths, std::size_t time);
  /// Throws DataError if any row is not prefix-valid.
  static Mask from_values(std::size_t batch, std::size_t time, std::vector<std::uint8_t> valid);

  std::size_t batch() const { return batch_; }
  std::size_t time() const { return time_; }
  bool operator()(std::size_t b, std::size_t t) const { return valid_[b * time_ + t] != 0; }
  void set(std::size_t b, std::size_t t, bool v) { valid_[b * time_ + t] = v ? 1 : 0; }
  /// Number of valid steps in row b.
  std::size_t length(std::size_t b) const;
  bool prefix_valid() const;

 private:
  std::size_t batch_ = 0;
  std::size_t time_ = 0;
  std::vector<std::uint8_t> valid_;
};

/// Named view of a learnable tensor and its gradient accumulator. Layers
/// own the storage; models hand out refs in a fixed order.
struct ParamRef {
  std::string name;
  Tensor* value = nullptr;
  Tensor* grad = nullptr;
};

/// Throws NumericError naming `layer` when any value is NaN or infinite.
void check_finite(std::span<const double> values, std::string_view layer);
inline void check_finite(const Tensor& t, std::string_view layer) { check_finite(t.values(), layer); }

}  // namespace rpdnn::nn
