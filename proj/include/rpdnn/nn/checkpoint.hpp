// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rpdnn/nn/tensor.hpp"

namespace rpdnn::nn {

// Binary layout: ASCII magic "RPDNN1", then per tensor until EOF:
//   u32 name length, name bytes, u32 rank, rank x u64 dims,
//   prod(dims) x f64 values. All integers and floats little-endian.

struct NamedTensor {
  std::string name;
  Tensor value;
};

void write_checkpoint(std::ostream& out, std::span<const ParamRef> params);
void save_checkpoint(const std::filesystem::path& path, std::span<const ParamRef> params);

std::vector<NamedTensor> read_checkpoint(std::istream& in);
std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path);

/// Copies loaded values into `params`, matching by name and shape; every
/// parameter must be present. Throws DataError otherwise.
void restore(std::span<const ParamRef> params, const std::vector<NamedTensor>& loaded);

}  // namespace rpdnn::nn
