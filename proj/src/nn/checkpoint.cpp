// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "rpdnn/errors.hpp"

namespace rpdnn::nn {
namespace {

constexpr char kMagic[] = "RPDNN1";
constexpr std::size_t kMagicLen = 6;

template <class U>
void put_le(std::ostream& out, U v) {
  unsigned char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), sizeof buf);
}

template <class U>
bool get_le(std::istream& in, U& v) {
  unsigned char buf[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof buf)) return false;
  v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
  return true;
}

}  // namespace

void write_checkpoint(std::ostream& out, std::span<const ParamRef> params) {
  out.write(kMagic, kMagicLen);
  for (const auto& p : params) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    const auto& shape = p.value->shape();
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
    for (auto d : shape) put_le<std::uint64_t>(out, d);
    for (double v : p.value->values()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
}

void save_checkpoint(const std::filesystem::path& path, std::span<const ParamRef> params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  write_checkpoint(out, params);
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

std::vector<NamedTensor> read_checkpoint(std::istream& in) {
  char magic[kMagicLen];
  if (!in.read(magic, kMagicLen) || std::memcmp(magic, kMagic, kMagicLen) != 0) {
    throw DataError("checkpoint: bad magic");
  }
  std::vector<NamedTensor> out;
  while (in.peek() != std::char_traits<char>::eof()) {
    std::uint32_t name_len = 0, rank = 0;
    if (!get_le(in, name_len) || name_len > (1u << 16)) throw DataError("checkpoint: truncated name");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw DataError("checkpoint: truncated name");
    if (!get_le(in, rank) || rank > 8) throw DataError("checkpoint: bad rank for " + name);
    std::vector<std::size_t> shape(rank);
    std::size_t count = 1;
    for (auto& d : shape) {
      std::uint64_t v;
      if (!get_le(in, v)) throw DataError("checkpoint: truncated shape for " + name);
      d = static_cast<std::size_t>(v);
      count *= d;
    }
    std::vector<double> values(count);
    for (auto& v : values) {
      std::uint64_t bits;
      if (!get_le(in, bits)) throw DataError("checkpoint: truncated values for " + name);
      v = std::bit_cast<double>(bits);
    }
    out.push_back({std::move(name), Tensor::from(std::move(shape), std::move(values))});
  }
  return out;
}

std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

void restore(std::span<const ParamRef> params, const std::vector<NamedTensor>& loaded) {
  std::map<std::string, const Tensor*> by_name;
  for (const auto& t : loaded) by_name[t.name] = &t.value;
  for (const auto& p : params) {
    const auto it = by_name.find(p.name);
    if (it == by_name.end()) throw DataError("checkpoint: missing tensor " + p.name);
    if (!it->second->same_shape(*p.value)) {
      throw DataError("checkpoint: tensor " + p.name + " has shape " + it->second->shape_str() +
                      ", model expects " + p.value->shape_str());
    }
    *p.value = *it->second;
  }
  if (by_name.size() != params.size()) throw DataError("checkpoint: unexpected extra tensors");
}

}  // namespace rpdnn::nn
