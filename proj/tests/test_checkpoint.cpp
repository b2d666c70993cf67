#include <sstream>

#include "doctest.h"
#include "rpdnn/errors.hpp"
#include "rpdnn/nn/checkpoint.hpp"

using namespace rpdnn;
using namespace rpdnn::nn;

TEST_CASE("binary layout is little-endian and self-describing") {
  Tensor w = Tensor::from({1, 2}, {1.0, -2.5});
  const ParamRef ps[] = {{"w", &w, nullptr}};
  std::ostringstream out;
  write_checkpoint(out, ps);
  const std::string s = out.str();
  REQUIRE(s.size() == 6 + 4 + 1 + 4 + 16 + 16);
  CHECK(s.substr(0, 6) == "RPDNN1");
  CHECK(s[6] == 1);  // u32 name length, low byte first
  CHECK(s[7] == 0);
  CHECK(s[10] == 'w');
  CHECK(s[11] == 2);  // rank
  CHECK(s[15] == 1);  // dim 0
  CHECK(s[23] == 2);  // dim 1
}

TEST_CASE("round trip restores exact values") {
  Tensor a = Tensor::from({2, 2}, {0.1, 1e-300, -7.0, 3.25});
  Tensor b = Tensor::from({3}, {1, 2, 3});
  const ParamRef ps[] = {{"a", &a, nullptr}, {"b", &b, nullptr}};
  std::stringstream ss;
  write_checkpoint(ss, ps);
  const auto loaded = read_checkpoint(ss);
  REQUIRE(loaded.size() == 2);
  Tensor a2({2, 2}), b2({3});
  const ParamRef dst[] = {{"a", &a2, nullptr}, {"b", &b2, nullptr}};
  restore(dst, loaded);
  CHECK(a2 == a);
  CHECK(b2 == b);
}

TEST_CASE("restore rejects mismatches") {
  Tensor a({2});
  const ParamRef ps[] = {{"a", &a, nullptr}};
  std::stringstream ss;
  write_checkpoint(ss, ps);
  const auto loaded = read_checkpoint(ss);
  Tensor wrong({3});
  const ParamRef shape_mismatch[] = {{"a", &wrong, nullptr}};
  CHECK_THROWS_AS(restore(shape_mismatch, loaded), DataError);
  const ParamRef missing[] = {{"a", &a, nullptr}, {"b", &wrong, nullptr}};
  CHECK_THROWS_AS(restore(missing, loaded), DataError);
  const ParamRef renamed[] = {{"z", &a, nullptr}};
  CHECK_THROWS_AS(restore(renamed, loaded), DataError);
}

TEST_CASE("truncated and foreign files") {
  std::istringstream bad("NOTRPD");
  CHECK_THROWS_AS(read_checkpoint(bad), DataError);
  Tensor a({4}, 1.0);
  const ParamRef ps[] = {{"a", &a, nullptr}};
  std::ostringstream out;
  write_checkpoint(out, ps);
  std::istringstream cut(out.str().substr(0, out.str().size() - 3));
  CHECK_THROWS_AS(read_checkpoint(cut), DataError);
}
