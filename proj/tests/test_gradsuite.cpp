#include "doctest.h"
#include "rpdnn/gradsuite.hpp"
#include "rpdnn/nn/gradcheck.hpp"

using namespace rpdnn;

TEST_CASE("every case of the suite passes") {
  const auto cases = run_grad_suite();
  CHECK(cases.size() == 9 + 8);
  for (const auto& c : cases) {
    CHECK_MESSAGE(c.pass, c.name << " max_rel_err=" << c.max_rel_error << " at " << c.worst_tensor);
    CHECK(c.checked > 0);
  }
}

TEST_CASE("the checker notices a wrong gradient") {
  std::vector<double> theta = {0.3, -1.1};
  auto f = [&] { return theta[0] * theta[0] + 3.0 * theta[1]; };
  const std::vector<double> right = {0.6, 3.0};
  const std::vector<double> wrong = {0.6, 3.3};
  CHECK(nn::grad_check(f, theta, right).max_rel_error < 1e-8);
  const auto r = nn::grad_check(f, theta, wrong);
  CHECK(r.max_rel_error > 0.05);
  CHECK(r.worst_index == 1);
  CHECK(nn::directional_check(f, theta, wrong, 4, 1).max_rel_error > 1e-3);
  CHECK(nn::directional_check(f, theta, right, 4, 1).max_rel_error < 1e-8);
  // theta is restored after checking.
  CHECK(theta == std::vector<double>{0.3, -1.1});
}

TEST_CASE("relative error conventions") {
  CHECK(nn::relative_error(0.0, 0.0) == 0.0);
  CHECK(nn::relative_error(1.0, 1.5) == doctest::Approx(1.0 / 3.0));
  CHECK(nn::relative_error(1e-12, 0.0) == doctest::Approx(1e-4));
}

TEST_CASE("sample_indices") {
  CHECK(nn::sample_indices(3, 10, 1) == std::vector<std::size_t>{0, 1, 2});
  const auto s = nn::sample_indices(100, 10, 1);
  CHECK(s.size() == 10);
  CHECK(std::is_sorted(s.begin(), s.end()));
  CHECK(nn::sample_indices(100, 10, 1) == s);
}
