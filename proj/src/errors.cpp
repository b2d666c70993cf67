// SPDX-License-Identifier: Apache-2.0
#include "rpdnn/errors.hpp"

namespace rpdnn {

void throw_shape(const std::string& where, const std::string& what) {
  throw ShapeError(where + ": shape mismatch: " + what);
}

}  // namespace rpdnn
