// Copyright 2026 The acl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "acl/quantize.hpp"

#include <cmath>
#include <stdexcept>

namespace acl {

double quantize_scalar(double x, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("quantize: sigma must be positive");
  if (!std::isfinite(x)) throw std::invalid_argument("quantize: non-finite input");
  return std::floor(x / sigma + 0.5) * sigma;
}

Vec quantize_vector(const Vec& x, double sigma) {
  Vec out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = quantize_scalar(x[k], sigma);
  return out;
}

Vec quantization_error(const Vec& x, double sigma) {
  Vec out = quantize_vector(x, sigma);
  for (std::size_t k = 0; k < x.size(); ++k) out[k] -= x[k];
  return out;
}

}  // namespace acl
