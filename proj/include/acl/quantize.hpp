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

#pragma once

#include "acl/matrix.hpp"

namespace acl {

// Uniform quantizer configuration for transmitted states. sigma is the step
// in state units; sigma must be positive when enabled.
struct QuantizerConfig {
  double sigma = 0.0;
  bool enabled = false;
};

// floor(x/sigma + 1/2) * sigma. Floor semantics exactly, so half-steps round
// up, including for negative x. Throws on sigma <= 0.
double quantize_scalar(double x, double sigma);

// Componentwise quantize_scalar.
Vec quantize_vector(const Vec& x, double sigma);

// quantize_vector(x, sigma) - x; each component has magnitude <= sigma/2.
Vec quantization_error(const Vec& x, double sigma);

}  // namespace acl
