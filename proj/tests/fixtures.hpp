// Copyright 2026 The oamtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared, lazily built test inputs. Building the enlarged basis and the
// default projector set is the expensive part of most suites.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "oamtomo/basis.hpp"
#include "oamtomo/hologram.hpp"
#include "oamtomo/measurement.hpp"

namespace oamtomo::testing {

inline const EnlargedBasis& reference_basis() {
  static const EnlargedBasis basis = build_enlarged_basis(reference_grid());
  return basis;
}

inline const std::vector<ProjectionSetting>& default_campaign_settings() {
  static const std::vector<ProjectionSetting> settings = default_settings(2400, 1);
  return settings;
}

inline const std::vector<ProjectorState>& default_projectors() {
  static const std::vector<ProjectorState> projectors =
      projector_states(transforms_of(default_campaign_settings()), reference_basis());
  return projectors;
}

// Closed-form fundamental Gaussian, unit L2 norm.
inline double gaussian00(double x, double y, double w = 1.0) {
  return std::sqrt(2.0 / std::numbers::pi) / w * std::exp(-(x * x + y * y) / (w * w));
}

// Inner charge states H_{+-1}(0)|0>: the Gaussian times e^{+-i theta}.
inline std::complex<double> charge_state(double x, double y, int sign, double w = 1.0) {
  const double r = std::hypot(x, y);
  if (r == 0.0) return gaussian00(x, y, w);
  return gaussian00(x, y, w) * std::complex<double>(x / r, sign * y / r);
}

}  // namespace oamtomo::testing
