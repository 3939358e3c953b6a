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

#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "oamtomo/optics.hpp"

namespace oamtomo {

class EnlargedBasis;

/// Fork hologram of integer charge whose dislocation sits at (dx, dy).
/// Charge 0 is the identity.
struct HologramSpec {
  int charge = 0;
  double dx = 0.0;
  double dy = 0.0;

  friend bool operator==(const HologramSpec&, const HologramSpec&) = default;
};

/// A +1/-1 hologram pair followed by a linear phase ramp exp(-i(kx x + ky y)).
/// Defines a single projection setting.
struct TransformSpec {
  HologramSpec plus{+1, 0.0, 0.0};
  HologramSpec minus{-1, 0.0, 0.0};
  double kx = 0.0;
  double ky = 0.0;

  friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

TransformSpec make_transform(double plus_dx, double plus_dy, double minus_dx,
                             double minus_dy, double kx = 0.0, double ky = 0.0);

/// exp(i charge atan2(y - dy, x - dx)); exactly 1 on the dislocation itself.
Complex hologram_phase(const HologramSpec& h, double x, double y);

Field apply_hologram(const Field& f, const HologramSpec& h);

/// Minus hologram, then plus hologram, then the ramp.
Field apply_transform(const Field& f, const TransformSpec& t);

/// <0|T|0> for the Gaussian |0> of width w, evaluated on `grid` scaled by w
/// without materializing fields. Used by the calibration model, where the
/// beam width is itself a fit parameter.
Complex transform_overlap(const Grid& unit_grid, double w, const TransformSpec& t);

/// Detected state T|0> expressed in the enlarged basis.
struct ProjectorState {
  Eigen::VectorXcd components;
  double outer_weight = 0.0;
};

ProjectorState projector_state(const TransformSpec& t, const EnlargedBasis& basis);

std::vector<ProjectorState> projector_states(std::span<const TransformSpec> transforms,
                                             const EnlargedBasis& basis);

}  // namespace oamtomo
