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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "oamtomo/basis.hpp"
#include "oamtomo/hologram.hpp"
#include "oamtomo/state.hpp"

namespace oamtomo {

struct ProjectionSetting {
  int id = 0;
  TransformSpec transform;
  double duration = 2.0;  // seconds

  friend bool operator==(const ProjectionSetting&, const ProjectionSetting&) = default;
};

struct CountRecord {
  int setting_id = 0;
  std::int64_t n = 0;
  std::optional<double> p_model;

  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

/// Alice's projection, amplitudes over (|0>, |+1>, |-1>).
class PreparationChoice {
 public:
  /// Throws kInvalidArgument unless the vector has unit norm within 1e-10.
  explicit PreparationChoice(const std::array<Complex, 3>& alice);

  /// Normalizes first; throws on a zero vector.
  static PreparationChoice normalized(const std::array<Complex, 3>& alice);
  /// The choice for which remote_prepare() yields `bob` (inner components).
  static PreparationChoice for_bob_state(const std::array<Complex, 3>& bob);

  const std::array<Complex, 3>& alice() const { return alice_; }

 private:
  std::array<Complex, 3> alice_;
};

inline constexpr double kDefaultSettingRange = 1.5;

/// Seeded uniform displacements in [-range, range]^2 for each hologram,
/// no phase ramp. ids are 0..count-1.
std::vector<ProjectionSetting> default_settings(int count, std::uint64_t seed,
                                                double range = kDefaultSettingRange);

/// A nine-setting design whose projectors span the inner 3x3 operator space.
std::vector<ProjectionSetting> minimal_inner_settings();

std::vector<TransformSpec> transforms_of(std::span<const ProjectionSetting> settings);

/// <j|rho|j> with |j> given in basis coordinates; throws kInvalidState on a
/// dimension mismatch.
double ideal_probability(const DensityMatrix& rho, const ProjectorState& projector);
double ideal_probability(const DensityMatrix& rho, const ProjectionSetting& setting,
                         const EnlargedBasis& basis);

/// Poisson(N p_j) per setting. Each setting draws from its own stream keyed by
/// (seed, setting id), so results do not depend on evaluation order.
std::vector<CountRecord> simulate_counts(const DensityMatrix& rho,
                                         std::span<const ProjectionSetting> settings,
                                         std::span<const ProjectorState> projectors,
                                         double mean_flux, std::uint64_t seed);
std::vector<CountRecord> simulate_counts(const DensityMatrix& rho,
                                         std::span<const ProjectionSetting> settings,
                                         const EnlargedBasis& basis, double mean_flux,
                                         std::uint64_t seed);

std::int64_t poisson_draw(double mean, std::uint64_t seed, int stream);

/// Bob's 11-dimensional state vector after Alice's projection: OAM index
/// mirrored (m -> -m), phases copied, outer components zero.
Eigen::VectorXcd remote_state_vector(const PreparationChoice& choice);
DensityMatrix remote_prepare(const PreparationChoice& choice);

/// Rank of the real span of the operators |j><j| restricted to the first
/// `subspace_dim` basis components. Full rank is subspace_dim^2.
int completeness_rank(std::span<const ProjectorState> projectors, int subspace_dim);
int completeness_rank(std::span<const ProjectionSetting> settings, const EnlargedBasis& basis,
                      int subspace_dim);

/// Bob states reported for the remote-preparation runs, normalized, over
/// (|0>, |+1>, |-1>). Known names: a, b, c, suppressed, zero.
std::optional<std::array<Complex, 3>> named_bob_state(std::string_view name);

}  // namespace oamtomo
