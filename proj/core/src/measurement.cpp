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

#include "oamtomo/measurement.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/SVD>

#include "oamtomo/error.hpp"

namespace oamtomo {

namespace {

double squared_norm(const std::array<Complex, 3>& v) {
  return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]);
}

// Swap the +1 and -1 entries: m -> -m.
std::array<Complex, 3> mirrored(const std::array<Complex, 3>& v) { return {v[0], v[2], v[1]}; }

}  // namespace

PreparationChoice::PreparationChoice(const std::array<Complex, 3>& alice) : alice_(alice) {
  if (std::abs(squared_norm(alice) - 1.0) > 1e-10) {
    throw Error(ErrorKind::kInvalidArgument, "preparation vector must have unit norm");
  }
}

PreparationChoice PreparationChoice::normalized(const std::array<Complex, 3>& alice) {
  const double norm = std::sqrt(squared_norm(alice));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorKind::kInvalidArgument, "preparation vector is zero");
  }
  return PreparationChoice({alice[0] / norm, alice[1] / norm, alice[2] / norm});
}

PreparationChoice PreparationChoice::for_bob_state(const std::array<Complex, 3>& bob) {
  return normalized(mirrored(bob));
}

std::vector<ProjectionSetting> default_settings(int count, std::uint64_t seed, double range) {
  if (count < 1) throw Error(ErrorKind::kInvalidArgument, "settings count must be >= 1");
  if (!(range > 0.0)) throw Error(ErrorKind::kInvalidArgument, "settings range must be > 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-range, range);
  std::vector<ProjectionSetting> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int id = 0; id < count; ++id) {
    const double pdx = uniform(rng);
    const double pdy = uniform(rng);
    const double mdx = uniform(rng);
    const double mdy = uniform(rng);
    out.push_back({id, make_transform(pdx, pdy, mdx, mdy), 2.0});
  }
  return out;
}

std::vector<ProjectionSetting> minimal_inner_settings() {
  // A hologram parked 12w away acts as a constant phase over the beam.
  constexpr double kParked = 12.0;
  const std::array<TransformSpec, 9> design = {
      make_transform(0.0, 0.0, 0.0, 0.0),          // |0>
      make_transform(0.0, 0.0, kParked, 0.0),      // ~|+1>
      make_transform(kParked, 0.0, 0.0, 0.0),      // ~|-1>
      make_transform(0.5, 0.0, kParked, 0.0),
      make_transform(0.0, 0.5, kParked, 0.0),
      make_transform(kParked, 0.0, 0.5, 0.0),
      make_transform(kParked, 0.0, 0.0, 0.5),
      make_transform(0.5, 0.0, 0.0, 0.5),
      make_transform(0.0, 0.5, -0.5, 0.0),
  };
  std::vector<ProjectionSetting> out;
  for (std::size_t i = 0; i < design.size(); ++i) {
    out.push_back({static_cast<int>(i), design[i], 2.0});
  }
  return out;
}

std::vector<TransformSpec> transforms_of(std::span<const ProjectionSetting> settings) {
  std::vector<TransformSpec> out;
  out.reserve(settings.size());
  for (const auto& s : settings) out.push_back(s.transform);
  return out;
}

double ideal_probability(const DensityMatrix& rho, const ProjectorState& projector) {
  if (projector.components.size() != rho.dim()) {
    throw Error(ErrorKind::kInvalidState, "density matrix dimension does not match projector");
  }
  const Eigen::VectorXcd& c = projector.components;
  const double p = c.dot(rho.matrix() * c).real();
  return std::clamp(p, 0.0, 1.0);
}

double ideal_probability(const DensityMatrix& rho, const ProjectionSetting& setting,
                         const EnlargedBasis& basis) {
  return ideal_probability(rho, projector_state(setting.transform, basis));
}

std::int64_t poisson_draw(double mean, std::uint64_t seed, int stream) {
  if (!(mean > 0.0)) return 0;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x5eedu};
  std::mt19937_64 rng(seq);
  std::poisson_distribution<std::int64_t> poisson(mean);
  return poisson(rng);
}

std::vector<CountRecord> simulate_counts(const DensityMatrix& rho,
                                         std::span<const ProjectionSetting> settings,
                                         std::span<const ProjectorState> projectors,
                                         double mean_flux, std::uint64_t seed) {
  if (!(mean_flux > 0.0)) throw Error(ErrorKind::kInvalidArgument, "mean flux must be > 0");
  if (settings.size() != projectors.size()) {
    throw Error(ErrorKind::kInvalidArgument, "one projector per setting required");
  }
  std::vector<CountRecord> out;
  out.reserve(settings.size());
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const double p = ideal_probability(rho, projectors[i]);
    out.push_back({settings[i].id, poisson_draw(mean_flux * p, seed, settings[i].id), p});
  }
  return out;
}

std::vector<CountRecord> simulate_counts(const DensityMatrix& rho,
                                         std::span<const ProjectionSetting> settings,
                                         const EnlargedBasis& basis, double mean_flux,
                                         std::uint64_t seed) {
  const auto transforms = transforms_of(settings);
  const auto projectors = projector_states(transforms, basis);
  return simulate_counts(rho, settings, projectors, mean_flux, seed);
}

Eigen::VectorXcd remote_state_vector(const PreparationChoice& choice) {
  const auto bob = mirrored(choice.alice());
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(EnlargedBasis::kDim);
  for (int i = 0; i < 3; ++i) v[i] = bob[i];
  return v;
}

DensityMatrix remote_prepare(const PreparationChoice& choice) {
  return DensityMatrix::pure(remote_state_vector(choice));
}

int completeness_rank(std::span<const ProjectorState> projectors, int subspace_dim) {
  if (projectors.empty()) throw Error(ErrorKind::kInvalidArgument, "no projectors given");
  if (subspace_dim < 1 || subspace_dim > projectors.front().components.size()) {
    throw Error(ErrorKind::kInvalidArgument, "subspace dimension out of range");
  }
  const int k = subspace_dim;
  // Real coordinates of the Hermitian operator |j><j| restricted to the subspace.
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(projectors.size()), k * k);
  const double root2 = std::numbers::sqrt2;
  for (std::size_t r = 0; r < projectors.size(); ++r) {
    const Eigen::VectorXcd& c = projectors[r].components;
    int col = 0;
    for (int i = 0; i < k; ++i) {
      rows(static_cast<Eigen::Index>(r), col++) = std::norm(c[i]);
      for (int j = i + 1; j < k; ++j) {
        const Complex z = c[i] * std::conj(c[j]);
        rows(static_cast<Eigen::Index>(r), col++) = root2 * z.real();
        rows(static_cast<Eigen::Index>(r), col++) = root2 * z.imag();
      }
    }
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(rows);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  constexpr double kRelativeRankTolerance = 1e-9;
  return static_cast<int>((s.array() > kRelativeRankTolerance * s[0]).count());
}

int completeness_rank(std::span<const ProjectionSetting> settings, const EnlargedBasis& basis,
                      int subspace_dim) {
  const auto transforms = transforms_of(settings);
  const auto projectors = projector_states(transforms, basis);
  return completeness_rank(projectors, subspace_dim);
}

std::optional<std::array<Complex, 3>> named_bob_state(std::string_view name) {
  using std::numbers::pi;
  auto amp = [](double modulus, double phase_over_pi) {
    return std::polar(modulus, phase_over_pi * pi);
  };
  std::array<Complex, 3> v;
  if (name == "a") {
    v = {Complex(0.68), Complex(0.71), Complex(-0.14)};
  } else if (name == "b") {
    v = {amp(0.65, 0.0), amp(0.53, -0.26), amp(0.55, -0.6)};
  } else if (name == "c") {
    v = {amp(0.58, 0.0), amp(0.58, -0.05), amp(0.58, -0.89)};
  } else if (name == "suppressed") {
    v = {amp(0.26, 0.0), amp(0.68, 0.11), amp(0.68, -0.21)};
  } else if (name == "zero") {
    v = {Complex(1.0), Complex(0.0), Complex(0.0)};
  } else {
    return std::nullopt;
  }
  const double norm = std::sqrt(squared_norm(v));
  for (auto& z : v) z /= norm;
  return v;
}

}  // namespace oamtomo
