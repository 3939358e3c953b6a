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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "oamtomo/hologram.hpp"
#include "oamtomo/optics.hpp"

namespace oamtomo {

enum class Axis { kX, kY };

std::string_view to_string(Axis axis);
Axis parse_axis(std::string_view text);

/// Effect of a single displaced hologram on |0>, resolved into the inner
/// basis {|0>, |+1>, |-1>} and the remainder ("outer" weight).
struct TransferScan {
  int charge = 1;
  Axis axis = Axis::kX;
  std::vector<double> displacements;
  std::vector<std::array<double, 3>> inner_projections;
  std::vector<double> outer_weight;
};

/// The three centered states |0> = LG00, |+1> = H_{+1}(0)|0>, |-1> = H_{-1}(0)|0>.
std::array<Field, 3> inner_basis(const Grid& grid);

TransferScan transfer_scan(int charge, Axis axis, std::span<const double> displacements,
                           const Grid& grid);

/// Displacements (negative, positive) where the outer weight peaks.
std::pair<double, double> max_transfer_positions(const TransferScan& scan);

/// Indices of strict interior local maxima of `values` (plateaus count once).
std::vector<std::size_t> local_maxima(std::span<const double> values);

struct ScanParameters {
  double half_range = 3.0;
  double step = 0.05;
};

std::vector<double> scan_displacements(const ScanParameters& params);

struct BasisGenerator {
  HologramSpec hologram;
  Axis axis = Axis::kX;
  double residual_norm = 0.0;
};

/// Orthonormal 11-vector basis: inner states first, then one Gram-Schmidt
/// vector per generator ordered (charge +1 before -1, x before y, negative
/// displacement before positive).
class EnlargedBasis {
 public:
  static constexpr int kInnerDim = 3;
  static constexpr int kDim = 11;

  EnlargedBasis(Grid grid, Eigen::MatrixXcd vectors, std::vector<BasisGenerator> generators,
                ScanParameters scan);

  const Grid& grid() const { return grid_; }
  int dim() const { return static_cast<int>(vectors_.cols()); }
  /// One basis vector per column, sampled on grid().
  const Eigen::MatrixXcd& matrix() const { return vectors_; }
  Field vector(int i) const;
  const std::vector<BasisGenerator>& generators() const { return generators_; }
  const ScanParameters& scan() const { return scan_; }
  double gram_deviation() const;

 private:
  Grid grid_;
  Eigen::MatrixXcd vectors_;
  std::vector<BasisGenerator> generators_;
  ScanParameters scan_;
};

/// Runs the four transfer scans and orthonormalizes the eight max-transfer
/// states against the inner basis.
EnlargedBasis build_enlarged_basis(const Grid& grid, const ScanParameters& scan = {});

/// Gram-Schmidt over explicit generators (in the given order). Throws
/// kDegenerateGenerator naming every generator whose residual collapses.
EnlargedBasis build_basis_from_generators(const Grid& grid,
                                          std::span<const BasisGenerator> generators,
                                          const ScanParameters& scan = {});

inline constexpr double kDegenerateResidual = 1e-6;

}  // namespace oamtomo
