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

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace oamtomo {

using Complex = std::complex<double>;

/// Square sampling grid centered on the optical axis. Lengths are in units
/// of the beam width w.
class Grid {
 public:
  Grid(double half_extent, int samples_per_axis);

  double half_extent() const { return half_extent_; }
  int samples_per_axis() const { return samples_; }
  double spacing() const { return spacing_; }
  double cell_area() const { return spacing_ * spacing_; }
  std::size_t size() const {
    return static_cast<std::size_t>(samples_) * static_cast<std::size_t>(samples_);
  }

  /// Coordinate of sample i along either axis.
  double coordinate(int i) const { return -half_extent_ + i * spacing_; }

  /// Flat index of sample (ix, iy); x varies fastest.
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(samples_) +
           static_cast<std::size_t>(ix);
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double half_extent_;
  int samples_;
  double spacing_;
};

/// Validating factory; throws Error(kInvalidArgument).
Grid make_grid(double half_extent, int samples_per_axis);

// 256 samples keeps the optical axis between samples, so a centered
// dislocation never lands on a grid point.
inline constexpr double kReferenceHalfExtent = 4.0;
inline constexpr int kReferenceSamples = 256;

Grid reference_grid();

struct Field {
  Grid grid;
  Eigen::VectorXcd amplitudes;

  Field(Grid g, Eigen::VectorXcd a);
  explicit Field(Grid g);

  double squared_norm() const;
};

struct LgIndex {
  int p = 0;
  int m = 0;
  double w = 1.0;
};

/// Laguerre-Gaussian mode with p radial nodes and phase exp(i m atan2(y, x)),
/// unit-normalized on the continuous plane.
Field lg_mode(const LgIndex& index, const Grid& grid);

/// Riemann-sum approximation of the overlap integral <f|g>.
Complex inner_product(const Field& f, const Field& g);

struct Decomposition {
  Eigen::VectorXcd coefficients;
  double outer_weight = 0.0;
};

inline constexpr double kOrthonormalityTolerance = 1e-6;

/// Coefficients of f on an orthonormal set plus the squared norm left over.
/// Throws kInvalidBasis when the set's Gram matrix deviates from identity.
Decomposition decompose(const Field& f, std::span<const Field> basis,
                        double tolerance = kOrthonormalityTolerance);

/// Same as decompose() but trusts the caller on orthonormality. `basis`
/// holds one basis vector per column.
Decomposition decompose_unchecked(const Eigen::VectorXcd& f,
                                  const Eigen::MatrixXcd& basis,
                                  double cell_area);

/// Largest |G_ij - delta_ij| over the Gram matrix of `fields`.
double gram_deviation(std::span<const Field> fields);

}  // namespace oamtomo
