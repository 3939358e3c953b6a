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

#include <Eigen/Core>

namespace oamtomo {

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-10;

/// Hermitian, positive-semidefinite, unit-trace matrix. Construction always
/// validates; an instance that exists satisfies all three.
class DensityMatrix {
 public:
  /// Throws Error(kInvalidState) unless `m` is already a valid state.
  static DensityMatrix from_matrix(Eigen::MatrixXcd m);
  /// Hermitizes and rescales to unit trace before validating.
  static DensityMatrix normalized(const Eigen::MatrixXcd& m);
  /// |psi><psi| for a unit vector.
  static DensityMatrix pure(const Eigen::VectorXcd& psi);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return m_; }

  double purity() const;
  /// <psi|rho|psi> for a unit vector psi.
  double fidelity(const Eigen::VectorXcd& psi) const;

 private:
  explicit DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {}
  Eigen::MatrixXcd m_;
};

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace oamtomo
