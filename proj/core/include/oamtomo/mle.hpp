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

#include "oamtomo/hologram.hpp"
#include "oamtomo/measurement.hpp"
#include "oamtomo/state.hpp"

namespace oamtomo {

/// Counts n_j paired with projector vectors |j> (one row per setting, in
/// basis coordinates). Counts are real so noiseless expected values can be fed
/// in directly.
struct MeasurementData {
  Eigen::MatrixXcd projectors;
  Eigen::VectorXd counts;

  int dim() const { return static_cast<int>(projectors.cols()); }
  Eigen::Index size() const { return projectors.rows(); }
  double total_counts() const { return counts.sum(); }
};

/// Pairs projectors[i] with records[i], keeping the first `dim` components.
MeasurementData make_measurement_data(std::span<const ProjectorState> projectors,
                                      std::span<const CountRecord> records, int dim);

/// p_j = <j|rho|j> for every row.
Eigen::VectorXd model_probabilities(const Eigen::MatrixXcd& rho, const MeasurementData& data);

/// Poisson log-likelihood with the flux profiled out (N = sum n / sum p),
/// dropping the log(n_j!) constant. -infinity when an observed setting has
/// p_j = 0.
double log_likelihood(const DensityMatrix& rho, const MeasurementData& data);

inline constexpr double kProbabilityFloor = 1e-12;

struct ROperator {
  Eigen::MatrixXcd op;
  int regularized = 0;  // settings whose p_j was lifted to kProbabilityFloor
};

/// sum_j (n_j / p_j) |j><j|
ROperator r_operator(const DensityMatrix& rho, const MeasurementData& data);

/// (sum n / sum p) sum_j |j><j|; throws kDegenerateMeasurement when sum p = 0.
Eigen::MatrixXcd g_operator(const MeasurementData& data, const DensityMatrix& rho);

/// ||R rho R - G rho G||_F / ||G rho G||_F
double extremal_residual(const DensityMatrix& rho, const MeasurementData& data);

struct ReconstructionOptions {
  int max_iterations = 5000;
  double log_likelihood_tolerance = 1e-9;
  double dilution = 0.5;
  double min_dilution = 1.0 / 64.0;
  /// Eigenvalues of sum |j><j| below this fraction of the largest are
  /// treated as its kernel.
  double support_threshold = 1e-10;
  /// After each damped step with map T, try T^2, T^4, ... while the likelihood
  /// keeps rising. Speeds up maxima on the boundary of the state space.
  bool extrapolate = true;
  int max_extrapolation_doublings = 12;
};

void validate(const ReconstructionOptions& options);

struct ReconstructionDiagnostics {
  int iterations = 0;
  bool converged = false;
  std::vector<double> log_likelihood_trace;
  double extremal_residual = 0.0;
  int regularization_events = 0;
  int step_halvings = 0;
  int extrapolations = 0;  // accepted step doublings
};

struct Reconstruction {
  DensityMatrix rho;
  ReconstructionDiagnostics diagnostics;
};

/// Damped iteration of R rho R = G rho G from the maximally mixed state.
Reconstruction reconstruct(const MeasurementData& data, const ReconstructionOptions& options = {});

struct InnerProjection {
  DensityMatrix rho;
  double discarded_probability = 0.0;
};

/// Renormalized top-left inner block; throws kEmptySubspace when its trace
/// is below 1e-6.
InnerProjection project_inner(const DensityMatrix& rho, int inner_dim = 3);

struct StateAnalysis {
  Eigen::VectorXd eigenvalues;  // descending
  Eigen::VectorXcd max_eigenvector;
  double purity = 0.0;
  std::vector<double> amplitudes;
  std::vector<double> phases;  // radians, gauge fixed on the first non-vanishing component
  bool degenerate = false;
};

StateAnalysis analyze(const DensityMatrix& rho);

struct PoissonResidual {
  double mean = 0.0;
  int settings_used = 0;
};

/// Mean of (n_j - N p_j)^2 / (N p_j) over settings with N p_j >= min_expected.
PoissonResidual poisson_residual(const DensityMatrix& rho, const MeasurementData& data,
                                 double min_expected = 5.0);

}  // namespace oamtomo
