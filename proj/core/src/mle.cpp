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

#include "oamtomo/mle.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "oamtomo/error.hpp"

namespace oamtomo {

MeasurementData make_measurement_data(std::span<const ProjectorState> projectors,
                                      std::span<const CountRecord> records, int dim) {
  if (projectors.size() != records.size()) {
    throw Error(ErrorKind::kInvalidArgument, "one count record per projector required");
  }
  if (projectors.empty()) throw Error(ErrorKind::kInvalidArgument, "no measurement records");
  if (dim < 1 || dim > projectors.front().components.size()) {
    throw Error(ErrorKind::kInvalidArgument, "reconstruction dimension out of range");
  }
  MeasurementData data;
  const auto n = static_cast<Eigen::Index>(projectors.size());
  data.projectors.resize(n, dim);
  data.counts.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    data.projectors.row(j) = projectors[j].components.head(dim).transpose();
    if (records[j].n < 0) throw Error(ErrorKind::kInvalidData, "negative count");
    data.counts[j] = static_cast<double>(records[j].n);
  }
  return data;
}

Eigen::VectorXd model_probabilities(const Eigen::MatrixXcd& rho, const MeasurementData& data) {
  const Eigen::MatrixXcd q = data.projectors * rho.transpose();
  return data.projectors.conjugate().cwiseProduct(q).rowwise().sum().real().cwiseMax(0.0);
}

namespace {

void require_dim(const DensityMatrix& rho, const MeasurementData& data) {
  if (rho.dim() != data.dim()) {
    throw Error(ErrorKind::kInvalidState, "density matrix dimension does not match data");
  }
}

double profiled_log_likelihood(const Eigen::VectorXd& p, const Eigen::VectorXd& counts) {
  const double total_n = counts.sum();
  if (total_n == 0.0) return 0.0;
  const double total_p = p.sum();
  if (!(total_p > 0.0)) return -std::numeric_limits<double>::infinity();
  const double flux = total_n / total_p;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (counts[j] == 0.0) continue;
    if (!(p[j] > 0.0)) return -std::numeric_limits<double>::infinity();
    sum += counts[j] * std::log(flux * p[j]);
  }
  return sum - total_n;
}

// sum_j weight_j |j><j|
Eigen::MatrixXcd weighted_projector_sum(const MeasurementData& data, const Eigen::VectorXd& w) {
  Eigen::MatrixXcd s =
      data.projectors.transpose() * w.asDiagonal() * data.projectors.conjugate();
  return 0.5 * (s + s.adjoint());
}

Eigen::MatrixXcd hermitize_unit_trace(const Eigen::MatrixXcd& m) {
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  return h / h.trace().real();
}

struct RWeights {
  Eigen::VectorXd w;
  int regularized = 0;
};

RWeights r_weights(const Eigen::VectorXd& p, const Eigen::VectorXd& counts) {
  RWeights out;
  out.w = Eigen::VectorXd::Zero(p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (counts[j] == 0.0) continue;
    double pj = p[j];
    if (pj < kProbabilityFloor) {
      pj = kProbabilityFloor;
      ++out.regularized;
    }
    out.w[j] = counts[j] / pj;
  }
  return out;
}

}  // namespace

double log_likelihood(const DensityMatrix& rho, const MeasurementData& data) {
  require_dim(rho, data);
  return profiled_log_likelihood(model_probabilities(rho.matrix(), data), data.counts);
}

ROperator r_operator(const DensityMatrix& rho, const MeasurementData& data) {
  require_dim(rho, data);
  const RWeights rw = r_weights(model_probabilities(rho.matrix(), data), data.counts);
  return ROperator{weighted_projector_sum(data, rw.w), rw.regularized};
}

Eigen::MatrixXcd g_operator(const MeasurementData& data, const DensityMatrix& rho) {
  require_dim(rho, data);
  const double total_p = model_probabilities(rho.matrix(), data).sum();
  if (!(total_p > 0.0)) {
    throw Error(ErrorKind::kDegenerateMeasurement,
                "state has zero probability under every measurement setting");
  }
  const double flux = data.total_counts() / total_p;
  return flux * weighted_projector_sum(data, Eigen::VectorXd::Ones(data.size()));
}

double extremal_residual(const DensityMatrix& rho, const MeasurementData& data) {
  const Eigen::MatrixXcd r = r_operator(rho, data).op;
  const Eigen::MatrixXcd g = g_operator(data, rho);
  const Eigen::MatrixXcd& m = rho.matrix();
  const Eigen::MatrixXcd grg = g * m * g;
  const double denom = grg.norm();
  const double num = (r * m * r - grg).norm();
  if (denom == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / denom;
}

void validate(const ReconstructionOptions& options) {
  if (options.max_iterations < 1) {
    throw Error(ErrorKind::kInvalidArgument, "max_iterations must be >= 1");
  }
  if (!(options.log_likelihood_tolerance > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "log-likelihood tolerance must be > 0");
  }
  if (!(options.dilution > 0.0 && options.dilution <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "dilution must lie in (0, 1]");
  }
  if (!(options.min_dilution > 0.0 && options.min_dilution <= options.dilution)) {
    throw Error(ErrorKind::kInvalidArgument, "min_dilution must lie in (0, dilution]");
  }
  if (options.max_extrapolation_doublings < 0) {
    throw Error(ErrorKind::kInvalidArgument, "max_extrapolation_doublings must be >= 0");
  }
}

// The iteration runs on sigma = G^{1/2} rho G^{1/2}. In that frame the
// measurement operators sum to the identity on the support of G, the flux
// drops out, and the damped map sigma -> T sigma T with
// T = (1 - a) I + a G^{-1/2} R G^{-1/2} has exactly the solutions of
// R rho R = G rho G as fixed points.
Reconstruction reconstruct(const MeasurementData& data, const ReconstructionOptions& options) {
  validate(options);
  if (data.size() == 0) {
    throw Error(ErrorKind::kDegenerateMeasurement, "no measurement settings");
  }
  if ((data.counts.array() < 0.0).any() || !data.counts.allFinite()) {
    throw Error(ErrorKind::kInvalidData, "counts must be finite and non-negative");
  }
  const int d = data.dim();
  const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(d, d);
  ReconstructionDiagnostics diag;

  if (data.total_counts() == 0.0) {
    Reconstruction out{DensityMatrix::maximally_mixed(d), diag};
    out.diagnostics.iterations = 1;
    out.diagnostics.converged = true;
    out.diagnostics.log_likelihood_trace = {0.0, 0.0};
    return out;
  }

  const Eigen::MatrixXcd h = weighted_projector_sum(data, Eigen::VectorXd::Ones(data.size()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double lambda_max = lambda.maxCoeff();
  if (!(lambda_max > 0.0)) {
    throw Error(ErrorKind::kDegenerateMeasurement, "all projectors vanish");
  }
  // Inverse square root on the support, identity on the kernel.
  Eigen::VectorXd inv_sqrt(d);
  Eigen::VectorXd fwd_sqrt(d);
  for (int i = 0; i < d; ++i) {
    const bool support = lambda[i] > options.support_threshold * lambda_max;
    inv_sqrt[i] = support ? 1.0 / std::sqrt(lambda[i]) : 1.0;
    fwd_sqrt[i] = support ? std::sqrt(lambda[i]) : 1.0;
  }
  const Eigen::MatrixXcd& u = eig.eigenvectors();
  const Eigen::MatrixXcd w_inv_sqrt = u * inv_sqrt.asDiagonal() * u.adjoint();
  const Eigen::MatrixXcd w_sqrt = u * fwd_sqrt.asDiagonal() * u.adjoint();

  Eigen::MatrixXcd rho = identity / static_cast<double>(d);
  Eigen::VectorXd p = model_probabilities(rho, data);
  if (!(p.sum() > 0.0)) {
    throw Error(ErrorKind::kDegenerateMeasurement, "maximally mixed state predicts no counts");
  }
  double likelihood = profiled_log_likelihood(p, data.counts);
  Eigen::MatrixXcd sigma = hermitize_unit_trace(w_sqrt * rho * w_sqrt);
  diag.log_likelihood_trace.push_back(likelihood);

  const double total_n = data.total_counts();
  for (int it = 1; it <= options.max_iterations; ++it) {
    const RWeights rw = r_weights(p, data.counts);
    diag.regularization_events += rw.regularized;
    const double flux = total_n / p.sum();
    const Eigen::MatrixXcd r = weighted_projector_sum(data, rw.w);
    const Eigen::MatrixXcd x = (w_inv_sqrt * r * w_inv_sqrt) / flux;

    bool accepted = false;
    Eigen::MatrixXcd accepted_t;
    Eigen::MatrixXcd next_sigma;
    Eigen::MatrixXcd next_rho;
    Eigen::VectorXd next_p;
    double next_likelihood = likelihood;
    for (double alpha = options.dilution; alpha >= options.min_dilution; alpha *= 0.5) {
      const Eigen::MatrixXcd t = (1.0 - alpha) * identity + alpha * x;
      next_sigma = hermitize_unit_trace(t * sigma * t.adjoint());
      next_rho = hermitize_unit_trace(w_inv_sqrt * next_sigma * w_inv_sqrt);
      next_p = model_probabilities(next_rho, data);
      next_likelihood = profiled_log_likelihood(next_p, data.counts);
      if (next_likelihood >= likelihood) {
        accepted = true;
        accepted_t = t;
        break;
      }
      ++diag.step_halvings;
    }
    if (!accepted) {
      // No damped step improves the likelihood any more.
      diag.converged = true;
      break;
    }
    if (options.extrapolate) {
      // Repeat the accepted map: T^m sigma T^m+ for m = 2, 4, 8, ... while the
      // likelihood keeps rising. Congruence keeps sigma positive, and the
      // slow geometric decay toward the boundary is skipped ahead.
      Eigen::MatrixXcd t_pow = accepted_t;
      for (int k = 0; k < options.max_extrapolation_doublings; ++k) {
        t_pow = t_pow * t_pow;
        t_pow /= t_pow.norm();  // scale cancels in the trace normalization
        Eigen::MatrixXcd cand_sigma = hermitize_unit_trace(t_pow * sigma * t_pow.adjoint());
        Eigen::MatrixXcd cand_rho = hermitize_unit_trace(w_inv_sqrt * cand_sigma * w_inv_sqrt);
        Eigen::VectorXd cand_p = model_probabilities(cand_rho, data);
        const double cand_likelihood = profiled_log_likelihood(cand_p, data.counts);
        if (!(cand_likelihood > next_likelihood)) break;
        next_sigma = std::move(cand_sigma);
        next_rho = std::move(cand_rho);
        next_p = std::move(cand_p);
        next_likelihood = cand_likelihood;
        ++diag.extrapolations;
      }
    }
    const double improvement = next_likelihood - likelihood;
    sigma = std::move(next_sigma);
    rho = std::move(next_rho);
    p = std::move(next_p);
    likelihood = next_likelihood;
    diag.log_likelihood_trace.push_back(likelihood);
    diag.iterations = it;
    if (improvement < options.log_likelihood_tolerance) {
      diag.converged = true;
      break;
    }
  }

  Reconstruction out{DensityMatrix::normalized(rho), std::move(diag)};
  out.diagnostics.extremal_residual = extremal_residual(out.rho, data);
  return out;
}

InnerProjection project_inner(const DensityMatrix& rho, int inner_dim) {
  if (inner_dim < 1 || inner_dim > rho.dim()) {
    throw Error(ErrorKind::kInvalidArgument, "inner dimension out of range");
  }
  const Eigen::MatrixXcd block = rho.matrix().topLeftCorner(inner_dim, inner_dim);
  const double inner_trace = block.trace().real();
  if (inner_trace < 1e-6) {
    throw Error(ErrorKind::kEmptySubspace, "state has no weight in the inner subspace");
  }
  return InnerProjection{DensityMatrix::normalized(block), std::max(0.0, 1.0 - inner_trace)};
}

StateAnalysis analyze(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho.matrix());
  const int d = rho.dim();
  StateAnalysis out;
  out.eigenvalues = eig.eigenvalues().reverse();
  Eigen::VectorXcd v = eig.eigenvectors().col(d - 1);
  out.degenerate = d > 1 && (out.eigenvalues[0] - out.eigenvalues[1]) < 1e-8;

  constexpr double kGaugeFloor = 1e-6;
  for (int i = 0; i < d; ++i) {
    const double modulus = std::abs(v[i]);
    if (modulus >= kGaugeFloor) {
      v *= std::conj(v[i]) / modulus;
      v[i] = modulus;
      break;
    }
  }
  out.max_eigenvector = v;
  out.purity = rho.purity();
  for (int i = 0; i < d; ++i) {
    out.amplitudes.push_back(std::abs(v[i]));
    double phase = std::arg(v[i]);
    if (phase <= -std::numbers::pi + 1e-12) phase += 2.0 * std::numbers::pi;
    out.phases.push_back(phase);
  }
  return out;
}

PoissonResidual poisson_residual(const DensityMatrix& rho, const MeasurementData& data,
                                 double min_expected) {
  require_dim(rho, data);
  const Eigen::VectorXd p = model_probabilities(rho.matrix(), data);
  PoissonResidual out;
  const double total_p = p.sum();
  if (!(total_p > 0.0)) return out;
  const double flux = data.total_counts() / total_p;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double expected = flux * p[j];
    if (expected < min_expected) continue;
    const double diff = data.counts[j] - expected;
    sum += diff * diff / expected;
    ++out.settings_used;
  }
  if (out.settings_used > 0) out.mean = sum / out.settings_used;
  return out;
}

}  // namespace oamtomo
