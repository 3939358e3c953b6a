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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oamtomo/error.hpp"
#include "oamtomo/mle.hpp"
#include "oracles.hpp"

namespace oamtomo {
namespace {

using C = std::complex<double>;
using testing::Dataset;

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no oamtomo::Error thrown";
  return ErrorKind::kIo;
}

Eigen::VectorXcd preset_a() {
  Eigen::VectorXcd psi(3);
  psi << 0.68, 0.71, -0.14;
  return psi.normalized();
}

TEST(LogLikelihood, EmptyDataIsZero) {
  const Dataset d = testing::dataset({Eigen::VectorXcd::Unit(3, 0)}, {0});
  EXPECT_EQ(log_likelihood(DensityMatrix::maximally_mixed(3), d.data), 0.0);
  EXPECT_EQ(log_likelihood(DensityMatrix::pure(preset_a()), d.data), 0.0);
}

TEST(LogLikelihood, ImpossibleObservationIsMinusInfinity) {
  const Dataset d = testing::dataset({Eigen::VectorXcd::Unit(2, 0), Eigen::VectorXcd::Unit(2, 1)}, {3, 5});
  const DensityMatrix zero = DensityMatrix::pure(Eigen::VectorXcd::Unit(2, 0));
  EXPECT_EQ(log_likelihood(zero, d.data), -std::numeric_limits<double>::infinity());
}

TEST(LogLikelihood, DiagonalScanPeaksAtObservedState) {
  const Dataset d = testing::dataset({Eigen::VectorXcd::Unit(2, 0), Eigen::VectorXcd::Unit(2, 1)}, {100, 0});
  double best_t = -1.0, best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 100; ++i) {
    const double t = i / 100.0;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 0) = t;
    m(1, 1) = 1.0 - t;
    const double ll = log_likelihood(DensityMatrix::from_matrix(m), d.data);
    const double oracle = testing::profiled_log_likelihood(m, d);
    if (std::isinf(oracle)) {
      EXPECT_EQ(ll, oracle);
    } else {
      EXPECT_NEAR(ll, oracle, 1e-9);
    }
    if (ll > best) {
      best = ll;
      best_t = t;
    }
  }
  EXPECT_EQ(best_t, 1.0);
}

TEST(ROperator, ZeroCountsGiveZero) {
  std::mt19937_64 rng(1);
  const Dataset d = testing::dataset(testing::random_projectors(3, 9, rng), std::vector<long long>(9, 0));
  const ROperator r = r_operator(DensityMatrix::maximally_mixed(3), d.data);
  EXPECT_EQ(r.op.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ROperator, ExactCountsGiveScaledProjector) {
  Eigen::VectorXcd j(3);
  j << C(0.6, 0.0), C(0.0, 0.48), C(0.64, 0.0);
  const DensityMatrix rho = DensityMatrix::pure(preset_a());
  const double p = std::norm(j.dot(preset_a()));
  const double n = 500.0 * p;
  Dataset d = testing::dataset({j}, {0});
  d.data.counts[0] = n;
  const Eigen::MatrixXcd expected = 500.0 * j * j.adjoint();
  EXPECT_LT((r_operator(rho, d.data).op - expected).cwiseAbs().maxCoeff(), 1e-12 * 500.0);
}

TEST(ROperator, MatchesDirectSum) {
  std::mt19937_64 rng(2);
  const auto proj = testing::random_projectors(3, 9, rng);
  const Dataset d = testing::dataset(proj, {3, 0, 17, 8, 1, 40, 2, 9, 11});
  const DensityMatrix rho = DensityMatrix::normalized(testing::random_density(3, rng));
  const Eigen::MatrixXcd oracle = testing::r_oracle(rho.matrix(), d);
  EXPECT_LT((r_operator(rho, d.data).op - oracle).cwiseAbs().maxCoeff(), 1e-12 * oracle.norm());
}

TEST(ROperator, RegularizesVanishingProbability) {
  const Dataset d = testing::dataset({Eigen::VectorXcd::Unit(2, 0), Eigen::VectorXcd::Unit(2, 1)}, {3, 5});
  const ROperator r = r_operator(DensityMatrix::pure(Eigen::VectorXcd::Unit(2, 0)), d.data);
  EXPECT_EQ(r.regularized, 1);
  EXPECT_TRUE(r.op.allFinite());
}

TEST(GOperator, OrthonormalSetGivesScaledIdentity) {
  const Dataset d = testing::dataset(
      {Eigen::VectorXcd::Unit(3, 0), Eigen::VectorXcd::Unit(3, 1), Eigen::VectorXcd::Unit(3, 2)}, {10, 20, 30});
  const DensityMatrix rho = DensityMatrix::pure(preset_a());
  const Eigen::MatrixXcd g = g_operator(d.data, rho);
  EXPECT_LT((g - 60.0 * Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GOperator, MatchesDirectSumAndIgnoresOrder) {
  std::mt19937_64 rng(4);
  auto proj = testing::random_projectors(3, 12, rng);
  std::vector<long long> counts{5, 9, 0, 3, 12, 7, 1, 1, 30, 4, 6, 2};
  const DensityMatrix rho = DensityMatrix::normalized(testing::random_density(3, rng));
  const Dataset d = testing::dataset(proj, counts);
  const Eigen::MatrixXcd g = g_operator(d.data, rho);
  EXPECT_LT((g - testing::g_oracle(rho.matrix(), d)).cwiseAbs().maxCoeff(), 1e-12 * g.norm());
  std::reverse(proj.begin(), proj.end());
  std::reverse(counts.begin(), counts.end());
  const Eigen::MatrixXcd g2 = g_operator(testing::dataset(proj, counts).data, rho);
  EXPECT_LT((g - g2).cwiseAbs().maxCoeff(), 1e-12 * g.norm());
  const Dataset empty = testing::dataset(proj, std::vector<long long>(12, 0));
  EXPECT_EQ(g_operator(empty.data, rho).cwiseAbs().maxCoeff(), 0.0);
}

TEST(GOperator, VanishingProbabilitiesAreDegenerate) {
  const Dataset d = testing::dataset({Eigen::VectorXcd::Unit(2, 1)}, {4});
  EXPECT_EQ(kind_of([&] { g_operator(d.data, DensityMatrix::pure(Eigen::VectorXcd::Unit(2, 0))); }),
            ErrorKind::kDegenerateMeasurement);
}

TEST(Reconstruct, ZeroCountsReturnMaximallyMixed) {
  std::mt19937_64 rng(5);
  const Dataset d = testing::dataset(testing::random_projectors(3, 9, rng), std::vector<long long>(9, 0));
  const Reconstruction r = reconstruct(d.data);
  EXPECT_EQ(r.rho.matrix(), DensityMatrix::maximally_mixed(3).matrix());
  EXPECT_TRUE(r.diagnostics.converged);
  EXPECT_EQ(r.diagnostics.iterations, 1);
}

TEST(Reconstruct, MaximallyMixedStateFromManySettings) {
  std::mt19937_64 rng(6);
  const auto proj = testing::random_projectors(3, 200, rng);
  const Dataset d = testing::simulate(DensityMatrix::maximally_mixed(3).matrix(), proj, 1e4, rng);
  const Reconstruction r = reconstruct(d.data);
  EXPECT_LT(trace_distance(r.rho, DensityMatrix::maximally_mixed(3)), 0.05);
}

TEST(Reconstruct, LikelihoodTraceIsMonotone) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto proj = testing::random_projectors(3, 30, rng);
    const Dataset d = testing::simulate(DensityMatrix::pure(preset_a()).matrix(), proj, 50.0, rng);
    const Reconstruction r = reconstruct(d.data);
    const auto& trace = r.diagnostics.log_likelihood_trace;
    ASSERT_GE(trace.size(), 2u);
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_GE(trace[i] - trace[i - 1], -1e-9);
    EXPECT_NEAR(trace.back(), log_likelihood(r.rho, d.data), 1e-9 * std::abs(trace.back()));
  }
}

TEST(Reconstruct, OutputSatisfiesStateInvariants) {
  std::mt19937_64 rng(8);
  const auto proj = testing::random_projectors(4, 40, rng);
  const Dataset d = testing::simulate(testing::random_density(4, rng), proj, 80.0, rng);
  for (int iterations : {1, 2, 7, 50}) {
    ReconstructionOptions o;
    o.max_iterations = iterations;
    const Reconstruction r = reconstruct(d.data, o);
    EXPECT_NO_THROW(DensityMatrix::from_matrix(r.rho.matrix()));
    EXPECT_LE(r.diagnostics.iterations, iterations);
  }
}

TEST(Reconstruct, NonConvergenceIsFlaggedNotThrown) {
  std::mt19937_64 rng(9);
  const auto proj = testing::random_projectors(3, 20, rng);
  const Dataset d = testing::simulate(DensityMatrix::pure(preset_a()).matrix(), proj, 500.0, rng);
  ReconstructionOptions o;
  o.max_iterations = 3;
  const Reconstruction r = reconstruct(d.data, o);
  EXPECT_FALSE(r.diagnostics.converged);
  EXPECT_EQ(r.diagnostics.iterations, 3);
}

TEST(Reconstruct, NoiselessDataSatisfiesExtremalEquation) {
  std::mt19937_64 rng(10);
  const auto proj = testing::random_projectors(3, 30, rng);
  const Eigen::MatrixXcd truth = 0.9 * DensityMatrix::pure(preset_a()).matrix() +
                                 0.1 / 3.0 * Eigen::MatrixXcd::Identity(3, 3);
  const Dataset d = testing::noiseless(truth, proj, 1000.0);
  const Reconstruction r = reconstruct(d.data);
  EXPECT_LT(r.diagnostics.extremal_residual, 1e-3);
  EXPECT_NEAR(r.diagnostics.extremal_residual, testing::extremal_residual_oracle(r.rho.matrix(), d), 1e-9);
  EXPECT_LT(trace_distance(r.rho, DensityMatrix::from_matrix(truth)), 1e-3);
}

TEST(Reconstruct, AgreesWithBlochBallSearch) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    const auto proj = testing::random_projectors(2, 4, rng);
    const Dataset d = testing::simulate(testing::random_density(2, rng), proj, 20.0, rng);
    const Reconstruction r = reconstruct(d.data);
    const Eigen::MatrixXcd best = testing::bloch_ball_maximum(d);
    EXPECT_LT(trace_distance(r.rho, DensityMatrix::normalized(best)), 1e-3) << "trial " << trial;
  }
}

// Pure-state maximum on the Bloch sphere: the plain damped map only creeps
// toward it, so this case separates the extrapolated and plain iterations.
TEST(Reconstruct, ExtrapolationReachesBoundaryMaximum) {
  std::mt19937_64 rng(5);
  Dataset d;
  for (int trial = 0; trial < 2; ++trial) {
    const auto proj = testing::random_projectors(2, 4, rng);
    d = testing::simulate(testing::random_density(2, rng), proj, 20.0, rng);
  }
  const Eigen::MatrixXcd best = testing::bloch_ball_maximum(d);

  ReconstructionOptions plain;
  plain.extrapolate = false;
  const Reconstruction slow = reconstruct(d.data, plain);
  EXPECT_FALSE(slow.diagnostics.converged);

  const Reconstruction fast = reconstruct(d.data);
  EXPECT_TRUE(fast.diagnostics.converged);
  EXPECT_GT(fast.diagnostics.extrapolations, 0);
  EXPECT_LT(trace_distance(fast.rho, DensityMatrix::normalized(best)), 1e-3);
  EXPECT_GT(fast.diagnostics.log_likelihood_trace.back(), slow.diagnostics.log_likelihood_trace.back());
  const auto& trace = fast.diagnostics.log_likelihood_trace;
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_GE(trace[i], trace[i - 1]);

  // Both iterations share the fixed point.
  plain.max_iterations = 200000;
  plain.log_likelihood_tolerance = 1e-13;
  const Reconstruction exact = reconstruct(d.data, plain);
  EXPECT_LT(trace_distance(fast.rho, exact.rho), 1e-3);
}

TEST(Reconstruct, InvariantUnderRecordPermutation) {
  std::mt19937_64 rng(12);
  auto proj = testing::random_projectors(3, 25, rng);
  const Dataset d = testing::simulate(DensityMatrix::pure(preset_a()).matrix(), proj, 60.0, rng);
  std::vector<long long> counts(d.counts.begin(), d.counts.end());
  std::vector<std::size_t> order(proj.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Eigen::VectorXcd> p2;
  std::vector<long long> c2;
  for (std::size_t i : order) {
    p2.push_back(proj[i]);
    c2.push_back(counts[i]);
  }
  const Reconstruction a = reconstruct(d.data);
  const Reconstruction b = reconstruct(testing::dataset(p2, c2).data);
  EXPECT_LT((a.rho.matrix() - b.rho.matrix()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Reconstruct, RejectsBadOptions) {
  const Dataset d = testing::dataset({Eigen::VectorXcd::Unit(2, 0)}, {1});
  for (auto mutate : std::vector<void (*)(ReconstructionOptions&)>{
           [](ReconstructionOptions& o) { o.max_iterations = 0; },
           [](ReconstructionOptions& o) { o.log_likelihood_tolerance = 0.0; },
           [](ReconstructionOptions& o) { o.dilution = 0.0; },
           [](ReconstructionOptions& o) { o.dilution = 1.5; },
           [](ReconstructionOptions& o) { o.max_extrapolation_doublings = -1; }}) {
    ReconstructionOptions o;
    mutate(o);
    EXPECT_EQ(kind_of([&] { reconstruct(d.data, o); }), ErrorKind::kInvalidArgument);
  }
}

TEST(ProjectInner, BlockArithmetic) {
  const InnerProjection mixed = project_inner(DensityMatrix::maximally_mixed(11));
  EXPECT_LT((mixed.rho.matrix() - Eigen::MatrixXcd::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(mixed.discarded_probability, 8.0 / 11.0, 1e-15);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(11);
  psi.head(3) = preset_a();
  const InnerProjection inside = project_inner(DensityMatrix::pure(psi));
  EXPECT_LT((inside.rho.matrix() - DensityMatrix::pure(preset_a()).matrix()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(inside.discarded_probability, 0.0, 1e-15);
  EXPECT_EQ(kind_of([] { project_inner(DensityMatrix::pure(Eigen::VectorXcd::Unit(11, 6))); }),
            ErrorKind::kEmptySubspace);
}

TEST(Analyze, PresetStateGauge) {
  const StateAnalysis a = analyze(DensityMatrix::pure(preset_a()));
  EXPECT_NEAR(a.eigenvalues[0], 1.0, 1e-12);
  const Eigen::VectorXcd psi = preset_a();
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a.amplitudes[static_cast<std::size_t>(i)], std::abs(psi[i]), 1e-12);
  EXPECT_NEAR(a.phases[0], 0.0, 1e-12);
  EXPECT_NEAR(a.phases[1], 0.0, 1e-12);
  EXPECT_NEAR(a.phases[2], std::numbers::pi, 1e-12);
  EXPECT_FALSE(a.degenerate);
  EXPECT_NEAR(std::abs(a.max_eigenvector.dot(psi)), 1.0, 1e-12);
}

TEST(Analyze, MaximallyMixedIsDegenerate) {
  const StateAnalysis a = analyze(DensityMatrix::maximally_mixed(3));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a.eigenvalues[i], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(a.purity, 1.0 / 3.0, 1e-15);
  EXPECT_TRUE(a.degenerate);
}

TEST(Analyze, NoisyPresetMatchesDirectArithmetic) {
  const Eigen::MatrixXcd m = 0.97 * DensityMatrix::pure(preset_a()).matrix() +
                             0.03 / 3.0 * Eigen::MatrixXcd::Identity(3, 3);
  const StateAnalysis a = analyze(DensityMatrix::from_matrix(m));
  double purity = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) purity += std::norm(m(i, j));
  }
  EXPECT_NEAR(a.eigenvalues[0], 0.98, 1e-12);
  EXPECT_NEAR(a.eigenvalues[1], 0.01, 1e-12);
  EXPECT_NEAR(a.purity, purity, 1e-12);
  EXPECT_NEAR(a.purity, 0.98 * 0.98 + 2 * 0.01 * 0.01, 1e-12);
  EXPECT_NEAR(a.eigenvalues.sum(), 1.0, 1e-8);
}

TEST(Analyze, GaugeFallsThroughVanishingVacuum) {
  Eigen::VectorXcd psi(3);
  psi << 0.0, std::polar(0.6, 1.1), std::polar(0.8, -0.4);
  const StateAnalysis a = analyze(DensityMatrix::pure(psi));
  EXPECT_NEAR(a.phases[1], 0.0, 1e-12);
  EXPECT_NEAR(a.phases[2], -1.5, 1e-12);
}

TEST(PoissonResidual, ExactExpectationsGiveZero) {
  std::mt19937_64 rng(13);
  const auto proj = testing::random_projectors(3, 10, rng);
  const Dataset d = testing::noiseless(DensityMatrix::pure(preset_a()).matrix(), proj, 1000.0);
  const PoissonResidual r = poisson_residual(DensityMatrix::pure(preset_a()), d.data);
  EXPECT_NEAR(r.mean, 0.0, 1e-20);
  EXPECT_GT(r.settings_used, 0);
}

TEST(PoissonResidual, MatchesDirectStatistic) {
  std::mt19937_64 rng(14);
  const auto proj = testing::random_projectors(3, 400, rng);
  const Eigen::MatrixXcd truth = DensityMatrix::pure(preset_a()).matrix();
  const Dataset d = testing::simulate(truth, proj, 200.0, rng);
  const PoissonResidual r = poisson_residual(DensityMatrix::from_matrix(truth), d.data);
  const auto [mean, used] = testing::poisson_residual_oracle(truth, d, 5.0);
  EXPECT_NEAR(r.mean, mean, 1e-12);
  EXPECT_EQ(r.settings_used, used);
  EXPECT_NEAR(r.mean, 1.0, 0.25);
}

}  // namespace
}  // namespace oamtomo
