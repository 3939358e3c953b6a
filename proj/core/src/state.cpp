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

#include "oamtomo/state.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "oamtomo/error.hpp"

namespace oamtomo {

namespace {

[[noreturn]] void invalid(const std::string& why) {
  throw Error(ErrorKind::kInvalidState, "invalid density matrix: " + why);
}

}  // namespace

DensityMatrix DensityMatrix::from_matrix(Eigen::MatrixXcd m) {
  if (m.rows() == 0 || m.rows() != m.cols()) invalid("not a non-empty square matrix");
  if (!m.allFinite()) invalid("non-finite entries");
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTolerance) {
    std::ostringstream msg;
    msg << "not Hermitian (deviation " << asym << ")";
    invalid(msg.str());
  }
  const double trace = m.trace().real();
  if (std::abs(trace - 1.0) > kTraceTolerance) {
    std::ostringstream msg;
    msg << "trace " << trace << " != 1";
    invalid(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kPsdTolerance) {
    std::ostringstream msg;
    msg << "negative eigenvalue " << eig.eigenvalues().minCoeff();
    invalid(msg.str());
  }
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::normalized(const Eigen::MatrixXcd& m) {
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  const double trace = h.trace().real();
  if (!(trace > 0.0)) invalid("non-positive trace");
  h /= trace;
  return from_matrix(std::move(h));
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
  if (std::abs(psi.squaredNorm() - 1.0) > kTraceTolerance) invalid("state vector is not unit norm");
  Eigen::MatrixXcd m = psi * psi.adjoint();
  // Make the diagonal exactly real.
  for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, i) = std::norm(psi[i]);
  return from_matrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim < 1) invalid("dimension must be positive");
  return DensityMatrix(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

double DensityMatrix::fidelity(const Eigen::VectorXcd& psi) const {
  return psi.dot(m_ * psi).real();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) invalid("dimension mismatch in trace distance");
  const Eigen::MatrixXcd diff = a.matrix() - b.matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (diff + diff.adjoint()),
                                                      Eigen::EigenvaluesOnly);
  return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

}  // namespace oamtomo
