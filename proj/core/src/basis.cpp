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

#include "oamtomo/basis.hpp"

#include <cmath>
#include <sstream>

#include "oamtomo/error.hpp"

namespace oamtomo {

std::string_view to_string(Axis axis) { return axis == Axis::kX ? "x" : "y"; }

Axis parse_axis(std::string_view text) {
  if (text == "x" || text == "X") return Axis::kX;
  if (text == "y" || text == "Y") return Axis::kY;
  throw Error(ErrorKind::kInvalidArgument, "axis must be x or y, got '" + std::string(text) + "'");
}

std::array<Field, 3> inner_basis(const Grid& grid) {
  Field zero = lg_mode({0, 0, 1.0}, grid);
  Field plus = apply_hologram(zero, {+1, 0.0, 0.0});
  Field minus = apply_hologram(zero, {-1, 0.0, 0.0});
  return {std::move(zero), std::move(plus), std::move(minus)};
}

namespace {

HologramSpec displaced(int charge, Axis axis, double d) {
  return axis == Axis::kX ? HologramSpec{charge, d, 0.0} : HologramSpec{charge, 0.0, d};
}

Eigen::MatrixXcd as_columns(std::span<const Field> fields) {
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(fields[0].grid.size()),
                     static_cast<Eigen::Index>(fields.size()));
  for (std::size_t i = 0; i < fields.size(); ++i) {
    m.col(static_cast<Eigen::Index>(i)) = fields[i].amplitudes;
  }
  return m;
}

}  // namespace

TransferScan transfer_scan(int charge, Axis axis, std::span<const double> displacements,
                           const Grid& grid) {
  const auto inner = inner_basis(grid);
  const Eigen::MatrixXcd columns = as_columns(inner);

  TransferScan scan;
  scan.charge = charge;
  scan.axis = axis;
  scan.displacements.assign(displacements.begin(), displacements.end());
  scan.inner_projections.reserve(displacements.size());
  scan.outer_weight.reserve(displacements.size());
  for (double d : displacements) {
    const Field f = apply_hologram(inner[0], displaced(charge, axis, d));
    const Decomposition dec = decompose_unchecked(f.amplitudes, columns, grid.cell_area());
    scan.inner_projections.push_back({std::norm(dec.coefficients[0]),
                                      std::norm(dec.coefficients[1]),
                                      std::norm(dec.coefficients[2])});
    scan.outer_weight.push_back(dec.outer_weight);
  }
  return scan;
}

std::pair<double, double> max_transfer_positions(const TransferScan& scan) {
  const auto& d = scan.displacements;
  if (d.size() < 3 || scan.outer_weight.size() != d.size()) {
    throw Error(ErrorKind::kInsufficientData, "transfer scan needs at least 3 points");
  }
  int best_neg = -1;
  int best_pos = -1;
  auto better = [&](int candidate, int incumbent) {
    if (incumbent < 0) return true;
    const double a = scan.outer_weight[candidate];
    const double b = scan.outer_weight[incumbent];
    if (a != b) return a > b;
    return std::abs(d[candidate]) < std::abs(d[incumbent]);
  };
  for (int i = 0; i < static_cast<int>(d.size()); ++i) {
    if (d[i] < 0.0 && better(i, best_neg)) best_neg = i;
    if (d[i] > 0.0 && better(i, best_pos)) best_pos = i;
  }
  if (best_neg < 0 || best_pos < 0) {
    throw Error(ErrorKind::kInsufficientData,
                "transfer scan must cover both negative and positive displacements");
  }
  constexpr double kNoTransfer = 1e-10;
  if (scan.outer_weight[best_neg] <= kNoTransfer || scan.outer_weight[best_pos] <= kNoTransfer) {
    throw Error(ErrorKind::kDegenerate, "outer weight never rises above zero; no maximum exists");
  }
  return {d[best_neg], d[best_pos]};
}

std::vector<std::size_t> local_maxima(std::span<const double> values) {
  std::vector<std::size_t> out;
  const std::size_t n = values.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (values[i] > values[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && values[j + 1] == values[i]) ++j;
      if (j + 1 < n && values[j + 1] < values[i]) out.push_back(i);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<double> scan_displacements(const ScanParameters& params) {
  if (!(params.step > 0.0) || !(params.half_range > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "scan range and step must be positive");
  }
  const int half = static_cast<int>(std::floor(params.half_range / params.step + 1e-9));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(2 * half + 1));
  for (int i = -half; i <= half; ++i) out.push_back(i * params.step);
  return out;
}

EnlargedBasis::EnlargedBasis(Grid grid, Eigen::MatrixXcd vectors,
                             std::vector<BasisGenerator> generators, ScanParameters scan)
    : grid_(grid), vectors_(std::move(vectors)), generators_(std::move(generators)), scan_(scan) {}

Field EnlargedBasis::vector(int i) const { return Field(grid_, vectors_.col(i)); }

double EnlargedBasis::gram_deviation() const {
  const Eigen::MatrixXcd gram = (vectors_.adjoint() * vectors_) * grid_.cell_area();
  return (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

EnlargedBasis build_basis_from_generators(const Grid& grid,
                                          std::span<const BasisGenerator> generators,
                                          const ScanParameters& scan) {
  const auto inner = inner_basis(grid);
  const double area = grid.cell_area();
  const auto rows = static_cast<Eigen::Index>(grid.size());

  Eigen::MatrixXcd vectors(rows, static_cast<Eigen::Index>(3 + generators.size()));
  for (int i = 0; i < 3; ++i) vectors.col(i) = inner[i].amplitudes;
  Eigen::Index filled = 3;

  std::vector<BasisGenerator> accepted;
  std::vector<std::string> degenerate;
  for (const BasisGenerator& g : generators) {
    Eigen::VectorXcd v = apply_hologram(inner[0], g.hologram).amplitudes;
    // Modified Gram-Schmidt, then one re-orthogonalization pass.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < filled; ++k) {
        const Complex c = vectors.col(k).dot(v) * area;
        v -= c * vectors.col(k);
      }
    }
    const double residual = std::sqrt(v.squaredNorm() * area);
    if (residual < kDegenerateResidual) {
      std::ostringstream msg;
      msg << "H_" << g.hologram.charge << "(" << g.hologram.dx << ", " << g.hologram.dy
          << ") residual " << residual;
      degenerate.push_back(msg.str());
      continue;
    }
    vectors.col(filled++) = v / residual;
    BasisGenerator kept = g;
    kept.residual_norm = residual;
    accepted.push_back(kept);
  }
  if (!degenerate.empty()) {
    std::string msg = "linearly dependent basis generators:";
    for (const auto& d : degenerate) msg += " [" + d + "]";
    throw Error(ErrorKind::kDegenerateGenerator, msg);
  }
  return EnlargedBasis(grid, std::move(vectors), std::move(accepted), scan);
}

EnlargedBasis build_enlarged_basis(const Grid& grid, const ScanParameters& scan) {
  const std::vector<double> displacements = scan_displacements(scan);
  std::vector<BasisGenerator> generators;
  for (int charge : {+1, -1}) {
    for (Axis axis : {Axis::kX, Axis::kY}) {
      const TransferScan s = transfer_scan(charge, axis, displacements, grid);
      const auto [neg, pos] = max_transfer_positions(s);
      generators.push_back({displaced(charge, axis, neg), axis, 0.0});
      generators.push_back({displaced(charge, axis, pos), axis, 0.0});
    }
  }
  return build_basis_from_generators(grid, generators, scan);
}

}  // namespace oamtomo
