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

#include "oamtomo/optics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "oamtomo/error.hpp"

namespace oamtomo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kGridMismatch: return "grid-mismatch";
    case ErrorKind::kInvalidBasis: return "invalid-basis";
    case ErrorKind::kDegenerateGenerator: return "degenerate-generator";
    case ErrorKind::kInsufficientData: return "insufficient-data";
    case ErrorKind::kDegenerate: return "degenerate";
    case ErrorKind::kInvalidState: return "invalid-state";
    case ErrorKind::kDegenerateMeasurement: return "degenerate-measurement";
    case ErrorKind::kUnderdeterminedFit: return "underdetermined-fit";
    case ErrorKind::kInvalidData: return "invalid-data";
    case ErrorKind::kEmptySubspace: return "empty-subspace";
    case ErrorKind::kParse: return "parse-error";
    case ErrorKind::kIo: return "io-error";
  }
  return "unknown";
}

Grid::Grid(double half_extent, int samples_per_axis)
    : half_extent_(half_extent),
      samples_(samples_per_axis),
      spacing_(2.0 * half_extent / (samples_per_axis - 1)) {}

Grid make_grid(double half_extent, int samples_per_axis) {
  if (!(half_extent > 0.0) || !std::isfinite(half_extent)) {
    throw Error(ErrorKind::kInvalidArgument, "grid half extent must be positive");
  }
  if (samples_per_axis < 2) {
    throw Error(ErrorKind::kInvalidArgument, "grid needs at least 2 samples per axis");
  }
  return Grid(half_extent, samples_per_axis);
}

Grid reference_grid() { return make_grid(kReferenceHalfExtent, kReferenceSamples); }

Field::Field(Grid g, Eigen::VectorXcd a) : grid(g), amplitudes(std::move(a)) {
  if (static_cast<std::size_t>(amplitudes.size()) != grid.size()) {
    throw Error(ErrorKind::kInvalidArgument, "field size does not match its grid");
  }
}

Field::Field(Grid g) : grid(g), amplitudes(Eigen::VectorXcd::Zero(g.size())) {}

double Field::squared_norm() const { return amplitudes.squaredNorm() * grid.cell_area(); }

namespace {

double factorial(int n) {
  double result = 1.0;
  for (int i = 2; i <= n; ++i) result *= i;
  return result;
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) {
    throw Error(ErrorKind::kGridMismatch, "fields are sampled on different grids");
  }
}

}  // namespace

Field lg_mode(const LgIndex& index, const Grid& grid) {
  if (index.p < 0) throw Error(ErrorKind::kInvalidArgument, "LG radial index must be >= 0");
  if (!(index.w > 0.0)) throw Error(ErrorKind::kInvalidArgument, "LG beam width must be > 0");

  const int abs_m = std::abs(index.m);
  const double norm = std::sqrt(2.0 * factorial(index.p) /
                                (std::numbers::pi * factorial(index.p + abs_m))) /
                      index.w;
  Field field(grid);
  const int n = grid.samples_per_axis();
  for (int iy = 0; iy < n; ++iy) {
    const double y = grid.coordinate(iy);
    for (int ix = 0; ix < n; ++ix) {
      const double x = grid.coordinate(ix);
      const double r2 = (x * x + y * y) / (index.w * index.w);
      const double radial = norm * std::pow(std::sqrt(2.0 * r2), abs_m) *
                            std::assoc_laguerre(static_cast<unsigned>(index.p),
                                                static_cast<unsigned>(abs_m), 2.0 * r2) *
                            std::exp(-r2);
      const double theta = std::atan2(y, x);
      field.amplitudes[grid.index(ix, iy)] = std::polar(radial, index.m * theta);
    }
  }
  return field;
}

Complex inner_product(const Field& f, const Field& g) {
  require_same_grid(f.grid, g.grid);
  // Eigen's dot() conjugates its left operand.
  return f.amplitudes.dot(g.amplitudes) * f.grid.cell_area();
}

double gram_deviation(std::span<const Field> fields) {
  double worst = 0.0;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    for (std::size_t j = i; j < fields.size(); ++j) {
      const Complex g = inner_product(fields[i], fields[j]);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

Decomposition decompose_unchecked(const Eigen::VectorXcd& f, const Eigen::MatrixXcd& basis,
                                  double cell_area) {
  Decomposition out;
  out.coefficients = (basis.adjoint() * f) * cell_area;
  const double total = f.squaredNorm() * cell_area;
  const double captured = out.coefficients.squaredNorm();
  out.outer_weight = std::clamp(total - captured, 0.0, total);
  return out;
}

Decomposition decompose(const Field& f, std::span<const Field> basis, double tolerance) {
  for (const Field& b : basis) require_same_grid(f.grid, b.grid);
  const double deviation = gram_deviation(basis);
  if (deviation > tolerance) {
    std::ostringstream msg;
    msg << "basis is not orthonormal (Gram deviation " << deviation << ")";
    throw Error(ErrorKind::kInvalidBasis, msg.str());
  }
  Eigen::MatrixXcd columns(static_cast<Eigen::Index>(f.grid.size()),
                           static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    columns.col(static_cast<Eigen::Index>(i)) = basis[i].amplitudes;
  }
  return decompose_unchecked(f.amplitudes, columns, f.grid.cell_area());
}

}  // namespace oamtomo
