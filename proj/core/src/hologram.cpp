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

#include "oamtomo/hologram.hpp"

#include <cmath>
#include <numbers>

#include "oamtomo/basis.hpp"
#include "oamtomo/error.hpp"

namespace oamtomo {

TransformSpec make_transform(double plus_dx, double plus_dy, double minus_dx, double minus_dy,
                             double kx, double ky) {
  return TransformSpec{{+1, plus_dx, plus_dy}, {-1, minus_dx, minus_dy}, kx, ky};
}

Complex hologram_phase(const HologramSpec& h, double x, double y) {
  if (h.charge == 0) return {1.0, 0.0};
  const double u = x - h.dx;
  const double v = y - h.dy;
  const double r = std::hypot(u, v);
  if (r == 0.0) return {1.0, 0.0};
  // (z/|z|)^m winds exactly m times around the dislocation.
  Complex unit(u / r, v / r);
  if (h.charge < 0) unit = std::conj(unit);
  Complex phase = unit;
  for (int k = 1; k < std::abs(h.charge); ++k) phase *= unit;
  return phase;
}

Field apply_hologram(const Field& f, const HologramSpec& h) {
  Field out = f;
  if (h.charge == 0) return out;
  const Grid& grid = f.grid;
  const int n = grid.samples_per_axis();
  for (int iy = 0; iy < n; ++iy) {
    const double y = grid.coordinate(iy);
    for (int ix = 0; ix < n; ++ix) {
      out.amplitudes[grid.index(ix, iy)] *= hologram_phase(h, grid.coordinate(ix), y);
    }
  }
  return out;
}

namespace {

Field apply_ramp(Field f, double kx, double ky) {
  if (kx == 0.0 && ky == 0.0) return f;
  const Grid& grid = f.grid;
  const int n = grid.samples_per_axis();
  for (int iy = 0; iy < n; ++iy) {
    const double y = grid.coordinate(iy);
    for (int ix = 0; ix < n; ++ix) {
      const double x = grid.coordinate(ix);
      f.amplitudes[grid.index(ix, iy)] *= std::polar(1.0, -(kx * x + ky * y));
    }
  }
  return f;
}

}  // namespace

Field apply_transform(const Field& f, const TransformSpec& t) {
  return apply_ramp(apply_hologram(apply_hologram(f, t.minus), t.plus), t.kx, t.ky);
}

Complex transform_overlap(const Grid& unit_grid, double w, const TransformSpec& t) {
  if (!(w > 0.0)) throw Error(ErrorKind::kInvalidArgument, "beam width must be positive");
  const int n = unit_grid.samples_per_axis();
  // Separable ramp factors along each axis, in physical coordinates.
  std::vector<Complex> ramp_x(static_cast<std::size_t>(n));
  std::vector<Complex> ramp_y(static_cast<std::size_t>(n));
  std::vector<double> gauss(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u = unit_grid.coordinate(i);
    ramp_x[i] = std::polar(1.0, -t.kx * w * u);
    ramp_y[i] = std::polar(1.0, -t.ky * w * u);
    gauss[i] = std::exp(-2.0 * u * u);
  }
  Complex sum(0.0, 0.0);
  if (std::abs(t.plus.charge) == 1 && std::abs(t.minus.charge) == 1) {
    // Unit charges: the two phases combine to one product over one square root.
    const bool conj_plus = t.plus.charge < 0;
    const bool conj_minus = t.minus.charge < 0;
    for (int iy = 0; iy < n; ++iy) {
      const double y = w * unit_grid.coordinate(iy);
      const double vp = y - t.plus.dy;
      const double vm = y - t.minus.dy;
      // Spelled out in reals; std::complex products go through the NaN-safe slow path.
      double row_re = 0.0;
      double row_im = 0.0;
      for (int ix = 0; ix < n; ++ix) {
        const double x = w * unit_grid.coordinate(ix);
        const double up = x - t.plus.dx;
        const double um = x - t.minus.dx;
        const double rp2 = up * up + vp * vp;
        const double rm2 = um * um + vm * vm;
        double ar = 1.0, ai = 0.0, br = 1.0, bi = 0.0;
        if (rp2 != 0.0) {
          ar = up;
          ai = conj_plus ? -vp : vp;
        }
        if (rm2 != 0.0) {
          br = um;
          bi = conj_minus ? -vm : vm;
        }
        const double norm = (rp2 == 0.0 ? 1.0 : rp2) * (rm2 == 0.0 ? 1.0 : rm2);
        const double scale = gauss[ix] / std::sqrt(norm);
        const double pr = ar * br - ai * bi;
        const double pi = ar * bi + ai * br;
        const double rr = ramp_x[ix].real();
        const double ri = ramp_x[ix].imag();
        row_re += scale * (pr * rr - pi * ri);
        row_im += scale * (pr * ri + pi * rr);
      }
      const Complex row(row_re, row_im);
      sum += row * gauss[iy] * ramp_y[iy];
    }
    return sum * (2.0 / std::numbers::pi) * unit_grid.cell_area();
  }
  for (int iy = 0; iy < n; ++iy) {
    const double y = w * unit_grid.coordinate(iy);
    Complex row(0.0, 0.0);
    for (int ix = 0; ix < n; ++ix) {
      const double x = w * unit_grid.coordinate(ix);
      row += gauss[ix] * ramp_x[ix] * hologram_phase(t.plus, x, y) *
             hologram_phase(t.minus, x, y);
    }
    sum += row * gauss[iy] * ramp_y[iy];
  }
  // |LG00|^2 = 2/(pi w^2) exp(-2 r^2/w^2); the w^2 cancels against the cell area.
  return sum * (2.0 / std::numbers::pi) * unit_grid.cell_area();
}

ProjectorState projector_state(const TransformSpec& t, const EnlargedBasis& basis) {
  const Grid& grid = basis.grid();
  const Field detected = apply_transform(basis.vector(0), t);
  Decomposition d = decompose_unchecked(detected.amplitudes, basis.matrix(), grid.cell_area());
  return ProjectorState{std::move(d.coefficients), d.outer_weight};
}

std::vector<ProjectorState> projector_states(std::span<const TransformSpec> transforms,
                                             const EnlargedBasis& basis) {
  std::vector<ProjectorState> out;
  out.reserve(transforms.size());
  for (const TransformSpec& t : transforms) out.push_back(projector_state(t, basis));
  return out;
}

}  // namespace oamtomo
