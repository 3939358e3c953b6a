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

#include "oamtomo/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "oamtomo/error.hpp"
#include "oamtomo/measurement.hpp"

namespace oamtomo {

std::array<double, CalibrationParams::kCount> CalibrationParams::to_array() const {
  return {n_max, w, cx_plus, cy_plus, cx_minus, cy_minus, kx, ky};
}

CalibrationParams CalibrationParams::from_array(const std::array<double, kCount>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

std::string_view to_string(WhichHologram which) {
  return which == WhichHologram::kPlus ? "plus" : "minus";
}

WhichHologram parse_hologram(std::string_view text) {
  if (text == "plus" || text == "+1") return WhichHologram::kPlus;
  if (text == "minus" || text == "-1") return WhichHologram::kMinus;
  throw Error(ErrorKind::kInvalidArgument,
              "hologram must be plus or minus, got '" + std::string(text) + "'");
}

TransformSpec scan_transform(const CalibrationParams& params, const ScanCurve& curve,
                             double position) {
  const double sx = curve.axis == Axis::kX ? position : 0.0;
  const double sy = curve.axis == Axis::kY ? position : 0.0;
  if (curve.hologram == WhichHologram::kPlus) {
    return make_transform(params.cx_plus + sx, params.cy_plus + sy,
                          params.cx_minus + curve.fixed_dx, params.cy_minus + curve.fixed_dy,
                          params.kx, params.ky);
  }
  return make_transform(params.cx_plus + curve.fixed_dx, params.cy_plus + curve.fixed_dy,
                        params.cx_minus + sx, params.cy_minus + sy, params.kx, params.ky);
}

std::vector<double> model_curve(const CalibrationParams& params, const ScanCurve& curve,
                                const CurveModelOptions& options) {
  if (!(params.n_max > 0.0) || !(params.w > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "n_max and w must be positive");
  }
  const Grid unit_grid = make_grid(options.half_extent, options.samples);
  std::vector<double> out;
  out.reserve(curve.positions.size());
  for (double x : curve.positions) {
    const Complex overlap = transform_overlap(unit_grid, params.w, scan_transform(params, curve, x));
    out.push_back(params.n_max * std::norm(overlap));
  }
  return out;
}

namespace {

void validate_curves(std::span<const ScanCurve> curves) {
  bool covered[2][2] = {{false, false}, {false, false}};
  for (const ScanCurve& c : curves) {
    if (c.positions.size() != c.counts.size()) {
      throw Error(ErrorKind::kInvalidData, "scan curve positions and counts differ in length");
    }
    if (c.positions.size() < 2) {
      throw Error(ErrorKind::kInvalidData, "scan curve needs at least two points");
    }
    for (std::size_t i = 0; i < c.positions.size(); ++i) {
      if (!std::isfinite(c.positions[i]) || !std::isfinite(c.counts[i])) {
        throw Error(ErrorKind::kInvalidData, "scan curve contains non-finite values");
      }
      if (c.counts[i] < 0.0) throw Error(ErrorKind::kInvalidData, "negative count in scan curve");
      if (i > 0 && !(c.positions[i] > c.positions[i - 1])) {
        throw Error(ErrorKind::kInvalidData, "scan positions must be strictly increasing");
      }
    }
    covered[c.hologram == WhichHologram::kPlus ? 0 : 1][c.axis == Axis::kX ? 0 : 1] = true;
  }
  for (auto& row : covered) {
    for (bool ok : row) {
      if (!ok) {
        throw Error(ErrorKind::kUnderdeterminedFit,
                    "calibration needs one scan along each axis of both holograms");
      }
    }
  }
}

using Point = std::array<double, CalibrationParams::kCount>;

class Objective {
 public:
  Objective(std::span<const ScanCurve> curves, const CurveModelOptions& options)
      : curves_(curves), options_(options) {}

  double operator()(const Point& x) {
    ++evaluations;
    const CalibrationParams p = CalibrationParams::from_array(x);
    if (!(p.n_max > 0.0) || !(p.w > 0.0)) return std::numeric_limits<double>::infinity();
    for (double v : x) {
      if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    }
    double sum = 0.0;
    for (const ScanCurve& c : curves_) {
      const std::vector<double> model = model_curve(p, c, options_);
      for (std::size_t i = 0; i < model.size(); ++i) {
        const double r = c.counts[i] - model[i];
        sum += r * r;
      }
    }
    return sum;
  }

  int evaluations = 0;

 private:
  std::span<const ScanCurve> curves_;
  CurveModelOptions options_;
};

struct SimplexResult {
  Point best;
  double value = 0.0;
  int outer_iterations = 0;
  bool converged = false;
};

// Nelder-Mead with standard coefficients. One outer iteration is 2n simplex
// steps; the run stops once an outer iteration lowers the best value by less
// than `tolerance` relative.
SimplexResult nelder_mead(Objective& f, const Point& start, const Point& steps, int max_outer,
                          double tolerance, std::vector<double>& history) {
  constexpr std::size_t n = CalibrationParams::kCount;
  std::array<Point, n + 1> simplex;
  std::array<double, n + 1> values;
  simplex[0] = start;
  for (std::size_t i = 0; i < n; ++i) {
    simplex[i + 1] = start;
    simplex[i + 1][i] += steps[i];
  }
  for (std::size_t i = 0; i <= n; ++i) values[i] = f(simplex[i]);

  std::array<std::size_t, n + 1> order;
  auto sort = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  };
  auto along = [&](const Point& centroid, const Point& worst, double t) {
    Point p;
    for (std::size_t i = 0; i < n; ++i) p[i] = centroid[i] + t * (worst[i] - centroid[i]);
    return p;
  };

  SimplexResult result;
  sort();
  double best_before = values[order[0]];
  for (int outer = 1; outer <= max_outer; ++outer) {
    for (std::size_t step = 0; step < 2 * n; ++step) {
      sort();
      const std::size_t worst = order[n];
      Point centroid{};
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[order[k]][i] / n;
      }
      const Point reflected = along(centroid, simplex[worst], -1.0);
      const double fr = f(reflected);
      if (fr < values[order[0]]) {
        const Point expanded = along(centroid, simplex[worst], -2.0);
        const double fe = f(expanded);
        if (fe < fr) {
          simplex[worst] = expanded;
          values[worst] = fe;
        } else {
          simplex[worst] = reflected;
          values[worst] = fr;
        }
      } else if (fr < values[order[n - 1]]) {
        simplex[worst] = reflected;
        values[worst] = fr;
      } else {
        const bool outside = fr < values[worst];
        const Point contracted = along(centroid, simplex[worst], outside ? -0.5 : 0.5);
        const double fc = f(contracted);
        if (fc < std::min(fr, values[worst])) {
          simplex[worst] = contracted;
          values[worst] = fc;
        } else {
          const Point& best = simplex[order[0]];
          for (std::size_t k = 1; k <= n; ++k) {
            Point& v = simplex[order[k]];
            for (std::size_t i = 0; i < n; ++i) v[i] = best[i] + 0.5 * (v[i] - best[i]);
            values[order[k]] = f(v);
          }
        }
      }
    }
    sort();
    const double best_after = values[order[0]];
    history.push_back(best_after);
    result.outer_iterations = outer;
    const double decrease = best_before - best_after;
    if (best_after == 0.0 || decrease <= tolerance * best_before) {
      result.converged = true;
      break;
    }
    best_before = best_after;
  }
  sort();
  result.best = simplex[order[0]];
  result.value = values[order[0]];
  return result;
}

Point initial_steps(const Point& x, double scale) {
  Point steps;
  // Offsets and wavenumbers can legitimately sit at zero.
  constexpr std::array<double, CalibrationParams::kCount> floor = {1.0, 0.05, 0.05, 0.05,
                                                                   0.05, 0.05, 0.05, 0.05};
  for (std::size_t i = 0; i < steps.size(); ++i) {
    steps[i] = scale * std::max(0.1 * std::abs(x[i]), floor[i]);
  }
  return steps;
}

}  // namespace

CalibrationFit fit_calibration(std::span<const ScanCurve> curves,
                               const CalibrationParams& initial, const FitOptions& options) {
  validate_curves(curves);
  if (!(initial.n_max > 0.0) || !(initial.w > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "initial guess needs positive n_max and w");
  }
  Objective objective(curves, options.model);
  CalibrationFit fit;
  const Point start = initial.to_array();
  SimplexResult first = nelder_mead(objective, start, initial_steps(start, 1.0),
                                    options.max_outer_iterations, options.relative_tolerance,
                                    fit.residual_history);
  SimplexResult polish = nelder_mead(objective, first.best, initial_steps(first.best, 0.1),
                                     options.max_outer_iterations, options.relative_tolerance,
                                     fit.residual_history);
  const SimplexResult& best = polish.value <= first.value ? polish : first;
  fit.params = CalibrationParams::from_array(best.best);
  fit.outer_iterations = first.outer_iterations + polish.outer_iterations;
  fit.converged = polish.converged;
  fit.evaluations = objective.evaluations;
  for (const ScanCurve& c : curves) {
    const std::vector<double> model = model_curve(fit.params, c, options.model);
    double sum = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
      const double r = c.counts[i] - model[i];
      sum += r * r;
    }
    fit.curve_rms.push_back(std::sqrt(sum / static_cast<double>(model.size())));
  }
  return fit;
}

namespace {

// Width of the dip around the curve minimum, measured at half depth.
double dip_width(const std::vector<double>& x, const std::vector<double>& y) {
  const auto min_it = std::min_element(y.begin(), y.end());
  const auto max_it = std::max_element(y.begin(), y.end());
  const double level = 0.5 * (*min_it + *max_it);
  const auto i0 = static_cast<std::size_t>(min_it - y.begin());
  auto crossing = [&](int dir) {
    std::size_t i = i0;
    while (true) {
      const std::size_t j = dir > 0 ? i + 1 : i - 1;
      if ((dir > 0 && j >= y.size()) || (dir < 0 && i == 0)) return x[i];
      if (y[j] >= level) {
        const double t = (level - y[i]) / (y[j] - y[i]);
        return x[i] + t * (x[j] - x[i]);
      }
      i = j;
    }
  };
  return crossing(+1) - crossing(-1);
}

}  // namespace

CalibrationParams initial_guess(std::span<const ScanCurve> curves) {
  validate_curves(curves);
  CalibrationParams guess;
  guess.n_max = 0.0;
  for (const ScanCurve& c : curves) {
    guess.n_max = std::max(guess.n_max, *std::max_element(c.counts.begin(), c.counts.end()));
  }
  if (!(guess.n_max > 0.0)) throw Error(ErrorKind::kInvalidData, "all scan counts are zero");

  // The dip sits where the scanned dislocation crosses the beam axis.
  for (const ScanCurve& c : curves) {
    const auto i = static_cast<std::size_t>(
        std::min_element(c.counts.begin(), c.counts.end()) - c.counts.begin());
    const double center = -c.positions[i];
    const bool plus = c.hologram == WhichHologram::kPlus;
    double& slot = c.axis == Axis::kX ? (plus ? guess.cx_plus : guess.cx_minus)
                                      : (plus ? guess.cy_plus : guess.cy_minus);
    slot = center;
  }

  // Dip widths scale linearly with w; compare against the same design at w = 1.
  double data_width = 0.0;
  double unit_width = 0.0;
  CalibrationParams unit = guess;
  unit.w = 1.0;
  for (const ScanCurve& c : curves) {
    data_width += dip_width(c.positions, c.counts);
    unit_width += dip_width(c.positions, model_curve(unit, c));
  }
  guess.w = unit_width > 0.0 && data_width > 0.0 ? data_width / unit_width : 1.0;
  return guess;
}

std::vector<ScanCurve> canonical_scan_design(std::span<const double> positions, double fixed) {
  std::vector<ScanCurve> out;
  for (WhichHologram h : {WhichHologram::kPlus, WhichHologram::kMinus}) {
    for (Axis a : {Axis::kX, Axis::kY}) {
      ScanCurve c;
      c.hologram = h;
      c.axis = a;
      c.fixed_dx = fixed;
      c.fixed_dy = fixed;
      c.positions.assign(positions.begin(), positions.end());
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<ScanCurve> synthesize_curves(const CalibrationParams& params,
                                         std::span<const ScanCurve> design,
                                         const CurveModelOptions& options,
                                         std::optional<std::uint64_t> seed) {
  std::vector<ScanCurve> out(design.begin(), design.end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].counts = model_curve(params, out[k], options);
    if (seed) {
      for (std::size_t i = 0; i < out[k].counts.size(); ++i) {
        const int stream = static_cast<int>(k * 100000 + i);
        out[k].counts[i] = static_cast<double>(poisson_draw(out[k].counts[i], *seed, stream));
      }
    }
  }
  return out;
}

}  // namespace oamtomo
