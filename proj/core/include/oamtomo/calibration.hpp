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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "oamtomo/basis.hpp"
#include "oamtomo/hologram.hpp"

namespace oamtomo {

/// The eight numbers describing one hologram pair on the bench.
struct CalibrationParams {
  double n_max = 1.0;  // peak coincidences per accumulation window
  double w = 1.0;      // beam width
  double cx_plus = 0.0;
  double cy_plus = 0.0;
  double cx_minus = 0.0;
  double cy_minus = 0.0;
  double kx = 0.0;
  double ky = 0.0;

  static constexpr std::size_t kCount = 8;
  std::array<double, kCount> to_array() const;
  static CalibrationParams from_array(const std::array<double, kCount>& values);

  friend bool operator==(const CalibrationParams&, const CalibrationParams&) = default;
};

enum class WhichHologram { kPlus, kMinus };

std::string_view to_string(WhichHologram which);
WhichHologram parse_hologram(std::string_view text);

/// One stage scan: `hologram` moves along `axis` while the other one sits at
/// the nominal position (fixed_dx, fixed_dy). Positions are stage readings;
/// the fitted centers are added on top.
struct ScanCurve {
  WhichHologram hologram = WhichHologram::kPlus;
  Axis axis = Axis::kX;
  double fixed_dx = 1.0;
  double fixed_dy = 1.0;
  std::vector<double> positions;
  std::vector<double> counts;
};

struct CurveModelOptions {
  // Quadrature grid in units of the fitted beam width.
  double half_extent = 4.0;
  int samples = 96;
};

TransformSpec scan_transform(const CalibrationParams& params, const ScanCurve& curve,
                             double position);

/// n_max |<0|T(position)|0>|^2 at every curve position; curve.counts is ignored.
std::vector<double> model_curve(const CalibrationParams& params, const ScanCurve& curve,
                                const CurveModelOptions& options = {});

struct FitOptions {
  int max_outer_iterations = 500;
  double relative_tolerance = 1e-8;
  CurveModelOptions model;
};

struct CalibrationFit {
  CalibrationParams params;
  std::vector<double> curve_rms;         // one per input curve
  std::vector<double> residual_history;  // best residual after each outer iteration
  int outer_iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Least-squares fit of all curves by Nelder-Mead, followed by one restart
/// from the best vertex with a shrunk simplex.
CalibrationFit fit_calibration(std::span<const ScanCurve> curves,
                               const CalibrationParams& initial_guess,
                               const FitOptions& options = {});

/// Starting point read off the curves' extrema and widths; kx = ky = 0.
CalibrationParams initial_guess(std::span<const ScanCurve> curves);

/// The four scans (plus-x, plus-y, minus-x, minus-y), other hologram parked at
/// (fixed, fixed).
std::vector<ScanCurve> canonical_scan_design(std::span<const double> positions,
                                             double fixed = 1.0);

/// Fills counts from the model; adds Poisson noise when `seed` is given.
std::vector<ScanCurve> synthesize_curves(const CalibrationParams& params,
                                         std::span<const ScanCurve> design,
                                         const CurveModelOptions& options = {},
                                         std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace oamtomo
