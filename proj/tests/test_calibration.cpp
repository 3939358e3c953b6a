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

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oamtomo/calibration.hpp"
#include "oamtomo/error.hpp"

namespace oamtomo {
namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no oamtomo::Error thrown";
  return ErrorKind::kIo;
}

const CalibrationParams kTruth{800.0, 1.1, 0.12, -0.08, -0.1, 0.05, 0.3, -0.2};
const CurveModelOptions kCoarse{4.0, 48};

ScanCurve single_point(WhichHologram h, Axis a, double fixed_dx, double fixed_dy, double position) {
  ScanCurve c;
  c.hologram = h;
  c.axis = a;
  c.fixed_dx = fixed_dx;
  c.fixed_dy = fixed_dy;
  c.positions = {position};
  return c;
}

std::vector<double> positions(double half, double step) {
  std::vector<double> out;
  for (double x = -half; x <= half + 1e-12; x += step) out.push_back(x);
  return out;
}

TEST(CalibrationParams, ArrayRoundTrip) {
  EXPECT_EQ(CalibrationParams::from_array(kTruth.to_array()), kTruth);
  EXPECT_EQ(kTruth.to_array()[0], 800.0);
  EXPECT_EQ(kTruth.to_array()[7], -0.2);
}

// A dislocation sits at center + stage coordinate, so stage coordinate -c
// puts a hologram on the beam axis.
CalibrationParams on_axis_params() {
  CalibrationParams p = kTruth;
  p.cy_plus = p.cy_minus = 0.0;
  p.kx = p.ky = 0.0;
  return p;
}

TEST(ModelCurve, CoincidentDislocationsGivePeakRate) {
  const CalibrationParams p = on_axis_params();
  const ScanCurve c = single_point(WhichHologram::kPlus, Axis::kX, -p.cx_minus, 0.0, -p.cx_plus);
  EXPECT_NEAR(model_curve(p, c)[0], p.n_max, 1e-6 * p.n_max);
  // Off axis but still coincident: the phases cancel pointwise as well.
  const ScanCurve off = single_point(WhichHologram::kMinus, Axis::kX, p.cx_minus + 0.4 - p.cx_plus, 0.0,
                                     0.4);
  EXPECT_NEAR(model_curve(p, off)[0], p.n_max, 1e-6 * p.n_max);
}

TEST(ModelCurve, OnAxisHologramWithPartnerParkedIsDark) {
  const CalibrationParams p = on_axis_params();
  const ScanCurve plus = single_point(WhichHologram::kPlus, Axis::kX, 12.0, 0.0, -p.cx_plus);
  const ScanCurve minus = single_point(WhichHologram::kMinus, Axis::kX, 12.0, 0.0, -p.cx_minus);
  EXPECT_LT(model_curve(p, plus)[0], 2e-3 * p.n_max);
  EXPECT_LT(model_curve(p, minus)[0], 2e-3 * p.n_max);
}

TEST(ModelCurve, BothParkedLeavesRampAttenuation) {
  // Far dislocations are constant phases; the ramp alone scales the Gaussian
  // overlap by exp(-k^2 w^2 / 8), i.e. intensity exp(-k^2 w^2 / 4).
  CalibrationParams p = kTruth;
  p.ky = 0.0;
  const ScanCurve c = single_point(WhichHologram::kPlus, Axis::kX, 2000.0, 0.0, -2000.0);
  const double k = p.kx;
  EXPECT_NEAR(model_curve(p, c)[0] / p.n_max, std::exp(-k * k * p.w * p.w / 4.0), 1e-5);
}

TEST(ModelCurve, TranslationInvariant) {
  CalibrationParams p = kTruth;
  p.kx = p.ky = 0.0;
  const double delta = 0.3;
  for (Axis axis : {Axis::kX, Axis::kY}) {
    for (WhichHologram h : {WhichHologram::kPlus, WhichHologram::kMinus}) {
      ScanCurve c;
      c.hologram = h;
      c.axis = axis;
      c.positions = positions(1.5, 0.25);
      CalibrationParams shifted = p;
      ScanCurve moved = c;
      if (axis == Axis::kX) {
        shifted.cx_plus += delta;
        shifted.cx_minus += delta;
        moved.fixed_dx -= delta;
      } else {
        shifted.cy_plus += delta;
        shifted.cy_minus += delta;
        moved.fixed_dy -= delta;
      }
      for (double& x : moved.positions) x -= delta;
      const auto a = model_curve(p, c, kCoarse);
      const auto b = model_curve(shifted, moved, kCoarse);
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9 * p.n_max);
    }
  }
}

TEST(ModelCurve, RejectsNonPositiveScale) {
  CalibrationParams p = kTruth;
  p.w = 0.0;
  EXPECT_EQ(kind_of([&] { model_curve(p, single_point(WhichHologram::kPlus, Axis::kX, 1, 1, 0)); }),
            ErrorKind::kInvalidArgument);
}

TEST(FitCalibration, NoiselessRoundTrip) {
  const auto design = canonical_scan_design(positions(2.5, 0.25));
  const auto curves = synthesize_curves(kTruth, design, kCoarse);
  auto guess = kTruth.to_array();
  for (std::size_t i = 0; i < guess.size(); ++i) guess[i] *= (i % 2 == 0) ? 1.1 : 0.9;
  FitOptions options;
  options.model = kCoarse;
  const CalibrationFit fit = fit_calibration(curves, CalibrationParams::from_array(guess), options);
  const auto got = fit.params.to_array(), want = kTruth.to_array();
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(got[i], want[i], 1e-3 * std::abs(want[i])) << "parameter " << i;
  }
  ASSERT_EQ(fit.curve_rms.size(), 4u);
  for (double rms : fit.curve_rms) EXPECT_LT(rms, 1e-2);
  EXPECT_TRUE(fit.converged);
  const auto& h = fit.residual_history;
  ASSERT_FALSE(h.empty());
  for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1]);
}

TEST(FitCalibration, InitialGuessHeuristics) {
  const auto design = canonical_scan_design(positions(3.0, 0.1));
  const auto curves = synthesize_curves(kTruth, design, kCoarse);
  const CalibrationParams g = initial_guess(curves);
  double peak = 0.0;
  for (const auto& c : curves) peak = std::max(peak, *std::max_element(c.counts.begin(), c.counts.end()));
  EXPECT_EQ(g.n_max, peak);
  EXPECT_EQ(g.kx, 0.0);
  EXPECT_EQ(g.ky, 0.0);
  EXPECT_NEAR(g.cx_plus, kTruth.cx_plus, 0.35);
  EXPECT_NEAR(g.cy_minus, kTruth.cy_minus, 0.35);
  EXPECT_NEAR(g.w, kTruth.w, 0.3);
}

TEST(FitCalibration, NeedsEveryHologramAxisPair) {
  auto design = canonical_scan_design(positions(1.0, 0.5));
  auto curves = synthesize_curves(kTruth, design, kCoarse);
  std::vector<ScanCurve> x_only;
  for (const auto& c : curves) {
    if (c.axis == Axis::kX) x_only.push_back(c);
  }
  EXPECT_EQ(kind_of([&] { fit_calibration(x_only, kTruth); }), ErrorKind::kUnderdeterminedFit);
  std::vector<ScanCurve> three(curves.begin(), curves.begin() + 3);
  EXPECT_EQ(kind_of([&] { fit_calibration(three, kTruth); }), ErrorKind::kUnderdeterminedFit);
}

TEST(FitCalibration, RejectsBadData) {
  auto curves = synthesize_curves(kTruth, canonical_scan_design(positions(1.0, 0.5)), kCoarse);
  auto nan = curves;
  nan[2].counts[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(kind_of([&] { fit_calibration(nan, kTruth); }), ErrorKind::kInvalidData);
  auto negative = curves;
  negative[0].counts[0] = -1.0;
  EXPECT_EQ(kind_of([&] { fit_calibration(negative, kTruth); }), ErrorKind::kInvalidData);
  auto unordered = curves;
  std::swap(unordered[1].positions[0], unordered[1].positions[1]);
  EXPECT_EQ(kind_of([&] { fit_calibration(unordered, kTruth); }), ErrorKind::kInvalidData);
}

TEST(SynthesizeCurves, NoiseIsSeededPoisson) {
  const auto design = canonical_scan_design(positions(1.0, 0.5));
  const auto clean = synthesize_curves(kTruth, design, kCoarse);
  const auto a = synthesize_curves(kTruth, design, kCoarse, 3);
  const auto b = synthesize_curves(kTruth, design, kCoarse, 3);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].counts, b[k].counts);
    for (std::size_t i = 0; i < a[k].counts.size(); ++i) {
      EXPECT_EQ(a[k].counts[i], std::round(a[k].counts[i]));
      EXPECT_NEAR(a[k].counts[i], clean[k].counts[i], 6.0 * std::sqrt(clean[k].counts[i]) + 6.0);
    }
  }
}

TEST(WhichHologram, RoundTrip) {
  EXPECT_EQ(parse_hologram(to_string(WhichHologram::kPlus)), WhichHologram::kPlus);
  EXPECT_EQ(parse_hologram(to_string(WhichHologram::kMinus)), WhichHologram::kMinus);
}

}  // namespace
}  // namespace oamtomo
