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

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "oamtomo/basis.hpp"
#include "oamtomo/calibration.hpp"
#include "oamtomo/measurement.hpp"

namespace oamtomo {

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);
/// Strict parse of a whole token; throws kParse.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

// Campaign files: one whitespace-separated record per line,
//   id plus_dx plus_dy minus_dx minus_dy kx ky count
// '#' starts a comment. Doubles are written in shortest round-trip form, so
// write -> read reproduces every record exactly.
struct Campaign {
  std::vector<ProjectionSetting> settings;
  std::vector<CountRecord> records;
};

void write_campaign(std::ostream& out, const Campaign& campaign);
/// Throws Error(kParse) with the offending line number.
Campaign read_campaign(std::istream& in);

// Scan-curve files: "key = value" header lines (hologram, axis, fixed), then
// "position count" rows.
void write_scan_curve(std::ostream& out, const ScanCurve& curve);
ScanCurve read_scan_curve(std::istream& in);

// Calibration parameter files: one "name = value" line per parameter.
void write_calibration_params(std::ostream& out, const CalibrationParams& params);
CalibrationParams read_calibration_params(std::istream& in);

/// Columns: displacement, |<0|f>|^2, |<+1|f>|^2, |<-1|f>|^2, outer weight.
void write_transfer_scan(std::ostream& out, const TransferScan& scan);

/// JSON manifest of the enlarged basis: grid, scan step, generator positions
/// and Gram-Schmidt residuals.
std::string basis_manifest_json(const EnlargedBasis& basis);

struct BasisManifest {
  double half_extent = 0.0;
  int samples = 0;
  ScanParameters scan;
  std::vector<BasisGenerator> generators;
};

BasisManifest parse_basis_manifest(std::string_view json_text);
/// Rebuilds the basis from the recorded generators (no rescan).
EnlargedBasis basis_from_manifest(const BasisManifest& manifest);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view contents);

}  // namespace oamtomo
