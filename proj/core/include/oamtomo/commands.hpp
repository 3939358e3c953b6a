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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oamtomo/basis.hpp"
#include "oamtomo/calibration.hpp"
#include "oamtomo/error.hpp"
#include "oamtomo/formats.hpp"
#include "oamtomo/measurement.hpp"
#include "oamtomo/mle.hpp"

namespace oamtomo {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitWarningsEscalated = 3;
inline constexpr int kExitPipelineStageBase = 40;

/// Stable exit code for a library error (10..22).
int exit_code(ErrorKind kind);

enum class PipelineStage {
  kBasis = 1,
  kPrepare,
  kSettings,
  kSimulate,
  kReconstruct,
  kProjectInner,
  kAnalyze,
  kReport,
};

std::string_view to_string(PipelineStage stage);

/// Wraps the first failure of a pipeline run; exit code is
/// kExitPipelineStageBase + stage.
class StageError : public Error {
 public:
  StageError(PipelineStage stage, const Error& cause);
  PipelineStage stage() const { return stage_; }
  int exit_code() const { return kExitPipelineStageBase + static_cast<int>(stage_); }

 private:
  PipelineStage stage_;
};

enum class SettingsDesign { kRandom, kMinimalInner };

/// Everything a simulated campaign needs. Text form is "key = value" lines
/// (see config_template()).
struct CampaignConfig {
  double grid_half_extent = kReferenceHalfExtent;
  int grid_samples = kReferenceSamples;
  ScanParameters scan;
  SettingsDesign design = SettingsDesign::kRandom;
  int settings_count = 2400;
  std::uint64_t settings_seed = 1;
  double settings_range = kDefaultSettingRange;
  std::uint64_t count_seed = 1;
  double mean_flux = 500.0;
  std::string preparation = "a";
  std::optional<std::array<Complex, 3>> alice;  // overrides `preparation`
  ReconstructionOptions reconstruction;
  std::string output_dir = ".";
};

std::string config_template();
CampaignConfig parse_config(std::string_view text);
void validate(const CampaignConfig& config);

/// Alice's choice described by the config.
PreparationChoice preparation_of(const CampaignConfig& config);

// --- scan -------------------------------------------------------------------

struct ScanRequest {
  int charge = 1;
  Axis axis = Axis::kX;
  ScanParameters range;
  Grid grid = reference_grid();
};

struct ScanSummary {
  TransferScan scan;
  std::vector<double> outer_maxima;  // displacements of local maxima
  std::pair<double, double> max_transfer{0.0, 0.0};
};

/// Throws kDegenerate for charge 0.
ScanSummary cmd_scan(const ScanRequest& request);
std::string scan_summary_line(const ScanSummary& summary);

// --- reconstruct ------------------------------------------------------------

struct ReconstructionReport {
  Reconstruction full;
  InnerProjection inner;
  StateAnalysis analysis;
  int rank_full = 0;
  int rank_inner = 0;
  PoissonResidual poisson;
  std::vector<std::string> warnings;
};

/// Reconstruction + inner projection + analysis on a campaign, using the
/// projectors recomputed from `basis`.
ReconstructionReport reconstruct_campaign(const Campaign& campaign, const EnlargedBasis& basis,
                                          const ReconstructionOptions& options);

std::string report_json(const ReconstructionReport& report);

ReconstructionReport cmd_reconstruct(const std::string& campaign_path,
                                     const std::string& manifest_path,
                                     const ReconstructionOptions& options,
                                     const std::string& report_path);

// --- simulate / pipeline ------------------------------------------------------

struct SimulationOutputs {
  EnlargedBasis basis;
  Eigen::VectorXcd bob_state;
  Campaign campaign;
  std::vector<ProjectorState> projectors;
};

/// Basis, remote preparation, settings and counts. Writes campaign.txt and
/// basis.json into config.output_dir when `write_files` is set.
SimulationOutputs cmd_simulate(const CampaignConfig& config, bool write_files = true);

struct PipelineResult {
  SimulationOutputs simulation;
  ReconstructionReport report;
  double fidelity = 0.0;  // inner reconstruction vs intended Bob state
};

/// Full run; additionally writes report.json and summary.json. Failures are
/// rethrown as StageError.
PipelineResult cmd_pipeline(const CampaignConfig& config, bool write_files = true);

std::string summary_json(const PipelineResult& result);

// --- calibrate ----------------------------------------------------------------

struct CalibrationOutputs {
  CalibrationFit fit;
  std::vector<ScanCurve> curves;
};

/// Throws kUnderdeterminedFit unless the four curves cover both axes of both
/// holograms.
CalibrationOutputs cmd_calibrate(const std::vector<std::string>& curve_paths,
                                 const std::string& guess_path,
                                 const std::string& params_out_path,
                                 const std::string& residual_report_path);

std::string calibration_report(const CalibrationOutputs& outputs);

}  // namespace oamtomo
