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

#include "oamtomo/commands.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace oamtomo {

int exit_code(ErrorKind kind) { return 10 + static_cast<int>(kind); }

std::string_view to_string(PipelineStage stage) {
  switch (stage) {
    case PipelineStage::kBasis: return "basis";
    case PipelineStage::kPrepare: return "prepare";
    case PipelineStage::kSettings: return "settings";
    case PipelineStage::kSimulate: return "simulate";
    case PipelineStage::kReconstruct: return "reconstruct";
    case PipelineStage::kProjectInner: return "project-inner";
    case PipelineStage::kAnalyze: return "analyze";
    case PipelineStage::kReport: return "report";
  }
  return "unknown";
}

StageError::StageError(PipelineStage stage, const Error& cause)
    : Error(cause.kind(), "[" + std::string(to_string(stage)) + "] " + cause.what()),
      stage_(stage) {}

namespace {

template <typename F>
auto staged(PipelineStage stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

nlohmann::ordered_json matrix_json(const Eigen::MatrixXcd& m) {
  auto re = nlohmann::ordered_json::array();
  auto im = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto rr = nlohmann::ordered_json::array();
    auto ri = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"real", re}, {"imag", im}};
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> phases_over_pi(const std::vector<double>& phases) {
  std::vector<double> out;
  for (double p : phases) out.push_back(p / std::numbers::pi);
  return out;
}

}  // namespace

std::string config_template() {
  return R"(# oamtomo campaign configuration
# Lengths are in units of the beam width w. Every key is optional; the values
# below are the defaults.

# Sampling grid spanning [-grid_extent, grid_extent]^2.
grid_extent = 4
grid_samples = 256

# Transfer scans that select the eight outer basis vectors.
scan_range = 3
scan_step = 0.05

# Projection settings: "random" draws seeded uniform displacements in
# [-settings_range, settings_range]^2 for each hologram; "minimal9" uses nine
# fixed settings spanning the inner 3x3 operator space.
settings_design = random
settings = 2400
settings_seed = 1
settings_range = 1.5

# Poisson count simulation: mean detected qutrits per setting.
flux = 500
count_seed = 1

# Bob's intended state: a, b, c, suppressed or zero.
preparation = a
# Alternatively Alice's projection as modulus/phase pairs (phase in units of
# pi) over |0>, |+1>, |-1>. Overrides `preparation` when present.
# alice = 0.7071 0 0.7071 0 0 0

# Reconstruction.
dilution = 0.5
max_iter = 5000
tol = 1e-9

output_dir = .
)";
}

CampaignConfig parse_config(std::string_view text) {
  CampaignConfig c;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::kParse, "config line " + std::to_string(line) + ": " + what);
  };
  auto number = [&](const std::string& v) {
    try {
      return parse_double(v);
    } catch (const Error& e) {
      fail(e.what());
    }
    return 0.0;
  };
  auto integer = [&](const std::string& v) {
    try {
      return parse_integer(v);
    } catch (const Error& e) {
      fail(e.what());
    }
    return 0LL;
  };
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key == "grid_extent") c.grid_half_extent = number(value);
    else if (key == "grid_samples") c.grid_samples = static_cast<int>(integer(value));
    else if (key == "scan_range") c.scan.half_range = number(value);
    else if (key == "scan_step") c.scan.step = number(value);
    else if (key == "settings_design") {
      if (value == "random") c.design = SettingsDesign::kRandom;
      else if (value == "minimal9") c.design = SettingsDesign::kMinimalInner;
      else fail("settings_design must be random or minimal9");
    }
    else if (key == "settings") c.settings_count = static_cast<int>(integer(value));
    else if (key == "settings_seed") c.settings_seed = static_cast<std::uint64_t>(integer(value));
    else if (key == "settings_range") c.settings_range = number(value);
    else if (key == "flux") c.mean_flux = number(value);
    else if (key == "count_seed") c.count_seed = static_cast<std::uint64_t>(integer(value));
    else if (key == "preparation") c.preparation = value;
    else if (key == "alice") {
      std::istringstream vs(value);
      std::vector<std::string> tok;
      for (std::string t; vs >> t;) tok.push_back(t);
      if (tok.size() != 6) fail("alice needs three modulus/phase pairs");
      std::array<Complex, 3> a;
      for (int i = 0; i < 3; ++i) {
        a[i] = std::polar(number(tok[2 * i]), number(tok[2 * i + 1]) * std::numbers::pi);
      }
      c.alice = a;
    }
    else if (key == "dilution") c.reconstruction.dilution = number(value);
    else if (key == "max_iter") c.reconstruction.max_iterations = static_cast<int>(integer(value));
    else if (key == "tol") c.reconstruction.log_likelihood_tolerance = number(value);
    else if (key == "output_dir") c.output_dir = value;
    else fail("unknown key '" + key + "'");
  }
  validate(c);
  return c;
}

void validate(const CampaignConfig& c) {
  make_grid(c.grid_half_extent, c.grid_samples);
  scan_displacements(c.scan);
  if (c.settings_count < 1) throw Error(ErrorKind::kInvalidArgument, "settings must be >= 1");
  if (!(c.settings_range > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "settings_range must be > 0");
  }
  if (!(c.mean_flux > 0.0)) throw Error(ErrorKind::kInvalidArgument, "flux must be > 0");
  if (!c.alice && !named_bob_state(c.preparation)) {
    throw Error(ErrorKind::kInvalidArgument, "unknown preparation '" + c.preparation + "'");
  }
  validate(c.reconstruction);
}

PreparationChoice preparation_of(const CampaignConfig& config) {
  if (config.alice) return PreparationChoice::normalized(*config.alice);
  const auto bob = named_bob_state(config.preparation);
  if (!bob) throw Error(ErrorKind::kInvalidArgument, "unknown preparation '" + config.preparation + "'");
  return PreparationChoice::for_bob_state(*bob);
}

// --- scan -------------------------------------------------------------------

ScanSummary cmd_scan(const ScanRequest& request) {
  if (request.charge == 0) {
    throw Error(ErrorKind::kDegenerate, "charge 0 hologram is the identity; nothing to scan");
  }
  const auto displacements = scan_displacements(request.range);
  ScanSummary summary;
  summary.scan = transfer_scan(request.charge, request.axis, displacements, request.grid);
  for (std::size_t i : local_maxima(summary.scan.outer_weight)) {
    summary.outer_maxima.push_back(summary.scan.displacements[i]);
  }
  summary.max_transfer = max_transfer_positions(summary.scan);
  return summary;
}

std::string scan_summary_line(const ScanSummary& summary) {
  std::ostringstream out;
  out << "charge " << summary.scan.charge << " axis " << to_string(summary.scan.axis) << ": "
      << summary.outer_maxima.size() << " outer-weight maxima at";
  for (double d : summary.outer_maxima) out << ' ' << format_double(d);
  out << "; max transfer at " << format_double(summary.max_transfer.first) << " and "
      << format_double(summary.max_transfer.second);
  return out.str();
}

// --- reconstruct ------------------------------------------------------------

ReconstructionReport reconstruct_campaign(const Campaign& campaign, const EnlargedBasis& basis,
                                          const ReconstructionOptions& options) {
  ReconstructionReport report{.full = {DensityMatrix::maximally_mixed(basis.dim()), {}},
                              .inner = {DensityMatrix::maximally_mixed(3), 0.0},
                              .analysis = {},
                              .rank_full = 0,
                              .rank_inner = 0,
                              .poisson = {},
                              .warnings = {}};
  const int dim = basis.dim();
  const auto [projectors, data] = staged(PipelineStage::kReconstruct, [&] {
    auto transforms = transforms_of(campaign.settings);
    auto proj = projector_states(transforms, basis);
    auto d = make_measurement_data(proj, campaign.records, dim);
    return std::make_pair(std::move(proj), std::move(d));
  });
  report.rank_full = completeness_rank(projectors, dim);
  report.rank_inner = completeness_rank(projectors, EnlargedBasis::kInnerDim);
  if (report.rank_full < dim * dim) {
    report.warnings.push_back("completeness rank " + std::to_string(report.rank_full) + " < " +
                              std::to_string(dim * dim) +
                              " on the full space: reconstruction is underdetermined");
  }
  if (report.rank_inner < EnlargedBasis::kInnerDim * EnlargedBasis::kInnerDim) {
    report.warnings.push_back("completeness rank " + std::to_string(report.rank_inner) +
                              " < 9 on the inner space");
  }
  report.full = staged(PipelineStage::kReconstruct, [&] { return reconstruct(data, options); });
  if (!report.full.diagnostics.converged) {
    report.warnings.push_back("reconstruction did not converge within " +
                              std::to_string(options.max_iterations) + " iterations");
  }
  report.inner = staged(PipelineStage::kProjectInner, [&] { return project_inner(report.full.rho); });
  report.analysis = staged(PipelineStage::kAnalyze, [&] { return analyze(report.inner.rho); });
  report.poisson = poisson_residual(report.full.rho, data);
  return report;
}

std::string report_json(const ReconstructionReport& r) {
  nlohmann::ordered_json j;
  j["format"] = "oamtomo-reconstruction-v1";
  j["dimension"] = r.full.rho.dim();
  j["completeness_rank"] = {{"full", r.rank_full}, {"inner", r.rank_inner}};
  j["density_matrix"] = matrix_json(r.full.rho.matrix());
  j["inner"] = {
      {"density_matrix", matrix_json(r.inner.rho.matrix())},
      {"discarded_probability", r.inner.discarded_probability},
      {"eigenvalues", to_vector(r.analysis.eigenvalues)},
      {"max_eigenvector",
       {{"amplitudes", r.analysis.amplitudes}, {"phases_over_pi", phases_over_pi(r.analysis.phases)}}},
      {"purity", r.analysis.purity},
      {"degenerate", r.analysis.degenerate}};
  const auto& d = r.full.diagnostics;
  j["diagnostics"] = {{"iterations", d.iterations},
                      {"converged", d.converged},
                      {"log_likelihood", d.log_likelihood_trace.back()},
                      {"extremal_residual", d.extremal_residual},
                      {"regularization_events", d.regularization_events},
                      {"step_halvings", d.step_halvings},
                      {"extrapolations", d.extrapolations},
                      {"poisson_residual_mean", r.poisson.mean},
                      {"poisson_residual_settings", r.poisson.settings_used},
                      {"log_likelihood_trace", d.log_likelihood_trace}};
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

ReconstructionReport cmd_reconstruct(const std::string& campaign_path,
                                     const std::string& manifest_path,
                                     const ReconstructionOptions& options,
                                     const std::string& report_path) {
  validate(options);
  std::istringstream campaign_text(read_text_file(campaign_path));
  const Campaign campaign = read_campaign(campaign_text);
  if (campaign.settings.empty()) throw Error(ErrorKind::kInvalidData, "campaign has no records");
  const EnlargedBasis basis = basis_from_manifest(parse_basis_manifest(read_text_file(manifest_path)));
  ReconstructionReport report = reconstruct_campaign(campaign, basis, options);
  if (!report_path.empty()) write_text_file(report_path, report_json(report));
  return report;
}

// --- simulate / pipeline ------------------------------------------------------

SimulationOutputs cmd_simulate(const CampaignConfig& config, bool write_files) {
  validate(config);
  EnlargedBasis basis = staged(PipelineStage::kBasis, [&] {
    return build_enlarged_basis(make_grid(config.grid_half_extent, config.grid_samples),
                                config.scan);
  });
  const auto [bob, rho] = staged(PipelineStage::kPrepare, [&] {
    const PreparationChoice choice = preparation_of(config);
    return std::make_pair(remote_state_vector(choice), remote_prepare(choice));
  });
  std::vector<ProjectionSetting> settings = staged(PipelineStage::kSettings, [&] {
    return config.design == SettingsDesign::kRandom
               ? default_settings(config.settings_count, config.settings_seed,
                                  config.settings_range)
               : minimal_inner_settings();
  });
  SimulationOutputs out{std::move(basis), bob, {}, {}};
  staged(PipelineStage::kSimulate, [&] {
    out.projectors = projector_states(transforms_of(settings), out.basis);
    out.campaign.records =
        simulate_counts(rho, settings, out.projectors, config.mean_flux, config.count_seed);
    for (auto& r : out.campaign.records) r.p_model.reset();
    out.campaign.settings = std::move(settings);
  });
  if (write_files) {
    staged(PipelineStage::kReport, [&] {
      std::ostringstream campaign;
      write_campaign(campaign, out.campaign);
      write_text_file(join_path(config.output_dir, "campaign.txt"), campaign.str());
      write_text_file(join_path(config.output_dir, "basis.json"), basis_manifest_json(out.basis));
    });
  }
  return out;
}

PipelineResult cmd_pipeline(const CampaignConfig& config, bool write_files) {
  SimulationOutputs sim = cmd_simulate(config, write_files);
  ReconstructionReport report =
      reconstruct_campaign(sim.campaign, sim.basis, config.reconstruction);
  PipelineResult result{std::move(sim), std::move(report), 0.0};
  result.fidelity = result.report.inner.rho.fidelity(
      result.simulation.bob_state.head(EnlargedBasis::kInnerDim));
  if (write_files) {
    staged(PipelineStage::kReport, [&] {
      write_text_file(join_path(config.output_dir, "report.json"), report_json(result.report));
      write_text_file(join_path(config.output_dir, "summary.json"), summary_json(result));
    });
  }
  return result;
}

std::string summary_json(const PipelineResult& result) {
  const auto& r = result.report;
  const Eigen::VectorXcd bob = result.simulation.bob_state.head(EnlargedBasis::kInnerDim);
  std::vector<double> amps, phases;
  for (Eigen::Index i = 0; i < bob.size(); ++i) {
    amps.push_back(std::abs(bob[i]));
    phases.push_back(std::arg(bob[i]) / std::numbers::pi);
  }
  nlohmann::ordered_json j;
  j["format"] = "oamtomo-pipeline-summary-v1";
  j["intended_state"] = {{"amplitudes", amps}, {"phases_over_pi", phases}};
  j["settings"] = result.simulation.campaign.settings.size();
  j["fidelity"] = result.fidelity;
  j["lambda_max"] = r.analysis.eigenvalues[0];
  j["purity"] = r.analysis.purity;
  j["discarded_probability"] = r.inner.discarded_probability;
  j["completeness_rank"] = {{"full", r.rank_full}, {"inner", r.rank_inner}};
  j["iterations"] = r.full.diagnostics.iterations;
  j["converged"] = r.full.diagnostics.converged;
  j["poisson_residual_mean"] = r.poisson.mean;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

// --- calibrate ----------------------------------------------------------------

CalibrationOutputs cmd_calibrate(const std::vector<std::string>& curve_paths,
                                 const std::string& guess_path,
                                 const std::string& params_out_path,
                                 const std::string& residual_report_path) {
  if (curve_paths.size() != 4) {
    throw Error(ErrorKind::kUnderdeterminedFit,
                "calibration needs exactly four scan curves, got " +
                    std::to_string(curve_paths.size()));
  }
  CalibrationOutputs out;
  for (const auto& path : curve_paths) {
    std::istringstream in(read_text_file(path));
    try {
      out.curves.push_back(read_scan_curve(in));
    } catch (const Error& e) {
      throw Error(e.kind(), path + ": " + e.what());
    }
  }
  CalibrationParams guess;
  if (guess_path.empty()) {
    guess = initial_guess(out.curves);
  } else {
    std::istringstream in(read_text_file(guess_path));
    guess = read_calibration_params(in);
  }
  out.fit = fit_calibration(out.curves, guess);
  if (!params_out_path.empty()) {
    std::ostringstream params;
    write_calibration_params(params, out.fit.params);
    write_text_file(params_out_path, params.str());
  }
  if (!residual_report_path.empty()) {
    write_text_file(residual_report_path, calibration_report(out));
  }
  return out;
}

std::string calibration_report(const CalibrationOutputs& outputs) {
  std::ostringstream out;
  out << "# oamtomo calibration residuals\n";
  out << "# hologram axis fixed_dx fixed_dy points rms\n";
  for (std::size_t i = 0; i < outputs.curves.size(); ++i) {
    const ScanCurve& c = outputs.curves[i];
    out << to_string(c.hologram) << ' ' << to_string(c.axis) << ' ' << format_double(c.fixed_dx)
        << ' ' << format_double(c.fixed_dy) << ' ' << c.positions.size() << ' '
        << format_double(outputs.fit.curve_rms[i]) << '\n';
  }
  out << "# outer_iterations " << outputs.fit.outer_iterations << " evaluations "
      << outputs.fit.evaluations << " converged " << (outputs.fit.converged ? "yes" : "no")
      << '\n';
  return out.str();
}

}  // namespace oamtomo
