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

// oamtomo: qutrit tomography from displaced-hologram OAM projections.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oamtomo/commands.hpp"

namespace {

using namespace oamtomo;

// Flags that may override a config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> settings_seed;
  std::optional<int> grid_samples;
  std::optional<double> grid_extent;
  std::optional<int> settings;
  std::optional<double> flux;
  std::optional<double> dilution;
  std::optional<int> max_iter;
  std::optional<double> tol;
  std::optional<std::string> preparation;
  std::optional<std::string> design;
  std::optional<std::string> out_dir;
};

void add_grid_flags(CLI::App* app, Overrides& o) {
  app->add_option("--grid-samples", o.grid_samples, "Grid samples per axis");
  app->add_option("--grid-extent", o.grid_extent, "Grid half extent in units of w");
}

void add_reconstruction_flags(CLI::App* app, Overrides& o) {
  app->add_option("--dilution", o.dilution, "Initial dilution step in (0, 1]");
  app->add_option("--max-iter", o.max_iter, "Maximum likelihood iterations");
  app->add_option("--tol", o.tol, "Log-likelihood improvement tolerance");
}

void add_campaign_flags(CLI::App* app, Overrides& o) {
  add_grid_flags(app, o);
  add_reconstruction_flags(app, o);
  app->add_option("--seed", o.seed, "Count simulation seed");
  app->add_option("--settings-seed", o.settings_seed, "Setting generation seed");
  app->add_option("--settings", o.settings, "Number of random projection settings");
  app->add_option("--flux", o.flux, "Mean detected qutrits per setting");
  app->add_option("--preparation", o.preparation, "Named Bob state: a, b, c, suppressed, zero");
  app->add_option("--design", o.design, "Settings design: random or minimal9")
      ->check(CLI::IsMember({"random", "minimal9"}));
  app->add_option("--out-dir", o.out_dir, "Directory for output files");
}

ReconstructionOptions apply(const Overrides& o, ReconstructionOptions r) {
  if (o.dilution) r.dilution = *o.dilution;
  if (o.max_iter) r.max_iterations = *o.max_iter;
  if (o.tol) r.log_likelihood_tolerance = *o.tol;
  return r;
}

CampaignConfig load_config(const std::string& path, const Overrides& o) {
  CampaignConfig c = path.empty() ? CampaignConfig{} : parse_config(read_text_file(path));
  if (o.seed) c.count_seed = *o.seed;
  if (o.settings_seed) c.settings_seed = *o.settings_seed;
  if (o.grid_samples) c.grid_samples = *o.grid_samples;
  if (o.grid_extent) c.grid_half_extent = *o.grid_extent;
  if (o.settings) c.settings_count = *o.settings;
  if (o.flux) c.mean_flux = *o.flux;
  if (o.preparation) {
    c.preparation = *o.preparation;
    c.alice.reset();
  }
  if (o.design) {
    c.design = *o.design == "minimal9" ? SettingsDesign::kMinimalInner : SettingsDesign::kRandom;
  }
  if (o.out_dir) c.output_dir = *o.out_dir;
  c.reconstruction = apply(o, c.reconstruction);
  validate(c);
  return c;
}

int finish(const std::vector<std::string>& warnings, bool strict) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return strict && !warnings.empty() ? kExitWarningsEscalated : kExitOk;
}

void print_state_line(const ReconstructionReport& r) {
  std::cout << "lambda_max " << format_double(r.analysis.eigenvalues[0]) << " purity "
            << format_double(r.analysis.purity) << " discarded "
            << format_double(r.inner.discarded_probability) << " rank " << r.rank_full << '/'
            << r.rank_inner << " iterations " << r.full.diagnostics.iterations << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qutrit state tomography with displaced OAM holograms"};
  app.require_subcommand(1);
  app.fallthrough();
  bool strict = false;
  app.add_flag("--strict", strict, "Exit with code 3 when any warning is issued");

  // template
  auto* tmpl = app.add_subcommand("template", "Print a documented starter config");

  // scan
  auto* scan = app.add_subcommand("scan", "Transfer scan of one displaced hologram");
  int charge = 1;
  std::string axis = "x";
  ScanParameters range;
  std::string scan_out;
  Overrides scan_o;
  scan->add_option("--charge", charge, "Hologram charge");
  scan->add_option("--axis", axis, "Displacement axis (x or y)")
      ->check(CLI::IsMember({"x", "y"}));
  scan->add_option("--range", range.half_range, "Scan half range in units of w");
  scan->add_option("--step", range.step, "Scan step in units of w");
  scan->add_option("-o,--out", scan_out, "Plot-data file (default: stdout)");
  add_grid_flags(scan, scan_o);

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "Fit the eight calibration parameters");
  std::vector<std::string> curve_paths;
  std::string guess_path, params_out, residual_out;
  calibrate->add_option("curves", curve_paths, "Scan-curve files")->required();
  calibrate->add_option("--guess", guess_path, "Initial-guess parameter file");
  calibrate->add_option("-o,--out", params_out, "Fitted parameter file (default: stdout)");
  calibrate->add_option("--residuals", residual_out, "Residual report file");

  // simulate / pipeline
  auto* simulate = app.add_subcommand("simulate", "Generate settings and simulated counts");
  auto* pipeline = app.add_subcommand("pipeline", "Simulate and reconstruct end to end");
  std::string config_path;
  Overrides campaign_o;
  for (auto* sub : {simulate, pipeline}) {
    sub->add_option("-c,--config", config_path, "Config file (default: built-in defaults)")
        ->check(CLI::ExistingFile);
    add_campaign_flags(sub, campaign_o);
  }

  // reconstruct
  auto* recon = app.add_subcommand("reconstruct", "Blind reconstruction of a campaign file");
  std::string campaign_path, manifest_path, report_path;
  Overrides recon_o;
  recon->add_option("--campaign", campaign_path, "Campaign file")->required();
  recon->add_option("--basis", manifest_path, "Basis manifest")->required();
  recon->add_option("-o,--out", report_path, "Report file (default: stdout)");
  add_reconstruction_flags(recon, recon_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*tmpl) {
      std::cout << config_template();
      return kExitOk;
    }
    if (*scan) {
      ScanRequest req;
      req.charge = charge;
      req.axis = parse_axis(axis);
      req.range = range;
      req.grid = make_grid(scan_o.grid_extent.value_or(kReferenceHalfExtent),
                           scan_o.grid_samples.value_or(kReferenceSamples));
      const ScanSummary summary = cmd_scan(req);
      std::ostringstream data;
      write_transfer_scan(data, summary.scan);
      if (scan_out.empty()) {
        std::cout << data.str();
      } else {
        write_text_file(scan_out, data.str());
      }
      std::cerr << scan_summary_line(summary) << '\n';
      return kExitOk;
    }
    if (*calibrate) {
      const CalibrationOutputs out = cmd_calibrate(curve_paths, guess_path, params_out, residual_out);
      if (params_out.empty()) write_calibration_params(std::cout, out.fit.params);
      std::cerr << calibration_report(out);
      std::vector<std::string> warnings;
      if (!out.fit.converged) warnings.push_back("calibration fit did not converge");
      return finish(warnings, strict);
    }
    if (*simulate) {
      const CampaignConfig config = load_config(config_path, campaign_o);
      const SimulationOutputs out = cmd_simulate(config);
      std::cout << "wrote " << out.campaign.records.size() << " records to "
                << config.output_dir << '\n';
      return kExitOk;
    }
    if (*pipeline) {
      const CampaignConfig config = load_config(config_path, campaign_o);
      const PipelineResult result = cmd_pipeline(config);
      std::cout << "fidelity " << format_double(result.fidelity) << ' ';
      print_state_line(result.report);
      return finish(result.report.warnings, strict);
    }
    if (*recon) {
      ReconstructionOptions options = apply(recon_o, ReconstructionOptions{});
      const ReconstructionReport report =
          cmd_reconstruct(campaign_path, manifest_path, options, report_path);
      if (report_path.empty()) {
        std::cout << report_json(report);
      } else {
        print_state_line(report);
      }
      return finish(report.warnings, strict);
    }
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
