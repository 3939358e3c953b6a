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

#include "oamtomo/formats.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "oamtomo/error.hpp"

namespace oamtomo {

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error(ErrorKind::kInvalidArgument, "cannot format number");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw Error(ErrorKind::kParse, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

long long parse_integer(std::string_view text) {
  long long value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw Error(ErrorKind::kParse, "not an integer: '" + std::string(text) + "'");
  }
  return value;
}

namespace {

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string token;
  while (in >> token) out.push_back(token);
  return out;
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

[[noreturn]] void parse_error(int line, const std::string& what) {
  throw Error(ErrorKind::kParse, "line " + std::to_string(line) + ": " + what);
}

template <typename F>
auto at_line(int line, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    parse_error(line, e.what());
  }
}

// "key = value" line; returns false for blank/comment lines.
bool split_key_value(const std::string& raw, int line, std::string& key, std::string& value) {
  const std::string text = trim(strip_comment(raw));
  if (text.empty()) return false;
  const auto eq = text.find('=');
  if (eq == std::string::npos) parse_error(line, "expected 'key = value'");
  key = trim(std::string_view(text).substr(0, eq));
  value = trim(std::string_view(text).substr(eq + 1));
  if (key.empty()) parse_error(line, "missing key");
  return true;
}

}  // namespace

void write_campaign(std::ostream& out, const Campaign& campaign) {
  if (campaign.settings.size() != campaign.records.size()) {
    throw Error(ErrorKind::kInvalidArgument, "campaign needs one record per setting");
  }
  out << "# oamtomo campaign v1\n";
  out << "# id plus_dx plus_dy minus_dx minus_dy kx ky count\n";
  for (std::size_t i = 0; i < campaign.settings.size(); ++i) {
    const ProjectionSetting& s = campaign.settings[i];
    const CountRecord& r = campaign.records[i];
    if (r.setting_id != s.id) {
      throw Error(ErrorKind::kInvalidArgument, "record order does not match settings");
    }
    const TransformSpec& t = s.transform;
    out << s.id << ' ' << format_double(t.plus.dx) << ' ' << format_double(t.plus.dy) << ' '
        << format_double(t.minus.dx) << ' ' << format_double(t.minus.dy) << ' '
        << format_double(t.kx) << ' ' << format_double(t.ky) << ' ' << r.n << '\n';
  }
}

Campaign read_campaign(std::istream& in) {
  Campaign campaign;
  std::set<int> ids;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto tok = tokens_of(strip_comment(raw));
    if (tok.empty()) continue;
    if (tok.size() != 8) {
      parse_error(line, "expected 8 fields (id, 4 displacements, kx, ky, count), got " +
                            std::to_string(tok.size()));
    }
    const long long id = at_line(line, [&] { return parse_integer(tok[0]); });
    double v[6];
    for (int k = 0; k < 6; ++k) v[k] = at_line(line, [&] { return parse_double(tok[k + 1]); });
    const long long count = at_line(line, [&] { return parse_integer(tok[7]); });
    if (count < 0) parse_error(line, "negative count " + tok[7]);
    if (id < 0 || id > std::numeric_limits<int>::max()) parse_error(line, "bad setting id");
    if (!ids.insert(static_cast<int>(id)).second) {
      parse_error(line, "duplicate setting id " + tok[0]);
    }
    campaign.settings.push_back(
        {static_cast<int>(id), make_transform(v[0], v[1], v[2], v[3], v[4], v[5]), 2.0});
    campaign.records.push_back({static_cast<int>(id), count, std::nullopt});
  }
  return campaign;
}

void write_scan_curve(std::ostream& out, const ScanCurve& curve) {
  out << "# oamtomo scan-curve v1\n";
  out << "hologram = " << to_string(curve.hologram) << '\n';
  out << "axis = " << to_string(curve.axis) << '\n';
  out << "fixed = " << format_double(curve.fixed_dx) << ' ' << format_double(curve.fixed_dy)
      << '\n';
  out << "# position count\n";
  for (std::size_t i = 0; i < curve.positions.size(); ++i) {
    out << format_double(curve.positions[i]) << ' '
        << format_double(i < curve.counts.size() ? curve.counts[i] : 0.0) << '\n';
  }
}

ScanCurve read_scan_curve(std::istream& in) {
  ScanCurve curve;
  bool have_hologram = false, have_axis = false, have_fixed = false;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(strip_comment(raw));
    if (text.empty()) continue;
    if (text.find('=') != std::string::npos) {
      std::string key, value;
      split_key_value(raw, line, key, value);
      if (key == "hologram") {
        curve.hologram = at_line(line, [&] { return parse_hologram(value); });
        have_hologram = true;
      } else if (key == "axis") {
        curve.axis = at_line(line, [&] { return parse_axis(value); });
        have_axis = true;
      } else if (key == "fixed") {
        const auto tok = tokens_of(value);
        if (tok.size() != 2) parse_error(line, "fixed needs two numbers");
        curve.fixed_dx = at_line(line, [&] { return parse_double(tok[0]); });
        curve.fixed_dy = at_line(line, [&] { return parse_double(tok[1]); });
        have_fixed = true;
      } else {
        parse_error(line, "unknown header key '" + key + "'");
      }
      continue;
    }
    const auto tok = tokens_of(text);
    if (tok.size() != 2) parse_error(line, "expected 'position count'");
    curve.positions.push_back(at_line(line, [&] { return parse_double(tok[0]); }));
    curve.counts.push_back(at_line(line, [&] { return parse_double(tok[1]); }));
  }
  if (!have_hologram || !have_axis || !have_fixed) {
    throw Error(ErrorKind::kParse, "scan curve header needs hologram, axis and fixed");
  }
  return curve;
}

namespace {

constexpr std::array<const char*, CalibrationParams::kCount> kParamNames = {
    "n_max", "w", "cx_plus", "cy_plus", "cx_minus", "cy_minus", "kx", "ky"};

}  // namespace

void write_calibration_params(std::ostream& out, const CalibrationParams& params) {
  const auto values = params.to_array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << kParamNames[i] << " = " << format_double(values[i]) << '\n';
  }
}

CalibrationParams read_calibration_params(std::istream& in) {
  std::map<std::string, double> seen;
  std::string raw, key, value;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!split_key_value(raw, line, key, value)) continue;
    if (std::find(kParamNames.begin(), kParamNames.end(), key) == kParamNames.end()) {
      parse_error(line, "unknown parameter '" + key + "'");
    }
    seen[key] = at_line(line, [&] { return parse_double(value); });
  }
  std::array<double, CalibrationParams::kCount> values{};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto it = seen.find(kParamNames[i]);
    if (it == seen.end()) {
      throw Error(ErrorKind::kParse, std::string("missing parameter '") + kParamNames[i] + "'");
    }
    values[i] = it->second;
  }
  return CalibrationParams::from_array(values);
}

void write_transfer_scan(std::ostream& out, const TransferScan& scan) {
  out << "# oamtomo transfer-scan v1\n";
  out << "# charge " << scan.charge << " axis " << to_string(scan.axis) << '\n';
  out << "# displacement p_zero p_plus p_minus outer_weight\n";
  for (std::size_t i = 0; i < scan.displacements.size(); ++i) {
    const auto& p = scan.inner_projections[i];
    out << format_double(scan.displacements[i]) << ' ' << format_double(p[0]) << ' '
        << format_double(p[1]) << ' ' << format_double(p[2]) << ' '
        << format_double(scan.outer_weight[i]) << '\n';
  }
}

std::string basis_manifest_json(const EnlargedBasis& basis) {
  nlohmann::ordered_json j;
  j["format"] = "oamtomo-basis-v1";
  j["grid"] = {{"half_extent", basis.grid().half_extent()},
               {"samples", basis.grid().samples_per_axis()}};
  j["scan"] = {{"half_range", basis.scan().half_range}, {"step", basis.scan().step}};
  j["dimension"] = basis.dim();
  auto gens = nlohmann::ordered_json::array();
  for (const BasisGenerator& g : basis.generators()) {
    gens.push_back({{"charge", g.hologram.charge},
                    {"axis", std::string(to_string(g.axis))},
                    {"dx", g.hologram.dx},
                    {"dy", g.hologram.dy},
                    {"residual_norm", g.residual_norm}});
  }
  j["generators"] = gens;
  j["gram_deviation"] = basis.gram_deviation();
  return j.dump(2) + "\n";
}

BasisManifest parse_basis_manifest(std::string_view json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    if (j.at("format").get<std::string>() != "oamtomo-basis-v1") {
      throw Error(ErrorKind::kParse, "unsupported basis manifest format");
    }
    BasisManifest m;
    m.half_extent = j.at("grid").at("half_extent").get<double>();
    m.samples = j.at("grid").at("samples").get<int>();
    m.scan.half_range = j.at("scan").at("half_range").get<double>();
    m.scan.step = j.at("scan").at("step").get<double>();
    for (const auto& g : j.at("generators")) {
      BasisGenerator gen;
      gen.hologram.charge = g.at("charge").get<int>();
      gen.hologram.dx = g.at("dx").get<double>();
      gen.hologram.dy = g.at("dy").get<double>();
      gen.axis = parse_axis(g.at("axis").get<std::string>());
      gen.residual_norm = g.at("residual_norm").get<double>();
      m.generators.push_back(gen);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("basis manifest: ") + e.what());
  }
}

EnlargedBasis basis_from_manifest(const BasisManifest& manifest) {
  const Grid grid = make_grid(manifest.half_extent, manifest.samples);
  return build_basis_from_generators(grid, manifest.generators, manifest.scan);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw Error(ErrorKind::kIo, "write to '" + path + "' failed");
}

}  // namespace oamtomo
