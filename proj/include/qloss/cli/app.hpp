// Copyright 2026 The qloss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qloss/channels/choi.hpp"
#include "qloss/core/common.hpp"
#include "qloss/io/matrix_json.hpp"
#include "qloss/io/report_header.hpp"
#include "qloss/lattice/percolation.hpp"
#include "qloss/protocol/detection_sweep.hpp"
#include "qloss/protocol/run.hpp"
#include "qloss/tomography/process_tomography.hpp"
#include "qloss/tomography/table_report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qloss::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInvariant = 3;

/// Environment variable holding the default master seed.
inline constexpr const char* kSeedEnv = "QLOSS_SEED";

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + text + "'");
  }
  if (used != t.size() || !std::isfinite(v)) throw ConfigError("not a number: '" + text + "'");
  return v;
}

/// Angle in units of pi: "0.5pi", "pi/2", "-pi", "3pi/4", or a plain number
/// of radians.
inline double parse_angle(const std::string& text) {
  std::string t = trim(text);
  if (t.empty()) throw ConfigError("empty angle");
  const auto pi = t.find("pi");
  if (pi == std::string::npos) return parse_real(t);
  std::string coeff = t.substr(0, pi);
  std::string rest = t.substr(pi + 2);
  double c = 1.0;
  if (coeff == "-") {
    c = -1.0;
  } else if (!coeff.empty() && coeff != "+") {
    if (coeff.back() == '*') coeff.pop_back();
    c = parse_real(coeff);
  }
  double den = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') throw ConfigError("malformed angle '" + text + "'");
    den = parse_real(rest.substr(1));
    if (den == 0.0) throw ConfigError("zero denominator in '" + text + "'");
  }
  return c * kPi / den;
}

/// "start:stop:count" (inclusive, evenly spaced) or a comma list.
inline std::vector<double> parse_grid(const std::string& text, const std::function<double(const std::string&)>& item) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("range must be start:stop:count, got '" + text + "'");
    const double a = item(parts[0]);
    const double b = item(parts[1]);
    const double n = parse_real(parts[2]);
    if (n < 1 || n != std::floor(n)) throw ConfigError("range count must be a positive integer");
    const int count = static_cast<int>(n);
    if (count == 1) return {a};
    for (int i = 0; i < count; ++i) out.push_back(a + (b - a) * i / (count - 1));
    return out;
  }
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ',')) {
    if (trim(p).empty()) continue;
    out.push_back(item(p));
  }
  if (out.empty()) throw ConfigError("empty grid");
  return out;
}

inline std::vector<double> parse_angle_grid(const std::string& text) { return parse_grid(text, parse_angle); }
inline std::vector<double> parse_real_grid(const std::string& text) { return parse_grid(text, parse_real); }

/// Logical-state aliases 0_L, 1_L, +i_L or an angle.
inline double parse_alpha(const std::string& text) {
  const std::string t = trim(text);
  for (const auto& [name, alpha] : default_preps())
    if (t == name) return alpha;
  if (t.find('_') != std::string::npos) throw ConfigError("unknown alpha alias '" + text + "'");
  try {
    return parse_angle(t);
  } catch (const ConfigError&) {
    throw ConfigError("unknown alpha alias '" + text + "'");
  }
}

/// "off" or "pqnd=<p>" (depolarizing mixture on the loss branch).
inline NoiseModel parse_noise(const std::string& text) {
  const std::string t = trim(text);
  if (t == "off" || t == "ideal") return NoiseModel::off();
  const std::string key = "pqnd=";
  if (t.rfind(key, 0) != 0) throw ConfigError("noise must be 'off' or 'pqnd=<p>', got '" + text + "'");
  const double p = parse_real(t.substr(key.size()));
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("pqnd must lie in [0, 1]");
  return NoiseModel::depolarizing(p);
}

inline std::string fmt(double v) { return format_number(v); }
inline std::string fmt_pi(double angle) { return format_number(angle / kPi); }

inline std::string join(const std::vector<double>& v, bool angles) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + (angles ? fmt_pi(v[i]) + "pi" : fmt(v[i]));
  return s;
}

/// Config file: one key=value per line, keys are long flag names without
/// dashes, '#' starts a comment. Returns "--key=value" tokens.
inline std::vector<std::string> read_config_file(const std::string& path, std::string* command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(n) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(n) + ": empty key");
    if (key == "command") {
      if (command) *command = value;
      continue;
    }
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

inline std::uint64_t parse_seed(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("seed must be a non-negative integer, got '" + text + "'");
  }
  try {
    return std::stoull(t);
  } catch (const std::exception&) {
    throw ConfigError("seed out of range: '" + text + "'");
  }
}

/// Writes `content` to `path`, or to `out` for "-" or empty.
inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << content;
}

// ---------------------------------------------------------------- commands

struct DetectSweepArgs {
  std::string phi_grid = "0:pi:21";
  int shots = 200;
  int reg = 5;
  double addressing_error = 0.0;
  bool exact = false;
  std::string output;
};

inline std::string cmd_detect_sweep(const DetectSweepArgs& a, RunConfig cfg) {
  const auto phis = parse_angle_grid(a.phi_grid);
  if (!(a.addressing_error >= 0.0 && a.addressing_error <= 1.0)) throw ConfigError("addressing-error must lie in [0, 1]");
  const SweepRegister reg = a.reg == 2 ? SweepRegister::kTwoIon : SweepRegister::kFiveIon;
  cfg.set("phi-grid", join(phis, true));
  cfg.set("shots", a.exact ? "0" : std::to_string(a.shots));
  cfg.set("register", std::to_string(a.reg));
  cfg.set("addressing-error", fmt(a.addressing_error));
  cfg.set("exact", a.exact ? "true" : "false");
  std::vector<SweepRow> rows;
  if (a.exact) {
    for (double phi : phis) rows.push_back(detection_exact(phi, reg, a.addressing_error));
  } else {
    rows = detection_sweep(phis, {a.shots, cfg.seed, reg, a.addressing_error});
  }
  std::ostringstream out;
  out << report_header(cfg);
  out << "phi_pi,shots,induced_loss,direct_loss,detected_loss,detected_std,false_positive,false_negative,efficiency\n";
  for (const auto& r : rows) {
    const double sd = r.shots > 0 ? std::sqrt(r.detected_loss * (1 - r.detected_loss) / r.shots) : 0.0;
    out << fmt_pi(r.phi) << ',' << r.shots << ',' << fmt(induced_loss(r.phi)) << ',' << fmt(r.direct_loss) << ','
        << fmt(r.detected_loss) << ',' << fmt(sd) << ',' << fmt(r.false_positive) << ',' << fmt(r.false_negative)
        << ',' << fmt(r.efficiency()) << '\n';
  }
  return out.str();
}

struct ProtocolArgs {
  std::string alpha = "pi/2";
  std::string phi;
  std::string phi_grid = "0.1pi,0.2pi,0.5pi";
  int shots = 0;
  bool paper_shots = false;
  bool ideal = false;
  std::string noise = "off";
  bool noise_no_loss = false;
  std::string mode = "toolbox";
  std::string table;
  std::string engine = "analytic";
  int iterations = 100;
  std::string output;
};

inline nlohmann::ordered_json branch_json(const BranchSummary& b) {
  nlohmann::ordered_json j;
  j["branch"] = b.branch;
  j["probability"] = b.probability;
  nlohmann::ordered_json o = nlohmann::ordered_json::object();
  for (const auto& v : b.observables) o[v.name] = v.value;
  j["observables"] = o;
  return j;
}

inline StabilizerMode parse_mode(const std::string& m) {
  if (m == "toolbox") return StabilizerMode::kToolbox;
  if (m == "exact") return StabilizerMode::kExact;
  throw ConfigError("mode must be exact or toolbox");
}

/// JSON lines: header, one analytic line per phi, then one line per shot.
/// The optional table goes to a separate CSV.
inline std::pair<std::string, std::string> cmd_protocol(const ProtocolArgs& a, RunConfig cfg) {
  const double alpha = parse_alpha(a.alpha);
  const auto phis = a.phi.empty() ? parse_angle_grid(a.phi_grid) : std::vector<double>{parse_angle(a.phi)};
  NoiseModel noise = a.ideal ? NoiseModel::off() : parse_noise(a.noise);
  if (a.ideal && trim(a.noise) != "off") throw ConfigError("--ideal conflicts with --noise");
  noise.also_no_loss = a.noise_no_loss && noise.active();
  const StabilizerMode mode = parse_mode(a.mode);
  if (a.shots < 0) throw ConfigError("shots must be non-negative");
  if (a.engine != "analytic" && a.engine != "tomography") throw ConfigError("engine must be analytic or tomography");
  if (a.iterations < 2) throw ConfigError("iterations must be at least 2");
  cfg.set("alpha", fmt_pi(alpha) + "pi");
  cfg.set("phi-grid", join(phis, true));
  cfg.set("shots", a.paper_shots ? "paper" : std::to_string(a.shots));
  cfg.set("noise", noise.active() ? "pqnd=" + fmt(noise.p_qnd) : "off");
  cfg.set("noise-no-loss", noise.also_no_loss ? "true" : "false");
  cfg.set("mode", to_string(mode));
  if (!a.table.empty()) {
    cfg.set("engine", a.engine);
    cfg.set("iterations", std::to_string(a.iterations));
  }

  std::ostringstream out;
  out << nlohmann::ordered_json{{"header", header_json(cfg)}}.dump() << '\n';
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const AnalyticResult r = analytic_protocol({alpha}, phis[i], noise);
    nlohmann::ordered_json j;
    j["type"] = "analytic";
    j["alpha_pi"] = alpha / kPi;
    j["phi_pi"] = phis[i] / kPi;
    j["no_loss"] = branch_json(r.no_loss);
    j["loss"] = branch_json(r.loss);
    if (noise.active()) j["mixing_probability"] = mixing_probability(noise.p_qnd, phis[i]);
    out << j.dump() << '\n';
  }
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const int shots = a.paper_shots ? paper_shots(phis[i]) : a.shots;
    if (shots == 0) continue;
    ProtocolOptions opt;
    opt.shots = shots;
    opt.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(i)});
    opt.noise = noise;
    opt.mode = mode;
    const ProtocolResult res = run_protocol({alpha}, phis[i], opt);
    for (const auto& rec : res.records) {
      nlohmann::ordered_json j;
      j["type"] = "shot";
      j["phi_index"] = i;
      const nlohmann::ordered_json body = rec.to_json();
      for (const auto& [k, v] : body.items()) j[k] = v;
      out << j.dump() << '\n';
    }
  }

  std::string table;
  if (!a.table.empty()) {
    ReportOptions ro;
    ro.noise = noise;
    ro.engine = a.engine == "tomography" ? ReportEngine::kTomography : ReportEngine::kAnalytic;
    ro.shots = a.paper_shots ? 0 : a.shots;
    ro.seed = cfg.seed;
    ro.iterations = a.iterations;
    std::string name = fmt_pi(alpha) + "pi";
    for (const auto& [n, v] : default_preps())
      if (std::abs(v - alpha) < 1e-15) name = n;
    if (ro.engine == ReportEngine::kTomography && ro.shots == 0 && !a.paper_shots) {
      throw ConfigError("the tomography engine needs --shots or --paper-shots");
    }
    table = report_header(cfg) + report_csv(table_report({{name, alpha}}, phis, ro));
  }
  return {out.str(), table};
}

struct ChoiArgs {
  std::string phi_grid = "0.10pi,0.53pi,0.81pi";
  int shots = 0;
  int iterations = 20;
  std::string output;
};

inline std::string cmd_choi(const ChoiArgs& a, RunConfig cfg) {
  const auto phis = parse_angle_grid(a.phi_grid);
  if (a.shots < 0) throw ConfigError("shots must be non-negative");
  if (a.shots > 0 && a.iterations < 2) throw ConfigError("iterations must be at least 2");
  cfg.set("phi-grid", join(phis, true));
  cfg.set("shots", std::to_string(a.shots));
  if (a.shots > 0) cfg.set("iterations", std::to_string(a.iterations));
  nlohmann::ordered_json results = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < phis.size(); ++i) {
    for (int branch = 0; branch < 2; ++branch) {
      nlohmann::ordered_json j;
      j["phi_pi"] = phis[i] / kPi;
      j["branch"] = branch;
      const ChoiMatrix target = branch == 0 ? ideal_no_loss_choi(phis[i]) : ideal_loss_choi(phis[i]);
      const std::uint64_t seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(branch)});
      try {
        const ProcessTomographyResult res = process_tomography(phis[i], branch, {a.shots, seed});
        j["status"] = "ok";
        j["branch_fraction"] = res.branch_fraction;
        nlohmann::ordered_json empty = nlohmann::ordered_json::array();
        for (int k = 0; k < 4; ++k)
          if (res.empty_input[static_cast<std::size_t>(k)]) empty.push_back(process_input_names()[static_cast<std::size_t>(k)]);
        j["empty_inputs"] = empty;
        j["choi"] = choi_to_json(res.choi);
        j["target"] = choi_to_json(target);
        j["max_abs_error"] = (res.choi.matrix - target.matrix).cwiseAbs().maxCoeff();
        try {
          const double f = process_fidelity(res.choi, target);
          j["process_fidelity"] = f;
          if (a.shots > 0) {
            std::vector<double> fs;
            for (int it = 0; it < a.iterations; ++it) {
              const auto rs = process_tomography(phis[i], branch, {a.shots, derive_seed(seed, {1, static_cast<std::uint64_t>(it)})});
              fs.push_back(process_fidelity(rs.choi, target));
            }
            double mean = 0.0;
            for (double x : fs) mean += x;
            mean /= static_cast<double>(fs.size());
            double var = 0.0;
            for (double x : fs) var += (x - mean) * (x - mean);
            j["fidelity_std"] = std::sqrt(var / static_cast<double>(fs.size() - 1));
          }
        } catch (const UndefinedExpectation&) {
          j["process_fidelity"] = nullptr;
        }
      } catch (const UndefinedExpectation& e) {
        j["status"] = "empty";
        j["message"] = e.what();
        j["target"] = choi_to_json(target);
      }
      results.push_back(std::move(j));
    }
  }
  nlohmann::ordered_json doc;
  doc["header"] = header_json(cfg);
  doc["results"] = std::move(results);
  return doc.dump(2) + "\n";
}

struct PercolationArgs {
  std::string sizes = "16,32";
  std::string p_grid = "0.40:0.60:21";
  int samples = 2000;
  std::string boundary = "planar";
  std::string output;
};

inline std::string cmd_percolation(const PercolationArgs& a, RunConfig cfg) {
  std::vector<int> sizes;
  for (double v : parse_real_grid(a.sizes)) {
    if (v != std::floor(v) || v < 2) throw ConfigError("lattice sizes must be integers >= 2");
    sizes.push_back(static_cast<int>(v));
  }
  const auto ps = parse_real_grid(a.p_grid);
  for (double p : ps)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("loss rates must lie in [0, 1]");
  if (a.samples < 100) throw ConfigError("samples must be at least 100");
  Boundary b = Boundary::kPlanar;
  if (a.boundary == "toroidal") {
    b = Boundary::kToroidal;
  } else if (a.boundary != "planar") {
    throw ConfigError("boundary must be planar or toroidal");
  }
  std::string sz;
  for (std::size_t i = 0; i < sizes.size(); ++i) sz += (i ? "," : "") + std::to_string(sizes[i]);
  cfg.set("L", sz);
  cfg.set("p", join(ps, false));
  cfg.set("samples", std::to_string(a.samples));
  cfg.set("boundary", to_string(b));
  const PercolationResult r = percolation_threshold(sizes, ps, {a.samples, cfg.seed, b});
  std::string out = report_header(cfg) + percolation_csv(r);
  out += "# threshold " + (r.threshold ? fmt(*r.threshold) : std::string("none")) + "\n";
  return out;
}

struct StabilizerSweepArgs {
  std::string phi_grid = "0.1pi:pi:10";
  std::string alpha = "pi/2";
  int shots = 200;
  std::string mode = "toolbox";
  std::string output;
};

inline std::string cmd_stabilizer_sweep(const StabilizerSweepArgs& a, RunConfig cfg) {
  const auto phis = parse_angle_grid(a.phi_grid);
  const double alpha = parse_alpha(a.alpha);
  const StabilizerMode mode = parse_mode(a.mode);
  if (a.shots < 0) throw ConfigError("shots must be non-negative");
  cfg.set("phi-grid", join(phis, true));
  cfg.set("alpha", fmt_pi(alpha) + "pi");
  cfg.set("shots", std::to_string(a.shots));
  cfg.set("mode", to_string(mode));
  static const char* const names[] = {"S1X", "S1Z", "S2Z"};
  std::ostringstream out;
  out << report_header(cfg) << "phi_pi,shots,no_loss_shots,S1X_closed_form";
  for (const char* n : names) out << ',' << n << "_analytic," << n << "_sampled," << n << "_std";
  out << '\n';
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const double phi = phis[i];
    const AnalyticResult r = analytic_protocol({alpha}, phi);
    std::map<std::string, std::pair<double, int>> sums;
    int kept = 0;
    if (a.shots > 0) {
      ProtocolOptions opt;
      opt.shots = a.shots;
      opt.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(i)});
      opt.mode = mode;
      for (const auto& rec : run_protocol({alpha}, phi, opt).records) {
        if (rec.loss) continue;
        ++kept;
        for (const auto& [n, v] : rec.samples) {
          sums[n].first += v;
          sums[n].second += 1;
        }
      }
    }
    out << fmt_pi(phi) << ',' << a.shots << ',' << kept << ',' << fmt(4 * std::cos(phi / 2) / (3 + std::cos(phi)));
    for (const char* n : names) {
      out << ',' << (r.no_loss.populated() ? fmt(r.no_loss.value(n)) : "");
      if (kept > 0) {
        const double m = sums[n].first / kept;
        out << ',' << fmt(m) << ',' << fmt(std::sqrt(std::max(0.0, 1 - m * m) / kept));
      } else {
        out << ",,";
      }
    }
    out << '\n';
  }
  return out.str();
}

// -------------------------------------------------------------------- app

/// Runs the CLI. Exit codes: 0 success, 2 configuration error, 3 internal
/// invariant violation.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> commands = {"detect-sweep", "protocol", "choi", "percolation",
                                                    "stabilizer-sweep"};
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    // Config-file tokens go right after the subcommand; later flags override.
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config") {
        if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
        config_path = args[i + 1];
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        break;
      }
      if (args[i].rfind("--config=", 0) == 0) {
        config_path = args[i].substr(9);
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        break;
      }
    }
    if (!config_path.empty()) {
      std::string command;
      const auto tokens = read_config_file(config_path, &command);
      auto pos = std::find_if(args.begin(), args.end(),
                              [](const std::string& s) { return std::find(commands.begin(), commands.end(), s) != commands.end(); });
      if (pos == args.end()) {
        if (command.empty()) throw ConfigError("no subcommand given");
        args.insert(args.begin(), command);
        pos = args.begin();
      }
      args.insert(pos + 1, tokens.begin(), tokens.end());
    }
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }

  CLI::App app{"qloss: loss detection and correction experiments"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_help;
  app.add_option("--config", config_help, "key=value file mirroring the long flags");
  std::string seed_text;
  app.add_option("--seed", seed_text, std::string("Master seed (default: $") + kSeedEnv + " or 0)");

  const auto add_common = [&](CLI::App* sub, std::string& output) {
    sub->add_option("--seed", seed_text, "Master seed");
    sub->add_option("-o,--output", output, "Output file (default stdout)");
  };

  DetectSweepArgs ds;
  auto* s_ds = app.add_subcommand("detect-sweep", "Detected versus induced loss over a phi grid");
  s_ds->add_option("--phi-grid", ds.phi_grid, "start:stop:count or list, angles like 0.5pi");
  s_ds->add_option("--shots", ds.shots, "Shots per point")->check(CLI::PositiveNumber);
  s_ds->add_option("--register", ds.reg, "2 or 5 ions")->check(CLI::IsMember({2, 5}));
  s_ds->add_option("--addressing-error", ds.addressing_error, "Failure probability per hide pulse");
  s_ds->add_flag("--exact", ds.exact, "Exact rates instead of sampling");
  add_common(s_ds, ds.output);

  ProtocolArgs pr;
  auto* s_pr = app.add_subcommand("protocol", "Detection, shrunk stabilizer and frame update");
  s_pr->add_option("--alpha", pr.alpha, "Logical state angle or alias 0_L, 1_L, +i_L");
  s_pr->add_option("--phi", pr.phi, "Single loss angle");
  s_pr->add_option("--phi-grid", pr.phi_grid, "Loss angles");
  s_pr->add_option("--shots", pr.shots, "Trajectory shots per phi (0: analytic only)");
  s_pr->add_flag("--paper-shots", pr.paper_shots, "1000/600/200 shots at 0.1pi/0.2pi/0.5pi");
  s_pr->add_flag("--ideal", pr.ideal, "No noise");
  s_pr->add_option("--noise", pr.noise, "off or pqnd=<p>");
  s_pr->add_flag("--noise-no-loss", pr.noise_no_loss, "Apply the noise to the no-loss branch too");
  s_pr->add_option("--mode", pr.mode, "Shrunk stabilizer: exact or toolbox");
  s_pr->add_option("--table", pr.table, "Write the table CSV here");
  s_pr->add_option("--engine", pr.engine, "Table engine: analytic or tomography");
  s_pr->add_option("--iterations", pr.iterations, "Resampling iterations");
  add_common(s_pr, pr.output);

  ChoiArgs ch;
  auto* s_ch = app.add_subcommand("choi", "Process tomography of the detection unit");
  s_ch->add_option("--phi-grid", ch.phi_grid, "Loss angles");
  s_ch->add_option("--shots", ch.shots, "Shots per input and basis (0: exact)");
  s_ch->add_option("--iterations", ch.iterations, "Resampling iterations for the fidelity error");
  add_common(s_ch, ch.output);

  PercolationArgs pc;
  auto* s_pc = app.add_subcommand("percolation", "Survival curves and threshold under iid loss");
  s_pc->add_option("--L", pc.sizes, "Lattice sizes, e.g. 16,32");
  s_pc->add_option("--p", pc.p_grid, "Loss rates: start:stop:count or list");
  s_pc->add_option("--samples", pc.samples, "Samples per point");
  s_pc->add_option("--boundary", pc.boundary, "planar or toroidal");
  add_common(s_pc, pc.output);

  StabilizerSweepArgs ss;
  auto* s_ss = app.add_subcommand("stabilizer-sweep", "No-loss stabilizers over a phi grid");
  s_ss->add_option("--phi-grid", ss.phi_grid, "Loss angles");
  s_ss->add_option("--alpha", ss.alpha, "Logical state angle or alias");
  s_ss->add_option("--shots", ss.shots, "Trajectory shots per phi");
  s_ss->add_option("--mode", ss.mode, "exact or toolbox");
  add_common(s_ss, ss.output);

  std::vector<const char*> cargv = {argv[0]};
  for (const auto& a : args) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig cfg;
    if (!seed_text.empty()) {
      cfg.seed = parse_seed(seed_text);
    } else if (const char* env = std::getenv(kSeedEnv)) {
      cfg.seed = parse_seed(env);
    }
    if (s_ds->parsed()) {
      cfg.command = "detect-sweep";
      emit(ds.output, cmd_detect_sweep(ds, cfg), out);
    } else if (s_pr->parsed()) {
      cfg.command = "protocol";
      const auto [lines, table] = cmd_protocol(pr, cfg);
      emit(pr.output, lines, out);
      if (!pr.table.empty()) emit(pr.table, table, out);
    } else if (s_ch->parsed()) {
      cfg.command = "choi";
      emit(ch.output, cmd_choi(ch, cfg), out);
    } else if (s_pc->parsed()) {
      cfg.command = "percolation";
      emit(pc.output, cmd_percolation(pc, cfg), out);
    } else if (s_ss->parsed()) {
      cfg.command = "stabilizer-sweep";
      emit(ss.output, cmd_stabilizer_sweep(ss, cfg), out);
    }
  } catch (const InvariantViolation& e) {
    err << "internal invariant violated: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace qloss::cli
